use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("duplicate atom id `{0}`")]
    DuplicateAtomId(String),
    #[error("unknown atom id `{0}`")]
    UnknownAtomId(String),
    #[error("atom `{id}`: {message}")]
    InvalidAtom { id: String, message: String },
    #[error("no atom carries positive weight μ·ω²")]
    NoPositiveWeight,
    #[error("frame has no atoms")]
    EmptyFrame,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("measure spaces differ: {0}")]
    MeasureSpaceMismatch(String),
    #[error("not a frame: lower bound {lower:e} is at or below the invertibility floor {floor:e}")]
    NotAFrame { lower: f64, floor: f64 },
    #[error("frame is not Parseval: ‖S − I‖ = {gap:e} exceeds {tol:e}")]
    NotParseval { gap: f64, tol: f64 },
    #[error("frame is not {lambda}-tight: ‖S − λI‖ = {gap:e} exceeds {tol:e}")]
    NotTight { lambda: f64, gap: f64, tol: f64 },
    #[error("weights must be real for this check")]
    NonRealWeights,
    #[error("not an alternate dual: residual {residual:e} exceeds {tol:e}")]
    NotAlternateDual { residual: f64, tol: f64 },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("invalid frame file: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
