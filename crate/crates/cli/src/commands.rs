use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gfusion::duality::{alternate_dual_lower_bound, canonical_dual, default_alternate_tol, is_alternate_dual, parsevalize, AlternateDualBound, AlternateDualStatus};
use gfusion::gen::{self, FrameKind, GenConfig};
use gfusion::identities::{run_pair_suite, run_suite};
use gfusion::linalg::{max_abs, LinalgError};
use gfusion::operators::frame_operator;
use gfusion::pairs::{analyze_pair, perturbation_check, resolution_witness, verify_resolution, PairAnalysis, PerturbationReport, ResolutionOutcome, ResolutionVerification};
use gfusion::{CMatrix, CVector, CheckSuiteResult, Complex64, GFusionFrame, ScalarKind, SubsetMask, SuiteConfig, Tolerances};
use serde::Serialize;

use crate::format::{frame_from_json, frame_to_json, to_json, FormatError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_NOT_A_FRAME: u8 = 4;
pub const EXIT_CHECK_FAILED: u8 = 5;

/// Tolerance on `‖S_dual − S⁻¹‖` and `‖S_P − I‖` before a transformed frame is written.
const TRANSFORM_TOL: f64 = 1e-9;
/// `B − A ≤ TIGHT_REL · B` counts as tight in `analyze`.
const TIGHT_REL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] gfusion::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(gfusion::Error::NotAFrame { .. }) => EXIT_NOT_A_FRAME,
            CliError::Core(gfusion::Error::Linalg(LinalgError::SingularOperator { .. })) => EXIT_NOT_A_FRAME,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Core(e.into())
    }
}

/// What a command prints and how it exits when it runs to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gfusion", version, about = "Build, transform and verify g-fusion frames on finite measure spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random frame file.
    Gen(GenArgs),
    /// Print the frame bounds of a frame file.
    Analyze(AnalyzeArgs),
    /// Run the identity and inequality suite on a frame file.
    Check(CheckArgs),
    /// Write the canonical dual frame.
    Dual(TransformArgs),
    /// Write the Parseval frame obtained with S^{-1/2}.
    Parsevalize(TransformArgs),
    /// Analyze the pair operator of two families over the same measure space.
    Pair(PairArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Random,
    Parseval,
    Tight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalarArg {
    Real,
    Complex,
}

impl From<ScalarArg> for ScalarKind {
    fn from(s: ScalarArg) -> Self {
        match s {
            ScalarArg::Real => ScalarKind::Real,
            ScalarArg::Complex => ScalarKind::Complex,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub atoms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = KindArg::Random)]
    pub kind: KindArg,
    /// Tight constant, required with `--kind tight`.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = ScalarArg::Real)]
    pub scalar: ScalarArg,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated atom ids used as X₁ in every trial.
    #[arg(long)]
    pub subset: Option<String>,
    #[arg(long, default_value_t = gfusion::identities::DEFAULT_TOL_REL)]
    pub tol_rel: f64,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Spread trials over threads; the report is identical either way.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub path: PathBuf,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub v: PathBuf,
    pub w: PathBuf,
    /// Certify a resolution of the identity with K = S_FG⁻¹.
    #[arg(long)]
    pub check_resolution: bool,
    /// Certify W as a frame through ‖I − S_FG‖ < 1.
    #[arg(long)]
    pub perturbation: bool,
    /// User-supplied λ₁ for the perturbation hypothesis (needs --lambda2).
    #[arg(long, requires = "lambda2", allow_negative_numbers = true)]
    pub lambda1: Option<f64>,
    #[arg(long, requires = "lambda1", allow_negative_numbers = true)]
    pub lambda2: Option<f64>,
    /// Certify W as an alternate dual of V.
    #[arg(long)]
    pub alternate_dual: bool,
    /// Run the pair check suite.
    #[arg(long)]
    pub suite: bool,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = gfusion::identities::DEFAULT_TOL_REL)]
    pub tol_rel: f64,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Analyze(a) => cmd_analyze(&a.path),
        Command::Check(a) => cmd_check(&a),
        Command::Dual(a) => cmd_dual(&a),
        Command::Parsevalize(a) => cmd_parsevalize(&a),
        Command::Pair(a) => cmd_pair(&a),
    }
}

pub fn load_frame(path: &Path) -> Result<GFusionFrame, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    frame_from_json(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// Writes `text` to `path`, or returns it for stdout.
fn emit(text: String, path: Option<&Path>) -> Result<String, CliError> {
    match path {
        None => Ok(text),
        Some(p) => {
            fs::write(p, text).map_err(|source| CliError::Io {
                path: p.to_owned(),
                source,
            })?;
            Ok(String::new())
        }
    }
}

fn positive_tol(t: f64) -> Result<Tolerances, CliError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(CliError::Usage(format!("--tol-rel must be positive and finite, got {t}")));
    }
    Ok(Tolerances {
        rel: t,
        ..Tolerances::default()
    })
}

pub fn cmd_gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let kind = match (a.kind, a.lambda) {
        (KindArg::Tight, Some(l)) => FrameKind::Tight(l),
        (KindArg::Tight, None) => return Err(CliError::Usage("--kind tight needs --lambda".into())),
        (_, Some(_)) => return Err(CliError::Usage("--lambda only applies to --kind tight".into())),
        (KindArg::Random, None) => FrameKind::Random,
        (KindArg::Parseval, None) => FrameKind::Parseval,
    };
    let cfg = GenConfig::new(a.dim, a.atoms, a.seed).scalar(a.scalar.into()).kind(kind);
    let frame = gen::random_frame(&cfg)?;
    Ok(Outcome::ok(emit(frame_to_json(&frame), a.output.as_deref())?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub tight: bool,
    pub parseval: bool,
    /// `B/A`; `null` for a Bessel-only family.
    pub condition: Option<f64>,
    pub frame: bool,
    pub digest: String,
}

pub fn analyze(frame: &GFusionFrame) -> Result<AnalyzeReport, CliError> {
    let s = frame_operator(frame);
    let (lower, upper) = (s.min_eigenvalue()?, s.max_eigenvalue()?);
    let is_frame = lower > s.invertibility_floor()?;
    let tight = is_frame && upper - lower <= TIGHT_REL * upper;
    Ok(AnalyzeReport {
        lower,
        upper,
        tight,
        parseval: tight && (lower - 1.0).abs() <= TIGHT_REL && (upper - 1.0).abs() <= TIGHT_REL,
        condition: is_frame.then(|| upper / lower),
        frame: is_frame,
        digest: frame.digest(),
    })
}

pub fn cmd_analyze(path: &Path) -> Result<Outcome, CliError> {
    let report = analyze(&load_frame(path)?)?;
    let mut out = Outcome::ok(to_json(&report));
    if !report.frame {
        out.code = EXIT_NOT_A_FRAME;
        out.stderr = format!("not a frame: lower bound {:e}\n", report.lower);
    }
    Ok(out)
}

fn failure_summary(result: &CheckSuiteResult) -> String {
    result
        .failures()
        .map(|r| match &r.error {
            Some(e) => format!("FAIL {}: {e}\n", r.name),
            None => format!("FAIL {}: margin {:e}, tol {:e}\n", r.name, r.margin, r.tol),
        })
        .collect()
}

pub fn cmd_check(a: &CheckArgs) -> Result<Outcome, CliError> {
    let frame = load_frame(&a.path)?;
    let mask = a.subset.as_deref().map(|s| {
        SubsetMask::new(s.split(',').map(str::trim).filter(|id| !id.is_empty()))
    });
    let cfg = SuiteConfig {
        trials: a.trials,
        seed: a.seed,
        tol: positive_tol(a.tol_rel)?,
        mask,
        parallel: a.parallel,
    };
    let result = run_suite(&frame, &cfg)?;
    let stdout = emit(to_json(&result), a.report.as_deref())?;
    let code = if result.overall_pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        stdout,
        stderr: failure_summary(&result),
        code,
    })
}

fn verified_write(out: &GFusionFrame, residual: f64, what: &str, path: Option<&Path>) -> Result<Outcome, CliError> {
    if residual > TRANSFORM_TOL {
        return Ok(Outcome {
            stdout: String::new(),
            stderr: format!("{what}: verification residual {residual:e} exceeds {TRANSFORM_TOL:e}; nothing written\n"),
            code: EXIT_CHECK_FAILED,
        });
    }
    Ok(Outcome::ok(emit(frame_to_json(out), path)?))
}

pub fn cmd_dual(a: &TransformArgs) -> Result<Outcome, CliError> {
    let frame = load_frame(&a.path)?;
    let dual = canonical_dual(&frame)?;
    let target = dual.s_inverse.matrix();
    let residual = max_abs(&(frame_operator(&dual.frame).matrix() - target)) / max_abs(target).max(1.0);
    verified_write(&dual.frame, residual, "canonical dual", a.output.as_deref())
}

pub fn cmd_parsevalize(a: &TransformArgs) -> Result<Outcome, CliError> {
    let frame = load_frame(&a.path)?;
    let p = parsevalize(&frame)?;
    let n = frame.dim();
    let residual = max_abs(&(frame_operator(&p).matrix() - CMatrix::identity(n, n)));
    verified_write(&p, residual, "Parseval frame", a.output.as_deref())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ResolutionSection {
    Witness(ResolutionVerification),
    NoWitness { sigma_min: f64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternateDualSection {
    #[serde(flatten)]
    pub status: AlternateDualStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<AlternateDualBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub v_digest: String,
    pub w_digest: String,
    #[serde(flatten)]
    pub analysis: PairAnalysis,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternate_dual: Option<AlternateDualSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<CheckSuiteResult>,
}

fn basis_probes(n: usize) -> Vec<CVector> {
    (0..n)
        .map(|i| CVector::from_fn(n, |r, _| if r == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }))
        .collect()
}

pub fn cmd_pair(a: &PairArgs) -> Result<Outcome, CliError> {
    let v = load_frame(&a.v)?;
    let w = load_frame(&a.w)?;
    let tol = positive_tol(a.tol_rel)?;
    let analysis = analyze_pair(&v, &w)?;
    let mut failures = Vec::new();

    let resolution = if a.check_resolution {
        Some(match resolution_witness(&v, &w, tol.rel)? {
            ResolutionOutcome::NoWitness { sigma_min, reason } => {
                failures.push(format!("resolution: {reason}"));
                ResolutionSection::NoWitness { sigma_min, reason }
            }
            ResolutionOutcome::Witness(wit) => {
                let check = verify_resolution(&v, &w, &wit.k, tol.rel)?;
                if !check.pass {
                    failures.push(format!("resolution: residual {:e}", check.residual));
                }
                ResolutionSection::Witness(check)
            }
        })
    } else {
        None
    };

    let perturbation = if a.perturbation || a.lambda1.is_some() {
        let lambdas = a.lambda1.zip(a.lambda2);
        let r = perturbation_check(&v, &w, lambdas, &basis_probes(v.dim()))?;
        let issued = r.criterion_holds || r.hypothesis.as_ref().is_some_and(|h| h.sigma_certificate.is_some());
        if !issued {
            failures.push(format!("perturbation: ‖I − S_FG‖ = {} is not below 1", r.lambda1_star));
        } else if !r.pass() {
            failures.push("perturbation: certified bound exceeds λ_min(S_W)".into());
        }
        Some(r)
    } else {
        None
    };

    let alternate_dual = if a.alternate_dual {
        let alt_tol = default_alternate_tol(v.dim());
        let status = is_alternate_dual(&v, &w, alt_tol)?;
        let lower_bound = if status.is_dual {
            let b = alternate_dual_lower_bound(&v, &w, alt_tol)?;
            if !b.holds {
                failures.push("alternate dual: certified lower bound exceeds λ_min(S_W)".into());
            }
            Some(b)
        } else {
            failures.push(format!("alternate dual: residual {:e} exceeds {:e}", status.residual, status.tol));
            None
        };
        Some(AlternateDualSection { status, lower_bound })
    } else {
        None
    };

    let suite = if a.suite {
        let cfg = SuiteConfig {
            trials: a.trials,
            seed: a.seed,
            tol,
            mask: None,
            parallel: false,
        };
        let r = run_pair_suite(&v, &w, &cfg)?;
        if !r.overall_pass {
            failures.push(failure_summary(&r).trim_end().to_owned());
        }
        Some(r)
    } else {
        None
    };

    let report = PairReport {
        v_digest: v.digest(),
        w_digest: w.digest(),
        analysis,
        resolution,
        perturbation,
        alternate_dual,
        suite,
    };
    let code = if failures.is_empty() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        stdout: to_json(&report),
        stderr: failures.iter().map(|f| format!("{f}\n")).collect(),
        code,
    })
}
