//! The g-fusion frame data model.
//!
//! A frame lives on a finite list of measure atoms. Every integral over the
//! measure space becomes a weighted sum `Σᵢ μᵢ (·)` taken in atom order.
//! Each atom carries a closed subspace `F(x)` (stored as an orthonormal
//! basis) and a local operator `Λₓ` stored on all of ℋ in canonical form
//! `Λₓ = Λₓ π_{F(x)}`.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{
    all_finite, c, inf_norm, max_abs, orthonormalize_columns, CMatrix, CVector, HermitianOperator,
    ScalarKind, DEFAULT_RANK_TOL,
};

/// Tolerance on `‖BᴴB − I‖` for a stored subspace basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Relative tolerance on `‖Λ(I − P)‖_∞` for a local operator to count as canonical.
pub const CANONICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureAtom {
    pub id: String,
    /// Atom measure μ(x).
    pub mu: f64,
    /// Frame weight ω(x).
    pub omega: f64,
}

impl MeasureAtom {
    pub fn new(id: impl Into<String>, mu: f64, omega: f64) -> Result<Self> {
        let id = id.into();
        for (name, value) in [("mu", mu), ("omega", omega)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidAtom {
                    id,
                    message: format!("{name} must be finite and non-negative, got {value}"),
                });
            }
        }
        Ok(Self { id, mu, omega })
    }

    /// μ·ω², the weight of this atom in the frame operator.
    pub fn energy_weight(&self) -> f64 {
        self.mu * self.omega * self.omega
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    atoms: Vec<MeasureAtom>,
}

impl MeasureSpace {
    pub fn new(atoms: Vec<MeasureAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyFrame);
        }
        let mut seen = HashSet::new();
        for atom in &atoms {
            if !seen.insert(atom.id.as_str()) {
                return Err(Error::DuplicateAtomId(atom.id.clone()));
            }
        }
        if !atoms.iter().any(|a| a.energy_weight() > 0.0) {
            return Err(Error::NoPositiveWeight);
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[MeasureAtom] {
        &self.atoms
    }

    /// Same ids in the same order with identical μ.
    pub fn compatible_with(&self, other: &MeasureSpace) -> Result<()> {
        if self.atoms.len() != other.atoms.len() {
            return Err(Error::MeasureSpaceMismatch(format!(
                "{} atoms vs {} atoms",
                self.atoms.len(),
                other.atoms.len()
            )));
        }
        for (a, b) in self.atoms.iter().zip(&other.atoms) {
            if a.id != b.id {
                return Err(Error::MeasureSpaceMismatch(format!(
                    "atom id `{}` vs `{}`",
                    a.id, b.id
                )));
            }
            if a.mu != b.mu {
                return Err(Error::MeasureSpaceMismatch(format!(
                    "atom `{}` has μ = {} vs {}",
                    a.id, a.mu, b.mu
                )));
            }
        }
        Ok(())
    }
}

/// A subspace of ℋ held as an `n × d` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Orthonormalizes the columns of `spanning`.
    pub fn from_spanning(spanning: &CMatrix, rank_tol: f64) -> Result<Self> {
        let on = orthonormalize_columns(spanning, rank_tol)?;
        Ok(Self { basis: on.basis })
    }

    /// Takes `basis` as-is after checking orthonormality to [`ORTHONORMAL_TOL`].
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        if basis.ncols() == 0 || basis.ncols() > basis.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "subspace basis must be n×d with 1 ≤ d ≤ n, got {}×{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if !all_finite(&basis) {
            return Err(crate::linalg::LinalgError::NonFinite.into());
        }
        let gap = orthonormality_gap(&basis);
        if gap > ORTHONORMAL_TOL {
            return Err(Error::ShapeMismatch(format!(
                "basis columns are not orthonormal (‖BᴴB − I‖ = {gap:e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Keeps an already orthonormal spanning set bit-for-bit and orthonormalizes anything else.
    pub fn from_vectors(spanning: &CMatrix) -> Result<Self> {
        if spanning.ncols() >= 1
            && spanning.ncols() <= spanning.nrows()
            && all_finite(spanning)
            && orthonormality_gap(spanning) <= 1e-14
        {
            return Ok(Self {
                basis: spanning.clone(),
            });
        }
        Self::from_spanning(spanning, DEFAULT_RANK_TOL)
    }

    pub fn full(n: usize) -> Self {
        Self {
            basis: CMatrix::identity(n, n),
        }
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector_matrix(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }
}

fn orthonormality_gap(basis: &CMatrix) -> f64 {
    let d = basis.ncols();
    max_abs(&(basis.adjoint() * basis - CMatrix::identity(d, d)))
}

/// Orthogonal projector `P = B Bᴴ` onto `s`.
pub fn projector(s: &Subspace) -> HermitianOperator {
    HermitianOperator::symmetrized(s.projector_matrix())
}

/// `Λ · P_F`.
pub fn canonicalize(matrix: &CMatrix, subspace: &Subspace) -> CMatrix {
    matrix * subspace.projector_matrix()
}

/// Local operator `Λₓ` as an `mₓ × n` matrix satisfying `Λₓ = Λₓ π_{F(x)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    matrix: CMatrix,
}

impl LocalOperator {
    /// Canonicalizes against `subspace` unless `matrix` already satisfies
    /// `‖Λ(I − P)‖_∞ ≤ CANONICAL_TOL · max(1, ‖Λ‖_∞)`, in which case it is kept verbatim.
    pub fn new(matrix: CMatrix, subspace: &Subspace) -> Result<Self> {
        let n = subspace.ambient_dim();
        if matrix.ncols() != n || matrix.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "local operator must be m×{n} with m ≥ 1, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !all_finite(&matrix) {
            return Err(crate::linalg::LinalgError::NonFinite.into());
        }
        if canonical_gap(&matrix, subspace) <= CANONICAL_TOL * inf_norm(&matrix).max(1.0) {
            return Ok(Self { matrix });
        }
        Ok(Self {
            matrix: canonicalize(&matrix, subspace),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `‖Λ(I − P)‖_∞`.
pub fn canonical_gap(matrix: &CMatrix, subspace: &Subspace) -> f64 {
    let n = subspace.ambient_dim();
    inf_norm(&(matrix * (CMatrix::identity(n, n) - subspace.projector_matrix())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameAtom {
    pub measure: MeasureAtom,
    pub subspace: Subspace,
    pub local: LocalOperator,
}

impl FrameAtom {
    pub fn new(measure: MeasureAtom, subspace: Subspace, local: CMatrix) -> Result<Self> {
        let local = LocalOperator::new(local, &subspace).map_err(|e| match e {
            Error::ShapeMismatch(m) => Error::InvalidAtom {
                id: measure.id.clone(),
                message: m,
            },
            other => other,
        })?;
        Ok(Self {
            measure,
            subspace,
            local,
        })
    }

    pub fn id(&self) -> &str {
        &self.measure.id
    }

    /// `μ ω² Λᴴ Λ`, this atom's contribution to the frame operator.
    pub fn gram_term(&self) -> CMatrix {
        let l = self.local.matrix();
        l.adjoint() * l * c(self.measure.energy_weight())
    }
}

/// A continuous g-fusion frame realized on finitely many measure atoms.
///
/// Only the Bessel property is structural; whether the lower frame bound is
/// positive is a computed property (see [`crate::operators::frame_bounds`]).
#[derive(Debug, Clone, PartialEq)]
pub struct GFusionFrame {
    dim: usize,
    scalar: ScalarKind,
    atoms: Vec<FrameAtom>,
}

impl GFusionFrame {
    pub fn new(dim: usize, scalar: ScalarKind, atoms: Vec<FrameAtom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
        }
        MeasureSpace::new(atoms.iter().map(|a| a.measure.clone()).collect())?;
        for atom in &atoms {
            if atom.subspace.ambient_dim() != dim || atom.local.matrix().ncols() != dim {
                return Err(Error::InvalidAtom {
                    id: atom.id().to_owned(),
                    message: format!("ambient dimension differs from frame dimension {dim}"),
                });
            }
            if scalar == ScalarKind::Real
                && (atom.subspace.basis().iter().any(|z| z.im != 0.0)
                    || atom.local.matrix().iter().any(|z| z.im != 0.0))
            {
                return Err(Error::InvalidAtom {
                    id: atom.id().to_owned(),
                    message: "complex entries in a real frame".into(),
                });
            }
        }
        let mut atoms = atoms;
        if scalar == ScalarKind::Real {
            // Signed zeros in the imaginary parts would not survive a real-valued encoding.
            for atom in &mut atoms {
                atom.subspace.basis.iter_mut().for_each(|z| z.im = 0.0);
                atom.local.matrix.iter_mut().for_each(|z| z.im = 0.0);
            }
        }
        Ok(Self { dim, scalar, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scalar(&self) -> ScalarKind {
        self.scalar
    }

    pub fn atoms(&self) -> &[FrameAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_ids(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().map(|a| a.id())
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.id() == id)
    }

    pub fn measure_space(&self) -> MeasureSpace {
        MeasureSpace {
            atoms: self.atoms.iter().map(|a| a.measure.clone()).collect(),
        }
    }

    /// Same frame with every local operator multiplied by `factor`.
    pub fn scaled_operators(&self, factor: f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                FrameAtom::new(
                    a.measure.clone(),
                    a.subspace.clone(),
                    a.local.matrix() * c(factor),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, self.scalar, atoms)
    }

    /// Same frame with ω replaced atom-wise.
    pub fn with_omegas(&self, omegas: &[f64]) -> Result<Self> {
        if omegas.len() != self.atoms.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} atoms",
                omegas.len(),
                self.atoms.len()
            )));
        }
        let atoms = self
            .atoms
            .iter()
            .zip(omegas)
            .map(|(a, &w)| {
                Ok(FrameAtom {
                    measure: MeasureAtom::new(a.measure.id.clone(), a.measure.mu, w)?,
                    subspace: a.subspace.clone(),
                    local: a.local.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, self.scalar, atoms)
    }

    /// SHA-256 over the canonical byte layout of the frame, hex encoded.
    ///
    /// Layout: tag `gfusion-frame-v1`, dim and atom count as u64 LE, scalar
    /// tag, then per atom the id (length-prefixed UTF-8), μ and ω bits, the
    /// basis and the local operator (rows, cols, then row-major re/im bits).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"gfusion-frame-v1");
        h.update((self.dim as u64).to_le_bytes());
        h.update((self.atoms.len() as u64).to_le_bytes());
        h.update(self.scalar.as_str().as_bytes());
        let put_matrix = |h: &mut Sha256, m: &CMatrix| {
            h.update((m.nrows() as u64).to_le_bytes());
            h.update((m.ncols() as u64).to_le_bytes());
            for r in 0..m.nrows() {
                for col in 0..m.ncols() {
                    h.update(m[(r, col)].re.to_bits().to_le_bytes());
                    h.update(m[(r, col)].im.to_bits().to_le_bytes());
                }
            }
        };
        for atom in &self.atoms {
            h.update((atom.id().len() as u64).to_le_bytes());
            h.update(atom.id().as_bytes());
            h.update(atom.measure.mu.to_bits().to_le_bytes());
            h.update(atom.measure.omega.to_bits().to_le_bytes());
            put_matrix(&mut h, atom.subspace.basis());
            put_matrix(&mut h, atom.local.matrix());
        }
        hex::encode(h.finalize())
    }
}

/// A subset `X₁` of atom ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetMask {
    members: BTreeSet<String>,
}

impl SubsetMask {
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            members: ids.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn all(frame: &GFusionFrame) -> Self {
        Self::new(frame.atom_ids())
    }

    /// Mask from a membership flag per atom.
    pub fn from_flags(frame: &GFusionFrame, flags: &[bool]) -> Self {
        Self::new(
            frame
                .atom_ids()
                .zip(flags)
                .filter(|(_, &f)| f)
                .map(|(id, _)| id),
        )
    }

    pub fn members(&self) -> &BTreeSet<String> {
        &self.members
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// One membership flag per atom of `frame`, in atom order.
    pub fn resolve(&self, frame: &GFusionFrame) -> Result<Vec<bool>> {
        if let Some(unknown) = self.members.iter().find(|m| frame.index_of(m).is_none()) {
            return Err(Error::UnknownAtomId(unknown.clone()));
        }
        Ok(frame.atom_ids().map(|id| self.members.contains(id)).collect())
    }
}

/// `X \ X₁`.
pub fn subset_complement(frame: &GFusionFrame, mask: &SubsetMask) -> Result<SubsetMask> {
    let flags = mask.resolve(frame)?;
    Ok(SubsetMask::new(
        frame
            .atom_ids()
            .zip(flags)
            .filter(|(_, inside)| !inside)
            .map(|(id, _)| id),
    ))
}

/// An element of the discretized `L²(X, ⊕ℋₓ)`: one block per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub blocks: Vec<CVector>,
}

impl CoefficientVector {
    pub fn zeros(frame: &GFusionFrame) -> Self {
        Self {
            blocks: frame
                .atoms()
                .iter()
                .map(|a| CVector::zeros(a.local.out_dim()))
                .collect(),
        }
    }

    pub fn check_shape(&self, frame: &GFusionFrame) -> Result<()> {
        if self.blocks.len() != frame.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficient blocks for {} atoms",
                self.blocks.len(),
                frame.len()
            )));
        }
        for (block, atom) in self.blocks.iter().zip(frame.atoms()) {
            if block.len() != atom.local.out_dim() {
                return Err(Error::ShapeMismatch(format!(
                    "atom `{}` expects a block of length {}, got {}",
                    atom.id(),
                    atom.local.out_dim(),
                    block.len()
                )));
            }
            if block.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(crate::linalg::LinalgError::NonFinite.into());
            }
        }
        Ok(())
    }

    /// `Σᵢ μᵢ ⟨aᵢ, bᵢ⟩`.
    pub fn inner_mu(&self, other: &Self, frame: &GFusionFrame) -> num_complex::Complex64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .zip(frame.atoms())
            .map(|((a, b), atom)| crate::linalg::inner(a, b) * atom.measure.mu)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub atom: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<ValidationIssue>,
    /// `(A, B)`, the extreme eigenvalues of the frame operator.
    pub bounds: Option<(f64, f64)>,
}

/// Re-checks the structural invariants and computes the optimal frame bounds.
/// Problems are collected rather than returned as errors.
pub fn validate_frame(frame: &GFusionFrame, tol: f64) -> ValidationReport {
    let mut issues = Vec::new();
    for atom in frame.atoms() {
        let gap = orthonormality_gap(atom.subspace.basis());
        if gap > ORTHONORMAL_TOL {
            issues.push(ValidationIssue {
                atom: Some(atom.id().to_owned()),
                message: format!("subspace basis is not orthonormal (gap {gap:e})"),
            });
        }
        let l = atom.local.matrix();
        let gap = canonical_gap(l, &atom.subspace);
        if gap > CANONICAL_TOL * inf_norm(l).max(1.0) {
            issues.push(ValidationIssue {
                atom: Some(atom.id().to_owned()),
                message: format!("local operator is not canonical (‖Λ(I − P)‖ = {gap:e})"),
            });
        }
    }
    if !frame.atoms().iter().any(|a| a.measure.energy_weight() > 0.0) {
        issues.push(ValidationIssue {
            atom: None,
            message: "no atom carries positive weight".into(),
        });
    }
    let s = crate::operators::frame_operator(frame);
    let bounds = match s.spectrum() {
        Ok(spec) => Some((spec.min(), spec.max())),
        Err(e) => {
            issues.push(ValidationIssue {
                atom: None,
                message: e.to_string(),
            });
            None
        }
    };
    if let Some((a, _)) = bounds {
        if a <= tol {
            issues.push(ValidationIssue {
                atom: None,
                message: format!("lower frame bound {a:e} is not above {tol:e}: Bessel family only"),
            });
        }
    }
    ValidationReport {
        ok: issues.is_empty(),
        bounds: if issues.is_empty() { bounds } else { None },
        issues,
    }
}
