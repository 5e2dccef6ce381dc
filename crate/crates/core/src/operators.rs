//! Operators assembled from a frame: synthesis and analysis, the frame
//! operator and its bounds, partial operators over atom subsets, the
//! a-weighted operator and the two-frame pair operator.
//!
//! All sums run over atoms in listed order. Local operators are canonical
//! (`Λ = Λπ`), so `πΛᴴΛπ` is evaluated as `ΛᴴΛ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, operator_norm, CMatrix, CVector, HermitianOperator, PsdExponent};
use crate::model::{CoefficientVector, GFusionFrame, SubsetMask};

/// Optimal frame bounds `0 < A ≤ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Per-atom scalars `aₓ` for the a-weighted operator.
#[derive(Debug, Clone, PartialEq)]
pub struct AWeights {
    values: Vec<Complex64>,
}

impl AWeights {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(crate::linalg::LinalgError::NonFinite.into());
        }
        Ok(Self { values })
    }

    pub fn real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| c(x)).collect())
    }

    pub fn constant(frame: &GFusionFrame, a: Complex64) -> Self {
        Self {
            values: vec![a; frame.len()],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `M_a = sup |aₓ|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `1 − aₓ` atom-wise.
    pub fn complement(&self) -> Self {
        Self {
            values: self.values.iter().map(|z| c(1.0) - z).collect(),
        }
    }

    fn check_len(&self, frame: &GFusionFrame) -> Result<()> {
        if self.values.len() != frame.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} atoms",
                self.values.len(),
                frame.len()
            )));
        }
        Ok(())
    }
}

fn check_vector(frame: &GFusionFrame, f: &CVector) -> Result<()> {
    if f.len() != frame.dim() {
        return Err(Error::ShapeMismatch(format!(
            "vector of length {} for a {}-dimensional frame",
            f.len(),
            frame.dim()
        )));
    }
    Ok(())
}

/// `T c = Σᵢ μᵢ ωᵢ πᵢ Λᵢᴴ cᵢ`.
pub fn synthesis_apply(frame: &GFusionFrame, coeffs: &CoefficientVector) -> Result<CVector> {
    coeffs.check_shape(frame)?;
    let mut out = CVector::zeros(frame.dim());
    for (atom, block) in frame.atoms().iter().zip(&coeffs.blocks) {
        let w = atom.measure.mu * atom.measure.omega;
        out += atom.local.matrix().adjoint() * block * c(w);
    }
    Ok(out)
}

/// `(T* f)ᵢ = ωᵢ Λᵢ πᵢ f`.
pub fn analysis_apply(frame: &GFusionFrame, f: &CVector) -> Result<CoefficientVector> {
    check_vector(frame, f)?;
    Ok(CoefficientVector {
        blocks: frame
            .atoms()
            .iter()
            .map(|atom| atom.local.matrix() * f * c(atom.measure.omega))
            .collect(),
    })
}

/// `μᵢ ωᵢ² πᵢ Λᵢᴴ Λᵢ πᵢ` for every atom, in order.
pub fn atom_terms(frame: &GFusionFrame) -> Vec<CMatrix> {
    frame.atoms().iter().map(|a| a.gram_term()).collect()
}

pub(crate) fn masked_sum(terms: &[CMatrix], flags: &[bool], n: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(n, n);
    for (term, _) in terms.iter().zip(flags).filter(|(_, &inside)| inside) {
        acc += term;
    }
    acc
}

/// `S = Σᵢ μᵢ ωᵢ² πᵢ Λᵢᴴ Λᵢ πᵢ`.
pub fn frame_operator(frame: &GFusionFrame) -> HermitianOperator {
    let terms = atom_terms(frame);
    HermitianOperator::symmetrized(masked_sum(&terms, &vec![true; terms.len()], frame.dim()))
}

/// `Σᵢ μᵢ ωᵢ² ‖Λᵢ πᵢ f‖²` over the atoms flagged in `flags`.
pub fn partial_energy(frame: &GFusionFrame, flags: &[bool], f: &CVector) -> f64 {
    frame
        .atoms()
        .iter()
        .zip(flags)
        .filter(|(_, &inside)| inside)
        .map(|(a, _)| a.measure.energy_weight() * (a.local.matrix() * f).norm_squared())
        .sum()
}

/// `Σᵢ μᵢ ωᵢ² ‖Λᵢ πᵢ f‖²`.
pub fn energy(frame: &GFusionFrame, f: &CVector) -> f64 {
    partial_energy(frame, &vec![true; frame.len()], f)
}

pub(crate) fn bounds_of(s: &HermitianOperator) -> Result<FrameBounds> {
    let spec = s.spectrum()?;
    let floor = s.invertibility_floor()?;
    if spec.min() <= floor {
        return Err(Error::NotAFrame {
            lower: spec.min(),
            floor,
        });
    }
    Ok(FrameBounds {
        lower: spec.min(),
        upper: spec.max(),
    })
}

/// `A = λ_min(S)`, `B = λ_max(S)`; fails with `NotAFrame` for Bessel-only families.
pub fn frame_bounds(frame: &GFusionFrame) -> Result<FrameBounds> {
    bounds_of(&frame_operator(frame))
}

/// `S⁻¹`, or `NotAFrame`.
pub fn frame_operator_inverse(frame: &GFusionFrame) -> Result<HermitianOperator> {
    inverse_of(&frame_operator(frame))
}

pub(crate) fn inverse_of(s: &HermitianOperator) -> Result<HermitianOperator> {
    bounds_of(s)?;
    Ok(s.power(PsdExponent::Inverse)?)
}

/// `M^{X₁} = Σ_{i∈X₁} μᵢ ωᵢ² πᵢ Λᵢᴴ Λᵢ πᵢ`.
pub fn partial_frame_operator(frame: &GFusionFrame, mask: &SubsetMask) -> Result<HermitianOperator> {
    let flags = mask.resolve(frame)?;
    Ok(HermitianOperator::symmetrized(masked_sum(
        &atom_terms(frame),
        &flags,
        frame.dim(),
    )))
}

/// `S^{X₁}`, evaluated in the closed form `M^{X₁} S⁻¹`.
///
/// The summation through the canonical dual is
/// [`crate::duality::mixed_partial_via_dual`]; the two agree by the
/// projection identity for `π_F S⁻¹`.
pub fn mixed_partial_operator(frame: &GFusionFrame, mask: &SubsetMask) -> Result<CMatrix> {
    let m = partial_frame_operator(frame, mask)?;
    let s_inv = frame_operator_inverse(frame)?;
    Ok(m.matrix() * s_inv.matrix())
}

/// `S¹ = Σᵢ aᵢ μᵢ ωᵢ² πᵢ Λᵢᴴ Λᵢ πᵢ`. `S² = S − S¹` is `a_weighted_operator(frame, a.complement())`.
pub fn a_weighted_operator(frame: &GFusionFrame, a: &AWeights) -> Result<CMatrix> {
    a.check_len(frame)?;
    let n = frame.dim();
    let mut acc = CMatrix::zeros(n, n);
    for (term, &w) in atom_terms(frame).iter().zip(a.values()) {
        acc += term * w;
    }
    Ok(acc)
}

/// Same ids, μ and dimension; per-atom output dimensions must agree.
pub fn check_pair_compatible(v: &GFusionFrame, w: &GFusionFrame) -> Result<()> {
    if v.dim() != w.dim() {
        return Err(Error::ShapeMismatch(format!(
            "frame dimensions {} and {}",
            v.dim(),
            w.dim()
        )));
    }
    v.measure_space().compatible_with(&w.measure_space())?;
    for (a, b) in v.atoms().iter().zip(w.atoms()) {
        if a.local.out_dim() != b.local.out_dim() {
            return Err(Error::ShapeMismatch(format!(
                "atom `{}`: local output dimensions {} and {}",
                a.id(),
                a.local.out_dim(),
                b.local.out_dim()
            )));
        }
    }
    Ok(())
}

/// Per-atom terms `μᵢ ωᵢ νᵢ πᵢ^F Λᵢᴴ Γᵢ πᵢ^G` of the pair operator.
pub fn pair_terms(v: &GFusionFrame, w: &GFusionFrame) -> Result<Vec<CMatrix>> {
    check_pair_compatible(v, w)?;
    Ok(v.atoms()
        .iter()
        .zip(w.atoms())
        .map(|(a, b)| {
            let weight = a.measure.mu * a.measure.omega * b.measure.omega;
            a.local.matrix().adjoint() * b.local.matrix() * c(weight)
        })
        .collect())
}

/// `S_FG = Σᵢ μᵢ ωᵢ νᵢ πᵢ^F Λᵢᴴ Γᵢ πᵢ^G` with `V = (Λ, F, ω)` and `W = (Γ, G, ν)`.
pub fn pair_operator(v: &GFusionFrame, w: &GFusionFrame) -> Result<CMatrix> {
    let terms = pair_terms(v, w)?;
    Ok(masked_sum(&terms, &vec![true; terms.len()], v.dim()))
}

/// `‖S¹‖ ≤ B · M_a` margin helper: returns `(‖S¹‖, B · M_a)`.
pub fn a_weighted_norm_bound(frame: &GFusionFrame, a: &AWeights) -> Result<(f64, f64)> {
    let s1 = a_weighted_operator(frame, a)?;
    let b = frame_operator(frame).max_eigenvalue()?;
    Ok((operator_norm(&s1)?, b * a.sup_norm()))
}
