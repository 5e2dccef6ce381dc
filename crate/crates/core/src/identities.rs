//! Numerical verification of the partition identities and inequalities for
//! g-fusion frames, Parseval and λ-tight frames, alternate duals and pairs.
//!
//! Every check evaluates both sides through separate routes where it can
//! (per-atom energies against operator quadratic forms, closed forms against
//! dual-frame sums) and produces an [`IdentityReport`].
//!
//! Four statements are implemented in their corrected form:
//! the Parseval lower bound is `⟨M^{X₁ᶜ}f,f⟩ + ‖M^{X₁}f‖² ≥ ¾‖f‖²`, the
//! Parseval sum bounds add the two terms, the weighted lower bound adds
//! `‖S^{-1/2}M^{X₁ᶜ}f‖²`, and λ-tight constants scale as `λ²`.
//!
//! Tolerances: an identity passes when `residual ≤ tol`, an inequality when
//! `margin ≥ −tol`, where `tol` is the relative tolerance times a scale
//! `max(1, ‖f‖²) · max(1, bound on the operator norms involved)`. The
//! reported `tol` is the scaled value.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{alternate_dual_terms, canonical_dual, default_alternate_tol, is_alternate_dual, DualFrame};
use crate::error::{Error, Result};
use crate::linalg::{
    c, inner, max_abs, operator_norm, CMatrix, CVector, HermitianOperator, PsdExponent, ScalarKind,
};
use crate::model::{CoefficientVector, GFusionFrame, SubsetMask};
use crate::operators::{
    analysis_apply, atom_terms, frame_operator, masked_sum, pair_operator, synthesis_apply, AWeights,
};
use crate::pairs::{analyze_pair, directional_slack, perturbation_check, resolution_witness, verify_resolution, PairAnalysis};
use crate::rng::{fnv1a, stream};

pub const DEFAULT_TOL_REL: f64 = 1e-9;
pub const DEFAULT_TOL_SPECTRAL: f64 = 1e-10;
pub const DEFAULT_TOL_EXACT: f64 = 1e-12;
/// Parseval- and tight-gated checks are attempted when `(B − A)/B` is at most this.
pub const NEAR_TIGHT_REL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative tolerance for identities and inequalities.
    pub rel: f64,
    /// Absolute tolerance on spectra of dimensionless operators.
    pub spectral: f64,
    /// Tolerance for identities that hold up to a reordering of floating-point sums.
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: DEFAULT_TOL_REL,
            spectral: DEFAULT_TOL_SPECTRAL,
            exact: DEFAULT_TOL_EXACT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Identity,
    Inequality,
    SpectralRange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub paper_ref: String,
    pub kind: CheckKind,
    /// Left side, the bounded value, or `λ_min` for spectral ranges.
    pub lhs: f64,
    /// Right side, the nearest bound, or `λ_max` for spectral ranges.
    pub rhs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    pub residual: f64,
    /// Distance to the nearest bound, negative when violated; `−residual` for identities.
    pub margin: f64,
    pub pass: bool,
    pub tol: f64,
    pub trials: usize,
    /// Distance to the sharp upper bound where the stated one is not sharp.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IdentityReport {
    fn base(name: &str, reference: &str, kind: CheckKind) -> Self {
        Self {
            name: name.to_owned(),
            paper_ref: reference.to_owned(),
            kind,
            lhs: f64::NAN,
            rhs: f64::NAN,
            lo: None,
            hi: None,
            residual: f64::NAN,
            margin: f64::NAN,
            pass: false,
            tol: f64::NAN,
            trials: 1,
            sharp_margin: None,
            error: None,
        }
    }

    /// `lhs = rhs` over ℂ; real parts are reported and the residual is `|lhs − rhs|`.
    pub fn identity(name: &str, reference: &str, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let residual = (lhs - rhs).norm();
        Self::matrix_identity(name, reference, lhs.re, rhs.re, residual, tol)
    }

    /// An identity whose residual is computed by the caller.
    pub fn matrix_identity(name: &str, reference: &str, lhs: f64, rhs: f64, residual: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            residual,
            margin: -residual,
            pass: residual <= tol,
            tol,
            ..Self::base(name, reference, CheckKind::Identity)
        }
    }

    /// `lo ≤ value ≤ hi`, either side optional.
    pub fn bounded(name: &str, reference: &str, value: f64, lo: Option<f64>, hi: Option<f64>, tol: f64) -> Self {
        let below = lo.map_or(f64::INFINITY, |l| value - l);
        let above = hi.map_or(f64::INFINITY, |h| h - value);
        let margin = below.min(above);
        let nearest = if below <= above { lo } else { hi };
        Self {
            lhs: value,
            rhs: nearest.unwrap_or(f64::NAN),
            lo,
            hi,
            residual: (-margin).max(0.0),
            margin,
            pass: margin >= -tol,
            tol,
            ..Self::base(name, reference, CheckKind::Inequality)
        }
    }

    /// Every eigenvalue of a Hermitian operator lies in `[lo, hi]`.
    pub fn spectral_range(name: &str, reference: &str, op: &HermitianOperator, lo: f64, hi: f64, tol: f64) -> Result<Self> {
        let spec = op.spectrum()?;
        let margin = (spec.min() - lo).min(hi - spec.max());
        Ok(Self {
            lhs: spec.min(),
            rhs: spec.max(),
            lo: Some(lo),
            hi: Some(hi),
            residual: (-margin).max(0.0),
            margin,
            pass: margin >= -tol,
            tol,
            ..Self::base(name, reference, CheckKind::SpectralRange)
        })
    }

    pub fn failed(name: &str, reference: &str, kind: CheckKind, err: &Error) -> Self {
        Self {
            error: Some(err.to_string()),
            ..Self::base(name, reference, kind)
        }
    }

    fn with_sharp_margin(mut self, m: f64) -> Self {
        self.sharp_margin = Some(m);
        self
    }

    /// Badness used to keep the worst trial: errors first, then `−margin/tol`.
    fn severity(&self) -> f64 {
        if self.error.is_some() {
            return f64::INFINITY;
        }
        let s = -self.margin / self.tol;
        if s.is_nan() {
            f64::INFINITY
        } else {
            s
        }
    }
}

/// Check names and their descriptive references, in one place.
pub mod names {
    pub const FRAME_BOUNDS: &str = "frame_bounds";
    pub const OPERATOR_PARTITION: &str = "partial_operator_partition";
    pub const ADJOINT_PAIRING: &str = "analysis_synthesis_adjoint";
    pub const FACTORIZATION: &str = "frame_operator_factorization";
    pub const A_NORM_BOUND: &str = "a_weighted_norm_bound";
    pub const RECONSTRUCTION: &str = "reconstruction";
    pub const GENERAL_IDENTITY: &str = "general_identity";
    pub const MIXED_PARTITION: &str = "mixed_partial_partition";
    pub const MIXED_ROUTES: &str = "mixed_partial_dual_route";
    pub const CANONICAL_DUAL: &str = "canonical_dual_operator";
    pub const WEIGHTED_IDENTITY: &str = "weighted_identity";
    pub const WEIGHTED_RANGE: &str = "weighted_operator_range";
    pub const WEIGHTED_LOWER: &str = "weighted_lower_bound";
    pub const DUAL_PARTITION: &str = "dual_partition_identity";
    pub const DUAL_AGREEMENT: &str = "dual_partition_identity.inverse_quadratic_form";
    pub const PARSEVAL_IDENTITY: &str = "parseval_identity";
    pub const PARSEVAL_LOWER: &str = "parseval_lower_bound";
    pub const PARSEVAL_LOWER_UNCORRECTED: &str = "parseval_lower_bound.uncorrected";
    pub const PARSEVAL_SUM_SQUARES: &str = "parseval_sum_bounds.squares";
    pub const PARSEVAL_SUM_MIXED: &str = "parseval_sum_bounds.mixed";
    pub const OPERATOR_RANGE: &str = "operator_range";
    pub const TIGHT_I: &str = "tight_bounds.i";
    pub const TIGHT_II: &str = "tight_bounds.ii";
    pub const TIGHT_III: &str = "tight_bounds.iii";
    pub const A_IDENTITY: &str = "a_weighted_identity";
    pub const A_LOWER: &str = "a_weighted_lower_bound";
    pub const PAIR_ADJOINT: &str = "pair_adjoint_swap";
    pub const PAIR_NORM: &str = "pair_norm_bound";
    pub const PAIR_FORWARD: &str = "pair_bessel_bound.forward";
    pub const PAIR_BACKWARD: &str = "pair_bessel_bound.adjoint";
    pub const RESOLUTION: &str = "resolution_of_identity";
    pub const PERTURBATION: &str = "perturbation_certificate";
    pub const PERTURBATION_PROBE: &str = "perturbation_hypothesis";
    pub const ALT_IDENTITY: &str = "alternate_dual_identity";
    pub const ALT_PARTITION: &str = "alternate_dual_identity.partition";
    pub const ALT_PARSEVAL: &str = "alternate_dual_parseval_identity";
    pub const ALT_CERTIFICATE: &str = "alternate_dual_lower_bound";
}

mod refs {
    pub const FRAME_BOUNDS: &str = "frame inequality A‖f‖² ≤ ∫ω²‖Λπf‖² ≤ B‖f‖²";
    pub const OPERATOR_PARTITION: &str = "partial frame operators sum to S";
    pub const ADJOINT_PAIRING: &str = "analysis operator is the adjoint of synthesis";
    pub const FACTORIZATION: &str = "frame operator equals synthesis after analysis";
    pub const A_NORM_BOUND: &str = "a-weighted operators are bounded: ‖S¹‖ ≤ B·sup|a|";
    pub const RECONSTRUCTION: &str = "reconstruction formula, both orderings";
    pub const GENERAL_IDENTITY: &str = "partition identity for the mixed partial operator S^{X₁} = M^{X₁}S⁻¹";
    pub const MIXED_PARTITION: &str = "S^{X₁} + S^{X₁ᶜ} = I";
    pub const MIXED_ROUTES: &str = "S^{X₁} summed through the canonical dual equals M^{X₁}S⁻¹";
    pub const CANONICAL_DUAL: &str = "frame operator of the canonical dual is S⁻¹";
    pub const WEIGHTED_IDENTITY: &str = "partition identity with S^{-1/2} for general frames";
    pub const WEIGHTED_RANGE: &str = "0 ≤ M − MS⁻¹M ≤ ¼S";
    pub const WEIGHTED_LOWER: &str = "weighted lower bound ¾‖S⁻¹‖⁻¹‖f‖² (corrected: plus sign)";
    pub const DUAL_PARTITION: &str = "partition identity with ⟨S⁻¹M f, M f⟩";
    pub const DUAL_AGREEMENT: &str = "⟨S⁻¹g, g⟩ equals the canonical-dual energy of g";
    pub const PARSEVAL_IDENTITY: &str = "Parseval partition identity";
    pub const PARSEVAL_LOWER: &str = "Parseval ¾ bound (corrected: ⟨M^{X₁ᶜ}f,f⟩ + ‖M^{X₁}f‖²)";
    pub const PARSEVAL_LOWER_UNCORRECTED: &str = "Parseval ¾ bound as printed (⟨M^{X₁ᶜ}f,f⟩ − ‖M^{X₁ᶜ}f‖²)";
    pub const PARSEVAL_SUM_SQUARES: &str = "Parseval sum bound ½ ≤ ‖M^{X₁}f‖² + ‖M^{X₁ᶜ}f‖² ≤ 3/2 (corrected: sum)";
    pub const PARSEVAL_SUM_MIXED: &str = "Parseval sum bound ¾ ≤ ⟨M^{X₁}f,f⟩ + ‖M^{X₁ᶜ}f‖² ≤ 1 (corrected: sum)";
    pub const OPERATOR_RANGE: &str = "0 ≤ M − M² ≤ ¼I for Parseval frames";
    pub const TIGHT_I: &str = "λ-tight bound 0 ≤ λ⟨M^{X₁}f,f⟩ − ‖M^{X₁}f‖² ≤ λ²/4";
    pub const TIGHT_II: &str = "λ-tight bound λ²/2 ≤ ‖M^{X₁}f‖² + ‖M^{X₁ᶜ}f‖² ≤ 3λ²/2";
    pub const TIGHT_III: &str = "λ-tight bound 3λ²/4 ≤ λ⟨M^{X₁}f,f⟩ + ‖M^{X₁ᶜ}f‖² ≤ λ² (corrected: λ² scaling)";
    pub const A_IDENTITY: &str = "λ-tight a-weighted identity λS¹ + S²ᴴS² = λS²ᴴ + S¹ᴴS¹ (corrected: plus signs)";
    pub const A_LOWER: &str = "λ-tight a-weighted lower bound 3λ²/4 for real a (corrected: λ² scaling)";
    pub const PAIR_ADJOINT: &str = "adjoint of the pair operator swaps the families";
    pub const PAIR_NORM: &str = "‖S_FG‖ ≤ √(B₁B₂)";
    pub const PAIR_FORWARD: &str = "‖S_FG f‖ ≤ √B₁ (∫ν²‖Γπf‖²)^{1/2}";
    pub const PAIR_BACKWARD: &str = "‖S_FGᴴ f‖ ≤ √B₂ (∫ω²‖Λπf‖²)^{1/2}";
    pub const RESOLUTION: &str = "bounded-below pair operator gives a resolution of the identity with K = S_FG⁻¹";
    pub const PERTURBATION: &str = "perturbation criterion: λ_min(S_W) ≥ (1 − ‖I − S_FG‖)²/B₁";
    pub const PERTURBATION_PROBE: &str = "perturbation hypothesis ‖f − S_FG f‖ ≤ ‖I − S_FG‖‖f‖";
    pub const ALT_IDENTITY: &str = "alternate-dual partition identity";
    pub const ALT_PARTITION: &str = "T^{X₁} + T^{X₁ᶜ} = I for an alternate dual";
    pub const ALT_PARSEVAL: &str = "alternate-dual partition identity for Parseval frames";
    pub const ALT_CERTIFICATE: &str = "alternate dual is a frame with lower bound 1/(‖S⁻¹‖²B)";
}

/// Names the checks whose implemented form differs from the printed statement.
pub const CORRECTED_FORMS_NOTE: &str = "Corrected forms: \
parseval_lower_bound uses ⟨M^{X₁ᶜ}f,f⟩ + ‖M^{X₁}f‖² ≥ ¾‖f‖² (printed with a minus sign and the complement in the norm, which fails for an orthonormal basis); \
parseval_sum_bounds.* bound the sums ‖M^{X₁}f‖² + ‖M^{X₁ᶜ}f‖² ∈ [½, 3/2]‖f‖² (sharp upper bound 1) and ⟨M^{X₁}f,f⟩ + ‖M^{X₁ᶜ}f‖² ∈ [¾, 1]‖f‖²; \
weighted_lower_bound adds ‖S^{-1/2}M^{X₁ᶜ}f‖²; \
tight_bounds.iii uses 3λ²/4 in place of 3λ²/2; \
a_weighted_lower_bound uses 3λ²/4 in place of ¾ and requires real a; \
a_weighted_identity is the quadratic form of λS¹ + S²ᴴS² = λS²ᴴ + S¹ᴴS¹.";

fn scale(f: &CVector, ops: f64) -> f64 {
    f.norm_squared().max(1.0) * ops.max(1.0)
}

/// Precomputed quantities shared by every check on one frame.
#[derive(Debug, Clone)]
pub struct FrameContext<'a> {
    frame: &'a GFusionFrame,
    terms: Vec<CMatrix>,
    s: HermitianOperator,
    lower: f64,
    upper: f64,
    inverse: std::result::Result<Inverse, Error>,
    /// `trace(S)/n`.
    lambda: f64,
    /// `max |λᵢ(S) − trace(S)/n|`.
    tight_gap: f64,
    /// `max |λᵢ(S) − 1|`.
    parseval_gap: f64,
}

#[derive(Debug, Clone)]
struct Inverse {
    s_inv: HermitianOperator,
    s_inv_sqrt: HermitianOperator,
    dual: DualFrame,
}

impl<'a> FrameContext<'a> {
    pub fn new(frame: &'a GFusionFrame) -> Result<Self> {
        let terms = atom_terms(frame);
        let s = frame_operator(frame);
        let (lower, upper, lambda, tight_gap, parseval_gap) = {
            let spec = s.spectrum()?;
            let n = spec.values.len() as f64;
            let lambda = spec.values.iter().sum::<f64>() / n;
            let gap_to = |t: f64| spec.values.iter().map(|l| (l - t).abs()).fold(0.0, f64::max);
            (spec.min(), spec.max(), lambda, gap_to(lambda), gap_to(1.0))
        };
        let inverse = canonical_dual(frame).and_then(|dual| {
            Ok(Inverse {
                s_inv_sqrt: s.power(PsdExponent::InverseSqrt)?,
                s_inv: dual.s_inverse.clone(),
                dual,
            })
        });
        Ok(Self {
            frame,
            terms,
            s,
            lower,
            upper,
            inverse,
            lambda,
            tight_gap,
            parseval_gap,
        })
    }

    pub fn frame(&self) -> &GFusionFrame {
        self.frame
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn is_frame(&self) -> bool {
        self.inverse.is_ok()
    }

    /// `trace(S)/n`, the tight constant when the frame is tight.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tight_gap(&self) -> f64 {
        self.tight_gap
    }

    pub fn parseval_gap(&self) -> f64 {
        self.parseval_gap
    }

    pub fn near_tight(&self) -> bool {
        self.upper - self.lower <= NEAR_TIGHT_REL * self.upper
    }

    pub fn near_parseval(&self) -> bool {
        self.near_tight() && (self.lambda - 1.0).abs() <= NEAR_TIGHT_REL
    }

    fn inv(&self) -> Result<&Inverse> {
        self.inverse.as_ref().map_err(Clone::clone)
    }

    fn condition(&self) -> f64 {
        self.upper / self.lower
    }

    pub fn require_parseval(&self, tol: f64) -> Result<()> {
        if self.parseval_gap > tol {
            return Err(Error::NotParseval {
                gap: self.parseval_gap,
                tol,
            });
        }
        Ok(())
    }

    pub fn require_tight(&self, lambda: f64, tol: f64) -> Result<()> {
        let gap = self
            .s
            .spectrum()?
            .values
            .iter()
            .map(|l| (l - lambda).abs())
            .fold(0.0, f64::max);
        let tol = tol * lambda.max(1.0);
        if gap > tol {
            return Err(Error::NotTight { lambda, gap, tol });
        }
        Ok(())
    }

    pub fn flags(&self, mask: &SubsetMask) -> Result<Vec<bool>> {
        mask.resolve(self.frame)
    }

    fn check_vector(&self, f: &CVector) -> Result<()> {
        if f.len() != self.frame.dim() {
            return Err(Error::ShapeMismatch(format!(
                "probe of length {} for a {}-dimensional frame",
                f.len(),
                self.frame.dim()
            )));
        }
        Ok(())
    }

    fn partial(&self, flags: &[bool]) -> CMatrix {
        masked_sum(&self.terms, flags, self.frame.dim())
    }

    /// Partial operators for `X₁` and its complement.
    fn partials(&self, flags: &[bool]) -> (CMatrix, CMatrix) {
        let comp: Vec<bool> = flags.iter().map(|b| !b).collect();
        (self.partial(flags), self.partial(&comp))
    }

    /// `Σ_{X₁} μω²‖Λπf‖²` and the same over `X₁ᶜ`, atom by atom.
    fn energies(&self, flags: &[bool], f: &CVector) -> (f64, f64) {
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (atom, &member) in self.frame.atoms().iter().zip(flags) {
            let e = atom.measure.energy_weight() * (atom.local.matrix() * f).norm_squared();
            if member {
                inside += e;
            } else {
                outside += e;
            }
        }
        (inside, outside)
    }

    // Bessel-level checks.

    pub fn frame_bounds(&self, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let e = crate::operators::energy(self.frame, f);
        let nf = f.norm_squared();
        Ok(IdentityReport::bounded(
            names::FRAME_BOUNDS,
            refs::FRAME_BOUNDS,
            e,
            Some(self.lower * nf),
            Some(self.upper * nf),
            tol.rel * scale(f, self.upper),
        ))
    }

    pub fn operator_partition(&self, flags: &[bool], tol: &Tolerances) -> Result<IdentityReport> {
        let (m1, m2) = self.partials(flags);
        let sum = &m1 + &m2;
        Ok(IdentityReport::matrix_identity(
            names::OPERATOR_PARTITION,
            refs::OPERATOR_PARTITION,
            max_abs(&sum),
            max_abs(self.s.matrix()),
            max_abs(&(sum - self.s.matrix())),
            tol.rel * self.upper.max(1.0),
        ))
    }

    pub fn adjoint_pairing(&self, f: &CVector, coeffs: &CoefficientVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let lhs = analysis_apply(self.frame, f)?.inner_mu(coeffs, self.frame);
        let rhs = inner(f, &synthesis_apply(self.frame, coeffs)?);
        let c_norm = coeffs.inner_mu(coeffs, self.frame).re.sqrt();
        Ok(IdentityReport::identity(
            names::ADJOINT_PAIRING,
            refs::ADJOINT_PAIRING,
            lhs,
            rhs,
            tol.rel * (self.upper.sqrt() * f.norm() * c_norm).max(1.0),
        ))
    }

    pub fn factorization(&self, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let tt = synthesis_apply(self.frame, &analysis_apply(self.frame, f)?)?;
        let sf = self.s.apply(f);
        Ok(IdentityReport::matrix_identity(
            names::FACTORIZATION,
            refs::FACTORIZATION,
            tt.norm(),
            sf.norm(),
            (tt - sf).norm(),
            tol.rel * self.upper.max(1.0) * f.norm().max(1.0),
        ))
    }

    pub fn a_norm_bound(&self, a: &AWeights, tol: &Tolerances) -> Result<IdentityReport> {
        let s1 = crate::operators::a_weighted_operator(self.frame, a)?;
        let bound = self.upper * a.sup_norm();
        Ok(IdentityReport::bounded(
            names::A_NORM_BOUND,
            refs::A_NORM_BOUND,
            operator_norm(&s1)?,
            None,
            Some(bound),
            tol.rel * bound.max(1.0),
        ))
    }

    // Frame-level checks.

    pub fn reconstruction(&self, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let inv = self.inv()?;
        let g = inv.s_inv.apply(f);
        let n = self.frame.dim();
        let mut right = CVector::zeros(n);
        let mut left = CVector::zeros(n);
        for term in &self.terms {
            right += term * &g;
            left += inv.s_inv.matrix() * (term * f);
        }
        let err = (&right - f).norm().max((&left - f).norm());
        let rel = if f.norm() > 0.0 { err / f.norm() } else { err };
        Ok(IdentityReport::matrix_identity(
            names::RECONSTRUCTION,
            refs::RECONSTRUCTION,
            right.norm(),
            f.norm(),
            rel,
            tol.rel,
        ))
    }

    /// `⟨S^{X₁}f,f⟩ − ‖S^{X₁}f‖² = conj(⟨S^{X₁ᶜ}f,f⟩) − ‖S^{X₁ᶜ}f‖²`, with the
    /// inner products summed through the canonical dual.
    pub fn general_identity(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let inv = self.inv()?;
        let (m1, m2) = self.partials(flags);
        let g = inv.s_inv.apply(f);
        let (t1f, t2f) = (&m1 * &g, &m2 * &g);
        let mut a1 = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        for ((atom, dual), &member) in self.frame.atoms().iter().zip(inv.dual.frame.atoms()).zip(flags) {
            let term = inner(&(dual.local.matrix() * f), &(atom.local.matrix() * f)) * atom.measure.energy_weight();
            if member {
                a1 += term;
            } else {
                a2 += term;
            }
        }
        let lhs = a1 - t1f.norm_squared();
        let rhs = a2.conj() - t2f.norm_squared();
        let k = self.condition();
        Ok(IdentityReport::identity(
            names::GENERAL_IDENTITY,
            refs::GENERAL_IDENTITY,
            lhs,
            rhs,
            tol.rel * scale(f, k * k),
        ))
    }

    pub fn mixed_partial(&self, flags: &[bool], tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        let inv = self.inv()?;
        let (m1, m2) = self.partials(flags);
        let t1 = &m1 * inv.s_inv.matrix();
        let t2 = &m2 * inv.s_inv.matrix();
        let n = self.frame.dim();
        let sum = &t1 + &t2;
        let routed = crate::duality::mixed_partial_via_dual(
            self.frame,
            &inv.dual,
            &SubsetMask::from_flags(self.frame, flags),
        )?;
        let t = tol.rel * self.condition().max(1.0);
        Ok(vec![
            IdentityReport::matrix_identity(
                names::MIXED_PARTITION,
                refs::MIXED_PARTITION,
                max_abs(&sum),
                1.0,
                max_abs(&(sum - CMatrix::identity(n, n))),
                t,
            ),
            IdentityReport::matrix_identity(
                names::MIXED_ROUTES,
                refs::MIXED_ROUTES,
                max_abs(&t1),
                max_abs(&routed),
                max_abs(&(&t1 - routed)),
                t,
            ),
        ])
    }

    pub fn canonical_dual_operator(&self, tol: &Tolerances) -> Result<IdentityReport> {
        let inv = self.inv()?;
        let s_dual = frame_operator(&inv.dual.frame);
        Ok(IdentityReport::matrix_identity(
            names::CANONICAL_DUAL,
            refs::CANONICAL_DUAL,
            max_abs(s_dual.matrix()),
            max_abs(inv.s_inv.matrix()),
            max_abs(&(s_dual.matrix() - inv.s_inv.matrix())),
            tol.rel * (1.0 / self.lower).max(1.0),
        ))
    }

    /// Scale for terms of size `‖S^{-1/2}Mf‖² ≤ B²/A`.
    fn weighted_scale(&self, f: &CVector) -> f64 {
        scale(f, self.upper.max(self.upper * self.condition()))
    }

    pub fn weighted_identity(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let inv = self.inv()?;
        let (m1, m2) = self.partials(flags);
        let (e1, e2) = self.energies(flags, f);
        let lhs = e1 - (inv.s_inv_sqrt.matrix() * (&m1 * f)).norm_squared();
        let rhs = e2 - (inv.s_inv_sqrt.matrix() * (&m2 * f)).norm_squared();
        Ok(IdentityReport::identity(
            names::WEIGHTED_IDENTITY,
            refs::WEIGHTED_IDENTITY,
            c(lhs),
            c(rhs),
            tol.rel * self.weighted_scale(f),
        ))
    }

    /// Spectrum of `S^{-1/2}(M − MS⁻¹M)S^{-1/2}` inside `[0, ¼]`, evaluated as
    /// `T − T²` with `T = S^{-1/2}MS^{-1/2}`; the literal product loses `κ·ε` to
    /// cancellation through `S⁻¹`.
    pub fn weighted_operator_range(&self, flags: &[bool], tol: &Tolerances) -> Result<IdentityReport> {
        let inv = self.inv()?;
        let m = self.partial(flags);
        let t = HermitianOperator::symmetrized(inv.s_inv_sqrt.matrix() * m * inv.s_inv_sqrt.matrix());
        let op = HermitianOperator::symmetrized(t.matrix() - t.matrix() * t.matrix());
        IdentityReport::spectral_range(names::WEIGHTED_RANGE, refs::WEIGHTED_RANGE, &op, 0.0, 0.25, tol.spectral)
    }

    pub fn weighted_lower_bound(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        let inv = self.inv()?;
        let (_, m2) = self.partials(flags);
        let (e1, _) = self.energies(flags, f);
        let value = e1 + (inv.s_inv_sqrt.matrix() * (&m2 * f)).norm_squared();
        // ‖S⁻¹‖⁻¹ = A.
        Ok(IdentityReport::bounded(
            names::WEIGHTED_LOWER,
            refs::WEIGHTED_LOWER,
            value,
            Some(0.75 * self.lower * f.norm_squared()),
            None,
            tol.rel * self.weighted_scale(f),
        ))
    }

    pub fn dual_partition_identity(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        self.check_vector(f)?;
        let inv = self.inv()?;
        let (m1, m2) = self.partials(flags);
        let (e1, e2) = self.energies(flags, f);
        let (g1, g2) = (&m1 * f, &m2 * f);
        let q1 = inv.s_inv.quadratic_form(&g1);
        let q2 = inv.s_inv.quadratic_form(&g2);
        let d1 = crate::duality::dual_energy(&inv.dual, &g1);
        let d2 = crate::duality::dual_energy(&inv.dual, &g2);
        let agreement = (q1 - d1).norm().max((q2 - d2).norm());
        let s = self.weighted_scale(f);
        Ok(vec![
            IdentityReport::identity(
                names::DUAL_PARTITION,
                refs::DUAL_PARTITION,
                c(e1 - q1.re),
                c(e2 - q2.re),
                tol.rel * s,
            ),
            IdentityReport::matrix_identity(
                names::DUAL_AGREEMENT,
                refs::DUAL_AGREEMENT,
                q1.re + q2.re,
                d1 + d2,
                agreement,
                tol.rel * s,
            ),
        ])
    }

    // Parseval-gated checks.

    pub fn parseval_identity(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        self.require_parseval(tol.rel)?;
        let (m1, m2) = self.partials(flags);
        let (e1, e2) = self.energies(flags, f);
        Ok(IdentityReport::identity(
            names::PARSEVAL_IDENTITY,
            refs::PARSEVAL_IDENTITY,
            c(e1 - (&m1 * f).norm_squared()),
            c(e2 - (&m2 * f).norm_squared()),
            tol.rel * scale(f, 1.0),
        ))
    }

    pub fn parseval_lower_bound(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        self.require_parseval(tol.rel)?;
        let (m1, _) = self.partials(flags);
        let (_, e2) = self.energies(flags, f);
        let nf = f.norm_squared();
        Ok(IdentityReport::bounded(
            names::PARSEVAL_LOWER,
            refs::PARSEVAL_LOWER,
            e2 + (&m1 * f).norm_squared(),
            Some(0.75 * nf),
            Some(nf),
            tol.rel * scale(f, 1.0),
        ))
    }

    /// The lower bound exactly as printed, `⟨M^{X₁ᶜ}f,f⟩ − ‖M^{X₁ᶜ}f‖² ≥ ¾‖f‖²`.
    /// Kept so the counterexample to it stays visible; not part of the suite.
    pub fn parseval_lower_bound_uncorrected(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        self.require_parseval(tol.rel)?;
        let (_, m2) = self.partials(flags);
        let (_, e2) = self.energies(flags, f);
        Ok(IdentityReport::bounded(
            names::PARSEVAL_LOWER_UNCORRECTED,
            refs::PARSEVAL_LOWER_UNCORRECTED,
            e2 - (&m2 * f).norm_squared(),
            Some(0.75 * f.norm_squared()),
            None,
            tol.rel * scale(f, 1.0),
        ))
    }

    pub fn parseval_sum_bounds(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        self.check_vector(f)?;
        self.require_parseval(tol.rel)?;
        let (m1, m2) = self.partials(flags);
        let (e1, _) = self.energies(flags, f);
        let nf = f.norm_squared();
        let (n1, n2) = ((&m1 * f).norm_squared(), (&m2 * f).norm_squared());
        let t = tol.rel * scale(f, 1.0);
        Ok(vec![
            IdentityReport::bounded(
                names::PARSEVAL_SUM_SQUARES,
                refs::PARSEVAL_SUM_SQUARES,
                n1 + n2,
                Some(0.5 * nf),
                Some(1.5 * nf),
                t,
            )
            .with_sharp_margin(nf - (n1 + n2)),
            IdentityReport::bounded(
                names::PARSEVAL_SUM_MIXED,
                refs::PARSEVAL_SUM_MIXED,
                e1 + n2,
                Some(0.75 * nf),
                Some(nf),
                t,
            ),
        ])
    }

    pub fn operator_range(&self, flags: &[bool], tol: &Tolerances) -> Result<IdentityReport> {
        self.require_parseval(tol.rel)?;
        let m = self.partial(flags);
        let op = HermitianOperator::symmetrized(&m - &m * &m);
        IdentityReport::spectral_range(names::OPERATOR_RANGE, refs::OPERATOR_RANGE, &op, 0.0, 0.25, tol.spectral)
    }

    // Tight-gated checks.

    pub fn tight_bounds(&self, flags: &[bool], f: &CVector, lambda: f64, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        self.check_vector(f)?;
        self.require_tight(lambda, tol.rel)?;
        let (m1, m2) = self.partials(flags);
        let (e1, _) = self.energies(flags, f);
        let (n1, n2) = ((&m1 * f).norm_squared(), (&m2 * f).norm_squared());
        let l2 = lambda * lambda * f.norm_squared();
        let t = tol.rel * scale(f, lambda * lambda);
        Ok(vec![
            IdentityReport::bounded(names::TIGHT_I, refs::TIGHT_I, lambda * e1 - n1, Some(0.0), Some(0.25 * l2), t),
            IdentityReport::bounded(names::TIGHT_II, refs::TIGHT_II, n1 + n2, Some(0.5 * l2), Some(1.5 * l2), t)
                .with_sharp_margin(l2 - (n1 + n2)),
            IdentityReport::bounded(names::TIGHT_III, refs::TIGHT_III, lambda * e1 + n2, Some(0.75 * l2), Some(l2), t),
        ])
    }

    fn a_operators(&self, a: &AWeights) -> Result<(CMatrix, CMatrix)> {
        let s1 = crate::operators::a_weighted_operator(self.frame, a)?;
        let s2 = crate::operators::a_weighted_operator(self.frame, &a.complement())?;
        Ok((s1, s2))
    }

    /// `λ⟨S¹f,f⟩ + ‖S²f‖² = λ·conj(⟨S²f,f⟩) + ‖S¹f‖²`.
    pub fn a_weighted_identity(&self, a: &AWeights, f: &CVector, lambda: f64, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        self.require_tight(lambda, tol.rel)?;
        let (s1, s2) = self.a_operators(a)?;
        let (s1f, s2f) = (&s1 * f, &s2 * f);
        let lhs = inner(&s1f, f) * lambda + s2f.norm_squared();
        let rhs = inner(&s2f, f).conj() * lambda + s1f.norm_squared();
        let grow = lambda * (1.0 + a.sup_norm());
        Ok(IdentityReport::identity(
            names::A_IDENTITY,
            refs::A_IDENTITY,
            lhs,
            rhs,
            tol.rel * scale(f, grow * grow),
        ))
    }

    pub fn a_weighted_lower_bound(&self, a: &AWeights, f: &CVector, lambda: f64, tol: &Tolerances) -> Result<IdentityReport> {
        self.check_vector(f)?;
        self.require_tight(lambda, tol.rel)?;
        if !a.is_real() {
            return Err(Error::NonRealWeights);
        }
        let (s1, s2) = self.a_operators(a)?;
        let value = inner(&(&s1 * f), f).re * lambda + (&s2 * f).norm_squared();
        let grow = lambda * (1.0 + a.sup_norm());
        Ok(IdentityReport::bounded(
            names::A_LOWER,
            refs::A_LOWER,
            value,
            Some(0.75 * lambda * lambda * f.norm_squared()),
            None,
            tol.rel * scale(f, grow * grow),
        ))
    }
}

// Single-shot entry points.

fn with_ctx<T>(frame: &GFusionFrame, mask: &SubsetMask, run: impl FnOnce(&FrameContext, &[bool]) -> Result<T>) -> Result<T> {
    let ctx = FrameContext::new(frame)?;
    let flags = ctx.flags(mask)?;
    run(&ctx, &flags)
}

pub fn check_general_identity(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.general_identity(fl, f, tol))
}

pub fn check_parseval_identity(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.parseval_identity(fl, f, tol))
}

pub fn check_parseval_lower_bound(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.parseval_lower_bound(fl, f, tol))
}

pub fn check_parseval_lower_bound_uncorrected(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.parseval_lower_bound_uncorrected(fl, f, tol))
}

pub fn check_parseval_sum_bounds(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
    with_ctx(frame, mask, |ctx, fl| ctx.parseval_sum_bounds(fl, f, tol))
}

pub fn check_operator_range(frame: &GFusionFrame, mask: &SubsetMask, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.operator_range(fl, tol))
}

pub fn check_weighted_identity(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.weighted_identity(fl, f, tol))
}

pub fn check_weighted_operator_range(frame: &GFusionFrame, mask: &SubsetMask, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.weighted_operator_range(fl, tol))
}

pub fn check_weighted_lower_bound(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    with_ctx(frame, mask, |ctx, fl| ctx.weighted_lower_bound(fl, f, tol))
}

pub fn check_dual_partition_identity(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
    with_ctx(frame, mask, |ctx, fl| ctx.dual_partition_identity(fl, f, tol))
}

pub fn check_tight_bounds(frame: &GFusionFrame, mask: &SubsetMask, f: &CVector, lambda: f64, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
    with_ctx(frame, mask, |ctx, fl| ctx.tight_bounds(fl, f, lambda, tol))
}

pub fn check_a_weighted_identity(frame: &GFusionFrame, a: &AWeights, f: &CVector, lambda: f64, tol: &Tolerances) -> Result<IdentityReport> {
    FrameContext::new(frame)?.a_weighted_identity(a, f, lambda, tol)
}

pub fn check_a_weighted_lower_bound(frame: &GFusionFrame, a: &AWeights, f: &CVector, lambda: f64, tol: &Tolerances) -> Result<IdentityReport> {
    FrameContext::new(frame)?.a_weighted_lower_bound(a, f, lambda, tol)
}

/// Precomputed quantities for a pair `(V, W)`.
#[derive(Debug, Clone)]
pub struct PairContext<'a> {
    v: &'a GFusionFrame,
    w: &'a GFusionFrame,
    analysis: PairAnalysis,
    swapped: CMatrix,
    /// Terms `μων Γᴴ S_V⁻¹ Λ` when `W` is an alternate dual of `V`.
    alternate: Option<AlternateParts>,
}

#[derive(Debug, Clone)]
struct AlternateParts {
    terms: Vec<CMatrix>,
    s_inv: CMatrix,
    parseval_gap: f64,
}

impl<'a> PairContext<'a> {
    pub fn new(v: &'a GFusionFrame, w: &'a GFusionFrame, tol: &Tolerances) -> Result<Self> {
        let analysis = analyze_pair(v, w)?;
        let swapped = pair_operator(w, v)?;
        let alternate = match is_alternate_dual(v, w, default_alternate_tol(v.dim()).max(tol.rel)) {
            Ok(status) if status.is_dual => {
                let ctx = FrameContext::new(v)?;
                Some(AlternateParts {
                    terms: alternate_dual_terms(v, w)?,
                    s_inv: ctx.inv()?.s_inv.matrix().clone(),
                    parseval_gap: ctx.parseval_gap,
                })
            }
            _ => None,
        };
        Ok(Self {
            v,
            w,
            analysis,
            swapped,
            alternate,
        })
    }

    pub fn analysis(&self) -> &PairAnalysis {
        &self.analysis
    }

    pub fn is_alternate_dual(&self) -> bool {
        self.alternate.is_some()
    }

    pub fn adjoint_swap(&self, tol: &Tolerances) -> IdentityReport {
        let s = &self.analysis.operator;
        IdentityReport::matrix_identity(
            names::PAIR_ADJOINT,
            refs::PAIR_ADJOINT,
            max_abs(s),
            max_abs(&self.swapped),
            max_abs(&(s.adjoint() - &self.swapped)),
            tol.exact * self.analysis.norm.max(1.0),
        )
    }

    pub fn norm_bound(&self, tol: &Tolerances) -> IdentityReport {
        IdentityReport::bounded(
            names::PAIR_NORM,
            refs::PAIR_NORM,
            self.analysis.norm,
            None,
            Some(self.analysis.norm_bound),
            tol.rel * self.analysis.norm_bound.max(1.0),
        )
    }

    pub fn directional(&self, f: &CVector, tol: &Tolerances) -> Vec<IdentityReport> {
        let a = &self.analysis;
        let (forward, backward) = directional_slack(self.v, self.w, &a.operator, a.bessel_v, a.bessel_w, f);
        let t = tol.rel * a.norm_bound.max(1.0) * f.norm().max(1.0);
        let sf = (&a.operator * f).norm();
        let sh = (a.operator.adjoint() * f).norm();
        vec![
            IdentityReport::bounded(names::PAIR_FORWARD, refs::PAIR_FORWARD, sf, None, Some(sf + forward), t),
            IdentityReport::bounded(names::PAIR_BACKWARD, refs::PAIR_BACKWARD, sh, None, Some(sh + backward), t),
        ]
    }

    pub fn resolution(&self, tol: &Tolerances) -> Result<Option<IdentityReport>> {
        let t = tol.rel * self.v.dim() as f64;
        match resolution_witness(self.v, self.w, t)? {
            crate::pairs::ResolutionOutcome::NoWitness { .. } => Ok(None),
            crate::pairs::ResolutionOutcome::Witness(wit) => {
                let check = verify_resolution(self.v, self.w, &wit.k, t)?;
                let mut report = IdentityReport::matrix_identity(
                    names::RESOLUTION,
                    refs::RESOLUTION,
                    check.sigma_min,
                    check.sigma_min_bound,
                    check.residual,
                    t,
                );
                report.pass = check.pass;
                Ok(Some(report))
            }
        }
    }

    pub fn perturbation(&self, f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        let r = perturbation_check(self.v, self.w, None, std::slice::from_ref(f))?;
        let Some(cert) = r.frame_certificate else {
            return Ok(Vec::new());
        };
        let sf = &self.analysis.operator * f;
        Ok(vec![
            IdentityReport::bounded(
                names::PERTURBATION,
                refs::PERTURBATION,
                r.w_lower_bound,
                Some(cert),
                None,
                tol.rel,
            ),
            IdentityReport::bounded(
                names::PERTURBATION_PROBE,
                refs::PERTURBATION_PROBE,
                (f - sf).norm(),
                None,
                Some(r.lambda1_star * f.norm()),
                tol.rel * f.norm().max(1.0),
            ),
        ])
    }

    /// The alternate-dual partition identity and `T^{X₁} + T^{X₁ᶜ} = I`.
    pub fn alternate_identity(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        let alt = self.alternate.as_ref().ok_or_else(|| self.not_dual())?;
        let n = self.v.dim();
        let t1 = masked_sum(&alt.terms, flags, n);
        let comp: Vec<bool> = flags.iter().map(|b| !b).collect();
        let t2 = masked_sum(&alt.terms, &comp, n);
        let (a1, a2) = self.alternate_inner(flags, f, Some(&alt.s_inv));
        let lhs = a1 - (&t1 * f).norm_squared();
        let rhs = a2.conj() - (&t2 * f).norm_squared();
        let growth = operator_norm(&t1)?.max(operator_norm(&t2)?);
        let sum = &t1 + &t2;
        Ok(vec![
            IdentityReport::identity(
                names::ALT_IDENTITY,
                refs::ALT_IDENTITY,
                lhs,
                rhs,
                tol.rel * scale(f, growth * growth),
            ),
            IdentityReport::matrix_identity(
                names::ALT_PARTITION,
                refs::ALT_PARTITION,
                max_abs(&sum),
                1.0,
                max_abs(&(sum - CMatrix::identity(n, n))),
                tol.spectral * growth.max(1.0),
            ),
        ])
    }

    /// The Parseval form: `S⁻¹` dropped from the inner products and from the `X₁ᶜ` synthesis term.
    pub fn alternate_parseval_identity(&self, flags: &[bool], f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
        let alt = self.alternate.as_ref().ok_or_else(|| self.not_dual())?;
        if alt.parseval_gap > tol.rel {
            return Err(Error::NotParseval {
                gap: alt.parseval_gap,
                tol: tol.rel,
            });
        }
        let n = self.v.dim();
        let t1 = masked_sum(&alt.terms, flags, n);
        let mut t2f = CVector::zeros(n);
        for ((a, b), &member) in self.v.atoms().iter().zip(self.w.atoms()).zip(flags) {
            if !member {
                let w = a.measure.mu * a.measure.omega * b.measure.omega;
                t2f += b.local.matrix().adjoint() * (a.local.matrix() * f) * c(w);
            }
        }
        let (a1, a2) = self.alternate_inner(flags, f, None);
        let lhs = a1 - (&t1 * f).norm_squared();
        let rhs = a2.conj() - t2f.norm_squared();
        let growth = operator_norm(&t1)?.max(1.0);
        Ok(IdentityReport::identity(
            names::ALT_PARSEVAL,
            refs::ALT_PARSEVAL,
            lhs,
            rhs,
            tol.rel * scale(f, growth * growth),
        ))
    }

    pub fn alternate_certificate(&self, tol: &Tolerances) -> Result<IdentityReport> {
        self.alternate.as_ref().ok_or_else(|| self.not_dual())?;
        let bound = crate::duality::alternate_dual_lower_bound(
            self.v,
            self.w,
            default_alternate_tol(self.v.dim()).max(tol.rel),
        )?;
        Ok(IdentityReport::bounded(
            names::ALT_CERTIFICATE,
            refs::ALT_CERTIFICATE,
            bound.actual,
            Some(bound.certificate),
            None,
            tol.rel,
        ))
    }

    /// `Σ μων ⟨S⁻¹Λπf, Γπf⟩` over `X₁` and `X₁ᶜ`; `s_inv = None` uses the identity.
    fn alternate_inner(&self, flags: &[bool], f: &CVector, s_inv: Option<&CMatrix>) -> (Complex64, Complex64) {
        let mut a1 = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        for ((a, b), &member) in self.v.atoms().iter().zip(self.w.atoms()).zip(flags) {
            let lf = a.local.matrix() * f;
            let left = match s_inv {
                Some(m) => m * lf,
                None => lf,
            };
            let term = inner(&left, &(b.local.matrix() * f)) * (a.measure.mu * a.measure.omega * b.measure.omega);
            if member {
                a1 += term;
            } else {
                a2 += term;
            }
        }
        (a1, a2)
    }

    fn not_dual(&self) -> Error {
        let residual = crate::duality::alternate_dual_residual(self.v, self.w).unwrap_or(f64::NAN);
        Error::NotAlternateDual {
            residual,
            tol: default_alternate_tol(self.v.dim()),
        }
    }
}

pub fn check_alternate_dual_identity(v: &GFusionFrame, w: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
    let flags = mask.resolve(v)?;
    PairContext::new(v, w, tol)?.alternate_identity(&flags, f, tol)
}

pub fn check_alternate_dual_parseval_identity(v: &GFusionFrame, w: &GFusionFrame, mask: &SubsetMask, f: &CVector, tol: &Tolerances) -> Result<IdentityReport> {
    let flags = mask.resolve(v)?;
    PairContext::new(v, w, tol)?.alternate_parseval_identity(&flags, f, tol)
}

// Suites.

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
    /// Use this subset in every trial instead of random masks.
    pub mask: Option<SubsetMask>,
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            tol: Tolerances::default(),
            mask: None,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSuiteResult {
    pub frame_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_digest: Option<String>,
    /// Worst trial per check, sorted by name.
    pub checks: Vec<IdentityReport>,
    pub overall_pass: bool,
    pub trials: usize,
    pub corrected_forms_note: String,
}

impl CheckSuiteResult {
    pub fn get(&self, name: &str) -> Option<&IdentityReport> {
        self.checks.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityReport> {
        self.checks.iter().filter(|r| !r.pass)
    }
}

/// Random inputs for one (check family, trial) cell.
struct TrialInputs {
    flags: Vec<bool>,
    f: CVector,
    rng: ChaCha8Rng,
}

fn draw_vector(rng: &mut ChaCha8Rng, n: usize, scalar: ScalarKind) -> CVector {
    let mut v = CVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        match scalar {
            ScalarKind::Real => c(re),
            ScalarKind::Complex => Complex64::new(re, rng.sample(StandardNormal)),
        }
    });
    let norm = v.norm();
    if norm > 0.0 {
        v /= c(norm);
    }
    v
}

fn trial_inputs(frame: &GFusionFrame, fixed: Option<&[bool]>, seed: u64, family: &str, trial: usize) -> TrialInputs {
    let mut rng = stream(seed, &[fnv1a(family), trial as u64]);
    let m = frame.len();
    let flags = match (fixed, trial) {
        (Some(fl), _) => fl.to_vec(),
        (None, 0) => vec![false; m],
        (None, 1) => vec![true; m],
        (None, _) => (0..m).map(|_| rng.random_bool(0.5)).collect(),
    };
    let f = draw_vector(&mut rng, frame.dim(), frame.scalar());
    TrialInputs { flags, f, rng }
}

fn complex_weights(rng: &mut ChaCha8Rng, m: usize) -> AWeights {
    let values = (0..m)
        .map(|_| Complex64::new(rng.random_range(-1.0..=2.0), rng.random_range(-1.0..=1.0)))
        .collect();
    AWeights::new(values).expect("finite draws")
}

fn real_weights(rng: &mut ChaCha8Rng, m: usize) -> AWeights {
    let values: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=2.0)).collect();
    AWeights::real(&values).expect("finite draws")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    FrameBounds,
    OperatorPartition,
    AdjointPairing,
    Factorization,
    ANormBound,
    Reconstruction,
    GeneralIdentity,
    MixedPartial,
    CanonicalDual,
    WeightedIdentity,
    WeightedRange,
    WeightedLower,
    DualPartition,
    ParsevalIdentity,
    ParsevalLower,
    ParsevalSums,
    OperatorRange,
    TightBounds,
    AIdentity,
    ALower,
}

impl Family {
    const ALL: [Family; 20] = [
        Family::FrameBounds,
        Family::OperatorPartition,
        Family::AdjointPairing,
        Family::Factorization,
        Family::ANormBound,
        Family::Reconstruction,
        Family::GeneralIdentity,
        Family::MixedPartial,
        Family::CanonicalDual,
        Family::WeightedIdentity,
        Family::WeightedRange,
        Family::WeightedLower,
        Family::DualPartition,
        Family::ParsevalIdentity,
        Family::ParsevalLower,
        Family::ParsevalSums,
        Family::OperatorRange,
        Family::TightBounds,
        Family::AIdentity,
        Family::ALower,
    ];

    /// Stream label and fallback report name/kind/reference for failures.
    fn describe(self) -> (&'static str, &'static [(&'static str, &'static str, CheckKind)]) {
        use CheckKind::*;
        match self {
            Family::FrameBounds => ("frame_bounds", &[(names::FRAME_BOUNDS, refs::FRAME_BOUNDS, Inequality)]),
            Family::OperatorPartition => ("partial_operator_partition", &[(names::OPERATOR_PARTITION, refs::OPERATOR_PARTITION, Identity)]),
            Family::AdjointPairing => ("analysis_synthesis_adjoint", &[(names::ADJOINT_PAIRING, refs::ADJOINT_PAIRING, Identity)]),
            Family::Factorization => ("frame_operator_factorization", &[(names::FACTORIZATION, refs::FACTORIZATION, Identity)]),
            Family::ANormBound => ("a_weighted_norm_bound", &[(names::A_NORM_BOUND, refs::A_NORM_BOUND, Inequality)]),
            Family::Reconstruction => ("reconstruction", &[(names::RECONSTRUCTION, refs::RECONSTRUCTION, Identity)]),
            Family::GeneralIdentity => ("general_identity", &[(names::GENERAL_IDENTITY, refs::GENERAL_IDENTITY, Identity)]),
            Family::MixedPartial => (
                "mixed_partial",
                &[
                    (names::MIXED_PARTITION, refs::MIXED_PARTITION, Identity),
                    (names::MIXED_ROUTES, refs::MIXED_ROUTES, Identity),
                ],
            ),
            Family::CanonicalDual => ("canonical_dual_operator", &[(names::CANONICAL_DUAL, refs::CANONICAL_DUAL, Identity)]),
            Family::WeightedIdentity => ("weighted_identity", &[(names::WEIGHTED_IDENTITY, refs::WEIGHTED_IDENTITY, Identity)]),
            Family::WeightedRange => ("weighted_operator_range", &[(names::WEIGHTED_RANGE, refs::WEIGHTED_RANGE, SpectralRange)]),
            Family::WeightedLower => ("weighted_lower_bound", &[(names::WEIGHTED_LOWER, refs::WEIGHTED_LOWER, Inequality)]),
            Family::DualPartition => (
                "dual_partition_identity",
                &[
                    (names::DUAL_PARTITION, refs::DUAL_PARTITION, Identity),
                    (names::DUAL_AGREEMENT, refs::DUAL_AGREEMENT, Identity),
                ],
            ),
            Family::ParsevalIdentity => ("parseval_identity", &[(names::PARSEVAL_IDENTITY, refs::PARSEVAL_IDENTITY, Identity)]),
            Family::ParsevalLower => ("parseval_lower_bound", &[(names::PARSEVAL_LOWER, refs::PARSEVAL_LOWER, Inequality)]),
            Family::ParsevalSums => (
                "parseval_sum_bounds",
                &[
                    (names::PARSEVAL_SUM_SQUARES, refs::PARSEVAL_SUM_SQUARES, Inequality),
                    (names::PARSEVAL_SUM_MIXED, refs::PARSEVAL_SUM_MIXED, Inequality),
                ],
            ),
            Family::OperatorRange => ("operator_range", &[(names::OPERATOR_RANGE, refs::OPERATOR_RANGE, SpectralRange)]),
            Family::TightBounds => (
                "tight_bounds",
                &[
                    (names::TIGHT_I, refs::TIGHT_I, Inequality),
                    (names::TIGHT_II, refs::TIGHT_II, Inequality),
                    (names::TIGHT_III, refs::TIGHT_III, Inequality),
                ],
            ),
            Family::AIdentity => ("a_weighted_identity", &[(names::A_IDENTITY, refs::A_IDENTITY, Identity)]),
            Family::ALower => ("a_weighted_lower_bound", &[(names::A_LOWER, refs::A_LOWER, Inequality)]),
        }
    }

    fn applicable(self, ctx: &FrameContext) -> bool {
        match self {
            Family::ParsevalIdentity | Family::ParsevalLower | Family::ParsevalSums | Family::OperatorRange => {
                ctx.near_parseval()
            }
            Family::TightBounds | Family::AIdentity | Family::ALower => ctx.near_tight(),
            _ => true,
        }
    }

    fn run(self, ctx: &FrameContext, input: &mut TrialInputs, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        let (fl, f) = (&input.flags[..], &input.f);
        let m = ctx.frame.len();
        let one = |r: Result<IdentityReport>| r.map(|x| vec![x]);
        match self {
            Family::FrameBounds => one(ctx.frame_bounds(f, tol)),
            Family::OperatorPartition => one(ctx.operator_partition(fl, tol)),
            Family::AdjointPairing => {
                let coeffs = CoefficientVector {
                    blocks: ctx
                        .frame
                        .atoms()
                        .iter()
                        .map(|a| draw_vector(&mut input.rng, a.local.out_dim(), ctx.frame.scalar()))
                        .collect(),
                };
                one(ctx.adjoint_pairing(f, &coeffs, tol))
            }
            Family::Factorization => one(ctx.factorization(f, tol)),
            Family::ANormBound => {
                let a = complex_weights(&mut input.rng, m);
                one(ctx.a_norm_bound(&a, tol))
            }
            Family::Reconstruction => one(ctx.reconstruction(f, tol)),
            Family::GeneralIdentity => one(ctx.general_identity(fl, f, tol)),
            Family::MixedPartial => ctx.mixed_partial(fl, tol),
            Family::CanonicalDual => one(ctx.canonical_dual_operator(tol)),
            Family::WeightedIdentity => one(ctx.weighted_identity(fl, f, tol)),
            Family::WeightedRange => one(ctx.weighted_operator_range(fl, tol)),
            Family::WeightedLower => one(ctx.weighted_lower_bound(fl, f, tol)),
            Family::DualPartition => ctx.dual_partition_identity(fl, f, tol),
            Family::ParsevalIdentity => one(ctx.parseval_identity(fl, f, tol)),
            Family::ParsevalLower => one(ctx.parseval_lower_bound(fl, f, tol)),
            Family::ParsevalSums => ctx.parseval_sum_bounds(fl, f, tol),
            Family::OperatorRange => one(ctx.operator_range(fl, tol)),
            Family::TightBounds => ctx.tight_bounds(fl, f, ctx.lambda, tol),
            Family::AIdentity => {
                let a = complex_weights(&mut input.rng, m);
                one(ctx.a_weighted_identity(&a, f, ctx.lambda, tol))
            }
            Family::ALower => {
                let a = real_weights(&mut input.rng, m);
                one(ctx.a_weighted_lower_bound(&a, f, ctx.lambda, tol))
            }
        }
    }
}

fn failure_reports(parts: &[(&str, &str, CheckKind)], err: &Error) -> Vec<IdentityReport> {
    parts
        .iter()
        .map(|(name, reference, kind)| IdentityReport::failed(name, reference, *kind, err))
        .collect()
}

fn run_cells<T: Sync>(
    cells: &[T],
    parallel: bool,
    run: impl Fn(&T) -> Vec<IdentityReport> + Sync + Send,
) -> Vec<Vec<IdentityReport>> {
    if parallel {
        cells.par_iter().map(&run).collect()
    } else {
        cells.iter().map(run).collect()
    }
}

/// Keeps the worst trial per name; ties go to the earliest trial.
fn aggregate(results: Vec<Vec<IdentityReport>>) -> Vec<IdentityReport> {
    let mut worst: BTreeMap<String, (IdentityReport, usize)> = BTreeMap::new();
    for report in results.into_iter().flatten() {
        match worst.get_mut(&report.name) {
            None => {
                worst.insert(report.name.clone(), (report, 1));
            }
            Some((current, count)) => {
                *count += 1;
                if report.severity() > current.severity() {
                    *current = report;
                }
            }
        }
    }
    worst
        .into_values()
        .map(|(mut r, count)| {
            r.trials = count;
            r
        })
        .collect()
}

fn finish(frame_digest: String, dual_digest: Option<String>, checks: Vec<IdentityReport>, trials: usize) -> CheckSuiteResult {
    CheckSuiteResult {
        frame_digest,
        dual_digest,
        overall_pass: checks.iter().all(|r| r.pass),
        checks,
        trials,
        corrected_forms_note: CORRECTED_FORMS_NOTE.to_owned(),
    }
}

/// Runs every applicable check for `cfg.trials` seeded draws.
///
/// Bessel-level checks always run. Frame-level checks report `NotAFrame`
/// failures when `A` is at the floor. Parseval-gated checks run when the
/// spectrum of `S` is within 1% of `{1}`, tight-gated ones when it is within
/// 1% of a single value, and both then apply the strict gate.
pub fn run_suite(frame: &GFusionFrame, cfg: &SuiteConfig) -> Result<CheckSuiteResult> {
    let ctx = FrameContext::new(frame)?;
    let fixed = cfg.mask.as_ref().map(|m| ctx.flags(m)).transpose()?;
    let families: Vec<Family> = Family::ALL.into_iter().filter(|f| f.applicable(&ctx)).collect();
    let cells: Vec<(Family, usize)> = families
        .iter()
        .flat_map(|&fam| (0..cfg.trials).map(move |t| (fam, t)))
        .collect();
    let results = run_cells(&cells, cfg.parallel, |&(fam, trial)| {
        let (label, parts) = fam.describe();
        let mut input = trial_inputs(frame, fixed.as_deref(), cfg.seed, label, trial);
        fam.run(&ctx, &mut input, &cfg.tol)
            .unwrap_or_else(|e| failure_reports(parts, &e))
    });
    Ok(finish(frame.digest(), None, aggregate(results), cfg.trials))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairFamily {
    Adjoint,
    Norm,
    Directional,
    Resolution,
    Perturbation,
    AlternateIdentity,
    AlternateParseval,
    AlternateCertificate,
}

impl PairFamily {
    const ALL: [PairFamily; 8] = [
        PairFamily::Adjoint,
        PairFamily::Norm,
        PairFamily::Directional,
        PairFamily::Resolution,
        PairFamily::Perturbation,
        PairFamily::AlternateIdentity,
        PairFamily::AlternateParseval,
        PairFamily::AlternateCertificate,
    ];

    fn describe(self) -> (&'static str, &'static [(&'static str, &'static str, CheckKind)]) {
        use CheckKind::*;
        match self {
            PairFamily::Adjoint => ("pair_adjoint_swap", &[(names::PAIR_ADJOINT, refs::PAIR_ADJOINT, Identity)]),
            PairFamily::Norm => ("pair_norm_bound", &[(names::PAIR_NORM, refs::PAIR_NORM, Inequality)]),
            PairFamily::Directional => (
                "pair_bessel_bound",
                &[
                    (names::PAIR_FORWARD, refs::PAIR_FORWARD, Inequality),
                    (names::PAIR_BACKWARD, refs::PAIR_BACKWARD, Inequality),
                ],
            ),
            PairFamily::Resolution => ("resolution_of_identity", &[(names::RESOLUTION, refs::RESOLUTION, Identity)]),
            PairFamily::Perturbation => (
                "perturbation",
                &[
                    (names::PERTURBATION, refs::PERTURBATION, Inequality),
                    (names::PERTURBATION_PROBE, refs::PERTURBATION_PROBE, Inequality),
                ],
            ),
            PairFamily::AlternateIdentity => (
                "alternate_dual_identity",
                &[
                    (names::ALT_IDENTITY, refs::ALT_IDENTITY, Identity),
                    (names::ALT_PARTITION, refs::ALT_PARTITION, Identity),
                ],
            ),
            PairFamily::AlternateParseval => ("alternate_dual_parseval_identity", &[(names::ALT_PARSEVAL, refs::ALT_PARSEVAL, Identity)]),
            PairFamily::AlternateCertificate => ("alternate_dual_lower_bound", &[(names::ALT_CERTIFICATE, refs::ALT_CERTIFICATE, Inequality)]),
        }
    }

    fn applicable(self, ctx: &PairContext) -> bool {
        match self {
            PairFamily::Resolution => ctx.analysis.invertible,
            PairFamily::AlternateIdentity | PairFamily::AlternateCertificate => ctx.is_alternate_dual(),
            PairFamily::AlternateParseval => ctx
                .alternate
                .as_ref()
                .is_some_and(|a| a.parseval_gap <= NEAR_TIGHT_REL),
            _ => true,
        }
    }

    fn run(self, ctx: &PairContext, input: &TrialInputs, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
        let (fl, f) = (&input.flags[..], &input.f);
        match self {
            PairFamily::Adjoint => Ok(vec![ctx.adjoint_swap(tol)]),
            PairFamily::Norm => Ok(vec![ctx.norm_bound(tol)]),
            PairFamily::Directional => Ok(ctx.directional(f, tol)),
            PairFamily::Resolution => Ok(ctx.resolution(tol)?.into_iter().collect()),
            PairFamily::Perturbation => ctx.perturbation(f, tol),
            PairFamily::AlternateIdentity => ctx.alternate_identity(fl, f, tol),
            PairFamily::AlternateParseval => Ok(vec![ctx.alternate_parseval_identity(fl, f, tol)?]),
            PairFamily::AlternateCertificate => Ok(vec![ctx.alternate_certificate(tol)?]),
        }
    }
}

/// Pair-level checks for `(V, W)`. Alternate-dual checks run when `W` is an
/// alternate dual of `V`; the resolution check when `S_FG` is invertible; the
/// perturbation certificate when `‖I − S_FG‖ < 1`.
pub fn run_pair_suite(v: &GFusionFrame, w: &GFusionFrame, cfg: &SuiteConfig) -> Result<CheckSuiteResult> {
    let ctx = PairContext::new(v, w, &cfg.tol)?;
    let fixed = cfg.mask.as_ref().map(|m| m.resolve(v)).transpose()?;
    let families: Vec<PairFamily> = PairFamily::ALL.into_iter().filter(|f| f.applicable(&ctx)).collect();
    let cells: Vec<(PairFamily, usize)> = families
        .iter()
        .flat_map(|&fam| (0..cfg.trials).map(move |t| (fam, t)))
        .collect();
    let results = run_cells(&cells, cfg.parallel, |&(fam, trial)| {
        let (label, parts) = fam.describe();
        let input = trial_inputs(v, fixed.as_deref(), cfg.seed, label, trial);
        fam.run(&ctx, &input, &cfg.tol)
            .unwrap_or_else(|e| failure_reports(parts, &e))
    });
    Ok(finish(v.digest(), Some(w.digest()), aggregate(results), cfg.trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{parsevalize, reconstruction_dual};
    use crate::gen::{self, FrameKind, GenConfig};

    fn rv(data: &[f64]) -> CVector {
        CVector::from_iterator(data.len(), data.iter().map(|&x| c(x)))
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn general_identity_examples() {
        let onb = gen::orthonormal_basis_frame(2);
        let h = 0.5f64.sqrt();
        let r = check_general_identity(&onb, &SubsetMask::new(["e1"]), &rv(&[h, h]), &tol()).unwrap();
        // ⟨Pf,f⟩ − ‖Pf‖² = ½ − ½ for the projection P = diag(1, 0).
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15 && r.pass);

        let r = check_general_identity(&onb, &SubsetMask::empty(), &rv(&[0.3, -0.4]), &tol()).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);

        let frame = gen::random_frame(&GenConfig::new(4, 7, 5).complex()).unwrap();
        let f = draw_vector(&mut stream(5, &[]), 4, ScalarKind::Complex);
        let r = check_general_identity(&frame, &SubsetMask::new(["x1", "x2", "x5"]), &f, &tol()).unwrap();
        assert!(r.pass && r.residual <= 1e-9, "{r:?}");
    }

    #[test]
    fn parseval_examples() {
        let m = gen::mercedes_frame();
        let mask = SubsetMask::new(["v0"]);
        let e1 = rv(&[1.0, 0.0]);
        let r = check_parseval_identity(&m, &mask, &e1, &tol()).unwrap();
        assert!((r.lhs - 2.0 / 9.0).abs() < 1e-12 && (r.rhs - 2.0 / 9.0).abs() < 1e-12);

        let r = check_parseval_lower_bound(&m, &mask, &e1, &tol()).unwrap();
        assert!((r.lhs - 7.0 / 9.0).abs() < 1e-12 && r.pass);

        let sums = check_parseval_sum_bounds(&m, &mask, &e1, &tol()).unwrap();
        assert!((sums[0].lhs - 5.0 / 9.0).abs() < 1e-12 && sums[0].pass);
        assert!((sums[1].lhs - 7.0 / 9.0).abs() < 1e-12 && sums[1].pass);

        let r = check_operator_range(&m, &mask, &tol()).unwrap();
        assert!(r.lhs.abs() < 1e-12 && (r.rhs - 2.0 / 9.0).abs() < 1e-12 && r.pass);
    }

    #[test]
    fn orthonormal_basis_edge_values() {
        let onb = gen::orthonormal_basis_frame(2);
        let mask = SubsetMask::new(["e1"]);
        let e2 = rv(&[0.0, 1.0]);
        let r = check_parseval_identity(&onb, &mask, &rv(&[0.6, 0.8]), &tol()).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);
        let r = check_parseval_lower_bound(&onb, &mask, &e2, &tol()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && r.margin.abs() < 1e-15 && r.pass);
        let r = check_operator_range(&onb, &mask, &tol()).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);
        let sums = check_parseval_sum_bounds(&onb, &mask, &rv(&[0.6, 0.8]), &tol()).unwrap();
        assert!((sums[0].lhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uncorrected_lower_bound_counterexample() {
        let onb = gen::orthonormal_basis_frame(2);
        let r = check_parseval_lower_bound_uncorrected(&onb, &SubsetMask::new(["e1"]), &rv(&[0.0, 1.0]), &tol()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(!r.pass && r.margin < -0.7);
    }

    #[test]
    fn parseval_gate() {
        let two = gen::two_scale_frame();
        let e = check_parseval_identity(&two, &SubsetMask::empty(), &rv(&[1.0, 0.0]), &tol()).unwrap_err();
        assert!(matches!(e, Error::NotParseval { .. }));
    }

    #[test]
    fn weighted_examples() {
        let two = gen::two_scale_frame();
        let mask = SubsetMask::new(["line"]);
        let f = rv(&[1.0, 1.0]);
        let r = check_weighted_identity(&two, &mask, &f, &tol()).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-14 && (r.rhs - 0.5).abs() < 1e-14 && r.pass);

        let r = check_dual_partition_identity(&two, &mask, &f, &tol()).unwrap();
        assert!((r[0].lhs - 0.5).abs() < 1e-14 && (r[0].rhs - 0.5).abs() < 1e-14);
        assert!(r.iter().all(|x| x.pass));

        let r = check_weighted_operator_range(&two, &mask, &tol()).unwrap();
        assert!((r.rhs - 0.25).abs() < 1e-14 && r.margin.abs() < 1e-14 && r.pass);
        let r = check_weighted_operator_range(&two, &SubsetMask::empty(), &tol()).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);

        let r = check_weighted_lower_bound(&two, &mask, &rv(&[0.0, 1.0]), &tol()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 0.75).abs() < 1e-14 && r.pass);
    }

    #[test]
    fn parsevalized_two_scale_attains_quarter() {
        let p = parsevalize(&gen::two_scale_frame()).unwrap();
        let r = check_operator_range(&p, &SubsetMask::new(["line"]), &tol()).unwrap();
        assert!((r.rhs - 0.25).abs() < 1e-12 && r.margin <= 1e-6 && r.pass);
    }

    #[test]
    fn tight_examples() {
        let m = gen::mercedes_frame().scaled_operators(2f64.sqrt()).unwrap();
        let r = check_tight_bounds(&m, &SubsetMask::new(["v0"]), &rv(&[1.0, 0.0]), 2.0, &tol()).unwrap();
        assert!((r[2].lhs - 28.0 / 9.0).abs() < 1e-12);
        assert!(r.iter().all(|x| x.pass));
        assert!(matches!(
            check_tight_bounds(&m, &SubsetMask::empty(), &rv(&[1.0, 0.0]), 1.0, &tol()),
            Err(Error::NotTight { .. })
        ));
    }

    #[test]
    fn a_weighted_examples() {
        let onb = gen::orthonormal_basis_frame(2);
        let h = 0.5f64.sqrt();
        let f = rv(&[h, h]);
        let a = AWeights::real(&[1.0, 0.0]).unwrap();
        let r = check_a_weighted_identity(&onb, &a, &f, 1.0, &tol()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);

        let half = AWeights::real(&[0.5, 0.5]).unwrap();
        let r = check_a_weighted_lower_bound(&onb, &half, &f, 1.0, &tol()).unwrap();
        assert!((r.lhs - 0.75).abs() < 1e-15 && r.margin.abs() < 1e-6 && r.pass);

        let one = AWeights::real(&[1.0, 1.0]).unwrap();
        let r = check_a_weighted_lower_bound(&onb, &one, &f, 1.0, &tol()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15);

        let z = AWeights::new(vec![Complex64::new(0.2, 1.0), Complex64::new(-0.5, 0.3)]).unwrap();
        assert!(check_a_weighted_identity(&onb, &z, &f, 1.0, &tol()).unwrap().pass);
        assert_eq!(
            check_a_weighted_lower_bound(&onb, &z, &f, 1.0, &tol()).unwrap_err(),
            Error::NonRealWeights
        );
    }

    #[test]
    fn alternate_examples() {
        let p = parsevalize(&gen::two_scale_frame()).unwrap();
        let f = rv(&[0.6, -0.8]);
        let all = SubsetMask::all(&p);
        let r = check_alternate_dual_identity(&p, &p, &all, &f, &tol()).unwrap();
        assert!(r[0].lhs.abs() < 1e-12 && r[0].rhs.abs() < 1e-12 && r.iter().all(|x| x.pass));
        let r = check_alternate_dual_parseval_identity(&p, &p, &SubsetMask::new(["line"]), &f, &tol()).unwrap();
        let q = check_parseval_identity(&p, &SubsetMask::new(["line"]), &f, &tol()).unwrap();
        assert!((r.lhs - q.lhs).abs() < 1e-12 && r.pass);

        let v = gen::random_frame(&GenConfig::new(3, 6, 2).out_dims(3, 3)).unwrap();
        let w = reconstruction_dual(&v).unwrap();
        let r = check_alternate_dual_identity(&v, &w, &SubsetMask::new(["x0", "x4"]), &rv(&[0.1, 0.7, -0.3]), &tol()).unwrap();
        assert!(r.iter().all(|x| x.pass), "{r:?}");
        assert!(matches!(
            check_alternate_dual_identity(&v, &v, &SubsetMask::empty(), &rv(&[1.0, 0.0, 0.0]), &tol()),
            Err(Error::NotAlternateDual { .. })
        ));
    }

    #[test]
    fn suite_on_canonical_frames() {
        let cfg = SuiteConfig {
            trials: 10,
            seed: 1,
            ..SuiteConfig::default()
        };
        let r = run_suite(&gen::orthonormal_basis_frame(3), &cfg).unwrap();
        assert!(r.overall_pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.get(names::PARSEVAL_LOWER).is_some() && r.get(names::TIGHT_III).is_some());
        assert!(r.checks.windows(2).all(|w| w[0].name < w[1].name));
        assert!(r.checks.iter().all(|c| c.trials == 10));

        let cfg = SuiteConfig {
            trials: 100,
            seed: 2,
            ..SuiteConfig::default()
        };
        let r = run_suite(&gen::mercedes_frame(), &cfg).unwrap();
        assert!(r.overall_pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn suite_on_bessel_only_family() {
        let b = gen::random_frame(&GenConfig::new(3, 5, 1).kind(FrameKind::BesselOnly)).unwrap();
        let r = run_suite(&b, &SuiteConfig { trials: 4, ..SuiteConfig::default() }).unwrap();
        assert!(!r.overall_pass);
        assert!(r.get(names::FRAME_BOUNDS).unwrap().pass);
        assert!(r.get(names::OPERATOR_PARTITION).unwrap().pass);
        let g = r.get(names::GENERAL_IDENTITY).unwrap();
        assert!(!g.pass && g.error.as_deref().unwrap().starts_with("not a frame"));
    }

    #[test]
    fn perturbed_parseval_fails_the_gate() {
        let m = gen::mercedes_frame();
        let mut atoms = m.atoms().to_vec();
        let mut l = atoms[0].local.matrix().clone();
        l[(0, 0)] += c(1e-3);
        atoms[0] = crate::model::FrameAtom::new(atoms[0].measure.clone(), atoms[0].subspace.clone(), l).unwrap();
        let perturbed = GFusionFrame::new(2, m.scalar(), atoms).unwrap();
        let r = run_suite(&perturbed, &SuiteConfig { trials: 5, ..SuiteConfig::default() }).unwrap();
        assert!(!r.overall_pass);
        let p = r.get(names::PARSEVAL_IDENTITY).unwrap();
        assert!(p.error.as_deref().unwrap().contains("not Parseval"));
        assert!(r.get(names::GENERAL_IDENTITY).unwrap().pass);
    }

    #[test]
    fn suite_is_deterministic_and_schedule_independent() {
        let frame = gen::random_frame(&GenConfig::new(4, 8, 77).complex().kind(FrameKind::Parseval)).unwrap();
        let cfg = SuiteConfig {
            trials: 20,
            seed: 9,
            ..SuiteConfig::default()
        };
        let a = run_suite(&frame, &cfg).unwrap();
        let b = run_suite(&frame, &SuiteConfig { parallel: true, ..cfg.clone() }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.overall_pass, "{:?}", a.failures().collect::<Vec<_>>());
    }

    #[test]
    fn fixed_mask_and_unknown_ids() {
        let m = gen::mercedes_frame();
        let cfg = SuiteConfig {
            trials: 3,
            mask: Some(SubsetMask::new(["v1"])),
            ..SuiteConfig::default()
        };
        assert!(run_suite(&m, &cfg).unwrap().overall_pass);
        let bad = SuiteConfig {
            mask: Some(SubsetMask::new(["nope"])),
            ..cfg
        };
        assert_eq!(run_suite(&m, &bad).unwrap_err(), Error::UnknownAtomId("nope".into()));
    }

    #[test]
    fn pair_suite() {
        let pair = gen::alternate_dual_pair(&GenConfig::new(3, 6, 4).complex()).unwrap();
        let cfg = SuiteConfig {
            trials: 30,
            seed: 3,
            ..SuiteConfig::default()
        };
        let r = run_pair_suite(&pair.v, &pair.w, &cfg).unwrap();
        assert!(r.overall_pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.get(names::ALT_IDENTITY).is_some());
        assert!(r.get(names::ALT_CERTIFICATE).is_some());

        let (v, w) = gen::diagonal_pair(&[1.0, 0.5]).unwrap();
        let r = run_pair_suite(&v, &w, &cfg).unwrap();
        assert!(r.overall_pass, "{:?}", r.failures().collect::<Vec<_>>());
        let p = r.get(names::PERTURBATION).unwrap();
        assert!(p.margin.abs() < 1e-9);
        assert!(r.get(names::RESOLUTION).unwrap().pass);
    }
}
