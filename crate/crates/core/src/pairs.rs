//! Pairs of Bessel families over one measure space: the pair operator
//! `S_FG = Σᵢ μᵢ ωᵢ νᵢ π_F Λᵢᴴ Γᵢ π_G`, its bounds, resolutions of the
//! identity built from it, and the perturbation criterion.
//!
//! In equal finite dimension a bounded-below `S_FG` is invertible, so
//! "bounded below" is tested as `σ_min(S_FG) > floor` and the resolution
//! witness is `K = S_FG⁻¹`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c, max_abs, operator_norm, singular_values, svd_inverse, CMatrix, CVector, PSD_FLOOR_REL,
};
use crate::model::GFusionFrame;
use crate::operators::{energy, frame_operator, pair_operator, pair_terms};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAnalysis {
    #[serde(skip)]
    pub operator: CMatrix,
    pub sigma_min: f64,
    pub norm: f64,
    /// `B₁ = λ_max(S_V)`.
    pub bessel_v: f64,
    /// `B₂ = λ_max(S_W)`.
    pub bessel_w: f64,
    /// `√(B₁ B₂)`.
    pub norm_bound: f64,
    pub norm_bound_holds: bool,
    /// `max |S_FGᴴ − S_GF|`.
    pub adjoint_swap_residual: f64,
    /// Smallest slack of the two directional Bessel bounds over the standard basis probes.
    pub directional_margin: f64,
    pub floor: f64,
    pub bounded_below: bool,
    pub invertible: bool,
}

/// Slack of `‖S_FG f‖ ≤ √B₁ (Σ μν²‖Γπ_G f‖²)^{1/2}` and of
/// `‖S_FGᴴ f‖ ≤ √B₂ (Σ μω²‖Λπ_F f‖²)^{1/2}`.
pub fn directional_slack(
    v: &GFusionFrame,
    w: &GFusionFrame,
    s_fg: &CMatrix,
    bessel_v: f64,
    bessel_w: f64,
    f: &CVector,
) -> (f64, f64) {
    let forward = bessel_v.sqrt() * energy(w, f).sqrt() - (s_fg * f).norm();
    let adjoint = bessel_w.sqrt() * energy(v, f).sqrt() - (s_fg.adjoint() * f).norm();
    (forward, adjoint)
}

pub fn analyze_pair(v: &GFusionFrame, w: &GFusionFrame) -> Result<PairAnalysis> {
    let operator = pair_operator(v, w)?;
    let swapped = pair_operator(w, v)?;
    let sigma = singular_values(&operator)?;
    let norm = sigma.first().copied().unwrap_or(0.0);
    let sigma_min = sigma.last().copied().unwrap_or(0.0);
    let bessel_v = frame_operator(v).max_eigenvalue()?;
    let bessel_w = frame_operator(w).max_eigenvalue()?;
    let norm_bound = (bessel_v * bessel_w).sqrt();
    let n = v.dim();
    let directional_margin = (0..n)
        .map(|k| {
            let e = CVector::from_fn(n, |r, _| c(if r == k { 1.0 } else { 0.0 }));
            let (a, b) = directional_slack(v, w, &operator, bessel_v, bessel_w, &e);
            a.min(b)
        })
        .fold(f64::INFINITY, f64::min);
    let floor = PSD_FLOOR_REL * norm.max(1.0);
    let bounded_below = sigma_min > floor;
    Ok(PairAnalysis {
        adjoint_swap_residual: max_abs(&(operator.adjoint() - swapped)),
        operator,
        sigma_min,
        norm,
        bessel_v,
        bessel_w,
        norm_bound,
        norm_bound_holds: norm <= norm_bound + 1e-9,
        directional_margin,
        floor,
        bounded_below,
        invertible: bounded_below,
    })
}

/// `‖Σᵢ μᵢ ωᵢ νᵢ K π_F Λᵢᴴ Γᵢ π_G − I‖`, summed atom by atom.
pub fn resolution_residual(v: &GFusionFrame, w: &GFusionFrame, k: &CMatrix) -> Result<f64> {
    let n = v.dim();
    if k.nrows() != n || k.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "K must be {n}×{n}, got {}×{}",
            k.nrows(),
            k.ncols()
        )));
    }
    let mut acc = CMatrix::zeros(n, n);
    for term in pair_terms(v, w)? {
        acc += k * term;
    }
    Ok(operator_norm(&(acc - CMatrix::identity(n, n)))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionWitness {
    #[serde(skip)]
    pub k: CMatrix,
    pub residual: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ResolutionOutcome {
    Witness(ResolutionWitness),
    NoWitness { sigma_min: f64, reason: String },
}

/// `K = S_FG⁻¹` when `S_FG` is invertible, with the residual of `Σ μᵢ Tᵢ = I`.
pub fn resolution_witness(v: &GFusionFrame, w: &GFusionFrame, tol: f64) -> Result<ResolutionOutcome> {
    let analysis = analyze_pair(v, w)?;
    if !analysis.invertible {
        return Ok(ResolutionOutcome::NoWitness {
            sigma_min: analysis.sigma_min,
            reason: format!(
                "the pair operator is not bounded below: σ_min = {:e} ≤ floor {:e}",
                analysis.sigma_min, analysis.floor
            ),
        });
    }
    let k = svd_inverse(&analysis.operator, analysis.floor)?;
    let residual = resolution_residual(v, w, &k)?;
    Ok(ResolutionOutcome::Witness(ResolutionWitness {
        k,
        residual,
        valid: residual <= tol,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionVerification {
    pub residual: f64,
    pub tol: f64,
    pub resolves: bool,
    pub sigma_min: f64,
    pub k_norm: f64,
    /// `(1 − residual)/‖K‖`, the lower bound on `σ_min(S_FG)` implied by the resolution.
    pub sigma_min_bound: f64,
    pub bounded_below: bool,
    /// `σ_min(S_FG)² / B₁`.
    pub w_frame_certificate: f64,
    /// `λ_min(S_W)`.
    pub w_lower_bound: f64,
    pub certificate_holds: bool,
    pub pass: bool,
}

/// Checks that `K` turns the pair into a resolution of the identity and
/// draws the consequences: `S_FG` bounded below and `W` a frame.
pub fn verify_resolution(
    v: &GFusionFrame,
    w: &GFusionFrame,
    k: &CMatrix,
    tol: f64,
) -> Result<ResolutionVerification> {
    let residual = resolution_residual(v, w, k)?;
    let analysis = analyze_pair(v, w)?;
    let k_norm = operator_norm(k)?;
    let resolves = residual <= tol;
    let sigma_min_bound = if k_norm > 0.0 {
        (1.0 - residual) / k_norm
    } else {
        f64::NEG_INFINITY
    };
    let bounded_below = resolves && analysis.sigma_min >= sigma_min_bound - tol;
    let w_frame_certificate = analysis.sigma_min * analysis.sigma_min / analysis.bessel_v;
    let w_lower_bound = frame_operator(w).min_eigenvalue()?;
    let certificate_holds = w_lower_bound >= w_frame_certificate - 1e-9;
    Ok(ResolutionVerification {
        residual,
        tol,
        resolves,
        sigma_min: analysis.sigma_min,
        k_norm,
        sigma_min_bound,
        bounded_below,
        w_frame_certificate,
        w_lower_bound,
        certificate_holds,
        pass: resolves && bounded_below && certificate_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaHypothesis {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Largest `‖f − S_FG f‖ − λ₁‖f‖ − λ₂‖S_FG f‖` over the probes; `≤ 0` means no probe refutes.
    pub probe_violation: f64,
    pub probes_hold: bool,
    /// `‖I − S_FG‖ ≤ λ₁ + λ₂ σ_min` for `λ₂ ≥ 0`, `‖I − S_FG‖ ≤ λ₁ + λ₂ ‖S_FG‖` for `λ₂ < 0`.
    pub operator_condition: bool,
    /// `(1 − λ₁)/(1 + λ₂)`, issued only from the operator condition.
    pub sigma_certificate: Option<f64>,
    pub frame_certificate: Option<f64>,
    pub certificate_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    /// `λ₁* = ‖I − S_FG‖`.
    pub lambda1_star: f64,
    pub criterion_holds: bool,
    pub sigma_min: f64,
    pub bessel_v: f64,
    /// `1 − λ₁*` when the criterion holds.
    pub sigma_certificate: Option<f64>,
    /// `(1 − λ₁*)² / B₁` when the criterion holds.
    pub frame_certificate: Option<f64>,
    /// `λ_min(S_W)`.
    pub w_lower_bound: f64,
    pub certificate_holds: Option<bool>,
    pub hypothesis: Option<LambdaHypothesis>,
}

impl PerturbationReport {
    /// Every issued certificate holds.
    pub fn pass(&self) -> bool {
        self.certificate_holds != Some(false)
            && self
                .hypothesis
                .as_ref()
                .is_none_or(|h| h.certificate_holds != Some(false))
    }
}

/// The perturbation criterion with `λ₂ = 0` and, optionally, a user-supplied `(λ₁, λ₂)`
/// tested on `probes` and through the operator-level sufficient condition.
pub fn perturbation_check(
    v: &GFusionFrame,
    w: &GFusionFrame,
    lambdas: Option<(f64, f64)>,
    probes: &[CVector],
) -> Result<PerturbationReport> {
    let analysis = analyze_pair(v, w)?;
    let n = v.dim();
    let s = &analysis.operator;
    let lambda1_star = operator_norm(&(CMatrix::identity(n, n) - s))?;
    let w_lower_bound = frame_operator(w).min_eigenvalue()?;
    let criterion_holds = lambda1_star < 1.0;
    let sigma_certificate = criterion_holds.then_some(1.0 - lambda1_star);
    let frame_certificate = sigma_certificate.map(|s| s * s / analysis.bessel_v);
    let certificate_holds = match (sigma_certificate, frame_certificate) {
        (Some(sc), Some(fc)) => {
            Some(analysis.sigma_min >= sc - 1e-9 && w_lower_bound >= fc - 1e-9)
        }
        _ => None,
    };

    let hypothesis = match lambdas {
        None => None,
        Some((l1, l2)) => {
            if !(l1 < 1.0 && l2 > -1.0 && l1.is_finite() && l2.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "need λ₁ < 1 and λ₂ > −1, got ({l1}, {l2})"
                )));
            }
            let probe_violation = probes
                .iter()
                .map(|f| {
                    let sf = s * f;
                    (f - &sf).norm() - l1 * f.norm() - l2 * sf.norm()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let reach = if l2 >= 0.0 {
                l1 + l2 * analysis.sigma_min
            } else {
                l1 + l2 * analysis.norm
            };
            let operator_condition = lambda1_star <= reach;
            let sigma_certificate = operator_condition.then(|| (1.0 - l1) / (1.0 + l2));
            let frame_certificate = sigma_certificate.map(|s| s * s / analysis.bessel_v);
            let certificate_holds = sigma_certificate.zip(frame_certificate).map(|(sc, fc)| {
                analysis.sigma_min >= sc - 1e-9 && w_lower_bound >= fc - 1e-9
            });
            Some(LambdaHypothesis {
                lambda1: l1,
                lambda2: l2,
                probe_violation,
                probes_hold: probe_violation <= 1e-12,
                operator_condition,
                sigma_certificate,
                frame_certificate,
                certificate_holds,
            })
        }
    };

    Ok(PerturbationReport {
        lambda1_star,
        criterion_holds,
        sigma_min: analysis.sigma_min,
        bessel_v: analysis.bessel_v,
        sigma_certificate,
        frame_certificate,
        w_lower_bound,
        certificate_holds,
        hypothesis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, GenConfig};
    use crate::model::FrameAtom;

    fn zero_locals(frame: &GFusionFrame) -> GFusionFrame {
        let atoms = frame
            .atoms()
            .iter()
            .map(|a| {
                let (r, k) = a.local.matrix().shape();
                FrameAtom::new(a.measure.clone(), a.subspace.clone(), CMatrix::zeros(r, k)).unwrap()
            })
            .collect();
        GFusionFrame::new(frame.dim(), frame.scalar(), atoms).unwrap()
    }

    #[test]
    fn analysis_examples() {
        let onb = gen::orthonormal_basis_frame(2);
        let a = analyze_pair(&onb, &onb).unwrap();
        assert_eq!(a.operator, CMatrix::identity(2, 2));
        assert!((a.sigma_min - 1.0).abs() < 1e-15 && (a.norm - 1.0).abs() < 1e-15);
        assert!((a.norm_bound - 1.0).abs() < 1e-15 && a.invertible);

        let z = analyze_pair(&onb, &zero_locals(&onb)).unwrap();
        assert_eq!(z.sigma_min, 0.0);
        assert!(!z.bounded_below && !z.invertible);

        let (v, w) = gen::diagonal_pair(&[2.0, 2.0]).unwrap();
        let a = analyze_pair(&v, &w).unwrap();
        assert!((a.norm - 2.0).abs() < 1e-15 && (a.norm_bound - 2.0).abs() < 1e-15);
        assert!(a.invertible && a.directional_margin >= -1e-12);
    }

    #[test]
    fn random_pairs_respect_bounds() {
        for seed in 0..20 {
            let cfg = GenConfig::new(4, 6, seed).complex().out_dims(2, 2);
            let v = gen::random_frame(&cfg).unwrap();
            let w = gen::random_frame(&GenConfig { seed: seed + 1000, ..cfg }).unwrap();
            let a = analyze_pair(&v, &w).unwrap();
            assert!(a.norm_bound_holds, "seed {seed}");
            assert!(a.adjoint_swap_residual <= 1e-12 * a.norm.max(1.0));
            assert!(a.directional_margin >= -1e-12);
        }
    }

    #[test]
    fn resolution_examples() {
        let p = gen::mercedes_frame();
        match resolution_witness(&p, &p, 1e-12).unwrap() {
            ResolutionOutcome::Witness(wit) => {
                assert!(wit.valid && wit.residual <= 1e-12);
                assert!(max_abs(&(wit.k - CMatrix::identity(2, 2))) < 1e-12);
            }
            other => panic!("{other:?}"),
        }

        let (v, w) = gen::diagonal_pair(&[2.0, 1.0]).unwrap();
        let ResolutionOutcome::Witness(wit) = resolution_witness(&v, &w, 1e-12).unwrap() else {
            panic!("expected a witness");
        };
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(1.0)]));
        assert!(max_abs(&(&wit.k - expected)) < 1e-15);
        let check = verify_resolution(&v, &w, &wit.k, 1e-12).unwrap();
        assert!(check.pass);
        assert!((check.sigma_min - 1.0).abs() < 1e-15 && (check.k_norm - 1.0).abs() < 1e-15);

        let onb = gen::orthonormal_basis_frame(2);
        let zero = zero_locals(&onb);
        assert!(matches!(
            resolution_witness(&onb, &zero, 1e-9).unwrap(),
            ResolutionOutcome::NoWitness { .. }
        ));
        let check = verify_resolution(&onb, &onb, &CMatrix::zeros(2, 2), 1e-9).unwrap();
        assert!(!check.pass && (check.residual - 1.0).abs() < 1e-15);
        assert!(matches!(
            verify_resolution(&onb, &onb, &CMatrix::zeros(3, 3), 1e-9),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn perturbation_examples() {
        let p = gen::mercedes_frame();
        let r = perturbation_check(&p, &p, None, &[]).unwrap();
        assert!(r.lambda1_star < 1e-12);
        assert!((r.frame_certificate.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.certificate_holds, Some(true));

        let (v, w) = gen::diagonal_pair(&[1.0, 0.5]).unwrap();
        let r = perturbation_check(&v, &w, None, &[]).unwrap();
        assert!((r.lambda1_star - 0.5).abs() < 1e-15);
        assert!((r.sigma_certificate.unwrap() - r.sigma_min).abs() < 1e-15);
        assert!((r.frame_certificate.unwrap() - r.w_lower_bound).abs() < 1e-9);
        assert!(r.pass());

        let (v, w) = gen::diagonal_pair(&[2.0, 2.0]).unwrap();
        let r = perturbation_check(&v, &w, None, &[]).unwrap();
        assert!((r.lambda1_star - 1.0).abs() < 1e-15);
        assert!(!r.criterion_holds && r.frame_certificate.is_none());
        assert!((r.sigma_min - 2.0).abs() < 1e-15);
    }

    #[test]
    fn user_lambdas() {
        let (v, w) = gen::diagonal_pair(&[1.0, 0.5]).unwrap();
        let probes: Vec<CVector> = (0..8)
            .map(|k| {
                let t = k as f64 * 0.7;
                CVector::from_vec(vec![c(t.cos()), c(t.sin())])
            })
            .collect();
        let r = perturbation_check(&v, &w, Some((0.5, 0.0)), &probes).unwrap();
        let h = r.hypothesis.unwrap();
        assert!(h.probes_hold && h.operator_condition);
        assert_eq!(h.certificate_holds, Some(true));

        // λ₂ < 0: ‖(I − S)f‖ ≤ 0.8‖f‖ − 0.2‖Sf‖ needs 0.5 ≤ 0.8 − 0.2·1.
        let r = perturbation_check(&v, &w, Some((0.8, -0.2)), &probes).unwrap();
        let h = r.hypothesis.unwrap();
        assert!(h.operator_condition && h.probes_hold);
        assert_eq!(h.certificate_holds, Some(true));

        let r = perturbation_check(&v, &w, Some((0.1, 0.0)), &probes).unwrap();
        let h = r.hypothesis.unwrap();
        assert!(!h.operator_condition && !h.probes_hold && h.sigma_certificate.is_none());

        assert!(matches!(
            perturbation_check(&v, &w, Some((1.0, 0.0)), &probes),
            Err(Error::InvalidConfig(_))
        ));
    }
}
