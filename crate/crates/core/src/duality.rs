//! Canonical duals, Parseval-ization and alternate duals.
//!
//! An alternate dual of `V = (Λ, F, ω)` is a Bessel family `W = (Γ, G, ν)` with
//! `Σᵢ μᵢ ωᵢ νᵢ π_G Γᵢᴴ S⁻¹ Λᵢ π_F = I`. The middle factor `S⁻¹` only
//! composes when every local operator maps into an `n`-dimensional space, so
//! the functions here reject other shapes with `ShapeMismatch`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, operator_norm, CMatrix, CVector, HermitianOperator, PsdExponent, DEFAULT_RANK_TOL};
use crate::model::{FrameAtom, GFusionFrame, SubsetMask, Subspace};
use crate::operators::{check_pair_compatible, frame_bounds, frame_operator, inverse_of, masked_sum};

/// The canonical dual `(S⁻¹F, Λ π_F S⁻¹, ω)` together with the `S⁻¹` that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFrame {
    pub frame: GFusionFrame,
    pub s_inverse: HermitianOperator,
}

fn transform(
    frame: &GFusionFrame,
    op: &HermitianOperator,
    local: impl Fn(&FrameAtom) -> CMatrix,
) -> Result<GFusionFrame> {
    let atoms = frame
        .atoms()
        .iter()
        .map(|a| {
            let subspace = Subspace::from_spanning(&(op.matrix() * a.subspace.basis()), DEFAULT_RANK_TOL)?;
            FrameAtom::new(a.measure.clone(), subspace, local(a))
        })
        .collect::<Result<Vec<_>>>()?;
    GFusionFrame::new(frame.dim(), frame.scalar(), atoms)
}

pub fn canonical_dual(frame: &GFusionFrame) -> Result<DualFrame> {
    let s_inv = inverse_of(&frame_operator(frame))?;
    let dual = transform(frame, &s_inv, |a| a.local.matrix() * s_inv.matrix())?;
    Ok(DualFrame {
        frame: dual,
        s_inverse: s_inv,
    })
}

/// `(S^{-1/2}F, Λ π_F S^{-1/2}, ω)`, whose frame operator is `I`.
pub fn parsevalize(frame: &GFusionFrame) -> Result<GFusionFrame> {
    let s = frame_operator(frame);
    frame_bounds_of(&s)?;
    let root = s.power(PsdExponent::InverseSqrt)?;
    transform(frame, &root, |a| a.local.matrix() * root.matrix())
}

fn frame_bounds_of(s: &HermitianOperator) -> Result<()> {
    crate::operators::bounds_of(s).map(|_| ())
}

/// `Σ_{i∈X₁} μᵢ ωᵢ² π_F Λᵢᴴ Λ̃ᵢ π_F̃`, summed through the canonical dual.
pub fn mixed_partial_via_dual(frame: &GFusionFrame, dual: &DualFrame, mask: &SubsetMask) -> Result<CMatrix> {
    let flags = mask.resolve(frame)?;
    let terms: Vec<CMatrix> = frame
        .atoms()
        .iter()
        .zip(dual.frame.atoms())
        .map(|(a, d)| a.local.matrix().adjoint() * d.local.matrix() * c(a.measure.energy_weight()))
        .collect();
    Ok(masked_sum(&terms, &flags, frame.dim()))
}

/// Both orderings `Σ μω² πΛᴴΛπ S⁻¹ f` and `Σ μω² S⁻¹πΛᴴΛπ f`, accumulated atom by atom.
pub fn reconstruct(frame: &GFusionFrame, f: &CVector) -> Result<(CVector, CVector)> {
    let s_inv = inverse_of(&frame_operator(frame))?;
    let g = s_inv.apply(f);
    let n = frame.dim();
    let mut right = CVector::zeros(n);
    let mut left = CVector::zeros(n);
    for atom in frame.atoms() {
        let l = atom.local.matrix();
        let w = c(atom.measure.energy_weight());
        right += l.adjoint() * (l * &g) * w;
        left += s_inv.matrix() * (l.adjoint() * (l * f)) * w;
    }
    Ok((right, left))
}

/// `Σ μᵢωᵢ² ‖Λ̃ᵢ π_F̃ g‖²`, which equals `⟨S⁻¹g, g⟩`.
pub fn dual_energy(dual: &DualFrame, g: &CVector) -> f64 {
    crate::operators::energy(&dual.frame, g)
}

fn require_square_locals(frame: &GFusionFrame, role: &str) -> Result<()> {
    let n = frame.dim();
    match frame.atoms().iter().find(|a| a.local.out_dim() != n) {
        Some(a) => Err(Error::ShapeMismatch(format!(
            "{role} atom `{}` maps into dimension {}, but the alternate-dual pairing needs {n}",
            a.id(),
            a.local.out_dim()
        ))),
        None => Ok(()),
    }
}

/// Per-atom terms `μᵢ ωᵢ νᵢ π_G Γᵢᴴ S_V⁻¹ Λᵢ π_F`.
pub fn alternate_dual_terms(v: &GFusionFrame, w: &GFusionFrame) -> Result<Vec<CMatrix>> {
    check_pair_compatible(v, w)?;
    require_square_locals(v, "primal")?;
    require_square_locals(w, "dual")?;
    let s_inv = inverse_of(&frame_operator(v))?;
    Ok(v.atoms()
        .iter()
        .zip(w.atoms())
        .map(|(a, b)| {
            let weight = a.measure.mu * a.measure.omega * b.measure.omega;
            b.local.matrix().adjoint() * s_inv.matrix() * a.local.matrix() * c(weight)
        })
        .collect())
}

/// `Σᵢ μᵢ ωᵢ νᵢ π_G Γᵢᴴ S_V⁻¹ Λᵢ π_F`.
pub fn alternate_dual_operator(v: &GFusionFrame, w: &GFusionFrame) -> Result<CMatrix> {
    let terms = alternate_dual_terms(v, w)?;
    Ok(masked_sum(&terms, &vec![true; terms.len()], v.dim()))
}

/// `‖Σᵢ μᵢ ωᵢ νᵢ π_G Γᵢᴴ S_V⁻¹ Λᵢ π_F − I‖`.
pub fn alternate_dual_residual(v: &GFusionFrame, w: &GFusionFrame) -> Result<f64> {
    let n = v.dim();
    Ok(operator_norm(&(alternate_dual_operator(v, w)? - CMatrix::identity(n, n)))?)
}

/// Default alternate-dual tolerance `1e-9 · n`.
pub fn default_alternate_tol(n: usize) -> f64 {
    1e-9 * n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlternateDualStatus {
    pub is_dual: bool,
    pub residual: f64,
    pub tol: f64,
}

pub fn is_alternate_dual(v: &GFusionFrame, w: &GFusionFrame, tol: f64) -> Result<AlternateDualStatus> {
    let residual = alternate_dual_residual(v, w)?;
    Ok(AlternateDualStatus {
        is_dual: residual <= tol,
        residual,
        tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlternateDualBound {
    /// `1 / (‖S_V⁻¹‖² B_V)`.
    pub certificate: f64,
    /// `λ_min(S_W)`.
    pub actual: f64,
    pub holds: bool,
}

/// Certified lower frame bound for an alternate dual `W`, checked against `λ_min(S_W)` with slack `1e-9`.
pub fn alternate_dual_lower_bound(v: &GFusionFrame, w: &GFusionFrame, tol: f64) -> Result<AlternateDualBound> {
    let status = is_alternate_dual(v, w, tol)?;
    if !status.is_dual {
        return Err(Error::NotAlternateDual {
            residual: status.residual,
            tol,
        });
    }
    let bounds = frame_bounds(v)?;
    // ‖S⁻¹‖ = 1/A.
    let inv_norm = 1.0 / bounds.lower;
    let certificate = 1.0 / (inv_norm * inv_norm * bounds.upper);
    let actual = frame_operator(w).min_eigenvalue()?;
    Ok(AlternateDualBound {
        certificate,
        actual,
        holds: actual >= certificate - 1e-9,
    })
}

/// The alternate dual `G = S⁻¹F`, `Γ = S Λ S⁻¹`, `ν = ω`; the pairing telescopes to `S⁻¹ S = I`.
pub fn reconstruction_dual(v: &GFusionFrame) -> Result<GFusionFrame> {
    require_square_locals(v, "primal")?;
    let s = frame_operator(v);
    let s_inv = inverse_of(&s)?;
    transform(v, &s_inv, |a| s.matrix() * a.local.matrix() * s_inv.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, FrameKind, GenConfig};
    use crate::linalg::{max_abs, CVector};
    use crate::operators::mixed_partial_operator;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
    }

    fn gap(a: &CMatrix, b: &CMatrix) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn dual_of_parseval_is_itself() {
        let m = gen::mercedes_frame();
        let d = canonical_dual(&m).unwrap();
        for (a, b) in m.atoms().iter().zip(d.frame.atoms()) {
            assert!(gap(a.local.matrix(), b.local.matrix()) < 1e-12);
            assert!(gap(&a.subspace.projector_matrix(), &b.subspace.projector_matrix()) < 1e-12);
        }
    }

    #[test]
    fn dual_of_tight_divides_by_lambda() {
        let t = gen::random_frame(&GenConfig::new(3, 5, 2).kind(FrameKind::Tight(2.0))).unwrap();
        let d = canonical_dual(&t).unwrap();
        for (a, b) in t.atoms().iter().zip(d.frame.atoms()) {
            assert!(gap(&(a.local.matrix() * c(0.5)), b.local.matrix()) < 1e-9);
        }
    }

    #[test]
    fn dual_of_two_scale_frame() {
        let two = gen::two_scale_frame();
        let d = canonical_dual(&two).unwrap();
        // Canonical Λ for span{e₁} is diag(1, 0); times S⁻¹ = diag(1/2, 1).
        let expected = real(2, 2, &[1.0, 0.0, 0.0, 0.0]) * real(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert!(gap(d.frame.atoms()[0].local.matrix(), &expected) < 1e-12);
        let s_dual = frame_operator(&d.frame);
        assert!(gap(s_dual.matrix(), &real(2, 2, &[0.5, 0.0, 0.0, 1.0])) < 1e-12);
        let f = CVector::from_vec(vec![c(0.3), c(-1.7)]);
        let mut back = CVector::zeros(2);
        for (a, b) in two.atoms().iter().zip(d.frame.atoms()) {
            back += a.local.matrix().adjoint() * (b.local.matrix() * &f) * c(a.measure.energy_weight());
        }
        assert!((back - f).norm() < 1e-12);
    }

    #[test]
    fn mixed_partial_routes_agree() {
        let frame = gen::random_frame(&GenConfig::new(4, 7, 11).complex()).unwrap();
        let dual = canonical_dual(&frame).unwrap();
        let mask = SubsetMask::new(["x0", "x3", "x4"]);
        let closed = mixed_partial_operator(&frame, &mask).unwrap();
        let summed = mixed_partial_via_dual(&frame, &dual, &mask).unwrap();
        assert!(gap(&closed, &summed) <= 1e-10 * max_abs(&closed).max(1.0));
    }

    #[test]
    fn parsevalize_examples() {
        let two = gen::two_scale_frame();
        let p = parsevalize(&two).unwrap();
        assert!(gap(frame_operator(&p).matrix(), &CMatrix::identity(2, 2)) < 1e-12);
        let again = parsevalize(&p).unwrap();
        assert!(gap(frame_operator(&again).matrix(), &CMatrix::identity(2, 2)) < 1e-12);

        let t = gen::random_frame(&GenConfig::new(3, 5, 4).kind(FrameKind::Tight(4.0))).unwrap();
        let p = parsevalize(&t).unwrap();
        for (a, b) in t.atoms().iter().zip(p.atoms()) {
            assert!(gap(&(a.local.matrix() * c(0.5)), b.local.matrix()) < 1e-9);
        }

        let bessel = gen::random_frame(&GenConfig::new(3, 5, 4).kind(FrameKind::BesselOnly)).unwrap();
        assert!(matches!(parsevalize(&bessel), Err(Error::NotAFrame { .. })));
        assert!(matches!(canonical_dual(&bessel), Err(Error::NotAFrame { .. })));
    }

    #[test]
    fn reconstruction_both_orders() {
        let frame = gen::random_frame(&GenConfig::new(5, 9, 8).complex()).unwrap();
        let f = CVector::from_fn(5, |k, _| num_complex::Complex64::new(k as f64 - 2.0, 0.5));
        let (right, left) = reconstruct(&frame, &f).unwrap();
        assert!((right - &f).norm() <= 1e-10 * f.norm());
        assert!((left - &f).norm() <= 1e-10 * f.norm());
    }

    #[test]
    fn alternate_dual_examples() {
        let m = gen::mercedes_frame();
        // Mercedes locals are 1×2, so pair the square-local Parseval frame instead.
        assert!(matches!(is_alternate_dual(&m, &m, 1e-9), Err(Error::ShapeMismatch(_))));

        let p = parsevalize(&gen::two_scale_frame()).unwrap();
        let status = is_alternate_dual(&p, &p, 1e-12).unwrap();
        assert!(status.is_dual && status.residual <= 1e-12);
        let bound = alternate_dual_lower_bound(&p, &p, 1e-12).unwrap();
        assert!((bound.certificate - 1.0).abs() < 1e-12 && bound.holds);
        assert!((bound.actual - 1.0).abs() < 1e-12);

        // W = V on the non-Parseval two-scale frame: Σ Λ*S⁻¹Λ = diag(1/2, 0) + diag(1/2, 1) = I.
        let two = gen::two_scale_frame();
        let status = is_alternate_dual(&two, &two, 1e-12).unwrap();
        assert!(status.is_dual);

        let v = gen::random_frame(&GenConfig::new(3, 5, 6).out_dims(3, 3)).unwrap();
        let status = is_alternate_dual(&v, &v, 1e-9).unwrap();
        assert!(!status.is_dual && status.residual > 1e-3);
        assert!(matches!(
            alternate_dual_lower_bound(&v, &v, 1e-9),
            Err(Error::NotAlternateDual { .. })
        ));
    }

    #[test]
    fn tight_certificate_matches_hand_value() {
        let p = parsevalize(&gen::two_scale_frame()).unwrap();
        let r2 = 2f64.sqrt();
        let tight = p.scaled_operators(r2).unwrap();
        let w = reconstruction_dual(&tight).unwrap();
        let bound = alternate_dual_lower_bound(&tight, &w, 1e-9).unwrap();
        // ‖S⁻¹‖ = 1/2, B = 2.
        assert!((bound.certificate - 2.0).abs() < 1e-12);
        assert!(bound.holds);
    }

    #[test]
    fn reconstruction_dual_certifies() {
        for seed in 0..10 {
            let v = gen::random_frame(&GenConfig::new(3, 6, seed).out_dims(3, 3).complex()).unwrap();
            let w = reconstruction_dual(&v).unwrap();
            let bound = alternate_dual_lower_bound(&v, &w, 1e-9).unwrap();
            assert!(bound.holds, "seed {seed}: {bound:?}");
        }
    }
}
