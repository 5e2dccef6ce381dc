//! Seeded generators for test corpora and the hand-checkable example frames.
//!
//! Randomness for atom `i` on draw attempt `t` comes from
//! `rng::stream(seed, [t, i, field])` with `field` 0 for the subspace, 1 for
//! the local operator and 2 for the weight. Atom ids are `x0, x1, …`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::duality::{alternate_dual_residual, parsevalize, reconstruction_dual};
use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, CMatrix, ScalarKind, DEFAULT_RANK_TOL};
use crate::model::{FrameAtom, GFusionFrame, MeasureAtom, Subspace};
use crate::operators::frame_operator;
use crate::rng::stream;

/// Redraw cap for frames whose lower bound falls below the floor.
pub const MAX_ATTEMPTS: usize = 16;

const PARSEVAL_REFINE_GAP: f64 = 1e-13;
const FIELD_SUBSPACE: u64 = 0;
const FIELD_LOCAL: u64 = 1;
const FIELD_OMEGA: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "lambda", rename_all = "snake_case")]
pub enum FrameKind {
    Random,
    Parseval,
    Tight(f64),
    BesselOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub dim: usize,
    pub atoms: usize,
    pub seed: u64,
    pub scalar: ScalarKind,
    /// Inclusive range of subspace dimensions; `None` means `[1, n]`.
    pub subspace_dims: Option<(usize, usize)>,
    /// Inclusive range of local output dimensions; `None` means `[1, 2n]`.
    pub out_dims: Option<(usize, usize)>,
    pub kind: FrameKind,
    /// Redraw while `B/A` exceeds this.
    pub max_condition: Option<f64>,
}

impl GenConfig {
    pub fn new(dim: usize, atoms: usize, seed: u64) -> Self {
        Self {
            dim,
            atoms,
            seed,
            scalar: ScalarKind::Real,
            subspace_dims: None,
            out_dims: None,
            kind: FrameKind::Random,
            max_condition: None,
        }
    }

    pub fn complex(mut self) -> Self {
        self.scalar = ScalarKind::Complex;
        self
    }

    pub fn scalar(mut self, scalar: ScalarKind) -> Self {
        self.scalar = scalar;
        self
    }

    pub fn kind(mut self, kind: FrameKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn subspace_dims(mut self, lo: usize, hi: usize) -> Self {
        self.subspace_dims = Some((lo, hi));
        self
    }

    pub fn out_dims(mut self, lo: usize, hi: usize) -> Self {
        self.out_dims = Some((lo, hi));
        self
    }

    pub fn max_condition(mut self, kappa: f64) -> Self {
        self.max_condition = Some(kappa);
        self
    }

    fn resolved_subspace_dims(&self) -> (usize, usize) {
        self.subspace_dims.unwrap_or((1, self.dim))
    }

    fn resolved_out_dims(&self) -> (usize, usize) {
        self.out_dims.unwrap_or((1, 2 * self.dim))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let n = self.dim;
        if !(1..=64).contains(&n) {
            return bad(format!("dim must be in [1, 64], got {n}"));
        }
        if !(1..=4096).contains(&self.atoms) {
            return bad(format!("atoms must be in [1, 4096], got {}", self.atoms));
        }
        let (lo, hi) = self.resolved_subspace_dims();
        if lo < 1 || lo > hi || hi > n {
            return bad(format!("subspace dimension range [{lo}, {hi}] not within [1, {n}]"));
        }
        let (lo, hi) = self.resolved_out_dims();
        if lo < 1 || lo > hi || hi > 2 * n {
            return bad(format!("output dimension range [{lo}, {hi}] not within [1, {}]", 2 * n));
        }
        match self.kind {
            FrameKind::Tight(l) if !(l.is_finite() && l > 0.0) => {
                return bad(format!("tight frames need a finite λ > 0, got {l}"));
            }
            FrameKind::BesselOnly if n < 2 => {
                return bad("a Bessel-only family needs dim ≥ 2".into());
            }
            _ => {}
        }
        if let Some(k) = self.max_condition {
            if k.is_nan() || k < 1.0 {
                return bad(format!("max_condition must be ≥ 1, got {k}"));
            }
        }
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng, scalar: ScalarKind) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    match scalar {
        ScalarKind::Real => c(re),
        ScalarKind::Complex => Complex64::new(re, rng.sample(StandardNormal)),
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scalar: ScalarKind) -> CMatrix {
    // Row-major draw order so the stream layout does not depend on storage order.
    let mut m = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        for k in 0..cols {
            m[(r, k)] = gaussian(rng, scalar);
        }
    }
    m
}

fn draw_atom(cfg: &GenConfig, attempt: usize, index: usize) -> Result<FrameAtom> {
    let n = cfg.dim;
    let path = |field| [attempt as u64, index as u64, field];

    let mut rng = stream(cfg.seed, &path(FIELD_SUBSPACE));
    let (lo, hi) = cfg.resolved_subspace_dims();
    // Bessel-only families keep every subspace inside e_n^⊥.
    let rows = if cfg.kind == FrameKind::BesselOnly { n - 1 } else { n };
    let d = rng.random_range(lo.min(rows)..=hi.min(rows));
    let mut spanning = CMatrix::zeros(n, d);
    spanning
        .rows_mut(0, rows)
        .copy_from(&gaussian_matrix(&mut rng, rows, d, cfg.scalar));
    let subspace = Subspace::from_spanning(&spanning, DEFAULT_RANK_TOL)?;

    let mut rng = stream(cfg.seed, &path(FIELD_LOCAL));
    let (lo, hi) = cfg.resolved_out_dims();
    let m = rng.random_range(lo..=hi);
    let local = gaussian_matrix(&mut rng, m, n, cfg.scalar);

    let mut rng = stream(cfg.seed, &path(FIELD_OMEGA));
    let omega = rng.random_range(0.25f64.ln()..=4f64.ln()).exp();

    FrameAtom::new(MeasureAtom::new(format!("x{index}"), 1.0, omega)?, subspace, local)
}

fn draw_family(cfg: &GenConfig, attempt: usize) -> Result<GFusionFrame> {
    let atoms = (0..cfg.atoms)
        .map(|i| draw_atom(cfg, attempt, i))
        .collect::<Result<Vec<_>>>()?;
    GFusionFrame::new(cfg.dim, cfg.scalar, atoms)
}

/// `S^{-1/2}` leaves `‖S_P − I‖` of order `κ(S)·ε`; a second pass on the
/// nearly Parseval result brings it down to `ε`.
fn parseval_refined(frame: &GFusionFrame) -> Result<GFusionFrame> {
    let p = parsevalize(frame)?;
    let n = frame.dim();
    if max_abs(&(frame_operator(&p).matrix() - CMatrix::identity(n, n))) > PARSEVAL_REFINE_GAP {
        return parsevalize(&p);
    }
    Ok(p)
}

/// A random family per `cfg`; deterministic in `cfg`.
pub fn random_frame(cfg: &GenConfig) -> Result<GFusionFrame> {
    cfg.validate()?;
    if cfg.kind == FrameKind::BesselOnly {
        return draw_family(cfg, 0);
    }
    let mut last_reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let frame = draw_family(cfg, attempt)?;
        let s = frame_operator(&frame);
        let spec = s.spectrum()?;
        let floor = s.invertibility_floor()?;
        if spec.min() <= floor {
            last_reason = format!("lower bound {:e} at or below floor {floor:e}", spec.min());
            continue;
        }
        if let Some(kappa) = cfg.max_condition {
            if spec.max() / spec.min() > kappa {
                last_reason = format!("condition number {:e} above {kappa:e}", spec.max() / spec.min());
                continue;
            }
        }
        return match cfg.kind {
            FrameKind::Random => Ok(frame),
            FrameKind::Parseval => parseval_refined(&frame),
            FrameKind::Tight(l) => parseval_refined(&frame)?.scaled_operators(l.sqrt()),
            FrameKind::BesselOnly => unreachable!(),
        };
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: last_reason,
    })
}

fn basis_vector(n: usize, k: usize) -> CMatrix {
    CMatrix::from_fn(n, 1, |r, _| c(if r == k { 1.0 } else { 0.0 }))
}

/// `n` atoms `e1, …, en`: `F = span{e_k}`, `Λ = e_kᴴ`, `μ = ω = 1`. `S = I` exactly.
pub fn orthonormal_basis_frame(n: usize) -> GFusionFrame {
    let atoms = (0..n)
        .map(|k| {
            let e = basis_vector(n, k);
            FrameAtom::new(
                MeasureAtom::new(format!("e{}", k + 1), 1.0, 1.0).expect("unit weights"),
                Subspace::from_orthonormal(e.clone()).expect("unit vector"),
                e.adjoint(),
            )
            .expect("well-formed atom")
        })
        .collect();
    GFusionFrame::new(n, ScalarKind::Real, atoms).expect("well-formed frame")
}

/// Three equiangular lines in ℝ², atoms `v0, v1, v2`, `Λₖ = √(2/3) vₖᴴ`.
pub fn mercedes_frame() -> GFusionFrame {
    let scale = (2.0f64 / 3.0).sqrt();
    let atoms = (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0;
            let v = CMatrix::from_column_slice(2, 1, &[c(t.cos()), c(t.sin())]);
            let subspace = Subspace::from_vectors(&v).expect("unit vector");
            FrameAtom::new(
                MeasureAtom::new(format!("v{k}"), 1.0, 1.0).expect("unit weights"),
                subspace,
                v.adjoint() * c(scale),
            )
            .expect("well-formed atom")
        })
        .collect();
    GFusionFrame::new(2, ScalarKind::Real, atoms).expect("well-formed frame")
}

/// Atom `line`: `span{e₁}` with `Λ = I₂`; atom `plane`: ℝ² with `Λ = I₂`. `S = diag(2, 1)`.
pub fn two_scale_frame() -> GFusionFrame {
    let line = FrameAtom::new(
        MeasureAtom::new("line", 1.0, 1.0).expect("unit weights"),
        Subspace::from_orthonormal(basis_vector(2, 0)).expect("unit vector"),
        CMatrix::identity(2, 2),
    )
    .expect("well-formed atom");
    let plane = FrameAtom::new(
        MeasureAtom::new("plane", 1.0, 1.0).expect("unit weights"),
        Subspace::full(2),
        CMatrix::identity(2, 2),
    )
    .expect("well-formed atom");
    GFusionFrame::new(2, ScalarKind::Real, vec![line, plane]).expect("well-formed frame")
}

/// `(V, W)` with `V` the orthonormal basis of ℝⁿ and `W` the same family with `ν = weights`,
/// so that `S_FG = diag(weights)`.
pub fn diagonal_pair(weights: &[f64]) -> Result<(GFusionFrame, GFusionFrame)> {
    let v = orthonormal_basis_frame(weights.len());
    let w = v.with_omegas(weights)?;
    Ok((v, w))
}

/// A partner family over the measure space of `v`: same subspaces and weights,
/// `Γ = Λ + ε ‖Λ‖_F E` with `E` a Gaussian matrix of unit Frobenius norm.
/// `ε = 0` returns `v`.
pub fn perturbed_partner(v: &GFusionFrame, eps: f64, seed: u64) -> Result<GFusionFrame> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidConfig(format!("perturbation size must be finite and ≥ 0, got {eps}")));
    }
    let atoms = v
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut rng = stream(seed, &[i as u64, FIELD_LOCAL]);
            let local = a.local.matrix();
            let e = gaussian_matrix(&mut rng, local.nrows(), local.ncols(), v.scalar());
            let scale = eps * local.norm() / e.norm().max(f64::MIN_POSITIVE);
            FrameAtom::new(a.measure.clone(), a.subspace.clone(), local + e * c(scale))
        })
        .collect::<Result<Vec<_>>>()?;
    GFusionFrame::new(v.dim(), v.scalar(), atoms)
}

/// How the dual half of an [`AlternateDualPair`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualWitness {
    /// `W = V` for Parseval `V`.
    ParsevalSelf,
    /// `G = S⁻¹F`, `Γ = SΛS⁻¹`, `ν = ω`.
    Reconstruction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternateDualPair {
    pub v: GFusionFrame,
    pub w: GFusionFrame,
    pub witness: DualWitness,
    pub residual: f64,
}

/// A random frame `V` (local output dimension forced to `n`) and an alternate dual `W`.
pub fn alternate_dual_pair(cfg: &GenConfig) -> Result<AlternateDualPair> {
    let cfg = cfg.clone().out_dims(cfg.dim, cfg.dim);
    if cfg.kind == FrameKind::BesselOnly {
        return Err(Error::InvalidConfig(
            "alternate duals need a frame, not a Bessel-only family".into(),
        ));
    }
    let v = random_frame(&cfg)?;
    let (w, witness) = match cfg.kind {
        FrameKind::Parseval => (v.clone(), DualWitness::ParsevalSelf),
        _ => (reconstruction_dual(&v)?, DualWitness::Reconstruction),
    };
    let residual = alternate_dual_residual(&v, &w)?;
    let tol = 1e-9 * cfg.dim as f64;
    if residual > tol {
        return Err(Error::GenerationFailed {
            attempts: 1,
            reason: format!("alternate-dual residual {residual:e} above {tol:e}"),
        });
    }
    Ok(AlternateDualPair {
        v,
        w,
        witness,
        residual,
    })
}
