//! Dense linear-algebra kernel.
//!
//! Every matrix in the crate is stored over `Complex<f64>`. Frames built in
//! real mode keep all imaginary parts exactly zero, and the spectral routines
//! below detect that case and run the real solvers so no rounding noise leaks
//! into the imaginary component.
//!
//! Inverses and square roots are never formed by direct inversion: they go
//! through the eigendecomposition of the (exactly symmetrized) operator.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative tolerance on `‖M − M*‖_∞` accepted when building a [`HermitianOperator`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default relative rank threshold for [`orthonormalize`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// An operator counts as invertible when `λ_min > PSD_FLOOR_REL · max(1, λ_max)`.
pub const PSD_FLOOR_REL: f64 = 1e-12;
/// Negative eigenvalues down to `-EIG_TOL · max(1, λ_max)` are clamped to zero for square roots.
pub const EIG_TOL: f64 = 1e-10;

const MAX_SWEEPS_PER_DIM: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("every input vector is numerically zero (largest singular value {largest:e})")]
    AllVectorsNumericallyZero { largest: f64 },
    #[error("{0} did not converge within the iteration cap")]
    ConvergenceFailure(&'static str),
    #[error("operator is singular: smallest eigenvalue {min_eigenvalue:e} is below floor {floor:e}")]
    SingularOperator { min_eigenvalue: f64, floor: f64 },
    #[error("operator is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("matrix is not Hermitian: ‖M − M*‖_∞ = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("expected a {expected} matrix, found {found}")]
    Shape { expected: String, found: String },
    #[error("empty input")]
    Empty,
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

/// Underlying field of the Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Real => "real",
            ScalarKind::Complex => "complex",
        }
    }
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `⟨a, b⟩`, linear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    b.dotc(a)
}

pub fn norm_sq(v: &CVector) -> f64 {
    v.norm_squared()
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Induced ∞-norm (maximum absolute row sum).
pub fn inf_norm(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Some(real part)` when every imaginary component is exactly zero.
fn real_view(m: &CMatrix) -> Option<DMatrix<f64>> {
    if m.iter().all(|z| z.im == 0.0) {
        Some(m.map(|z| z.re))
    } else {
        None
    }
}

fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

fn iteration_cap(n: usize) -> usize {
    MAX_SWEEPS_PER_DIM * n.max(1)
}

/// Singular values (unordered as produced) plus left singular vectors.
fn svd_left(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let cap = iteration_cap(m.nrows().max(m.ncols()));
    match real_view(m) {
        Some(r) => {
            let svd = r
                .try_svd(true, false, f64::EPSILON, cap)
                .ok_or(LinalgError::ConvergenceFailure("singular value decomposition"))?;
            let u = svd.u.expect("requested left singular vectors");
            Ok((svd.singular_values.iter().copied().collect(), complexify(&u)))
        }
        None => {
            let svd = m
                .clone()
                .try_svd(true, false, f64::EPSILON, cap)
                .ok_or(LinalgError::ConvergenceFailure("singular value decomposition"))?;
            let u = svd.u.expect("requested left singular vectors");
            Ok((svd.singular_values.iter().copied().collect(), u))
        }
    }
}

/// All singular values, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if !all_finite(m) {
        return Err(LinalgError::NonFinite);
    }
    let cap = iteration_cap(m.nrows().max(m.ncols()));
    let mut values: Vec<f64> = match real_view(m) {
        Some(r) => r
            .try_svd(false, false, f64::EPSILON, cap)
            .ok_or(LinalgError::ConvergenceFailure("singular value decomposition"))?
            .singular_values
            .iter()
            .copied()
            .collect(),
        None => m
            .clone()
            .try_svd(false, false, f64::EPSILON, cap)
            .ok_or(LinalgError::ConvergenceFailure("singular value decomposition"))?
            .singular_values
            .iter()
            .copied()
            .collect(),
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// `V Σ⁻¹ Uᴴ` for a square matrix whose singular values all exceed `floor`.
pub fn svd_inverse(m: &CMatrix, floor: f64) -> Result<CMatrix> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(LinalgError::Shape {
            expected: "non-empty square".into(),
            found: format!("{}×{}", m.nrows(), m.ncols()),
        });
    }
    if !all_finite(m) {
        return Err(LinalgError::NonFinite);
    }
    let cap = iteration_cap(m.nrows());
    let (sigma, u, v_t) = match real_view(m) {
        Some(r) => {
            let svd = r
                .try_svd(true, true, f64::EPSILON, cap)
                .ok_or(LinalgError::ConvergenceFailure("singular value decomposition"))?;
            let u = svd.u.expect("requested left singular vectors");
            let v_t = svd.v_t.expect("requested right singular vectors");
            (svd.singular_values, complexify(&u), complexify(&v_t))
        }
        None => {
            let svd = m
                .clone()
                .try_svd(true, true, f64::EPSILON, cap)
                .ok_or(LinalgError::ConvergenceFailure("singular value decomposition"))?;
            let u = svd.u.expect("requested left singular vectors");
            let v_t = svd.v_t.expect("requested right singular vectors");
            (svd.singular_values, u, v_t)
        }
    };
    let smallest = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    if smallest <= floor {
        return Err(LinalgError::SingularOperator {
            min_eigenvalue: smallest,
            floor,
        });
    }
    let inv_sigma = CMatrix::from_diagonal(&sigma.map(|s| c(1.0 / s)));
    Ok(v_t.adjoint() * inv_sigma * u.adjoint())
}

/// An orthonormal basis for the numerical span of a set of vectors.
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    /// `n × rank`, orthonormal columns.
    pub basis: CMatrix,
    pub rank: usize,
}

/// SVD-based orthonormalization of the columns of `columns`.
///
/// Left singular vectors with `σ > rank_tol · σ_max` are kept. The input is
/// rejected when `σ_max ≤ rank_tol`, i.e. when all vectors vanish at the
/// absolute scale.
pub fn orthonormalize_columns(columns: &CMatrix, rank_tol: f64) -> Result<Orthonormalized> {
    if columns.nrows() == 0 || columns.ncols() == 0 {
        return Err(LinalgError::Empty);
    }
    if !all_finite(columns) {
        return Err(LinalgError::NonFinite);
    }
    let (sigma, u) = svd_left(columns)?;
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    if largest <= rank_tol {
        return Err(LinalgError::AllVectorsNumericallyZero { largest });
    }
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| sigma[i] > rank_tol * largest)
        .collect();
    let basis = CMatrix::from_fn(columns.nrows(), keep.len(), |r, k| u[(r, keep[k])]);
    Ok(Orthonormalized {
        rank: keep.len(),
        basis,
    })
}

/// Orthonormalizes a list of `n`-dimensional vectors.
pub fn orthonormalize(vectors: &[CVector], rank_tol: f64) -> Result<Orthonormalized> {
    let first = vectors.first().ok_or(LinalgError::Empty)?;
    let n = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        return Err(LinalgError::Shape {
            expected: format!("{n}-vector"),
            found: format!("{}-vector", bad.len()),
        });
    }
    let cols = CMatrix::from_fn(n, vectors.len(), |r, k| vectors[k][r]);
    orthonormalize_columns(&cols, rank_tol)
}

/// Eigenvalues (ascending) and a unitary matrix whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(g(λ)) V*`.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let gk = g(lambda);
            for r in 0..n {
                scaled[(r, k)] *= gk;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

fn sorted_spectrum(values: Vec<f64>, vectors: CMatrix) -> Spectrum {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let n = vectors.nrows();
    Spectrum {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: CMatrix::from_fn(n, order.len(), |r, k| vectors[(r, order[k])]),
    }
}

fn eig_symmetrized(m: &CMatrix) -> Result<Spectrum> {
    let cap = iteration_cap(m.nrows());
    match real_view(m) {
        Some(r) => {
            let eig = SymmetricEigen::try_new(r, f64::EPSILON, cap)
                .ok_or(LinalgError::ConvergenceFailure("Hermitian eigendecomposition"))?;
            Ok(sorted_spectrum(
                eig.eigenvalues.iter().copied().collect(),
                complexify(&eig.eigenvectors),
            ))
        }
        None => {
            let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, cap)
                .ok_or(LinalgError::ConvergenceFailure("Hermitian eigendecomposition"))?;
            Ok(sorted_spectrum(
                eig.eigenvalues.iter().copied().collect(),
                eig.eigenvectors,
            ))
        }
    }
}

/// Exponents supported by [`psd_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdExponent {
    Inverse,
    InverseSqrt,
    Sqrt,
}

impl PsdExponent {
    pub fn value(self) -> f64 {
        match self {
            PsdExponent::Inverse => -1.0,
            PsdExponent::InverseSqrt => -0.5,
            PsdExponent::Sqrt => 0.5,
        }
    }
}

/// A self-adjoint `dim × dim` operator with a lazily computed spectrum.
///
/// The stored matrix is exactly `(M + M*)/2` of whatever was supplied.
#[derive(Debug)]
pub struct HermitianOperator {
    matrix: CMatrix,
    spectrum: OnceLock<Spectrum>,
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            matrix: self.matrix.clone(),
            spectrum,
        }
    }
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl HermitianOperator {
    /// Checks `‖M − M*‖_∞ ≤ HERMITIAN_TOL · max(1, ‖M‖_∞)` and symmetrizes.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(LinalgError::Shape {
                expected: "non-empty square".into(),
                found: format!("{}×{}", m.nrows(), m.ncols()),
            });
        }
        if !all_finite(&m) {
            return Err(LinalgError::NonFinite);
        }
        let asymmetry = inf_norm(&(&m - m.adjoint()));
        if asymmetry > tol * inf_norm(&m).max(1.0) {
            return Err(LinalgError::NotHermitian { asymmetry });
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without the asymmetry check. For sums that are Hermitian by construction.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        let matrix = (m + adj) * c(0.5);
        Self {
            matrix,
            spectrum: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::symmetrized(CMatrix::identity(n, n))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let computed = eig_symmetrized(&self.matrix)?;
        // A concurrent reader may have won the race; both values are identical.
        let _ = self.spectrum.set(computed);
        Ok(self.spectrum.get().expect("spectrum was just set"))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?.min())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?.max())
    }

    /// `max |λ|`, equal to the operator norm for Hermitian matrices.
    pub fn spectral_radius(&self) -> Result<f64> {
        let s = self.spectrum()?;
        Ok(s.min().abs().max(s.max().abs()))
    }

    /// The invertibility floor `PSD_FLOOR_REL · max(1, λ_max)`.
    pub fn invertibility_floor(&self) -> Result<f64> {
        Ok(PSD_FLOOR_REL * self.max_eigenvalue()?.max(1.0))
    }

    pub fn is_invertible(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? > self.invertibility_floor()?)
    }

    pub fn power(&self, exponent: PsdExponent) -> Result<HermitianOperator> {
        psd_power(self, exponent)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// `⟨H v, v⟩`, real for Hermitian `H` up to rounding.
    pub fn quadratic_form(&self, v: &CVector) -> Complex64 {
        inner(&self.apply(v), v)
    }
}

/// Eigenvalues ascending and the unitary eigenvector matrix.
pub fn hermitian_eig(op: &HermitianOperator) -> Result<(Vec<f64>, CMatrix)> {
    let s = op.spectrum()?;
    Ok((s.values.clone(), s.vectors.clone()))
}

/// `V diag(λ^p) V*` for `p ∈ {−1, −1/2, 1/2}`.
pub fn psd_power(op: &HermitianOperator, exponent: PsdExponent) -> Result<HermitianOperator> {
    let spec = op.spectrum()?;
    let lmin = spec.min();
    let lmax = spec.max();
    let matrix = match exponent {
        PsdExponent::Inverse | PsdExponent::InverseSqrt => {
            let floor = PSD_FLOOR_REL * lmax.max(1.0);
            if lmin <= floor {
                return Err(LinalgError::SingularOperator {
                    min_eigenvalue: lmin,
                    floor,
                });
            }
            let p = exponent.value();
            spec.map(|l| l.powf(p))
        }
        PsdExponent::Sqrt => {
            if lmin < -EIG_TOL * lmax.max(1.0) {
                return Err(LinalgError::NotPositiveSemidefinite {
                    min_eigenvalue: lmin,
                });
            }
            spec.map(|l| l.max(0.0).sqrt())
        }
    };
    Ok(HermitianOperator::symmetrized(matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
    }

    fn vec_of(data: &[f64]) -> CVector {
        CVector::from_iterator(data.len(), data.iter().map(|&x| c(x)))
    }

    fn random_hermitian(n: usize, seed: u64, complex: bool) -> HermitianOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(n, n, |_, _| {
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            Complex64::new(rng.random_range(-1.0..1.0), im)
        });
        HermitianOperator::symmetrized(&a + a.adjoint())
    }

    #[test]
    fn svd_inverse_examples() {
        let m = real(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let inv = svd_inverse(&m, 1e-12).unwrap();
        assert!(max_abs(&(inv - real(2, 2, &[0.5, 0.0, 0.0, 1.0]))) < 1e-15);
        let z = CMatrix::from_fn(3, 3, |r, k| Complex64::new((r + 2 * k) as f64, r as f64 - k as f64) + c(if r == k { 5.0 } else { 0.0 }));
        let inv = svd_inverse(&z, 1e-12).unwrap();
        assert!(max_abs(&(&inv * &z - CMatrix::identity(3, 3))) < 1e-12);
        assert!(matches!(
            svd_inverse(&real(2, 2, &[1.0, 1.0, 1.0, 1.0]), 1e-12),
            Err(LinalgError::SingularOperator { .. })
        ));
    }

    fn gram_residual(u: &CMatrix) -> f64 {
        max_abs(&(u.adjoint() * u - CMatrix::identity(u.ncols(), u.ncols())))
    }

    #[test]
    fn orthonormalize_identity_pair() {
        let out = orthonormalize(&[vec_of(&[1.0, 0.0]), vec_of(&[0.0, 1.0])], 1e-10).unwrap();
        assert_eq!(out.rank, 2);
        assert!(gram_residual(&out.basis) < 1e-12);
        let p = &out.basis * out.basis.adjoint();
        assert!(max_abs(&(p - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn orthonormalize_collinear() {
        let out = orthonormalize(&[vec_of(&[1.0, 0.0]), vec_of(&[2.0, 0.0])], 1e-10).unwrap();
        assert_eq!(out.rank, 1);
        assert!((out.basis[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(out.basis[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_rotated_pair() {
        let out = orthonormalize(&[vec_of(&[1.0, 1.0]), vec_of(&[1.0, -1.0])], 1e-10).unwrap();
        assert_eq!(out.rank, 2);
        // Explicit Gram computation U*U.
        let u = &out.basis;
        for i in 0..2 {
            for j in 0..2 {
                let g: Complex64 = (0..2).map(|r| u[(r, i)].conj() * u[(r, j)]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormalize_rejects_zero_input() {
        let err = orthonormalize(&[vec_of(&[0.0, 0.0]), vec_of(&[1e-14, 0.0])], 1e-10).unwrap_err();
        assert!(matches!(err, LinalgError::AllVectorsNumericallyZero { .. }));
        assert_eq!(orthonormalize(&[], 1e-10).unwrap_err(), LinalgError::Empty);
    }

    #[test]
    fn orthonormalize_rejects_non_finite() {
        let err = orthonormalize(&[vec_of(&[f64::NAN, 0.0])], 1e-10).unwrap_err();
        assert_eq!(err, LinalgError::NonFinite);
    }

    #[test]
    fn eig_diagonal() {
        let op = HermitianOperator::new(real(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        let (values, vectors) = hermitian_eig(&op).unwrap();
        assert_eq!(values.len(), 2);
        assert!((values[0] - 1.0).abs() < 1e-14 && (values[1] - 3.0).abs() < 1e-14);
        // Permutation of the identity up to sign.
        assert!((vectors[(1, 0)].norm() - 1.0).abs() < 1e-14);
        assert!((vectors[(0, 1)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_swap() {
        let op = HermitianOperator::new(real(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let (values, _) = hermitian_eig(&op).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-14 && (values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_residual_random() {
        for complex in [false, true] {
            let op = random_hermitian(6, 7, complex);
            let (values, v) = hermitian_eig(&op).unwrap();
            let m = op.matrix();
            let d = CMatrix::from_diagonal(&CVector::from_iterator(6, values.iter().map(|&l| c(l))));
            let residual = inf_norm(&(m * &v - &v * d));
            assert!(residual <= 1e-10 * inf_norm(m).max(1.0), "residual {residual}");
            assert!(gram_residual(&v) <= 1e-10);
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn real_mode_stays_real() {
        let op = random_hermitian(5, 3, false);
        let (_, v) = hermitian_eig(&op).unwrap();
        assert!(v.iter().all(|z| z.im == 0.0));
        let root = psd_power(&HermitianOperator::symmetrized(op.matrix() * op.matrix()), PsdExponent::Sqrt)
            .unwrap();
        assert!(root.matrix().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianOperator::new(real(2, 2, &[1.0, 2.0, 0.0, 1.0])).unwrap_err();
        assert!(matches!(err, LinalgError::NotHermitian { .. }));
    }

    #[test]
    fn symmetrization_is_exact() {
        let m = real(2, 2, &[1.0, 0.3, 0.3 + 1e-13, 2.0]);
        let op = HermitianOperator::new(m).unwrap();
        assert_eq!(op.matrix(), &op.matrix().adjoint());
    }

    #[test]
    fn power_examples() {
        let id = HermitianOperator::identity(3);
        let r = psd_power(&id, PsdExponent::InverseSqrt).unwrap();
        assert!(max_abs(&(r.matrix() - CMatrix::identity(3, 3))) < 1e-15);

        let d = HermitianOperator::new(real(2, 2, &[4.0, 0.0, 0.0, 1.0])).unwrap();
        let r = psd_power(&d, PsdExponent::Sqrt).unwrap();
        assert!(max_abs(&(r.matrix() - real(2, 2, &[2.0, 0.0, 0.0, 1.0]))) < 1e-14);
    }

    #[test]
    fn power_rejects_singular() {
        let d = HermitianOperator::new(real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(
            psd_power(&d, PsdExponent::Inverse),
            Err(LinalgError::SingularOperator { .. })
        ));
        assert!(matches!(
            psd_power(&d, PsdExponent::InverseSqrt),
            Err(LinalgError::SingularOperator { .. })
        ));
        // Zero eigenvalue is fine for the square root.
        assert!(psd_power(&d, PsdExponent::Sqrt).is_ok());
        let neg = HermitianOperator::new(real(2, 2, &[1.0, 0.0, 0.0, -0.5])).unwrap();
        assert!(matches!(
            psd_power(&neg, PsdExponent::Sqrt),
            Err(LinalgError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn inverse_times_operator_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for complex in [false, true] {
            let a = CMatrix::from_fn(5, 5, |_, _| {
                let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
                Complex64::new(rng.random_range(-1.0..1.0), im)
            });
            let h = HermitianOperator::symmetrized(&a * a.adjoint() + CMatrix::identity(5, 5) * c(0.1));
            let inv = psd_power(&h, PsdExponent::Inverse).unwrap();
            let r = max_abs(&(inv.matrix() * h.matrix() - CMatrix::identity(5, 5)));
            assert!(r < 1e-9, "{r}");
        }
    }

    #[test]
    fn norm_examples() {
        assert!((operator_norm(&CMatrix::identity(3, 3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((operator_norm(&real(2, 2, &[2.0, 0.0, 0.0, -5.0])).unwrap() - 5.0).abs() < 1e-14);
        // Eigenvalues of M*M = [[1,1],[1,2]] are (3 ± √5)/2.
        let expected = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        let got = operator_norm(&real(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        assert!((got - expected).abs() <= 1e-10 * expected);
        assert!((expected - 1.618_033_988_749_895).abs() < 1e-12);
    }
}
