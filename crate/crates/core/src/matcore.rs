//! Dense complex linear algebra used by every other module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The decompositions here are
//! thin wrappers that add the validation, ordering and rank conventions the
//! rest of the crate relies on:
//!
//! - singular values are sorted nonincreasing, and the numerical rank counts
//!   values above `RANK_RTOL * sigma_0` (or `RANK_ATOL` when `sigma_0 == 0`);
//! - Hermitian inputs are checked entrywise against `HERMITIAN_TOL` and then
//!   symmetrized before diagonalization;
//! - eigenvalues in `[-PSD_TOL, 0)` are treated as roundoff and clamped.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Relative cutoff on singular values used for rank and support decisions.
pub const RANK_RTOL: f64 = 1e-12;
/// Absolute cutoff used when the largest singular value is zero.
pub const RANK_ATOL: f64 = 1e-14;
/// Max entrywise deviation of `(H - H†)/2` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted (and clamped) as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

/// Which tensor factor of a bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

pub fn ensure_finite_vec(v: &ComplexVector) -> Result<()> {
    match v.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(i) => Err(Error::NonFinite { row: i, col: 0 }),
        None => Ok(()),
    }
}

pub(crate) fn ensure_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_shape(m: &ComplexMatrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(Error::DimMismatch(format!(
            "{what} must be {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Largest entry of `|(H - H†)/2|`.
pub fn hermitian_deviation(h: &ComplexMatrix) -> f64 {
    let n = h.nrows().min(h.ncols());
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max(((h[(i, j)] - h[(j, i)].conj()) * 0.5).norm());
        }
    }
    dev
}

/// `max_ij |a_ij - b_ij|`; infinite when the shapes differ.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Frobenius norm of `a - b`; infinite when the shapes differ.
pub fn frobenius_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).norm()
}

pub fn vec_diff(a: &ComplexVector, b: &ComplexVector) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    (a - b).norm()
}

/// Kronecker product with the first factor's index major.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

/// Outer product `|u⟩⟨v|`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

/// `⟨u, v⟩`, antilinear in the first argument.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Complex64 {
    u.dotc(v)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// Thin singular value decomposition `M = U diag(sigma) V†`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: ComplexMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// `cols x k` with orthonormal columns.
    pub v: ComplexMatrix,
    pub rank: usize,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.sigma.len();
        let s = DMatrix::from_diagonal(&DVector::from_iterator(
            k,
            self.sigma.iter().map(|&x| c64(x, 0.0)),
        ));
        &self.u * s * self.v.adjoint()
    }

    /// First `rank` columns of `U`.
    pub fn u_r(&self) -> ComplexMatrix {
        self.u.columns(0, self.rank).into_owned()
    }

    /// First `rank` columns of `V`.
    pub fn v_r(&self) -> ComplexMatrix {
        self.v.columns(0, self.rank).into_owned()
    }

    pub fn sigma_r(&self) -> ComplexMatrix {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.rank,
            self.sigma[..self.rank].iter().map(|&x| c64(x, 0.0)),
        ))
    }
}

/// Number of singular values above the crate's rank cutoff.
pub fn numerical_rank(sigma: &[f64]) -> usize {
    let top = sigma.first().copied().unwrap_or(0.0);
    let cutoff = if top > 0.0 { RANK_RTOL * top } else { RANK_ATOL };
    sigma.iter().filter(|&&s| s > cutoff).count()
}

pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    ensure_finite(m)?;
    let dec = SVD::new(m.clone(), true, true);
    let u = dec.u.expect("left singular vectors requested");
    let v = dec.v_t.expect("right singular vectors requested").adjoint();
    let sigma: Vec<f64> = dec.singular_values.iter().map(|&s| s.max(0.0)).collect();
    let rank = numerical_rank(&sigma);
    Ok(SvdResult { u, sigma, v, rank })
}

pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues nonincreasing.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(f(v));
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = ensure_square(h, "Hermitian operand")?;
    ensure_finite(h)?;
    let deviation = hermitian_deviation(h);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigendecomposition of a positive semidefinite matrix with roundoff cleaned up.
///
/// Eigenvalues below `-PSD_TOL` are rejected. Eigenvalues whose magnitude is
/// within the backward-error floor of the eigensolver (`16 n eps |λ|_max`) are
/// set to exactly zero, since their sign and size carry no information and
/// their square roots would otherwise inject `O(sqrt(eps))` noise.
pub fn psd_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut eig = hermitian_eigen(h)?;
    if let Some(&lowest) = eig.values.last() {
        if lowest < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
    }
    let n = eig.values.len() as f64;
    let scale = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 16.0 * n * f64::EPSILON * scale;
    for v in eig.values.iter_mut() {
        if *v <= floor {
            *v = 0.0;
        }
    }
    Ok(eig)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigen(h)?.map_values(f64::sqrt))
}

/// Inverse of a positive definite matrix. Rank deficiency is an error, never
/// silently pseudo-inverted.
pub fn pd_inverse(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = psd_eigen(h)?;
    if numerical_rank(&eig.values) < eig.values.len() {
        return Err(Error::Singular);
    }
    Ok(eig.map_values(|x| 1.0 / x))
}

/// Orthogonal projection onto the support (range) of a positive semidefinite matrix.
pub fn support_projection(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = psd_eigen(h)?;
    let rank = numerical_rank(&eig.values);
    let vr = eig.vectors.columns(0, rank);
    Ok(vr * vr.adjoint())
}

/// Schatten norms of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    /// Largest singular value.
    pub operator: f64,
    /// Sum of singular values.
    pub trace: f64,
    /// Hilbert-Schmidt (Frobenius) norm.
    pub hs: f64,
}

pub fn norms(m: &ComplexMatrix) -> Result<Norms> {
    let s = singular_values(m)?;
    Ok(Norms {
        operator: s.first().copied().unwrap_or(0.0),
        trace: s.iter().sum(),
        hs: s.iter().map(|x| x * x).sum::<f64>().sqrt(),
    })
}

pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(norms(m)?.trace)
}

/// Fidelity `Tr (√ω ρ √ω)^{1/2}` of two positive semidefinite matrices.
///
/// The inputs need not have unit trace. The value is evaluated as the trace
/// norm of `√ρ √ω`, which has the same singular values squared as
/// `√ω ρ √ω` and avoids taking a second square root of roundoff.
pub fn fidelity(rho: &ComplexMatrix, omega: &ComplexMatrix) -> Result<f64> {
    let n = ensure_square(rho, "rho")?;
    let m = ensure_square(omega, "omega")?;
    if n != m {
        return Err(Error::DimMismatch(format!(
            "fidelity of {n}x{n} and {m}x{m} operators"
        )));
    }
    let sr = psd_sqrt(rho)?;
    let so = psd_sqrt(omega)?;
    trace_norm(&(sr * so))
}

/// Partial trace of an operator on `H_a ⊗ H_b`, keeping the factor `keep`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    ensure_shape(m, n, n, "partial trace operand")?;
    let idx = |i: usize, j: usize| i * dim_b + j;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
            (0..dim_b).map(|j| m[(idx(i, j), idx(k, j))]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |j, l| {
            (0..dim_a).map(|i| m[(idx(i, j), idx(i, l))]).sum()
        }),
    })
}
