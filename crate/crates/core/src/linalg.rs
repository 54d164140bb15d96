//! Small dense linear-algebra helpers over real and complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{creal, lit, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Canonical symplectic form for `(q..., p...)` ordering.
pub fn omega<T: Real>(n: usize) -> DMatrix<T> {
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        om[(i, n + i)] = T::one();
        om[(n + i, i)] = -T::one();
    }
    om
}

pub fn symmetrize<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    (a + a.transpose()) * lit::<T>(0.5)
}

pub fn csymmetrize<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    (a + a.transpose()) * creal(lit::<T>(0.5))
}

pub fn hermitize<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    (a + a.adjoint()) * creal(lit::<T>(0.5))
}

/// Frobenius norm of `a - a^T` relative to `max(1, ‖a‖)`.
pub fn asymmetry<T: Real>(a: &DMatrix<T>) -> T {
    (a - a.transpose()).norm() / a.norm().max(T::one())
}

pub fn casymmetry<T: Real>(a: &CMatrix<T>) -> T {
    (a - a.transpose()).norm() / a.norm().max(T::one())
}

pub fn identity_c<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

pub fn to_complex<T: Real>(a: &DMatrix<T>) -> CMatrix<T> {
    a.map(creal)
}

pub fn re<T: Real>(a: &CMatrix<T>) -> DMatrix<T> {
    a.map(|z| z.re)
}

pub fn im<T: Real>(a: &CMatrix<T>) -> DMatrix<T> {
    a.map(|z| z.im)
}

pub fn conj<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    a.map(|z| z.conj())
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues<T: Real>(a: &DMatrix<T>) -> Vec<T> {
    let eig = symmetrize(a).symmetric_eigen();
    let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

/// `f(A)` for a real symmetric `A` via its eigendecomposition.
pub fn sym_fn<T: Real>(a: &DMatrix<T>, f: impl Fn(T) -> T) -> DMatrix<T> {
    let eig = symmetrize(a).symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// `f(A)` for a complex Hermitian `A`.
pub fn herm_fn<T: Real>(a: &CMatrix<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let eig = hermitize(a).symmetric_eigen();
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| creal(f(x))));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn herm_eigenvalues<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let eig = hermitize(a).symmetric_eigen();
    let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

/// Singular values, descending.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn is_positive_definite<T: Real>(a: &DMatrix<T>) -> bool {
    symmetrize(a).cholesky().is_some()
}

/// Symplectic eigenvalues `ν_1 ≤ … ≤ ν_n` of a positive definite `2n × 2n` covariance.
///
/// Uses the real symmetric problem `(Σ^{1/2} Ω Σ^{1/2})ᵀ(Σ^{1/2} Ω Σ^{1/2})`, whose
/// spectrum is `ν_i²` with multiplicity two (it is `|iΩΣ|²` up to similarity).
pub fn symplectic_eigenvalues<T: Real>(sigma: &DMatrix<T>) -> Vec<T> {
    let n = sigma.nrows() / 2;
    let root = sym_fn(sigma, |x| x.max(T::zero()).sqrt());
    let a = &root * omega::<T>(n) * &root;
    let vals = sym_eigenvalues(&(a.transpose() * &a));
    (0..n)
        .map(|i| ((vals[2 * i].max(T::zero()) + vals[2 * i + 1].max(T::zero())) * lit::<T>(0.5)).sqrt())
        .collect()
}

/// Eigenvalues of `D^{-1/2} Σ D^{-1/2}` for a positive diagonal `D`.
pub fn whitened_eigenvalues<T: Real>(sigma: &DMatrix<T>, diag: &DVector<T>) -> Vec<T> {
    let w = diag.map(|d| T::one() / d.sqrt());
    let mut s = sigma.clone();
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            s[(i, j)] *= w[i] * w[j];
        }
    }
    sym_eigenvalues(&s)
}

/// `ln det A` for a symmetric positive definite matrix.
pub fn logdet_spd<T: Real>(a: &DMatrix<T>) -> Option<T> {
    let chol = symmetrize(a).cholesky()?;
    Some(chol.l().diagonal().iter().fold(T::zero(), |acc, d| acc + d.ln()) * lit::<T>(2.0))
}

/// `ln |det A|` for a complex square matrix via LU.
pub fn ln_abs_det<T: Real>(a: &CMatrix<T>) -> T {
    let lu = a.clone().lu();
    let u = lu.u();
    u.diagonal().iter().fold(T::zero(), |acc, d| acc + crate::scalar::cabs(*d).ln())
}

/// `(1 - X)(1 + X)^{-1}`: the Cayley map, its own inverse.
pub fn cayley<T: Real>(x: &CMatrix<T>) -> Option<CMatrix<T>> {
    let n = x.nrows();
    let one = identity_c::<T>(n);
    let inv = (&one + x).try_inverse()?;
    Some((&one - x) * inv)
}
