//! Linear canonical (Bogoliubov) transformations of `n` bosonic modes.
//!
//! A map `(A, B)` is the unitary `U` with `U a U† = A a - B̄ a†`, so the
//! transformed vacuum `U|0⟩` is annihilated by `A a - B̄ a†` and has `K = A⁻¹B̄`.
//! `compose(S2, S1)` is "apply `S1`, then `S2`".

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::conventions::Conventions;
use crate::error::{Error, Result};
use crate::linalg::{conj, csymmetrize, identity_c, omega, CMatrix};
use crate::scalar::{cexp, cplx, creal, lit, to_f64, Real};
use crate::state::{cmatrix_from_wire, cmatrix_to_wire, GaussianPureState};

/// Residual tolerance accepted by [`BogoliubovMap::new`], relative to `1 + ‖A‖²`.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMap<T: Real> {
    a: CMatrix<T>,
    b: CMatrix<T>,
}

/// Residuals of the three defining identities, each relative to `1 + ‖A‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `A†A - B†B - 1`
    pub gram: f64,
    /// `A A† - B̄ Bᵀ - 1`
    pub dual_gram: f64,
    /// `A† B̄ - B† Ā`
    pub symmetry: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.gram.max(self.dual_gram).max(self.symmetry)
    }
}

/// Elementary generators used to build arbitrary maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary<T> {
    Squeeze { mode: usize, r: T, phi: T },
    Phase { mode: usize, theta: T },
    /// Mixes modes `i` and `j` with angle `theta` and relative phase `chi`.
    BeamSplitter { i: usize, j: usize, theta: T, chi: T },
}

impl<T: Real> BogoliubovMap<T> {
    pub fn new(a: CMatrix<T>, b: CMatrix<T>) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.nrows() });
        }
        let map = Self { a, b };
        let res = map.residuals();
        if !(res.max() <= IDENTITY_TOL) {
            return Err(Error::InvalidMap(format!("identity residual {:e}", res.max())));
        }
        Ok(map)
    }

    pub fn identity(n: usize) -> Self {
        Self { a: identity_c(n), b: CMatrix::zeros(n, n) }
    }

    pub fn modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &CMatrix<T> {
        &self.b
    }

    pub fn residuals(&self) -> IdentityResiduals {
        let n = self.modes();
        let one = identity_c::<T>(n);
        let (a, b) = (&self.a, &self.b);
        let scale = T::one() + a.norm_squared();
        let rel = |m: CMatrix<T>| to_f64(m.norm() / scale);
        IdentityResiduals {
            gram: rel(a.adjoint() * a - b.adjoint() * b - &one),
            dual_gram: rel(a * a.adjoint() - conj(b) * b.transpose() - &one),
            symmetry: rel(a.adjoint() * conj(b) - b.adjoint() * conj(a)),
        }
    }

    /// `K = A⁻¹ B̄` of the transformed vacuum.
    pub fn k_matrix(&self) -> CMatrix<T> {
        let ainv = self.a.clone().try_inverse().expect("A is invertible for a valid map");
        csymmetrize(&(ainv * conj(&self.b)))
    }

    /// Phase-space action in dimensionless quadratures `X = q/s_x`, `P = p/s_p`:
    /// means map as `z ↦ R z`, covariances as `Σ ↦ R Σ Rᵀ`.
    pub fn real_symplectic_dimensionless(&self) -> DMatrix<T> {
        // U a U† = μ a + ν a† with μ = A, ν = -B̄ is the inverse action.
        let mu = &self.a;
        let nu = -conj(&self.b);
        let inv = real_from_mu_nu(mu, &nu);
        symplectic_inverse(&inv)
    }

    /// Same action in dimensionful `(q..., p...)` coordinates.
    pub fn real_symplectic(&self, conv: &Conventions<T>) -> DMatrix<T> {
        let n = self.modes();
        let d = scale_diag(n, conv);
        let dinv = d.map(|x| T::one() / x);
        DMatrix::from_diagonal(&d) * self.real_symplectic_dimensionless() * DMatrix::from_diagonal(&dinv)
    }

    /// Inverse of [`BogoliubovMap::real_symplectic`].
    pub fn from_real_symplectic(r: &DMatrix<T>, conv: &Conventions<T>) -> Result<Self> {
        if !r.is_square() || !r.nrows().is_multiple_of(2) {
            return Err(Error::InvalidMap("symplectic matrix must be 2n x 2n".into()));
        }
        let n = r.nrows() / 2;
        let om = omega::<T>(n);
        let defect = (r.transpose() * &om * r - &om).norm() / (T::one() + r.norm_squared());
        if defect > lit(IDENTITY_TOL) {
            return Err(Error::InvalidMap(format!("not symplectic (defect {:e})", to_f64(defect))));
        }
        let d = scale_diag(n, conv);
        let dinv = d.map(|x| T::one() / x);
        let rd = DMatrix::from_diagonal(&dinv) * r * DMatrix::from_diagonal(&d);
        let inv = symplectic_inverse(&rd);
        let (mu, nu) = mu_nu_from_real(&inv);
        Self::new(mu, -conj(&nu))
    }

    pub fn inverse(&self) -> Self {
        // (A, B)⁻¹ = (A†, -Bᵀ).
        Self { a: self.a.adjoint(), b: -self.b.transpose() }
    }

    pub fn from_elementary(n: usize, op: Elementary<T>) -> Result<Self> {
        let mut a = identity_c::<T>(n);
        let mut b = CMatrix::zeros(n, n);
        match op {
            Elementary::Squeeze { mode, r, phi } => {
                check_mode(mode, n)?;
                a[(mode, mode)] = creal(r.cosh());
                b[(mode, mode)] = -cexp(cplx(T::zero(), phi)) * creal(r.sinh());
            }
            Elementary::Phase { mode, theta } => {
                check_mode(mode, n)?;
                a[(mode, mode)] = cexp(cplx(T::zero(), theta));
            }
            Elementary::BeamSplitter { i, j, theta, chi } => {
                check_mode(i, n)?;
                check_mode(j, n)?;
                if i == j {
                    return Err(Error::InvalidMap("beam splitter needs two distinct modes".into()));
                }
                let (c, s) = (theta.cos(), theta.sin());
                let e = cexp(cplx(T::zero(), chi));
                a[(i, i)] = creal(c);
                a[(j, j)] = creal(c);
                a[(i, j)] = -e.conj() * creal(s);
                a[(j, i)] = e * creal(s);
            }
        }
        Ok(Self { a, b })
    }

    /// Random valid map: a chain of `len` elementary generators driven by `uniform`
    /// (values in `[0, 1)`), with squeeze parameters in `[0, r_max]`.
    pub fn random(n: usize, len: usize, r_max: T, uniform: &mut impl FnMut() -> T) -> Self {
        let tau = T::two_pi();
        let mut map = Self::identity(n);
        for _ in 0..len {
            let pick = uniform();
            let i = ((uniform() * lit::<T>(n as f64)).floor().to_usize().unwrap_or(0)).min(n - 1);
            let op = if n > 1 && pick < lit(1.0 / 3.0) {
                let j = (i + 1) % n;
                Elementary::BeamSplitter { i, j, theta: uniform() * tau, chi: uniform() * tau }
            } else if pick < lit(2.0 / 3.0) {
                Elementary::Squeeze { mode: i, r: uniform() * r_max, phi: uniform() * tau }
            } else {
                Elementary::Phase { mode: i, theta: uniform() * tau }
            };
            let step = Self::from_elementary(n, op).expect("mode index in range");
            map = compose(&step, &map).expect("equal mode counts");
        }
        map
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MapWire { a: cmatrix_to_wire(&self.a), b: cmatrix_to_wire(&self.b) }).expect("map serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let w: MapWire<T> = serde_json::from_value(value.clone()).map_err(|e| Error::InvalidMap(format!("json: {e}")))?;
        Self::new(cmatrix_from_wire(&w.a)?, cmatrix_from_wire(&w.b)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct MapWire<T> {
    #[serde(rename = "A")]
    a: Vec<Vec<[T; 2]>>,
    #[serde(rename = "B")]
    b: Vec<Vec<[T; 2]>>,
}

fn check_mode(mode: usize, n: usize) -> Result<()> {
    if mode >= n {
        return Err(Error::DimensionMismatch { expected: n, got: mode + 1 });
    }
    Ok(())
}

fn scale_diag<T: Real>(n: usize, conv: &Conventions<T>) -> DVector<T> {
    let mut d = DVector::from_element(2 * n, conv.position_scale());
    d.rows_mut(n, n).fill(conv.momentum_scale());
    d
}

fn symplectic_inverse<T: Real>(r: &DMatrix<T>) -> DMatrix<T> {
    let om = omega::<T>(r.nrows() / 2);
    -(&om * r.transpose() * &om)
}

/// Real matrix of `a ↦ μ a + ν a†` acting on `(X, P)` with `a = (X + iP)/√2`.
fn real_from_mu_nu<T: Real>(mu: &CMatrix<T>, nu: &CMatrix<T>) -> DMatrix<T> {
    let n = mu.nrows();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (s, d) = (mu[(i, j)] + nu[(i, j)], mu[(i, j)] - nu[(i, j)]);
            r[(i, j)] = s.re;
            r[(i, n + j)] = -d.im;
            r[(n + i, j)] = s.im;
            r[(n + i, n + j)] = d.re;
        }
    }
    r
}

fn mu_nu_from_real<T: Real>(r: &DMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = r.nrows() / 2;
    let half = lit::<T>(0.5);
    let mu = CMatrix::from_fn(n, n, |i, j| {
        cplx((r[(i, j)] + r[(n + i, n + j)]) * half, (r[(n + i, j)] - r[(i, n + j)]) * half)
    });
    let nu = CMatrix::from_fn(n, n, |i, j| {
        cplx((r[(i, j)] - r[(n + i, n + j)]) * half, (r[(n + i, j)] + r[(i, n + j)]) * half)
    });
    (mu, nu)
}

/// `cosh r · a - e^{iφ} sinh r · a†`.
pub fn one_mode_squeeze<T: Real>(r: T, phi: T) -> Result<BogoliubovMap<T>> {
    if !(r >= T::zero()) {
        return Err(Error::InvalidMap(format!("squeeze parameter must be >= 0, got {}", to_f64(r))));
    }
    BogoliubovMap::from_elementary(1, Elementary::Squeeze { mode: 0, r, phi })
}

/// Two-mode squeeze: `A = cosh r · 1`, `B` off-diagonal `-e^{iφ} sinh r`.
pub fn two_mode_squeeze<T: Real>(r: T, phi: T) -> Result<BogoliubovMap<T>> {
    if !(r >= T::zero()) {
        return Err(Error::InvalidMap(format!("squeeze parameter must be >= 0, got {}", to_f64(r))));
    }
    let a = identity_c::<T>(2) * creal(r.cosh());
    let off = -cexp(cplx(T::zero(), phi)) * creal(r.sinh());
    let z = Complex::new(T::zero(), T::zero());
    let b = CMatrix::from_row_slice(2, 2, &[z, off, off, z]);
    Ok(BogoliubovMap { a, b })
}

/// Passive map `a ↦ U a` for a unitary `U` (`B = 0`).
pub fn rotation<T: Real>(u: CMatrix<T>) -> Result<BogoliubovMap<T>> {
    let n = u.nrows();
    BogoliubovMap::new(u, CMatrix::zeros(n, n))
}

/// Apply `s1` first, then `s2`.
pub fn compose<T: Real>(s2: &BogoliubovMap<T>, s1: &BogoliubovMap<T>) -> Result<BogoliubovMap<T>> {
    if s1.modes() != s2.modes() {
        return Err(Error::DimensionMismatch { expected: s1.modes(), got: s2.modes() });
    }
    let a = &s1.a * &s2.a + conj(&s1.b) * &s2.b;
    let b = conj(&s1.a) * &s2.b + &s1.b * &s2.a;
    Ok(BogoliubovMap { a, b })
}

/// Coherent-state matrix element `⟨z|U|w⟩`, `z = (X + iP)/√2` per mode. Only one or two modes.
pub fn coherent_overlap<T: Real>(z: &[Complex<T>], w: &[Complex<T>], s: &BogoliubovMap<T>) -> Result<Complex<T>> {
    let n = s.modes();
    if n != 1 && n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if z.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len().max(w.len()) });
    }
    let ainv = s.a.clone().try_inverse().ok_or_else(|| Error::InvalidMap("A singular".into()))?;
    let k = s.k_matrix();
    let c = -(&s.b * &ainv);
    let zb = DVector::from_iterator(n, z.iter().map(|x| x.conj()));
    let wv = DVector::from_iterator(n, w.iter().copied());
    let half = creal(lit::<T>(0.5));
    let quad = |m: &CMatrix<T>, v: &DVector<Complex<T>>| (v.transpose() * m * v)[(0, 0)];
    let cross = (zb.transpose() * &ainv * &wv)[(0, 0)];
    let norms = z.iter().chain(w.iter()).fold(T::zero(), |acc, x| acc + x.norm_sqr());
    let expo = creal(-norms * lit::<T>(0.5)) + half * quad(&k, &zb) + cross + half * quad(&c, &wv);
    // det(1 - K̄K)^{1/4} = |det A|^{-1/2}
    let det_a = s.a.clone().determinant();
    let pref = (det_a.re * det_a.re + det_a.im * det_a.im).sqrt().powf(lit(-0.5));
    Ok(cexp(expo) * creal(pref))
}

/// Acts with `s` on a pure Gaussian: `K' = (A + K B)⁻¹(B̄ + K Ā)`, means by the real symplectic matrix.
pub fn apply<T: Real>(s: &BogoliubovMap<T>, st: &GaussianPureState<T>) -> Result<GaussianPureState<T>> {
    let n = st.modes();
    if n != s.modes() {
        return Err(Error::DimensionMismatch { expected: n, got: s.modes() });
    }
    let k = st.k()?;
    let den = &s.a + &k * &s.b;
    let num = conj(&s.b) + &k * conj(&s.a);
    let k_new = csymmetrize(&(den.try_inverse().ok_or_else(|| Error::InvalidMap("A + K B singular".into()))? * num));
    let conv = *st.conventions();
    let mut mean = DVector::zeros(2 * n);
    mean.rows_mut(0, n).copy_from(st.qbar());
    mean.rows_mut(n, n).copy_from(st.pbar());
    let mean = s.real_symplectic(&conv) * mean;
    GaussianPureState::from_k(mean.rows(0, n).into_owned(), mean.rows(n, n).into_owned(), &k_new, conv)
}
