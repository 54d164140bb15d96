//! Gaussian state representations and conversions between them.
//!
//! A pure Gaussian is stored through its shape matrices `(M, L)`:
//!
//! ```text
//! ψ(x) ∝ exp( -(x - q̄)ᵀ L M⁻¹ (x - q̄) / 4ħ + i p̄·x/ħ )
//! ```
//!
//! normalised so that `M†L + L†M = 2`. With that normalisation the position
//! covariance is `ħ Re(M M†)`, the momentum covariance `(ħ/4) Re(L L†)` and the
//! cross block `(ħ/2) Im(M L†)`. The dimensionless shape `Q̃ = 2σ² L M⁻¹` is 1 for
//! the coherent family and `K = (1 - Q̃)(1 + Q̃)⁻¹` measures the departure from it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::conventions::Conventions;
use crate::error::{Error, Result};
use crate::linalg::{
    self, casymmetry, cayley, conj, csymmetrize, herm_fn, is_positive_definite, re, singular_values, symmetrize,
    symplectic_eigenvalues, to_complex, CMatrix,
};
use crate::scalar::{cexp, cplx, creal, lit, to_f64, Real};

const SHAPE_SYMMETRY_TOL: f64 = 1e-8;
const COV_SYMMETRY_TOL: f64 = 1e-12;
const PHYSICAL_TOL: f64 = 1e-9;

/// `K` from the shape matrices; `Q̃ = 2σ² L M⁻¹`.
pub fn k_from_ml<T: Real>(m: &CMatrix<T>, l: &CMatrix<T>, conv: &Conventions<T>) -> Result<CMatrix<T>> {
    conv.validate()?;
    check_square(m, l)?;
    let q = shape_q(m, l, conv)?;
    let k = cayley(&q).ok_or(Error::NotNormalizable)?;
    Ok(csymmetrize(&k))
}

/// `(M, L)` for a given `K`, with `M = (2σ²)^{1/2} (Re Q̃)^{-1/2}` and `L = Q̃ M / 2σ²`.
pub fn ml_from_k<T: Real>(k: &CMatrix<T>, conv: &Conventions<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    check_k(k)?;
    let q = cayley(k).ok_or_else(|| Error::InvalidK("1 + K is singular".into()))?;
    let g = symmetrize(&re(&q));
    if !is_positive_definite(&g) {
        return Err(Error::InvalidK("Re Q is not positive definite".into()));
    }
    let two_s2 = lit::<T>(2.0) * conv.sigma2;
    let m = to_complex(&linalg::sym_fn(&g, |x| (two_s2 / x).sqrt()));
    let l = (&q * &m) * creal(T::one() / two_s2);
    Ok((m, l))
}

/// Pure-state Wigner covariance for a given `K` (zero mean).
pub fn covariance_from_k<T: Real>(k: &CMatrix<T>, conv: &Conventions<T>) -> Result<CovarianceState<T>> {
    conv.validate()?;
    check_k(k)?;
    let n = k.nrows();
    let q = cayley(k).ok_or_else(|| Error::InvalidK("1 + K is singular".into()))?;
    let g = symmetrize(&re(&q));
    let h = symmetrize(&linalg::im(&q));
    let ginv = g.clone().try_inverse().ok_or_else(|| Error::InvalidK("Re Q singular".into()))?;
    let half = lit::<T>(0.5);
    let sxx = &ginv * half;
    let sxp = -(&ginv * &h) * half;
    let spp = (&g + &h * &ginv * &h) * half;
    let (ax, ap) = (conv.position_scale(), conv.momentum_scale());
    let mut sigma = DMatrix::zeros(2 * n, 2 * n);
    sigma.view_mut((0, 0), (n, n)).copy_from(&(sxx * (ax * ax)));
    sigma.view_mut((0, n), (n, n)).copy_from(&(&sxp * (ax * ap)));
    sigma.view_mut((n, 0), (n, n)).copy_from(&(sxp.transpose() * (ax * ap)));
    sigma.view_mut((n, n), (n, n)).copy_from(&(spp * (ap * ap)));
    CovarianceState::new(DVector::zeros(2 * n), symmetrize(&sigma), conv)
}

/// `K` of a pure Gaussian from its Wigner covariance.
pub fn k_from_covariance<T: Real>(st: &CovarianceState<T>, conv: &Conventions<T>) -> Result<CMatrix<T>> {
    let n = st.modes();
    let nu = st.symplectic_eigenvalues();
    let half_hbar = conv.hbar * lit::<T>(0.5);
    if nu.iter().any(|v| (*v - half_hbar).abs() > lit::<T>(1e-7) * half_hbar) {
        return Err(Error::InvalidState("covariance is not pure".into()));
    }
    let (ax, ap) = (conv.position_scale(), conv.momentum_scale());
    let sig = &st.sigma;
    let sxx = sig.view((0, 0), (n, n)).into_owned() / (ax * ax);
    let sxp = sig.view((0, n), (n, n)).into_owned() / (ax * ap);
    let sxx_inv = sxx.try_inverse().ok_or_else(|| Error::InvalidState("singular position covariance".into()))?;
    let g = symmetrize(&(&sxx_inv * lit::<T>(0.5)));
    let h = symmetrize(&(-(&sxx_inv * &sxp)));
    let q = DMatrix::from_fn(n, n, |i, j| cplx(g[(i, j)], h[(i, j)]));
    let k = cayley(&q).ok_or_else(|| Error::InvalidState("1 + Q singular".into()))?;
    Ok(csymmetrize(&k))
}

fn check_square<T: Real>(m: &CMatrix<T>, l: &CMatrix<T>) -> Result<()> {
    if !m.is_square() || m.shape() != l.shape() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: l.nrows() });
    }
    Ok(())
}

fn shape_q<T: Real>(m: &CMatrix<T>, l: &CMatrix<T>, conv: &Conventions<T>) -> Result<CMatrix<T>> {
    let minv = m.clone().try_inverse().ok_or(Error::SingularM)?;
    let lm = l * minv;
    let defect = casymmetry(&lm);
    if defect > lit(SHAPE_SYMMETRY_TOL) {
        return Err(Error::AsymmetricShape(to_f64(defect)));
    }
    let lm = csymmetrize(&lm);
    if !is_positive_definite(&re(&lm)) {
        return Err(Error::NotNormalizable);
    }
    Ok(lm * creal(lit::<T>(2.0) * conv.sigma2))
}

fn check_k<T: Real>(k: &CMatrix<T>) -> Result<()> {
    if !k.is_square() {
        return Err(Error::InvalidK("K must be square".into()));
    }
    if casymmetry(k) > lit(1e-10) {
        return Err(Error::InvalidK("K must be symmetric".into()));
    }
    if let Some(s) = singular_values(k).first() {
        if *s >= T::one() {
            return Err(Error::InvalidK(format!("singular value {} >= 1", to_f64(*s))));
        }
    }
    Ok(())
}

/// Pure `n`-mode Gaussian: means plus normalised shape matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPureState<T: Real> {
    qbar: DVector<T>,
    pbar: DVector<T>,
    m: CMatrix<T>,
    l: CMatrix<T>,
    conv: Conventions<T>,
}

impl<T: Real> GaussianPureState<T> {
    /// Builds a state from arbitrary valid shape matrices, renormalising them so that `M†L + L†M = 2`.
    pub fn from_ml(qbar: DVector<T>, pbar: DVector<T>, m: CMatrix<T>, l: CMatrix<T>, conv: Conventions<T>) -> Result<Self> {
        conv.validate()?;
        check_square(&m, &l)?;
        let n = m.nrows();
        if qbar.len() != n || pbar.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: qbar.len().max(pbar.len()) });
        }
        let q = shape_q(&m, &l, &conv)?;
        // Re(L M⁻¹) = Re(Q̃)/2σ²; we need M M† = Re(L M⁻¹)⁻¹.
        let gr = symmetrize(&re(&q)) / (lit::<T>(2.0) * conv.sigma2);
        let minv = m.clone().try_inverse().ok_or(Error::SingularM)?;
        let gr_inv = to_complex(&gr.try_inverse().ok_or(Error::NotNormalizable)?);
        let target = &minv * gr_inv * minv.adjoint();
        let x = herm_fn(&target, |v| v.max(T::zero()).sqrt());
        let m = &m * &x;
        let l = &l * &x;
        Ok(Self { qbar, pbar, m, l, conv })
    }

    pub fn from_k(qbar: DVector<T>, pbar: DVector<T>, k: &CMatrix<T>, conv: Conventions<T>) -> Result<Self> {
        conv.validate()?;
        let (m, l) = ml_from_k(k, &conv)?;
        let n = m.nrows();
        if qbar.len() != n || pbar.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: qbar.len().max(pbar.len()) });
        }
        Ok(Self { qbar, pbar, m, l, conv })
    }

    /// Coherent state `|q̄ p̄⟩` of the family.
    pub fn coherent(qbar: DVector<T>, pbar: DVector<T>, conv: Conventions<T>) -> Result<Self> {
        let n = qbar.len();
        Self::from_k(qbar, pbar, &CMatrix::zeros(n, n), conv)
    }

    pub fn vacuum(n: usize, conv: Conventions<T>) -> Result<Self> {
        Self::coherent(DVector::zeros(n), DVector::zeros(n), conv)
    }

    /// Skips validation; the caller guarantees normalisation (used by propagation).
    pub(crate) fn from_parts_unchecked(qbar: DVector<T>, pbar: DVector<T>, m: CMatrix<T>, l: CMatrix<T>, conv: Conventions<T>) -> Self {
        Self { qbar, pbar, m, l, conv }
    }

    pub fn modes(&self) -> usize {
        self.m.nrows()
    }

    pub fn qbar(&self) -> &DVector<T> {
        &self.qbar
    }

    pub fn pbar(&self) -> &DVector<T> {
        &self.pbar
    }

    pub fn m(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn l(&self) -> &CMatrix<T> {
        &self.l
    }

    pub fn conventions(&self) -> &Conventions<T> {
        &self.conv
    }

    /// Weyl translation to new means; shape data unchanged.
    pub fn translated(&self, qbar: DVector<T>, pbar: DVector<T>) -> Self {
        Self { qbar, pbar, ..self.clone() }
    }

    pub fn k(&self) -> Result<CMatrix<T>> {
        k_from_ml(&self.m, &self.l, &self.conv)
    }

    /// Same wavefunction, shape data re-expressed against another family width.
    pub fn with_conventions(&self, conv: Conventions<T>) -> Self {
        Self { conv, ..self.clone() }
    }

    /// Wigner covariance from the shape matrices.
    pub fn covariance(&self) -> CovarianceState<T> {
        let n = self.modes();
        let h = self.conv.hbar;
        let sxx = re(&(&self.m * self.m.adjoint())) * h;
        let spp = re(&(&self.l * self.l.adjoint())) * (h * lit::<T>(0.25));
        let sxp = linalg::im(&(&self.m * self.l.adjoint())) * (h * lit::<T>(0.5));
        let mut sigma = DMatrix::zeros(2 * n, 2 * n);
        sigma.view_mut((0, 0), (n, n)).copy_from(&sxx);
        sigma.view_mut((0, n), (n, n)).copy_from(&sxp);
        sigma.view_mut((n, 0), (n, n)).copy_from(&sxp.transpose());
        sigma.view_mut((n, n), (n, n)).copy_from(&spp);
        let mut mean = DVector::zeros(2 * n);
        mean.rows_mut(0, n).copy_from(&self.qbar);
        mean.rows_mut(n, n).copy_from(&self.pbar);
        CovarianceState { mean, sigma: symmetrize(&sigma) }
    }

    /// Entropy excess `ΔI = -½ Tr log(1 - K̄K)`, evaluated as `ln|det((M + 2σ²L) / 2√(2σ²))|`,
    /// which stays accurate when `|K| → 1`.
    pub fn entropy_excess(&self) -> T {
        let n = self.modes();
        let two_s2 = lit::<T>(2.0) * self.conv.sigma2;
        let combo = &self.m + &self.l * creal(two_s2);
        linalg::ln_abs_det(&combo) - lit::<T>(n as f64) * (lit::<T>(2.0) * two_s2.sqrt()).ln()
    }

    /// Normalisation defect `‖M†L + L†M - 2‖`.
    pub fn normalisation_defect(&self) -> T {
        let n = self.modes();
        let g = self.m.adjoint() * &self.l + self.l.adjoint() * &self.m;
        (g - CMatrix::<T>::identity(n, n) * creal(lit::<T>(2.0))).norm()
    }

    /// Wavefunction value at `x` (1-mode states), including the `e^{i p̄ x/ħ}` phase.
    pub fn wavefunction_1d(&self, x: T) -> Complex<T> {
        let h = self.conv.hbar;
        let q = self.l[(0, 0)] / self.m[(0, 0)];
        let d = x - self.qbar[0];
        let m = self.m[(0, 0)];
        // |ψ|² integrates to one: norm = (2πħ |M|²)^{-1/4}.
        let norm = (T::two_pi() * h * m.norm_sqr()).powf(lit(-0.25));
        let expo = -(q * creal(d * d / (lit::<T>(4.0) * h))) + cplx(T::zero(), self.pbar[0] * x / h);
        cexp(expo) * creal(norm)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PureStateWire {
            conventions: self.conv,
            qbar: self.qbar.iter().copied().collect(),
            pbar: self.pbar.iter().copied().collect(),
            m: cmatrix_to_wire(&self.m),
            l: cmatrix_to_wire(&self.l),
        })
        .expect("pure state serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let w: PureStateWire<T> =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidState(format!("json: {e}")))?;
        Self::from_ml(
            DVector::from_vec(w.qbar),
            DVector::from_vec(w.pbar),
            cmatrix_from_wire(&w.m)?,
            cmatrix_from_wire(&w.l)?,
            w.conventions,
        )
    }
}

/// Possibly mixed Gaussian: mean and Wigner covariance in `(q..., p...)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState<T: Real> {
    pub mean: DVector<T>,
    pub sigma: DMatrix<T>,
}

impl<T: Real> CovarianceState<T> {
    pub fn new(mean: DVector<T>, sigma: DMatrix<T>, conv: &Conventions<T>) -> Result<Self> {
        if !sigma.is_square() || !sigma.nrows().is_multiple_of(2) || sigma.nrows() == 0 {
            return Err(Error::InvalidState(format!("covariance must be 2n x 2n, got {:?}", sigma.shape())));
        }
        if mean.len() != sigma.nrows() {
            return Err(Error::DimensionMismatch { expected: sigma.nrows(), got: mean.len() });
        }
        if (&sigma - sigma.transpose()).norm() > lit::<T>(COV_SYMMETRY_TOL) * sigma.norm().max(T::one()) {
            return Err(Error::InvalidState("covariance not symmetric".into()));
        }
        let sigma = symmetrize(&sigma);
        if !is_positive_definite(&sigma) {
            return Err(Error::InvalidState("covariance not positive definite".into()));
        }
        let st = Self { mean, sigma };
        let floor = conv.hbar * lit::<T>(0.5) - lit::<T>(PHYSICAL_TOL) * conv.hbar.max(T::one());
        if let Some(nu) = st.symplectic_eigenvalues().first() {
            if *nu < floor {
                return Err(Error::InvalidState(format!(
                    "symplectic eigenvalue {} below hbar/2",
                    to_f64(*nu)
                )));
            }
        }
        Ok(st)
    }

    /// No uncertainty-principle check; used for transient open-system moments.
    pub fn new_unchecked(mean: DVector<T>, sigma: DMatrix<T>) -> Self {
        Self { mean, sigma }
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn symplectic_eigenvalues(&self) -> Vec<T> {
        symplectic_eigenvalues(&self.sigma)
    }

    pub fn is_pure(&self, hbar: T, tol: T) -> bool {
        let half = hbar * lit::<T>(0.5);
        self.symplectic_eigenvalues().iter().all(|v| (*v - half).abs() <= tol)
    }

    pub fn translated(&self, mean: DVector<T>) -> Self {
        Self { mean, sigma: self.sigma.clone() }
    }

    pub fn to_json(&self, conv: &Conventions<T>) -> serde_json::Value {
        serde_json::to_value(CovarianceWire {
            conventions: *conv,
            mean: self.mean.iter().copied().collect(),
            sigma: (0..self.sigma.nrows()).map(|i| self.sigma.row(i).iter().copied().collect()).collect(),
        })
        .expect("covariance serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<(Self, Conventions<T>)> {
        let w: CovarianceWire<T> =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidState(format!("json: {e}")))?;
        let n = w.sigma.len();
        if w.sigma.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidState("ragged covariance".into()));
        }
        let sigma = DMatrix::from_fn(n, n, |i, j| w.sigma[i][j]);
        Ok((Self::new(DVector::from_vec(w.mean), sigma, &w.conventions)?, w.conventions))
    }
}

/// Parameters `(α, s, r)` of the one-mode Gaussian density matrix
///
/// ```text
/// ρ(x, y) ∝ exp( -α/2ħ (x² + y²) + α κ/ħ · xy + i α r/2ħ (x² - y²) ),  κ = 2s/(1 + s²)
/// ```
///
/// up to a Weyl translation. `s ∈ [0, 1)` is the ratio of consecutive eigenvalues of ρ,
/// so `s = 0` is pure and the von Neumann entropy is `-ln(1-s) - s/(1-s) ln s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Gaussian1DParams<T> {
    pub alpha: T,
    pub s: T,
    pub r: T,
}

impl<T: Real> Gaussian1DParams<T> {
    pub fn new(alpha: T, s: T, r: T) -> Result<Self> {
        let p = Self { alpha, s, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero()) {
            return Err(Error::InvalidParams(format!("alpha must be > 0, got {}", to_f64(self.alpha))));
        }
        if !(self.s >= T::zero() && self.s < T::one()) {
            return Err(Error::InvalidParams(format!("s must satisfy 0 <= s < 1, got {}", to_f64(self.s))));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParams("r must be finite".into()));
        }
        Ok(())
    }

    /// Coefficient of the `xy` cross term relative to `α/ħ`.
    pub fn kappa(&self) -> T {
        lit::<T>(2.0) * self.s / (T::one() + self.s * self.s)
    }

    /// Density matrix element `ρ(x, y)`, trace-normalised.
    pub fn density(&self, x: T, y: T, hbar: T) -> Complex<T> {
        let (a, k) = (self.alpha, self.kappa());
        let norm = (a * (T::one() - k) / (T::pi() * hbar)).sqrt();
        let re_part = -a / (lit::<T>(2.0) * hbar) * (x * x + y * y) + a * k / hbar * x * y;
        let im_part = a * self.r / (lit::<T>(2.0) * hbar) * (x * x - y * y);
        cexp(cplx(re_part, im_part)) * creal(norm)
    }
}

/// Centred Wigner covariance of the density matrix described by `p`.
pub fn covariance_from_1d_params<T: Real>(p: &Gaussian1DParams<T>, conv: &Conventions<T>) -> Result<CovarianceState<T>> {
    p.validate()?;
    conv.validate()?;
    let (h, a, k, r) = (conv.hbar, p.alpha, p.kappa(), p.r);
    let sxx = h / (lit::<T>(2.0) * a * (T::one() - k));
    let sxp = a * r * sxx;
    let spp = h * a * (T::one() + k) * lit::<T>(0.5) + a * a * r * r * sxx;
    let sigma = DMatrix::from_row_slice(2, 2, &[sxx, sxp, sxp, spp]);
    CovarianceState::new(DVector::zeros(2), sigma, conv)
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct PureStateWire<T> {
    conventions: Conventions<T>,
    qbar: Vec<T>,
    pbar: Vec<T>,
    m: Vec<Vec<[T; 2]>>,
    l: Vec<Vec<[T; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct CovarianceWire<T> {
    conventions: Conventions<T>,
    mean: Vec<T>,
    sigma: Vec<Vec<T>>,
}

/// Complex matrix as nested rows of `[re, im]` pairs.
pub fn cmatrix_to_wire<T: Real>(a: &CMatrix<T>) -> Vec<Vec<[T; 2]>> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect()
}

pub fn cmatrix_from_wire<T: Real>(rows: &[Vec<[T; 2]>]) -> Result<CMatrix<T>> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != c) {
        return Err(Error::InvalidState("ragged complex matrix".into()));
    }
    Ok(CMatrix::from_fn(n, c, |i, j| cplx(rows[i][j][0], rows[i][j][1])))
}

/// `K̄ K` helper shared by the entropy formulas.
pub fn kbar_k<T: Real>(k: &CMatrix<T>) -> CMatrix<T> {
    conj(k) * k
}
