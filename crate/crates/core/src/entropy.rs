//! Information measures: discrete Shannon and relative information, operator
//! information of finite density matrices, and the closed forms for Gaussian states
//! (Shannon–Wehrl, relative Shannon–Wehrl, von Neumann, P-symbol entropy).
//!
//! All entropies are in nats. Phase-space entropies use the measure `dq dp/(2πħ)` per mode.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::Serialize;

use crate::bogoliubov::BogoliubovMap;
use crate::conventions::Conventions;
use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, logdet_spd, singular_values, sym_eigenvalues, whitened_eigenvalues, CMatrix};
use crate::scalar::{lit, to_f64, Real};
use crate::state::{CovarianceState, Gaussian1DParams, GaussianPureState};

const NORM_TOL: f64 = 1e-12;
const TINY: f64 = 1e-300;

/// `x ln x` with `0 ln 0 = 0`.
fn xlnx<T: Real>(x: T) -> T {
    if x <= lit(TINY) {
        T::zero()
    } else {
        x * x.ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector<T: Real> {
    p: Vec<T>,
}

impl<T: Real> ProbVector<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|x| !(**x >= T::zero())) {
            return Err(Error::NegativeProbability(to_f64(*bad)));
        }
        let sum = p.iter().fold(T::zero(), |a, b| a + *b);
        if (sum - T::one()).abs() > lit(NORM_TOL) {
            return Err(Error::NotNormalized(to_f64(sum)));
        }
        Ok(Self { p })
    }

    pub fn uniform(n: usize) -> Self {
        Self { p: vec![T::one() / lit::<T>(n as f64); n] }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

pub fn shannon_discrete<T: Real>(p: &ProbVector<T>) -> T {
    -p.p.iter().fold(T::zero(), |acc, x| acc + xlnx(*x))
}

/// Merges probabilities over disjoint index blocks that cover `0..p.len()`.
pub fn coarse_grain<T: Real>(p: &ProbVector<T>, partition: &[Vec<usize>]) -> Result<ProbVector<T>> {
    let mut seen = vec![false; p.len()];
    for block in partition {
        if block.is_empty() {
            return Err(Error::BadPartition("empty block".into()));
        }
        for &i in block {
            if i >= p.len() {
                return Err(Error::BadPartition(format!("index {i} out of range")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::BadPartition(format!("index {i} repeated")));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::BadPartition(format!("index {i} not covered")));
    }
    let q = partition.iter().map(|b| b.iter().fold(T::zero(), |acc, &i| acc + p.p[i])).collect();
    Ok(ProbVector { p: q })
}

/// `Σ p1 (ln p1 - ln p2)`.
pub fn relative_info<T: Real>(p1: &ProbVector<T>, p2: &ProbVector<T>) -> Result<T> {
    if p1.len() != p2.len() {
        return Err(Error::DimensionMismatch { expected: p1.len(), got: p2.len() });
    }
    let mut acc = T::zero();
    for (i, (a, b)) in p1.p.iter().zip(&p2.p).enumerate() {
        if *a <= lit(TINY) {
            continue;
        }
        if *b <= lit(TINY) {
            return Err(Error::SupportMismatch(i));
        }
        acc += *a * (*a / *b).ln();
    }
    Ok(acc.max(T::zero()))
}

/// Finite-dimensional density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixFD<T: Real> {
    rho: CMatrix<T>,
}

impl<T: Real> DensityMatrixFD<T> {
    pub fn new(rho: CMatrix<T>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::InvalidDensity("must be square and non-empty".into()));
        }
        if (&rho - rho.adjoint()).norm() > lit(NORM_TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > lit(NORM_TOL) || tr.im.abs() > lit(NORM_TOL) {
            return Err(Error::InvalidDensity(format!("trace {}", to_f64(tr.re))));
        }
        if let Some(min) = herm_eigenvalues(&rho).first() {
            if *min < lit(-1e-10) {
                return Err(Error::InvalidDensity(format!("negative eigenvalue {:e}", to_f64(*min))));
            }
        }
        Ok(Self { rho })
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.rho
    }
}

pub fn vn_entropy_fd<T: Real>(rho: &DensityMatrixFD<T>) -> T {
    -herm_eigenvalues(&rho.rho).into_iter().fold(T::zero(), |acc, x| acc + xlnx(x.max(T::zero())))
}

/// Shannon entropy of the outcome distribution `tr(P_n ρ)` of an orthogonal resolution of identity.
pub fn operator_information<T: Real>(rho: &DensityMatrixFD<T>, projectors: &[CMatrix<T>]) -> Result<T> {
    let d = rho.dim();
    let tol = lit::<T>(1e-10);
    let mut sum = CMatrix::<T>::zeros(d, d);
    for (i, p) in projectors.iter().enumerate() {
        if p.shape() != (d, d) {
            return Err(Error::NotAResolution(format!("projector {i} has shape {:?}", p.shape())));
        }
        for (j, q) in projectors.iter().enumerate() {
            let prod = p * q;
            let target = if i == j { p.clone() } else { CMatrix::zeros(d, d) };
            if (prod - target).norm() > tol {
                return Err(Error::NotAResolution(format!("projectors {i},{j} not orthogonal idempotents")));
            }
        }
        sum += p;
    }
    if (sum - CMatrix::identity(d, d)).norm() > tol {
        return Err(Error::NotAResolution("projectors do not sum to identity".into()));
    }
    let probs = projectors.iter().map(|p| (p * &rho.rho).trace().re.max(T::zero())).collect::<Vec<_>>();
    Ok(-probs.into_iter().fold(T::zero(), |acc, x| acc + xlnx(x)))
}

/// Absolute SW entropy and its excess over the coherent minimum `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwEntropy<T> {
    pub absolute: T,
    pub excess: T,
}

impl<T: Real> SwEntropy<T> {
    fn from_excess(n: usize, excess: T) -> Self {
        Self { absolute: lit::<T>(n as f64) + excess, excess }
    }
}

/// `n + ½ ln det(Σ + Σ_coh)/det(2Σ_coh)`.
pub fn sw_entropy_gaussian<T: Real>(st: &CovarianceState<T>, conv: &Conventions<T>) -> Result<SwEntropy<T>> {
    conv.validate()?;
    let n = st.modes();
    let diag = conv.coherent_covariance(n).diagonal();
    let lam = whitened_eigenvalues(&st.sigma, &diag);
    if lam.iter().any(|l| !(*l > T::zero())) {
        return Err(Error::InvalidState("covariance not positive definite".into()));
    }
    let half = lit::<T>(0.5);
    let excess = lam.iter().fold(T::zero(), |acc, l| acc + ((T::one() + *l) * half).ln()) * half;
    Ok(SwEntropy::from_excess(n, excess))
}

/// SW entropy of the pure state, via the stable determinant form of the excess.
pub fn sw_entropy_pure<T: Real>(st: &GaussianPureState<T>) -> SwEntropy<T> {
    SwEntropy::from_excess(st.modes(), st.entropy_excess())
}

/// SW entropy of the transformed vacuum `U|0⟩`: excess `-½ Σ ln(1 - s_i²)` over singular values of `K`.
pub fn sw_entropy_from_bogoliubov<T: Real>(s: &BogoliubovMap<T>) -> SwEntropy<T> {
    let excess = singular_values(&s.k_matrix())
        .into_iter()
        .fold(T::zero(), |acc, v| acc - ((T::one() - v) * (T::one() + v)).ln() * lit::<T>(0.5));
    SwEntropy::from_excess(s.modes(), excess)
}

/// Parameter-route closed form of the SW entropy of the one-mode density matrix `p`
/// (independent of the covariance route).
pub fn sw_entropy_1d_params<T: Real>(p: &Gaussian1DParams<T>, conv: &Conventions<T>) -> Result<T> {
    p.validate()?;
    conv.validate()?;
    let (k, a, s2, r) = (p.kappa(), p.alpha, conv.sigma2, p.r);
    let four = lit::<T>(4.0);
    let num = lit::<T>(2.0) + T::one() / (four * s2 * a) + four * s2 * a * (T::one() - k * k + r * r);
    Ok(T::one() + lit::<T>(0.5) * (num / (four * (T::one() - k))).ln())
}

/// Closed-form von Neumann entropy of the one-mode density matrix `p`.
pub fn vn_entropy_1d_params<T: Real>(p: &Gaussian1DParams<T>) -> Result<T> {
    p.validate()?;
    let s = p.s;
    let tail = if s <= lit(TINY) { T::zero() } else { s / (T::one() - s) * s.ln() };
    Ok(-(T::one() - s).ln() - tail)
}

/// `g(N) = (N+1) ln(N+1) - N ln N`, the entropy of a thermal mode with occupation `N`.
pub fn thermal_mode_entropy<T: Real>(occupation: T) -> T {
    let nb = occupation.max(T::zero());
    xlnx(nb + T::one()) - xlnx(nb)
}

pub fn vn_entropy_gaussian<T: Real>(st: &CovarianceState<T>, conv: &Conventions<T>) -> Result<T> {
    conv.validate()?;
    let half = lit::<T>(0.5);
    let floor = conv.hbar * half - lit::<T>(1e-9) * conv.hbar.max(T::one());
    let nu = st.symplectic_eigenvalues();
    if let Some(bad) = nu.iter().find(|v| **v < floor) {
        return Err(Error::InvalidState(format!("symplectic eigenvalue {} below hbar/2", to_f64(*bad))));
    }
    Ok(nu.into_iter().fold(T::zero(), |acc, v| acc + thermal_mode_entropy(v / conv.hbar - half)))
}

/// Entropy of the Gaussian P-symbol, `n + ½ ln det(Σ - Σ_coh)/ħ^{2n}`.
///
/// Returns `-∞` when `Σ - Σ_coh` is positive semidefinite but singular (the P-symbol
/// degenerates to a delta), and `NotClassical` when it has a negative direction.
pub fn p_symbol_entropy<T: Real>(st: &CovarianceState<T>, conv: &Conventions<T>) -> Result<T> {
    conv.validate()?;
    let n = st.modes();
    let sp = &st.sigma - conv.coherent_covariance(n);
    let scale = st.sigma.norm().max(conv.hbar);
    let tol = lit::<T>(1e-12) * scale;
    let eig = sym_eigenvalues(&sp);
    if eig[0] < -tol {
        return Err(Error::NotClassical);
    }
    if eig[0] <= tol {
        return Ok(lit(f64::NEG_INFINITY));
    }
    let logdet = logdet_spd(&sp).ok_or(Error::NotClassical)?;
    let nn = lit::<T>(n as f64);
    Ok(nn + lit::<T>(0.5) * (logdet - lit::<T>(2.0) * nn * conv.hbar.ln()))
}

/// KL divergence of the Husimi distributions, `∫ p_ref ln(p_ref/p_target)`.
pub fn relative_sw_covariance<T: Real>(
    reference: &CovarianceState<T>,
    target: &CovarianceState<T>,
    conv: &Conventions<T>,
) -> Result<T> {
    conv.validate()?;
    if reference.sigma.shape() != target.sigma.shape() {
        return Err(Error::DimensionMismatch { expected: reference.sigma.nrows(), got: target.sigma.nrows() });
    }
    let n = reference.modes();
    let coh = conv.coherent_covariance(n);
    let s1 = &reference.sigma + &coh;
    let s2 = &target.sigma + &coh;
    let s2inv = s2.clone().try_inverse().ok_or_else(|| Error::InvalidState("singular Husimi covariance".into()))?;
    let d = &target.mean - &reference.mean;
    let quad = (d.transpose() * &s2inv * &d)[(0, 0)];
    let ld1 = logdet_spd(&s1).ok_or_else(|| Error::InvalidState("reference covariance".into()))?;
    let ld2 = logdet_spd(&s2).ok_or_else(|| Error::InvalidState("target covariance".into()))?;
    let tr = (&s2inv * &s1).trace();
    let kl = lit::<T>(0.5) * (tr - lit::<T>(2.0 * n as f64) + quad + ld2 - ld1);
    Ok(kl.max(T::zero()))
}

/// Relative SW entropy of a pure Gaussian against a coherent reference:
/// `-½ ln det(1 - K̄K) + |z|² - Re(z̄ᵀ K z̄)`, `z` the complex displacement of the target centre.
pub fn relative_sw_gaussian<T: Real>(
    reference: &GaussianPureState<T>,
    target: &GaussianPureState<T>,
    conv: &Conventions<T>,
) -> Result<T> {
    let n = reference.modes();
    if target.modes() != n {
        return Err(Error::DimensionMismatch { expected: n, got: target.modes() });
    }
    if reference.k()?.norm() > lit(1e-10) {
        return Err(Error::InvalidState("reference must be a coherent state".into()));
    }
    let k = target.k()?;
    let sq2 = lit::<T>(2.0).sqrt();
    let (sx, sp) = (conv.position_scale(), conv.momentum_scale());
    let zbar: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let dq = (target.qbar()[i] - reference.qbar()[i]) / (sq2 * sx);
            let dp = (target.pbar()[i] - reference.pbar()[i]) / (sq2 * sp);
            Complex::new(dq, -dp)
        })
        .collect();
    let mut quad = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            quad += zbar[i] * k[(i, j)] * zbar[j];
        }
    }
    let z2 = zbar.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let excess = singular_values(&k)
        .into_iter()
        .fold(T::zero(), |acc, v| acc - ((T::one() - v) * (T::one() + v)).ln() * lit::<T>(0.5));
    Ok(excess + z2 - quad.re)
}

/// Result of a pointer-family scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointerScan<T> {
    pub sigma2: T,
    pub gap: T,
}

/// Family width minimising `I_σ - S` on a log-spaced grid of `count` points in `[lo, hi]`,
/// refined by golden-section search around the best grid point.
pub fn pointer_scan<T: Real>(st: &CovarianceState<T>, hbar: T, lo: T, hi: T, count: usize) -> Result<PointerScan<T>> {
    if !(lo > T::zero()) || !(hi >= lo) || count == 0 {
        return Err(Error::EmptyRange);
    }
    let base = Conventions::new(hbar, lo)?;
    let s = vn_entropy_gaussian(st, &base)?;
    let gap = |ln_s2: T| -> Result<T> { Ok(sw_entropy_gaussian(st, &base.with_sigma2(ln_s2.exp()))?.absolute - s) };
    let (a, b) = (lo.ln(), hi.ln());
    let step = if count > 1 { (b - a) / lit::<T>((count - 1) as f64) } else { T::zero() };
    let mut best = (a, gap(a)?);
    for i in 1..count {
        let x = a + step * lit::<T>(i as f64);
        let g = gap(x)?;
        if g < best.1 {
            best = (x, g);
        }
    }
    if count > 2 {
        let (mut l, mut r) = ((best.0 - step).max(a), (best.0 + step).min(b));
        let phi = lit::<T>(0.618_033_988_749_894_9);
        for _ in 0..80 {
            let m1 = r - phi * (r - l);
            let m2 = l + phi * (r - l);
            if gap(m1)? < gap(m2)? {
                r = m2;
            } else {
                l = m1;
            }
        }
        let x = (l + r) * lit::<T>(0.5);
        let g = gap(x)?;
        if g < best.1 {
            best = (x, g);
        }
    }
    Ok(PointerScan { sigma2: best.0.exp(), gap: best.1 })
}

/// Thermal state of an oscillator of mass `m`, frequency `omega` at temperature `kt`.
pub fn thermal_oscillator_state<T: Real>(mass: T, omega: T, kt: T, conv: &Conventions<T>) -> Result<CovarianceState<T>> {
    if !(mass > T::zero() && omega > T::zero() && kt > T::zero()) {
        return Err(Error::InvalidParams("mass, omega and kT must be > 0".into()));
    }
    let x = conv.hbar * omega / (lit::<T>(2.0) * kt);
    let coth = T::one() / x.tanh();
    let e = conv.hbar * lit::<T>(0.5) * coth;
    let sigma = DMatrix::from_row_slice(2, 2, &[e / (mass * omega), T::zero(), T::zero(), e * mass * omega]);
    CovarianceState::new(nalgebra::DVector::zeros(2), sigma, conv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::{apply, one_mode_squeeze, two_mode_squeeze, BogoliubovMap};
    use crate::state::{covariance_from_1d_params, covariance_from_k};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn conv() -> Conventions<f64> {
        Conventions::default()
    }

    #[test]
    fn discrete_examples() {
        assert_relative_eq!(shannon_discrete(&ProbVector::<f64>::uniform(4)), 4f64.ln(), epsilon = 1e-15);
        assert_eq!(shannon_discrete(&ProbVector::new(vec![0.0, 1.0, 0.0]).unwrap()), 0.0);
        let p = ProbVector::new(vec![0.75, 0.25]).unwrap();
        assert_relative_eq!(shannon_discrete(&p), 0.562335, epsilon = 1e-6);
        assert!(matches!(ProbVector::new(vec![0.5, 0.6]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn coarse_graining_lowers_entropy() {
        let p = ProbVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let q = coarse_grain(&p, &[vec![0], vec![1, 2]]).unwrap();
        assert_relative_eq!(shannon_discrete(&q), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(shannon_discrete(&p), 1.0297, epsilon = 1e-4);
        let all = coarse_grain(&p, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(shannon_discrete(&all), 0.0);
        let id = coarse_grain(&p, &[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(id, p);
        assert!(matches!(coarse_grain(&p, &[vec![0, 1]]), Err(Error::BadPartition(_))));
        assert!(matches!(coarse_grain(&p, &[vec![0, 1], vec![1, 2]]), Err(Error::BadPartition(_))));
    }

    #[test]
    fn relative_info_examples() {
        let a = ProbVector::new(vec![1.0, 0.0]).unwrap();
        let b = ProbVector::new(vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(relative_info(&a, &b).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(relative_info(&b, &b).unwrap(), 0.0);
        assert_eq!(relative_info(&b, &a), Err(Error::SupportMismatch(1)));
    }

    #[test]
    fn density_matrix_entropies() {
        let d = 3;
        let mixed = DensityMatrixFD::new(CMatrix::<f64>::identity(d, d) * c(1.0 / 3.0, 0.0)).unwrap();
        assert_relative_eq!(vn_entropy_fd(&mixed), 3f64.ln(), epsilon = 1e-12);
        let mut pure = CMatrix::<f64>::zeros(2, 2);
        pure[(0, 0)] = c(1.0, 0.0);
        assert!(vn_entropy_fd(&DensityMatrixFD::new(pure).unwrap()).abs() < 1e-15);
        let diag = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.75, 0.0), c(0.25, 0.0)]));
        assert_relative_eq!(vn_entropy_fd(&DensityMatrixFD::new(diag).unwrap()), 0.562335, epsilon = 1e-6);
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(matches!(DensityMatrixFD::new(bad), Err(Error::InvalidDensity(_))));
    }

    fn basis_projectors(d: usize) -> Vec<CMatrix<f64>> {
        (0..d)
            .map(|i| {
                let mut p = CMatrix::zeros(d, d);
                p[(i, i)] = c(1.0, 0.0);
                p
            })
            .collect()
    }

    #[test]
    fn operator_information_bounds() {
        let diag = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.3, 0.0), c(0.2, 0.0)]));
        let rho = DensityMatrixFD::new(diag).unwrap();
        let projs = basis_projectors(3);
        assert_relative_eq!(operator_information(&rho, &projs).unwrap(), vn_entropy_fd(&rho), epsilon = 1e-12);
        // pure superposition
        let v = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]);
        let rho = DensityMatrixFD::new(&v * v.adjoint()).unwrap();
        let i = operator_information(&rho, &projs).unwrap();
        assert!(i > 0.5 && vn_entropy_fd(&rho).abs() < 1e-12);
        // coarser resolution
        let mut block = projs[1].clone();
        block += &projs[2];
        let coarse = operator_information(&rho, &[projs[0].clone(), block]).unwrap();
        assert!(coarse <= i + 1e-12);
        assert!(matches!(operator_information(&rho, &projs[..2]), Err(Error::NotAResolution(_))));
    }

    #[test]
    fn operator_information_dominates_vn_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let d = 4;
            let g = CMatrix::from_fn(d, d, |_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let r = &g * g.adjoint();
            let tr = r.trace();
            let rho = DensityMatrixFD::new(crate::linalg::hermitize(&(r / tr))).unwrap();
            let i = operator_information(&rho, &basis_projectors(d)).unwrap();
            assert!(i >= vn_entropy_fd(&rho) - 1e-9);
        }
    }

    #[test]
    fn sw_examples() {
        let cv = conv();
        let coh = covariance_from_k(&CMatrix::zeros(1, 1), &cv).unwrap();
        assert_relative_eq!(sw_entropy_gaussian(&coh, &cv).unwrap().absolute, 1.0, epsilon = 1e-14);
        let sq = covariance_from_k(&one_mode_squeeze(1.0, 0.0).unwrap().k_matrix(), &cv).unwrap();
        let i = sw_entropy_gaussian(&sq, &cv).unwrap();
        assert_relative_eq!(i.absolute, 1.0 + 1f64.cosh().ln(), epsilon = 1e-13);
        assert_relative_eq!(i.absolute, 1.433781, epsilon = 1e-6);
    }

    #[test]
    fn bogoliubov_entropies() {
        let rot = BogoliubovMap::identity(2);
        assert_eq!(sw_entropy_from_bogoliubov::<f64>(&rot).excess, 0.0);
        for r in [0.0, 0.3, 1.0, 2.0] {
            let one = sw_entropy_from_bogoliubov(&one_mode_squeeze(r, 0.4).unwrap());
            assert_relative_eq!(one.excess, f64::cosh(r).ln(), epsilon = 1e-12);
            let two = sw_entropy_from_bogoliubov(&two_mode_squeeze(r, 0.4).unwrap());
            assert_relative_eq!(two.excess, 2.0 * f64::cosh(r).ln(), epsilon = 1e-12);
            assert_relative_eq!(two.absolute, 2.0 + two.excess, epsilon = 1e-15);
        }
        let ex = sw_entropy_from_bogoliubov(&two_mode_squeeze(0.5, 0.0).unwrap()).excess;
        assert_relative_eq!(ex, 0.240229, epsilon = 1e-6);
    }

    #[test]
    fn three_routes_agree_for_random_pure_states() {
        let cv = Conventions::new(1.3, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let s = BogoliubovMap::<f64>::random(2, 8, 1.2, &mut || rng.gen());
            let st = apply(&s, &GaussianPureState::vacuum(2, cv).unwrap()).unwrap();
            let a = sw_entropy_from_bogoliubov(&s).absolute;
            let b = sw_entropy_gaussian(&st.covariance(), &cv).unwrap().absolute;
            let d = sw_entropy_pure(&st).absolute;
            assert_relative_eq!(a, b, epsilon = 1e-9);
            assert_relative_eq!(a, d, epsilon = 1e-9);
        }
    }

    #[test]
    fn parameter_route_matches_covariance_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let cv = Conventions::new(0.5 + rng.gen::<f64>(), 0.05 + rng.gen::<f64>()).unwrap();
            let p = Gaussian1DParams::new(0.1 + 3.0 * rng.gen::<f64>(), 0.95 * rng.gen::<f64>(), 4.0 * rng.gen::<f64>() - 2.0)
                .unwrap();
            let st = covariance_from_1d_params(&p, &cv).unwrap();
            let cov_route = sw_entropy_gaussian(&st, &cv).unwrap().absolute;
            assert_relative_eq!(cov_route, sw_entropy_1d_params(&p, &cv).unwrap(), epsilon = 1e-9);
            assert_relative_eq!(vn_entropy_gaussian(&st, &cv).unwrap(), vn_entropy_1d_params(&p).unwrap(), epsilon = 1e-9);
        }
        let matched = Gaussian1DParams::new(1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(sw_entropy_1d_params(&matched, &conv()).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn vn_examples() {
        let cv = conv();
        let p = Gaussian1DParams::new(0.5, 0.5, 0.0).unwrap();
        let st = covariance_from_1d_params(&p, &cv).unwrap();
        assert_relative_eq!(vn_entropy_gaussian(&st, &cv).unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-12);
        let pure = covariance_from_k(&CMatrix::from_element(1, 1, c(0.3, 0.4)), &cv).unwrap();
        assert!(vn_entropy_gaussian(&pure, &cv).unwrap().abs() < 1e-9);
        let th = thermal_oscillator_state(1.0, 1.0, 100.0, &Conventions::matched(1.0, 1.0, 1.0)).unwrap();
        let mc = Conventions::matched(1.0, 1.0, 1.0);
        let gap = sw_entropy_gaussian(&th, &mc).unwrap().absolute - vn_entropy_gaussian(&th, &mc).unwrap();
        assert!(gap > 0.0 && gap < 0.05, "gap {gap}");
    }

    #[test]
    fn p_symbol_cases() {
        let cv = Conventions::matched(1.0, 1.0, 1.0);
        let coh = covariance_from_k(&CMatrix::zeros(1, 1), &cv).unwrap();
        assert_eq!(p_symbol_entropy(&coh, &cv).unwrap(), f64::NEG_INFINITY);
        let sq = covariance_from_k(&one_mode_squeeze(1.0, 0.0).unwrap().k_matrix(), &cv).unwrap();
        assert_eq!(p_symbol_entropy(&sq, &cv), Err(Error::NotClassical));
        let th = thermal_oscillator_state(1.0, 1.0, 100.0, &cv).unwrap();
        let ip = p_symbol_entropy(&th, &cv).unwrap();
        let s = vn_entropy_gaussian(&th, &cv).unwrap();
        let i = sw_entropy_gaussian(&th, &cv).unwrap().absolute;
        assert!(ip <= s && s <= i);
    }

    #[test]
    fn relative_sw_examples() {
        let cv = conv();
        let coh = GaussianPureState::vacuum(1, cv).unwrap();
        assert!(relative_sw_gaussian(&coh, &coh, &cv).unwrap().abs() < 1e-15);
        let r = 0.8;
        let sq = apply(&one_mode_squeeze(r, 0.3).unwrap(), &coh).unwrap();
        assert_relative_eq!(relative_sw_gaussian(&coh, &sq, &cv).unwrap(), f64::cosh(r).ln(), epsilon = 1e-12);
        // z = 1: q/(√2 s_x) = 1
        let disp = GaussianPureState::coherent(
            DVector::from_element(1, 2f64.sqrt() * cv.position_scale()),
            DVector::zeros(1),
            cv,
        )
        .unwrap();
        assert_relative_eq!(relative_sw_gaussian(&coh, &disp, &cv).unwrap(), 1.0, epsilon = 1e-12);
        let squeezed_coh = GaussianPureState::vacuum(1, cv).unwrap().translated(DVector::from_element(1, 0.4), DVector::zeros(1));
        assert!(relative_sw_gaussian(&sq, &squeezed_coh, &cv).is_err());
    }

    #[test]
    fn relative_sw_closed_form_matches_kl() {
        let cv = Conventions::new(0.9, 0.35).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let s = BogoliubovMap::<f64>::random(2, 6, 1.0, &mut || rng.gen());
            let q: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let refst = GaussianPureState::coherent(DVector::from_vec(vec![q[0], q[1]]), DVector::from_vec(vec![q[2], q[3]]), cv)
                .unwrap();
            let target = apply(&s, &GaussianPureState::vacuum(2, cv).unwrap())
                .unwrap()
                .translated(DVector::from_vec(vec![0.3, -0.2]), DVector::from_vec(vec![0.5, 0.1]));
            let a = relative_sw_gaussian(&refst, &target, &cv).unwrap();
            let b = relative_sw_covariance(&refst.covariance(), &target.covariance(), &cv).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn pointer_scan_thermal_and_coherent() {
        let th = thermal_oscillator_state(1.0, 1.0, 100.0, &conv()).unwrap();
        let res = pointer_scan(&th, 1.0, 0.01, 10.0, 61).unwrap();
        assert_relative_eq!(res.sigma2, 0.25, max_relative = 1e-3);
        assert!(res.gap < 0.05);
        let cv = Conventions::new(1.0, 0.7).unwrap();
        let coh = covariance_from_k(&CMatrix::zeros(1, 1), &cv).unwrap();
        let res = pointer_scan(&coh, 1.0, 0.01, 10.0, 61).unwrap();
        assert_relative_eq!(res.sigma2, 0.7, max_relative = 1e-5);
        assert_relative_eq!(res.gap, 1.0, epsilon = 1e-9);
        assert_eq!(pointer_scan(&coh, 1.0, 1.0, 0.5, 10), Err(Error::EmptyRange));
    }
}
