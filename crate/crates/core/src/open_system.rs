//! High-temperature Caldeira–Leggett evolution of one-mode Gaussian moments.
//!
//! For `V = ½ V'' q²` the master equation closes on first and second moments:
//!
//! ```text
//! σ̇xx = 2σxp/m
//! σ̇xp = σpp/m - V''σxx - 2γσxp
//! σ̇pp = -2V''σxp - 4γσpp + 2D,   D = 2mγkT
//! ```

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::conventions::Conventions;
use crate::dynamics::PotentialModel;
use crate::entropy::{sw_entropy_gaussian, thermal_mode_entropy};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::scalar::{lit, Real};
use crate::state::CovarianceState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BathSpec<T> {
    pub gamma: T,
    pub kt: T,
}

impl<T: Real> BathSpec<T> {
    pub fn new(gamma: T, kt: T) -> Result<Self> {
        if !(gamma >= T::zero()) {
            return Err(Error::InvalidBath("gamma must be >= 0".into()));
        }
        if !(kt > T::zero()) {
            return Err(Error::InvalidBath("kT must be > 0".into()));
        }
        Ok(Self { gamma, kt })
    }

    /// Momentum diffusion `D = 2mγkT`.
    pub fn diffusion(&self, mass: T) -> T {
        lit::<T>(2.0) * mass * self.gamma * self.kt
    }

    /// High-temperature regime: `kT` at least ten times `ħγ` and `ħω`.
    pub fn high_temperature(&self, hbar: T, omega: T) -> bool {
        let ten = lit::<T>(10.0);
        self.kt >= ten * hbar * self.gamma && self.kt >= ten * hbar * omega.abs()
    }
}

/// Moment trajectory of an open run.
#[derive(Debug, Clone)]
pub struct OpenSeries<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<CovarianceState<T>>,
    /// Sample indices where the smallest symplectic eigenvalue dipped below `ħ/2`.
    pub uncertainty_violations: Vec<usize>,
    /// Stationary classical covariance when the run thermalises (`V'' > 0`, `γ > 0`).
    pub stationary: Option<DMatrix<T>>,
    pub high_temperature: bool,
}

pub fn cl_moments_evolve<T: Real>(
    st0: &CovarianceState<T>,
    pot: &PotentialModel<T>,
    bath: &BathSpec<T>,
    times: &[T],
    conv: &Conventions<T>,
) -> Result<OpenSeries<T>> {
    if st0.modes() != 1 || pot.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: st0.modes().max(pot.dim()) });
    }
    let k = pot.stiffness().ok_or(Error::NonQuadratic)?[(0, 0)];
    let m = pot.mass[0];
    let g = bath.gamma;
    let d = bath.diffusion(m);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let s = &st0.sigma;
    let y0 = DVector::from_vec(vec![st0.mean[0], st0.mean[1], s[(0, 0)], s[(0, 1)], s[(1, 1)]]);
    let rhs = |_t: T, y: &DVector<T>| -> Result<DVector<T>> {
        let (q, p, xx, xp, pp) = (y[0], y[1], y[2], y[3], y[4]);
        Ok(DVector::from_vec(vec![
            p / m,
            -k * q - two * g * p,
            two * xp / m,
            pp / m - k * xx - two * g * xp,
            -two * k * xp - four * g * pp + two * d,
        ]))
    };
    let ys = integrate(rhs, y0, times, &OdeOptions::with_tol(lit(1e-11)))?;
    let floor = conv.hbar * lit::<T>(0.5) * (T::one() - lit::<T>(1e-9));
    let mut states = Vec::with_capacity(ys.len());
    let mut violations = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let sigma = DMatrix::from_row_slice(2, 2, &[y[2], y[3], y[3], y[4]]);
        let st = CovarianceState::new_unchecked(DVector::from_vec(vec![y[0], y[1]]), sigma);
        let det = y[2] * y[4] - y[3] * y[3];
        if !(det > T::zero()) || det.sqrt() < floor {
            violations.push(i);
        }
        states.push(st);
    }
    let omega = if k > T::zero() { (k / m).sqrt() } else { T::zero() };
    let stationary = (k > T::zero() && g > T::zero())
        .then(|| DMatrix::from_row_slice(2, 2, &[bath.kt / k, T::zero(), T::zero(), m * bath.kt]));
    Ok(OpenSeries {
        times: times.to_vec(),
        states,
        uncertainty_violations: violations,
        stationary,
        high_temperature: bath.high_temperature(conv.hbar, omega),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSeries<T> {
    pub t: Vec<T>,
    pub sw: Vec<T>,
    pub vn: Vec<T>,
    pub gap: Vec<T>,
}

/// SW entropy, von Neumann entropy and their gap along a run.
///
/// Samples with a symplectic eigenvalue below `ħ/2` (possible transiently for this master
/// equation) get `S` from the clamped occupation; they are listed in the series metadata.
pub fn entropy_gap_series<T: Real>(series: &OpenSeries<T>, conv: &Conventions<T>) -> Result<GapSeries<T>> {
    let mut out = GapSeries { t: series.times.clone(), sw: Vec::new(), vn: Vec::new(), gap: Vec::new() };
    let half = lit::<T>(0.5);
    for st in &series.states {
        let i = sw_entropy_gaussian(st, conv)?.absolute;
        let nu = st.symplectic_eigenvalues();
        let s = nu.into_iter().fold(T::zero(), |acc, v| acc + thermal_mode_entropy(v / conv.hbar - half));
        out.sw.push(i);
        out.vn.push(s);
        out.gap.push(i - s);
    }
    Ok(out)
}

/// First time with `‖Σ(t) - Σ_th‖ / ‖Σ_th‖ < tol`.
pub fn thermalization_time<T: Real>(series: &OpenSeries<T>, tol: T) -> Result<T> {
    let target = series.stationary.as_ref().ok_or(Error::NotReached)?;
    let scale = target.norm();
    series
        .states
        .iter()
        .zip(&series.times)
        .find(|(st, _)| (&st.sigma - target).norm() / scale < tol)
        .map(|(_, t)| *t)
        .ok_or(Error::NotReached)
}

/// Least-squares slope of `y` against `ln t` over samples with `t ≥ t_min`.
pub fn log_time_slope<T: Real>(t: &[T], y: &[T], t_min: T) -> Result<T> {
    let pts: Vec<(T, T)> = t.iter().zip(y).filter(|(ti, _)| **ti >= t_min && **ti > T::zero()).map(|(ti, yi)| (ti.ln(), *yi)).collect();
    if pts.len() < 3 {
        return Err(Error::TooShort(format!("{} samples", pts.len())));
    }
    let n = lit::<T>(pts.len() as f64);
    let xm = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let ym = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in &pts {
        sxy += (*x - xm) * (*y - ym);
        sxx += (*x - xm) * (*x - xm);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, time_grid};
    use crate::state::GaussianPureState;
    use approx::assert_relative_eq;

    fn coherent_cov(conv: &Conventions<f64>) -> CovarianceState<f64> {
        CovarianceState::new(DVector::from_vec(vec![1.0, 0.0]), conv.coherent_covariance(1), conv).unwrap()
    }

    #[test]
    fn harmonic_thermalises() {
        let conv = Conventions::matched(1.0, 1.0, 1.0);
        let pot = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let bath = BathSpec::new(0.1, 100.0).unwrap();
        let times = time_grid(0.0, 500.0, 1000);
        let run = cl_moments_evolve(&coherent_cov(&conv), &pot, &bath, &times, &conv).unwrap();
        let last = run.states.last().unwrap();
        assert_relative_eq!(last.sigma[(1, 1)], 100.0, max_relative = 1e-3);
        assert_relative_eq!(last.sigma[(0, 0)], 100.0, max_relative = 1e-3);
        let gaps = entropy_gap_series(&run, &conv).unwrap();
        assert!(gaps.gap.iter().all(|g| *g >= -1e-9));
        assert!(*gaps.gap.last().unwrap() < 0.05);
        assert_relative_eq!(gaps.sw[0], 1.0, epsilon = 1e-12);
        assert!(gaps.vn[0].abs() < 1e-9);
        assert_relative_eq!(*gaps.sw.last().unwrap(), 1.0 + 100f64.ln(), epsilon = 0.01);
        assert!(run.high_temperature);
        // By 10/γ stationary values are within 1%.
        let at = run.times.iter().position(|t| *t >= 100.0).unwrap();
        assert_relative_eq!(run.states[at].sigma[(1, 1)], 100.0, max_relative = 0.01);
    }

    #[test]
    fn bath_off_matches_closed_flow() {
        let conv = Conventions::new(1.0, 0.4).unwrap();
        let pot = PotentialModel::harmonic(1.0, 1.3).unwrap();
        let bath = BathSpec::new(0.0, 1.0).unwrap();
        let times = time_grid(0.0, 10.0, 20);
        let run = cl_moments_evolve(&coherent_cov(&conv), &pot, &bath, &times, &conv).unwrap();
        let st0 = GaussianPureState::coherent(DVector::from_element(1, 1.0), DVector::zeros(1), conv).unwrap();
        let closed = evolve(&st0, &pot, &times, &conv).unwrap();
        for (a, b) in run.states.iter().zip(&closed.states) {
            assert!((&a.sigma - b.covariance().sigma).norm() < 1e-8);
            assert!((a.symplectic_eigenvalues()[0] - 0.5).abs() < 1e-7);
        }
        assert_eq!(thermalization_time(&run, 0.01), Err(Error::NotReached));
    }

    #[test]
    fn free_particle_diffuses() {
        let conv = Conventions::default();
        let pot = PotentialModel::free(1, 1.0).unwrap();
        let bath = BathSpec::new(0.1, 100.0).unwrap();
        let times = time_grid(0.0, 2000.0, 2000);
        let run = cl_moments_evolve(&coherent_cov(&conv), &pot, &bath, &times, &conv).unwrap();
        let n = times.len();
        let slope = (run.states[n - 1].sigma[(0, 0)] - run.states[n - 101].sigma[(0, 0)]) / (times[n - 1] - times[n - 101]);
        assert_relative_eq!(slope, 100.0 / 0.1, max_relative = 0.05);
        let gaps = entropy_gap_series(&run, &conv).unwrap();
        assert!(*gaps.gap.last().unwrap() < 0.05);
        let lns = log_time_slope(&gaps.t, &gaps.sw, 1000.0).unwrap();
        assert_relative_eq!(lns, 0.5, max_relative = 0.05);
    }

    #[test]
    fn thermalisation_scales_inversely_with_gamma() {
        let conv = Conventions::default();
        let pot = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let t = |g: f64| {
            let bath = BathSpec::new(g, 100.0).unwrap();
            let times = time_grid(0.0, 200.0 / g, 4000);
            let run = cl_moments_evolve(&coherent_cov(&conv), &pot, &bath, &times, &conv).unwrap();
            thermalization_time(&run, 0.01).unwrap()
        };
        let (t1, t2) = (t(0.1), t(0.05));
        assert!(t1 > 10.0 && t1 < 100.0 / 0.1);
        assert_relative_eq!(t2 / t1, 2.0, max_relative = 0.2);
    }

    #[test]
    fn thermal_start_is_immediate_and_starts_converge() {
        let conv = Conventions::default();
        let pot = PotentialModel::harmonic(1.0, 1.0).unwrap();
        let bath = BathSpec::new(0.1, 100.0).unwrap();
        let th = CovarianceState::new(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[100.0, 0.0, 0.0, 100.0]), &conv).unwrap();
        let times = time_grid(0.0, 200.0, 400);
        let run = cl_moments_evolve(&th, &pot, &bath, &times, &conv).unwrap();
        assert_eq!(thermalization_time(&run, 0.01).unwrap(), 0.0);
        let squeezed = CovarianceState::new(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[0.05, 0.0, 0.0, 5.0]), &conv).unwrap();
        let other = cl_moments_evolve(&squeezed, &pot, &bath, &times, &conv).unwrap();
        let (a, b) = (&run.states.last().unwrap().sigma, &other.states.last().unwrap().sigma);
        assert!((a - b).norm() / a.norm() < 0.01);
    }

    #[test]
    fn determinant_grows_once_momentum_is_hot() {
        let conv = Conventions::default();
        let bath = BathSpec::new(0.2, 50.0).unwrap();
        for pot in [PotentialModel::free(1, 1.0).unwrap(), PotentialModel::harmonic(1.0, 0.7).unwrap(), PotentialModel::inverted(1.0, 0.3).unwrap()] {
            let times = time_grid(0.0, 30.0, 300);
            let run = cl_moments_evolve(&coherent_cov(&conv), &pot, &bath, &times, &conv).unwrap();
            for w in run.states.windows(2) {
                if w[0].sigma[(1, 1)] >= 25.0 {
                    assert!(w[1].sigma.determinant() >= w[0].sigma.determinant() * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        let conv = Conventions::default();
        assert!(BathSpec::new(-1.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, 0.0).is_err());
        let bath = BathSpec::new(0.1, 1.0).unwrap();
        let quartic = PotentialModel::quartic(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(cl_moments_evolve(&coherent_cov(&conv), &quartic, &bath, &[0.0, 1.0], &conv), Err(Error::NonQuadratic)));
    }
}
