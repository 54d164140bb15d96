//! Gaussian-approximation dynamics: classical trajectories with their tangent maps,
//! shape-matrix propagation and SW entropy time series.
//!
//! The centre follows Hamilton's equations for `H = pᵀM⁻¹p/2 + V(q)` and the shape
//! matrices are carried by the trajectory Jacobian:
//!
//! ```text
//! M(t) = J_qq M(0) + (i/2) J_qp L(0)
//! L(t) = J_pp L(0) - 2i J_pq M(0)
//! ```

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::conventions::Conventions;
use crate::entropy::sw_entropy_pure;
use crate::error::{Error, Result};
use crate::linalg::{omega, symmetrize, to_complex, CMatrix};
use crate::ode::{integrate, OdeOptions};
use crate::scalar::{cplx, lit, to_f64, Real};
use crate::state::GaussianPureState;

/// Default per-step tolerance of the trajectory integrator.
pub const DEFAULT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind<T: Real> {
    /// `V = ½ qᵀ S q` for a symmetric stiffness `S`.
    Quadratic { stiffness: DMatrix<T> },
    /// One-dimensional `V = a2 q²/2 + a4 q⁴/4`.
    Quartic { a2: T, a4: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel<T: Real> {
    pub kind: PotentialKind<T>,
    /// Diagonal of the mass matrix.
    pub mass: DVector<T>,
}

impl<T: Real> PotentialModel<T> {
    pub fn quadratic(stiffness: DMatrix<T>, mass: DVector<T>) -> Result<Self> {
        if !stiffness.is_square() || stiffness.nrows() != mass.len() {
            return Err(Error::DimensionMismatch { expected: mass.len(), got: stiffness.nrows() });
        }
        if (&stiffness - stiffness.transpose()).norm() > lit::<T>(1e-12) * stiffness.norm().max(T::one()) {
            return Err(Error::HessianError("stiffness matrix not symmetric".into()));
        }
        Self::check_mass(&mass)?;
        Ok(Self { kind: PotentialKind::Quadratic { stiffness: symmetrize(&stiffness) }, mass })
    }

    pub fn free(n: usize, mass: T) -> Result<Self> {
        Self::quadratic(DMatrix::zeros(n, n), DVector::from_element(n, mass))
    }

    pub fn harmonic(mass: T, omega: T) -> Result<Self> {
        Self::quadratic(DMatrix::from_element(1, 1, mass * omega * omega), DVector::from_element(1, mass))
    }

    /// `V = -½ m k² q²`.
    pub fn inverted(mass: T, k: T) -> Result<Self> {
        Self::quadratic(DMatrix::from_element(1, 1, -mass * k * k), DVector::from_element(1, mass))
    }

    pub fn quartic(mass: T, a2: T, a4: T) -> Result<Self> {
        let mass = DVector::from_element(1, mass);
        Self::check_mass(&mass)?;
        Ok(Self { kind: PotentialKind::Quartic { a2, a4 }, mass })
    }

    fn check_mass(mass: &DVector<T>) -> Result<()> {
        if mass.iter().any(|m| !(*m > T::zero())) {
            return Err(Error::InvalidParams("masses must be > 0".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Stiffness matrix when the potential is exactly quadratic.
    pub fn stiffness(&self) -> Option<&DMatrix<T>> {
        match &self.kind {
            PotentialKind::Quadratic { stiffness } => Some(stiffness),
            PotentialKind::Quartic { .. } => None,
        }
    }

    /// Anharmonic runs only carry the Gaussian approximation as a heuristic.
    pub fn is_heuristic(&self) -> bool {
        self.stiffness().is_none()
    }

    pub fn value(&self, q: &DVector<T>) -> T {
        match &self.kind {
            PotentialKind::Quadratic { stiffness } => (q.transpose() * stiffness * q)[(0, 0)] * lit::<T>(0.5),
            PotentialKind::Quartic { a2, a4 } => {
                let x2 = q[0] * q[0];
                *a2 * x2 * lit::<T>(0.5) + *a4 * x2 * x2 * lit::<T>(0.25)
            }
        }
    }

    pub fn gradient(&self, q: &DVector<T>) -> DVector<T> {
        match &self.kind {
            PotentialKind::Quadratic { stiffness } => stiffness * q,
            PotentialKind::Quartic { a2, a4 } => DVector::from_element(1, *a2 * q[0] + *a4 * q[0] * q[0] * q[0]),
        }
    }

    pub fn hessian(&self, q: &DVector<T>) -> Result<DMatrix<T>> {
        let h = match &self.kind {
            PotentialKind::Quadratic { stiffness } => stiffness.clone(),
            PotentialKind::Quartic { a2, a4 } => DMatrix::from_element(1, 1, *a2 + lit::<T>(3.0) * *a4 * q[0] * q[0]),
        };
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::HessianError("non-finite Hessian".into()));
        }
        Ok(h)
    }

    /// Largest relative mismatch between the analytic gradient/Hessian and central differences at `q`.
    pub fn finite_difference_defect(&self, q: &DVector<T>) -> Result<T> {
        let n = self.dim();
        let h = lit::<T>(1e-4) * (T::one() + q.norm());
        let g = self.gradient(q);
        let hess = self.hessian(q)?;
        let mut worst = T::zero();
        for i in 0..n {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[i] += h;
            qm[i] -= h;
            let fd_g = (self.value(&qp) - self.value(&qm)) / (lit::<T>(2.0) * h);
            let scale = g.norm().max(T::one());
            worst = worst.max((fd_g - g[i]).abs() / scale);
            let fd_h = (self.gradient(&qp) - self.gradient(&qm)) / (lit::<T>(2.0) * h);
            let hs = hess.norm().max(T::one());
            for j in 0..n {
                worst = worst.max((fd_h[j] - hess[(j, i)]).abs() / hs);
            }
        }
        Ok(worst)
    }

    pub fn energy(&self, q: &DVector<T>, p: &DVector<T>) -> T {
        let kin = p.iter().zip(self.mass.iter()).fold(T::zero(), |acc, (pi, mi)| acc + *pi * *pi / *mi);
        kin * lit::<T>(0.5) + self.value(q)
    }
}

/// Classical trajectory and its phase-space Jacobian `J = ∂(q(t), p(t))/∂(q(0), p(0))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBundle<T: Real> {
    pub times: Vec<T>,
    pub q: Vec<DVector<T>>,
    pub p: Vec<DVector<T>>,
    pub jacobian: Vec<DMatrix<T>>,
}

impl<T: Real> TrajectoryBundle<T> {
    pub fn dim(&self) -> usize {
        self.q.first().map_or(0, |q| q.len())
    }

    /// Blocks `(J_qq, J_qp, J_pq, J_pp)` at sample `i`.
    pub fn blocks(&self, i: usize) -> (DMatrix<T>, DMatrix<T>, DMatrix<T>, DMatrix<T>) {
        let n = self.dim();
        let j = &self.jacobian[i];
        (
            j.view((0, 0), (n, n)).into_owned(),
            j.view((0, n), (n, n)).into_owned(),
            j.view((n, 0), (n, n)).into_owned(),
            j.view((n, n), (n, n)).into_owned(),
        )
    }

    /// `max_t ‖JᵀΩJ - Ω‖ / max(1, ‖J‖²)`.
    pub fn symplectic_defect(&self) -> T {
        let om = omega::<T>(self.dim());
        self.jacobian.iter().fold(T::zero(), |acc, j| {
            let d = (j.transpose() * &om * j - &om).norm() / j.norm_squared().max(T::one());
            acc.max(d)
        })
    }

    /// `max_t |E(t) - E(0)| / max(1, |E(0)|)`.
    pub fn energy_drift(&self, pot: &PotentialModel<T>) -> T {
        let e0 = pot.energy(&self.q[0], &self.p[0]);
        self.q.iter().zip(&self.p).fold(T::zero(), |acc, (q, p)| {
            acc.max((pot.energy(q, p) - e0).abs() / e0.abs().max(T::one()))
        })
    }
}

/// Integrates the trajectory and its variational equations through `times`.
pub fn integrate_classical<T: Real>(
    pot: &PotentialModel<T>,
    q0: &DVector<T>,
    p0: &DVector<T>,
    times: &[T],
    tol: T,
) -> Result<TrajectoryBundle<T>> {
    let n = pot.dim();
    if q0.len() != n || p0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q0.len().max(p0.len()) });
    }
    if times.is_empty() {
        return Err(Error::TooShort("no output times".into()));
    }
    let dim = 2 * n + 4 * n * n;
    let mut y0 = DVector::zeros(dim);
    y0.rows_mut(0, n).copy_from(q0);
    y0.rows_mut(n, n).copy_from(p0);
    for i in 0..2 * n {
        y0[2 * n + i * 2 * n + i] = T::one();
    }
    let minv = pot.mass.map(|m| T::one() / m);
    let rhs = |_t: T, y: &DVector<T>| -> Result<DVector<T>> {
        let q = y.rows(0, n).into_owned();
        let p = y.rows(n, n);
        let hess = pot.hessian(&q)?;
        let grad = pot.gradient(&q);
        let mut dy = DVector::zeros(dim);
        for i in 0..n {
            dy[i] = p[i] * minv[i];
            dy[n + i] = -grad[i];
        }
        // J stored column-major: column c holds ∂y/∂y0_c.
        for c in 0..2 * n {
            let base = 2 * n + c * 2 * n;
            let dq = y.rows(base, n);
            let dp = y.rows(base + n, n);
            for i in 0..n {
                dy[base + i] = dp[i] * minv[i];
            }
            let f = &hess * dq;
            for i in 0..n {
                dy[base + n + i] = -f[i];
            }
        }
        Ok(dy)
    };
    let ys = integrate(rhs, y0, times, &OdeOptions::with_tol(tol))?;
    let mut bundle = TrajectoryBundle { times: times.to_vec(), q: Vec::new(), p: Vec::new(), jacobian: Vec::new() };
    for y in ys {
        bundle.q.push(y.rows(0, n).into_owned());
        bundle.p.push(y.rows(n, n).into_owned());
        bundle.jacobian.push(DMatrix::from_column_slice(2 * n, 2 * n, y.rows(2 * n, 4 * n * n).as_slice()));
    }
    Ok(bundle)
}

/// Carries the shape matrices of `st0` along the trajectory; means follow the classical centre.
pub fn propagate_state<T: Real>(
    st0: &GaussianPureState<T>,
    tb: &TrajectoryBundle<T>,
    conv: &Conventions<T>,
) -> Result<Vec<GaussianPureState<T>>> {
    if tb.dim() != st0.modes() {
        return Err(Error::DimensionMismatch { expected: st0.modes(), got: tb.dim() });
    }
    let (m0, l0) = (st0.m(), st0.l());
    let half_i = cplx(T::zero(), lit::<T>(0.5));
    let two_i = cplx(T::zero(), lit::<T>(2.0));
    let mut out = Vec::with_capacity(tb.times.len());
    for k in 0..tb.times.len() {
        let (jqq, jqp, jpq, jpp) = tb.blocks(k);
        let m: CMatrix<T> = to_complex(&jqq) * m0 + to_complex(&jqp) * l0 * half_i;
        let l: CMatrix<T> = to_complex(&jpp) * l0 - to_complex(&jpq) * m0 * two_i;
        let st = GaussianPureState::from_parts_unchecked(tb.q[k].clone(), tb.p[k].clone(), m, l, *conv);
        // Normalisation is preserved by symplectic J; a failure here means a broken integration.
        let defect = st.normalisation_defect();
        if !(defect <= lit::<T>(1e-6) * (T::one() + st.m().norm_squared())) {
            return Err(Error::InvalidState(format!("normalisation lost at t = {}", to_f64(tb.times[k]))));
        }
        out.push(st);
    }
    Ok(out)
}

/// SW entropy along a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropySeries<T> {
    pub t: Vec<T>,
    pub absolute: Vec<T>,
    pub excess: Vec<T>,
    /// True when the potential is anharmonic and the Gaussian approximation is heuristic.
    pub heuristic: bool,
}

/// Full output of a run: trajectory, propagated states and entropy.
#[derive(Debug, Clone)]
pub struct Evolution<T: Real> {
    pub trajectory: TrajectoryBundle<T>,
    pub states: Vec<GaussianPureState<T>>,
    pub entropy: EntropySeries<T>,
}

pub fn evolve<T: Real>(st0: &GaussianPureState<T>, pot: &PotentialModel<T>, times: &[T], conv: &Conventions<T>) -> Result<Evolution<T>> {
    let tb = integrate_classical(pot, st0.qbar(), st0.pbar(), times, lit(DEFAULT_TOL))?;
    let st0 = st0.with_conventions(*conv);
    let states = propagate_state(&st0, &tb, conv)?;
    let mut absolute = Vec::with_capacity(states.len());
    let mut excess = Vec::with_capacity(states.len());
    for st in &states {
        let e = sw_entropy_pure(st);
        absolute.push(e.absolute);
        excess.push(e.excess);
    }
    let entropy = EntropySeries { t: times.to_vec(), absolute, excess, heuristic: pot.is_heuristic() };
    Ok(Evolution { trajectory: tb, states, entropy })
}

pub fn entropy_series<T: Real>(st0: &GaussianPureState<T>, pot: &PotentialModel<T>, times: &[T], conv: &Conventions<T>) -> Result<EntropySeries<T>> {
    Ok(evolve(st0, pot, times, conv)?.entropy)
}

/// Persistence time of predictability for a free particle in a cell of phase-space volume `v_cell`.
pub fn breakdown_time<T: Real>(sigma2: T, mass: T, v_cell: T, conv: &Conventions<T>) -> Result<T> {
    if !(sigma2 > T::zero() && mass > T::zero() && v_cell > T::zero()) {
        return Err(Error::InvalidParams("sigma2, mass and volume must be > 0".into()));
    }
    Ok(lit::<T>(4.0) * sigma2 * mass * v_cell / (T::pi() * conv.hbar))
}

/// Least-squares slope of `I(t)` over samples with `t ≥ t_last - window`.
pub fn lyapunov_entropy_rate<T: Real>(series: &EntropySeries<T>, window: T) -> Result<T> {
    let n = series.t.len();
    if n < 3 {
        return Err(Error::TooShort(format!("{n} samples")));
    }
    let t_last = series.t[n - 1];
    let idx: Vec<usize> = (0..n).filter(|&i| series.t[i] >= t_last - window).collect();
    if idx.len() < 3 {
        return Err(Error::TooShort(format!("{} samples in window", idx.len())));
    }
    let m = lit::<T>(idx.len() as f64);
    let tm = idx.iter().fold(T::zero(), |a, &i| a + series.t[i]) / m;
    let im = idx.iter().fold(T::zero(), |a, &i| a + series.absolute[i]) / m;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for &i in &idx {
        let dx = series.t[i] - tm;
        sxy += dx * (series.absolute[i] - im);
        sxx += dx * dx;
    }
    if sxx == T::zero() {
        return Err(Error::TooShort("window has zero time extent".into()));
    }
    Ok(sxy / sxx)
}

/// Uniform grid `[t0, t0 + dt, …, t1]`.
pub fn time_grid<T: Real>(t0: T, t1: T, steps: usize) -> Vec<T> {
    let steps = steps.max(1);
    let dt = (t1 - t0) / lit::<T>(steps as f64);
    (0..=steps).map(|i| if i == steps { t1 } else { t0 + dt * lit::<T>(i as f64) }).collect()
}

/// One-mode K of the state, for reporting.
pub fn k_scalar<T: Real>(st: &GaussianPureState<T>) -> Result<num_complex::Complex<T>> {
    Ok(st.k()?[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::{apply, BogoliubovMap};
    use crate::entropy::relative_sw_gaussian;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    fn coherent(conv: Conventions<f64>, q: f64, p: f64) -> GaussianPureState<f64> {
        GaussianPureState::coherent(DVector::from_element(1, q), DVector::from_element(1, p), conv).unwrap()
    }

    #[test]
    fn free_particle_jacobian() {
        let pot = PotentialModel::free(1, 2.0).unwrap();
        let times = time_grid(0.0, 10.0, 20);
        let tb = integrate_classical(&pot, &DVector::from_element(1, 0.0), &DVector::from_element(1, 1.0), &times, DEFAULT_TOL).unwrap();
        for (k, t) in times.iter().enumerate() {
            let (_, jqp, _, _) = tb.blocks(k);
            assert_relative_eq!(jqp[(0, 0)], t / 2.0, epsilon = 1e-12);
            assert_relative_eq!(tb.q[k][0], t / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn harmonic_jacobian() {
        let w = 1.7;
        let pot = PotentialModel::harmonic(1.0, w).unwrap();
        let times = time_grid(0.0, 10.0 * std::f64::consts::TAU / w, 200);
        let tb = integrate_classical(&pot, &DVector::from_element(1, 1.0), &DVector::from_element(1, 0.0), &times, DEFAULT_TOL).unwrap();
        for (k, t) in times.iter().enumerate() {
            let (jqq, _, _, _) = tb.blocks(k);
            assert!((jqq[(0, 0)] - (w * t).cos()).abs() < 1e-9, "t {t}: {}", jqq[(0, 0)] - (w * t).cos());
        }
        assert!(tb.symplectic_defect() < 1e-7);
        assert!(tb.energy_drift(&pot) < 1e-7);
    }

    #[test]
    fn inverted_jacobian() {
        let k = 1.0f64;
        let pot = PotentialModel::inverted(1.0, k).unwrap();
        let times = time_grid(0.0, 15.0, 60);
        let tb = integrate_classical(&pot, &DVector::zeros(1), &DVector::zeros(1), &times, DEFAULT_TOL).unwrap();
        for (i, t) in times.iter().enumerate() {
            let (jqq, _, _, _) = tb.blocks(i);
            assert!((jqq[(0, 0)] - (k * t).cosh()).abs() <= 1e-7 * (k * t).cosh());
        }
        assert!(tb.symplectic_defect() < 1e-7);
    }

    #[test]
    fn free_particle_k_and_entropy() {
        let conv = Conventions::default();
        let m = 1.0;
        let pot = PotentialModel::free(1, m).unwrap();
        let times = time_grid(0.0, 100.0, 100);
        let ev = evolve(&coherent(conv, 0.0, 0.3), &pot, &times, &conv).unwrap();
        for (k, t) in times.iter().enumerate() {
            let tau = t / (4.0 * conv.sigma2 * m);
            let expect = Complex::new(0.0, tau) / Complex::new(2.0, tau);
            assert!((k_scalar(&ev.states[k]).unwrap() - expect).norm() < 1e-9);
            assert_relative_eq!(ev.entropy.absolute[k], 1.0 + 0.5 * (1.0 + tau * tau / 4.0).ln(), epsilon = 1e-6);
        }
        let last = *ev.entropy.absolute.last().unwrap();
        assert_relative_eq!(last, 4.9122, epsilon = 1e-4);
        assert!((last - (1.0 + (100.0f64 / (8.0 * 0.25)).ln())).abs() < 1e-3);
        assert!(!ev.entropy.heuristic);
    }

    #[test]
    fn matched_and_mismatched_oscillator() {
        let (m, w) = (1.0, 2.0);
        let pot = PotentialModel::harmonic(m, w).unwrap();
        let times = time_grid(0.0, 10.0 * std::f64::consts::TAU / w, 400);
        let matched = Conventions::matched(1.0, m, w);
        let s = entropy_series(&coherent(matched, 0.5, -0.2), &pot, &times, &matched).unwrap();
        assert!(s.absolute.iter().all(|i| (i - 1.0).abs() < 1e-8));
        assert!(lyapunov_entropy_rate(&s, 5.0).unwrap().abs() < 1e-8);
        let off = Conventions::new(1.0, 0.5).unwrap();
        let s = entropy_series(&coherent(off, 0.5, -0.2), &pot, &times, &off).unwrap();
        let bound = 1.0 + (4.0 * m * w * off.sigma2).ln().abs() + 1e-6;
        assert!(s.absolute.iter().all(|i| *i <= bound));
        assert!(s.absolute.iter().any(|i| *i > 1.1));
    }

    #[test]
    fn inverted_entropy_and_rate() {
        let k = 0.8;
        let conv = Conventions::matched(1.0, 1.0, k);
        let pot = PotentialModel::inverted(1.0, k).unwrap();
        let times = time_grid(0.0, 20.0, 200);
        let s = entropy_series(&coherent(conv, 0.1, 0.0), &pot, &times, &conv).unwrap();
        for (t, i) in s.t.iter().zip(&s.absolute) {
            let expect = 1.0 + (k * t).cosh().ln();
            assert!((i - expect).abs() < 1e-6, "t {t}: {i} vs {expect}");
        }
        let rate = lyapunov_entropy_rate(&s, 5.0).unwrap();
        assert_relative_eq!(rate, k, max_relative = 0.01);
    }

    #[test]
    fn free_rate_decays() {
        let conv = Conventions::default();
        let pot = PotentialModel::free(1, 1.0).unwrap();
        let times = time_grid(0.0, 1000.0, 500);
        let s = entropy_series(&coherent(conv, 0.0, 0.0), &pot, &times, &conv).unwrap();
        assert!(lyapunov_entropy_rate(&s, 200.0).unwrap() < 2e-3);
    }

    #[test]
    fn quadratic_propagation_matches_bogoliubov() {
        let conv = Conventions::new(1.0, 0.3).unwrap();
        let stiff = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, -0.3]);
        let pot = PotentialModel::quadratic(stiff, DVector::from_vec(vec![1.0, 2.0])).unwrap();
        let st0 = GaussianPureState::coherent(DVector::from_vec(vec![0.3, -0.1]), DVector::from_vec(vec![0.2, 0.5]), conv).unwrap();
        let times = time_grid(0.0, 3.0, 6);
        let ev = evolve(&st0, &pot, &times, &conv).unwrap();
        for k in 0..times.len() {
            let map = BogoliubovMap::from_real_symplectic(&ev.trajectory.jacobian[k], &conv).unwrap();
            let via_map = apply(&map, &st0).unwrap();
            assert!((via_map.k().unwrap() - ev.states[k].k().unwrap()).norm() < 1e-8);
            assert!((via_map.qbar() - ev.states[k].qbar()).norm() < 1e-8);
            let nu = ev.states[k].covariance().symplectic_eigenvalues();
            assert!(nu.iter().all(|v: &f64| (v - 0.5).abs() < 1e-7));
        }
    }

    #[test]
    fn time_reversal() {
        let conv = Conventions::default();
        let pot = PotentialModel::quartic(1.0, 1.0, 0.2).unwrap();
        let st0 = coherent(conv, 0.4, 0.1);
        let fwd = evolve(&st0, &pot, &[0.0, 2.0], &conv).unwrap();
        let mid = fwd.states[1].clone();
        let back = evolve(&mid, &pot, &[2.0, 0.0], &conv).unwrap();
        assert!((back.states[1].k().unwrap() - st0.k().unwrap()).norm() < 1e-6);
        assert!((back.states[1].qbar() - st0.qbar()).norm() < 1e-8);
        assert!(fwd.entropy.heuristic);
    }

    #[test]
    fn entropy_growth_bounds_relative_entropy() {
        let conv = Conventions::default();
        let pot = PotentialModel::inverted(1.0, 0.5).unwrap();
        let times = time_grid(0.0, 4.0, 8);
        let st0 = coherent(conv, 0.0, 0.0);
        let ev = evolve(&st0, &pot, &times, &conv).unwrap();
        for (k, st) in ev.states.iter().enumerate() {
            let reference = coherent(conv, st.qbar()[0], st.pbar()[0]);
            let rel = relative_sw_gaussian(&reference, st, &conv).unwrap();
            let growth = ev.entropy.absolute[k] - ev.entropy.absolute[0];
            assert!(rel <= growth + 1e-9);
        }
    }

    #[test]
    fn finite_differences_consistent() {
        let q = DVector::from_element(1, 0.7);
        assert!(PotentialModel::quartic(1.0, -1.0, 0.5).unwrap().finite_difference_defect(&q).unwrap() < 1e-5);
        let stiff = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, -0.3]);
        let pot = PotentialModel::quadratic(stiff, DVector::from_vec(vec![1.0, 2.0])).unwrap();
        assert!(pot.finite_difference_defect(&DVector::from_vec(vec![0.3, -2.0])).unwrap() < 1e-5);
    }

    #[test]
    fn breakdown_examples() {
        let conv = Conventions::default();
        assert_relative_eq!(breakdown_time(0.25, 1.0, std::f64::consts::PI, &conv).unwrap(), 1.0, epsilon = 1e-15);
        let t1 = breakdown_time(0.25, 1.0, 3.0, &conv).unwrap();
        let t2 = breakdown_time(0.25, 2.0, 3.0, &conv).unwrap();
        assert_relative_eq!(t2, 2.0 * t1, epsilon = 1e-15);
        assert!(breakdown_time(0.25, 1.0, -1.0, &conv).is_err());
    }

    #[test]
    fn rate_needs_samples() {
        let s: EntropySeries<f64> = EntropySeries { t: vec![0.0, 1.0], absolute: vec![1.0, 1.0], excess: vec![0.0, 0.0], heuristic: false };
        assert!(matches!(lyapunov_entropy_rate(&s, 1.0), Err(Error::TooShort(_))));
    }
}
