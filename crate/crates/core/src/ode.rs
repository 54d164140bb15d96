//! Adaptive Dormand–Prince 5(4) integrator with dense output times.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    pub initial_step: Option<T>,
}

impl<T: Real> OdeOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 5_000_000, initial_step: None }
    }
}

// Butcher tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `times[0]` and returns `y` at each entry of `times`
/// (monotone, either direction). Steps are clamped to land on every output time.
pub fn integrate<T, F>(mut f: F, y0: DVector<T>, times: &[T], opts: &OdeOptions<T>) -> Result<Vec<DVector<T>>>
where
    T: Real,
    F: FnMut(T, &DVector<T>) -> Result<DVector<T>>,
{
    if times.is_empty() {
        return Ok(Vec::new());
    }
    let dir = if times.len() > 1 && times[times.len() - 1] < times[0] { -T::one() } else { T::one() };
    if times.windows(2).any(|w| (w[1] - w[0]) * dir < T::zero()) {
        return Err(Error::StepFailure("output times must be monotone".into()));
    }
    let span = (times[times.len() - 1] - times[0]).abs();
    let mut h = opts.initial_step.unwrap_or_else(|| (span * lit::<T>(1e-3)).max(lit(1e-6)).min(lit(0.1)));
    let mut t = times[0];
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut out = Vec::with_capacity(times.len());
    out.push(y.clone());
    let mut steps = 0usize;
    let safety = lit::<T>(0.9);
    let h_min = lit::<T>(1e-14) * span.max(T::one());
    for &target in &times[1..] {
        while (target - t) * dir > T::zero() {
            if steps >= opts.max_steps {
                return Err(Error::StepFailure(format!("max steps reached at t = {}", to_f64(t))));
            }
            let remaining = (target - t).abs();
            let mut last = false;
            let mut hs = h;
            if hs >= remaining {
                hs = remaining;
                last = true;
            }
            let step = hs * dir;
            let mut ks: Vec<DVector<T>> = Vec::with_capacity(7);
            ks.push(k1.clone());
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in ks.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        ys.axpy(step * lit::<T>(a), kj, T::one());
                    }
                }
                ks.push(f(t + step * lit::<T>(C[s]), &ys)?);
            }
            let mut y5 = y.clone();
            let mut err = DVector::<T>::zeros(y.len());
            for s in 0..7 {
                if B5[s] != 0.0 {
                    y5.axpy(step * lit::<T>(B5[s]), &ks[s], T::one());
                }
                let e = B5[s] - B4[s];
                if e != 0.0 {
                    err.axpy(step * lit::<T>(e), &ks[s], T::one());
                }
            }
            let mut en = T::zero();
            for i in 0..y.len() {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                let r = err[i] / sc;
                en += r * r;
            }
            let en = (en / lit::<T>(y.len().max(1) as f64)).sqrt();
            if !en.is_finite() {
                return Err(Error::StepFailure(format!("non-finite error estimate at t = {}", to_f64(t))));
            }
            steps += 1;
            if en <= T::one() {
                t = if last { target } else { t + step };
                y = y5;
                k1 = ks.pop().expect("seven stages");
                let fac = if en == T::zero() { lit(5.0) } else { (safety * en.powf(lit(-0.2))).min(lit(5.0)) };
                // Keep the pre-clamp step size when we were only shortened to hit `target`.
                h = if last { h.max(hs * fac) } else { hs * fac };
            } else {
                h = hs * (safety * en.powf(lit(-0.25))).max(lit(0.1));
                if h < h_min {
                    return Err(Error::StepFailure(format!("step size underflow at t = {}", to_f64(t))));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
