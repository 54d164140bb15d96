//! Grid oracle: Husimi distributions of sampled one-mode states and their entropies by quadrature.
//!
//! `Q(q, p) = ⟨qp|ρ|qp⟩` with the coherent family of [`Conventions`]; densities are taken
//! with respect to `dq dp/(2πħ)`, so a normalised `Q` sums to one with weights `dq dp/(2πħ)`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::conventions::Conventions;
use crate::error::{Error, Result};
use crate::state::{covariance_from_1d_params, Gaussian1DParams, GaussianPureState};

const NORM_TOL: f64 = 1e-6;
const EDGE_TOL: f64 = 1e-8;
const MASS_TOL: f64 = 1e-4;
const EDGE_MASS_TOL: f64 = 1e-6;
/// Coherent windows are cut where they fall below `e^{-WINDOW_EXP}`.
const WINDOW_EXP: f64 = 40.0;

/// Uniformly sampled wavefunction `ψ(x_min + j dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub x_min: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

impl WavefunctionGrid {
    pub fn new(x_min: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0) || values.len() < 8 {
            return Err(Error::GridTooSmall("need dx > 0 and at least 8 samples".into()));
        }
        let g = Self { x_min, dx, values };
        let norm = g.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let peak = g.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = g.values[0].norm().max(g.values[g.values.len() - 1].norm());
        if edge > EDGE_TOL * peak.max(1.0) {
            return Err(Error::GridTooSmall(format!("wavefunction edge amplitude {edge:e}")));
        }
        Ok(g)
    }

    /// Samples `f` on `n` points and normalises the result.
    pub fn from_fn(x_min: f64, dx: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut values: Vec<Complex64> = (0..n).map(|j| f(x_min + j as f64 * dx)).collect();
        let norm: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        if !(norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        let s = norm.sqrt();
        values.iter_mut().for_each(|v| *v /= s);
        Self::new(x_min, dx, values)
    }

    /// Samples a one-mode pure Gaussian on an automatically sized grid.
    pub fn from_state(st: &GaussianPureState<f64>) -> Result<Self> {
        if st.modes() != 1 {
            return Err(Error::UnsupportedDimension(st.modes()));
        }
        let hbar = st.conventions().hbar;
        let cov = st.covariance();
        let (sx, sp) = (cov.sigma[(0, 0)].sqrt(), cov.sigma[(1, 1)].sqrt());
        let (x0, p0) = (st.qbar()[0], st.pbar()[0]);
        let half_width = 10.0 * sx;
        let p_reach = p0.abs() + 10.0 * sp;
        let dx = (sx / 8.0).min(std::f64::consts::PI * hbar / p_reach);
        let n = (2.0 * half_width / dx).ceil() as usize + 1;
        Self::from_fn(x0 - half_width, dx, n, |x| st.wavefunction_1d(x))
    }

    /// Even superposition of coherent states centred at `±q0` (zero mean momentum).
    pub fn even_cat(q0: f64, conv: &Conventions<f64>) -> Result<Self> {
        let sx = conv.coherent_position_variance().sqrt();
        let half_width = q0.abs() + 10.0 * sx;
        let dx = sx / 16.0;
        let n = (2.0 * half_width / dx).ceil() as usize + 1;
        let lobe = |x: f64, c: f64| (-(x - c) * (x - c) / (4.0 * sx * sx)).exp();
        Self::from_fn(-half_width, dx, n, |x| Complex64::new(lobe(x, q0) + lobe(x, -q0), 0.0))
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    /// `(⟨x⟩, ⟨p⟩, Var x, Var p, Cov(x, p))`, momenta by central differences.
    pub fn moments(&self, hbar: f64) -> [f64; 5] {
        let n = self.values.len();
        let dx = self.dx;
        let mut mx = 0.0;
        let mut mx2 = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr() * dx;
            mx += w * self.x(j);
            mx2 += w * self.x(j) * self.x(j);
        }
        let deriv = |j: usize| -> Complex64 {
            let a = if j == 0 { Complex64::new(0.0, 0.0) } else { self.values[j - 1] };
            let b = if j + 1 == n { Complex64::new(0.0, 0.0) } else { self.values[j + 1] };
            (b - a) / (2.0 * dx)
        };
        // ⟨p⟩ = ħ Im ∫ ψ̄ ψ', ⟨p²⟩ = ħ² ∫ |ψ'|², ⟨{x,p}⟩/2 = ħ Im ∫ ψ̄ x ψ'
        let (mut mp, mut mp2, mut mxp) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let d = deriv(j);
            let c = self.values[j].conj() * d;
            mp += hbar * c.im * dx;
            mp2 += hbar * hbar * d.norm_sqr() * dx;
            mxp += hbar * self.x(j) * c.im * dx;
        }
        [mx, mp, mx2 - mx * mx, mp2 - mp * mp, mxp - mx * mp]
    }
}

/// Rectangular phase-space grid `q_min + i dq`, `p_min + j dp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub dq: f64,
    pub nq: usize,
    pub p_min: f64,
    pub dp: f64,
    pub np: usize,
}

impl GridSpec {
    /// Mean ± 6 marginal standard deviations; steps 1/8 of the conditional standard deviation.
    pub fn auto(mean: [f64; 2], husimi_cov: [[f64; 2]; 2]) -> Self {
        Self::with_resolution(mean, husimi_cov, 6.0, 8.0)
    }

    pub fn with_resolution(mean: [f64; 2], c: [[f64; 2]; 2], extent_sd: f64, per_sd: f64) -> Self {
        let det = c[0][0] * c[1][1] - c[0][1] * c[0][1];
        let (sq, sp) = (c[0][0].sqrt(), c[1][1].sqrt());
        let (cq, cp) = ((det / c[1][1]).sqrt(), (det / c[0][0]).sqrt());
        let (dq, dp) = (cq / per_sd, cp / per_sd);
        let nq = (2.0 * extent_sd * sq / dq).ceil() as usize + 1;
        let np = (2.0 * extent_sd * sp / dp).ceil() as usize + 1;
        Self { q_min: mean[0] - extent_sd * sq, dq, nq, p_min: mean[1] - extent_sd * sp, dp, np }
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp
    }
}

/// Sampled Husimi density, row-major in `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid {
    pub spec: GridSpec,
    pub hbar: f64,
    pub values: Vec<f64>,
    /// Total negative round-off mass removed before taking logarithms.
    pub clipped_mass: f64,
}

impl HusimiGrid {
    /// Wraps raw samples; negative round-off is clipped and its mass recorded.
    pub fn from_values(spec: GridSpec, hbar: f64, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.nq * spec.np {
            return Err(Error::DimensionMismatch { expected: spec.nq * spec.np, got: values.len() });
        }
        let w = spec.dq * spec.dp / (2.0 * std::f64::consts::PI * hbar);
        let mut clipped = 0.0;
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -1e-12 {
                    return Err(Error::NegativeMass(*v));
                }
                clipped += -*v * w;
                *v = 0.0;
            }
        }
        Ok(Self { spec, hbar, values, clipped_mass: clipped })
    }

    pub fn weight(&self) -> f64 {
        self.spec.dq * self.spec.dp / (2.0 * std::f64::consts::PI * self.hbar)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.np + j]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.weight()
    }

    /// Mass on the outermost ring of cells.
    pub fn edge_mass(&self) -> f64 {
        let (nq, np) = (self.spec.nq, self.spec.np);
        let mut s = 0.0;
        for i in 0..nq {
            for j in 0..np {
                if i == 0 || j == 0 || i + 1 == nq || j + 1 == np {
                    s += self.value(i, j);
                }
            }
        }
        s * self.weight()
    }

    fn check_coverage(self) -> Result<Self> {
        let edge = self.edge_mass();
        if edge > EDGE_MASS_TOL {
            return Err(Error::GridTooSmall(format!("edge mass {edge:e}")));
        }
        let mass = self.mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::GridTooSmall(format!("total mass {mass}")));
        }
        if self.clipped_mass > 1e-10 {
            return Err(Error::NegativeMass(-self.clipped_mass));
        }
        Ok(self)
    }

    /// Peak location `(q, p)`.
    pub fn argmax(&self) -> (f64, f64) {
        let (k, _) = self.values.iter().enumerate().fold((0, f64::MIN), |acc, (k, v)| if *v > acc.1 { (k, *v) } else { acc });
        (self.spec.q(k / self.spec.np), self.spec.p(k % self.spec.np))
    }

    /// CSV with header `q,p,Q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,p,Q\n");
        for i in 0..self.spec.nq {
            for j in 0..self.spec.np {
                out.push_str(&format!("{:.10e},{:.10e},{:.10e}\n", self.spec.q(i), self.spec.p(j), self.value(i, j)));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("grid serializes")
    }
}

fn window_half_width(conv: &Conventions<f64>) -> f64 {
    (8.0 * conv.hbar * conv.sigma2 * WINDOW_EXP).sqrt()
}

fn index_range(q: f64, half: f64, x_min: f64, dx: f64, n: usize) -> (usize, usize) {
    let lo = ((q - half - x_min) / dx).floor().max(0.0) as usize;
    let hi = (((q + half - x_min) / dx).ceil() as isize).clamp(0, n as isize - 1) as usize;
    (lo.min(n), hi)
}

/// Husimi function of a sampled pure state by direct windowed overlaps.
pub fn q_function(psi: &WavefunctionGrid, conv: &Conventions<f64>, spec: &GridSpec) -> Result<HusimiGrid> {
    q_function_uncovered(psi, conv, spec)?.check_coverage()
}

/// As [`q_function`] without the coverage checks, for deliberately coarse or truncated grids.
pub fn q_function_uncovered(psi: &WavefunctionGrid, conv: &Conventions<f64>, spec: &GridSpec) -> Result<HusimiGrid> {
    conv.validate()?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let hbar = conv.hbar;
    let s2x = conv.coherent_position_variance();
    let amp = (2.0 * std::f64::consts::PI * s2x).powf(-0.25);
    let half = window_half_width(conv);
    let n = psi.values.len();
    let rows: Vec<Vec<f64>> = (0..spec.nq)
        .into_par_iter()
        .map(|i| {
            let q = spec.q(i);
            let (lo, hi) = index_range(q, half, psi.x_min, psi.dx, n);
            let windowed: Vec<(f64, Complex64)> = (lo..=hi.max(lo))
                .filter(|&k| k < n)
                .map(|k| {
                    let x = psi.x(k);
                    let w = amp * (-(x - q) * (x - q) / (4.0 * s2x)).exp();
                    (x, psi.values[k] * w * psi.dx)
                })
                .collect();
            (0..spec.np)
                .map(|j| {
                    let p = spec.p(j);
                    let s: Complex64 = windowed.iter().map(|(x, v)| v * Complex64::from_polar(1.0, -p * x / hbar)).sum();
                    s.norm_sqr()
                })
                .collect()
        })
        .collect();
    HusimiGrid::from_values(*spec, hbar, rows.concat())
}

/// Automatic grid for a sampled pure state, sized from its moments.
pub fn auto_grid(psi: &WavefunctionGrid, conv: &Conventions<f64>) -> GridSpec {
    let [mx, mp, vx, vp, cxp] = psi.moments(conv.hbar);
    let c = [[vx + conv.coherent_position_variance(), cxp], [cxp, vp + conv.coherent_momentum_variance()]];
    GridSpec::auto([mx, mp], c)
}

/// Husimi function of the mixed one-mode Gaussian described by `params`, from its density matrix on an x-grid.
pub fn q_function_mixed_1d(params: &Gaussian1DParams<f64>, conv: &Conventions<f64>, spec: Option<GridSpec>) -> Result<HusimiGrid> {
    params.validate()?;
    conv.validate()?;
    let hbar = conv.hbar;
    let cov = covariance_from_1d_params(params, conv)?;
    let (sx, sp) = (cov.sigma[(0, 0)].sqrt(), cov.sigma[(1, 1)].sqrt());
    let husimi = [
        [cov.sigma[(0, 0)] + conv.coherent_position_variance(), cov.sigma[(0, 1)]],
        [cov.sigma[(0, 1)], cov.sigma[(1, 1)] + conv.coherent_momentum_variance()],
    ];
    let spec = spec.unwrap_or_else(|| GridSpec::auto([0.0, 0.0], husimi));
    let half = window_half_width(conv);
    let s2x = conv.coherent_position_variance();
    let window_sd = s2x.sqrt();
    let dx = (window_sd / 8.0).min(sx / 8.0).min(std::f64::consts::PI * hbar / (12.0 * sp.max(conv.coherent_momentum_variance().sqrt())));
    let amp = (2.0 * std::f64::consts::PI * s2x).powf(-0.25);
    let rows: Vec<Vec<f64>> = (0..spec.nq)
        .into_par_iter()
        .map(|i| {
            let q = spec.q(i);
            // Window-local x samples aligned to a global lattice, so rows are translation covariant.
            let k0 = ((q - half) / dx).floor() as i64;
            let k1 = ((q + half) / dx).ceil() as i64;
            let xs: Vec<f64> = (k0..=k1).map(|k| k as f64 * dx).collect();
            let w: Vec<f64> = xs.iter().map(|x| amp * (-(x - q) * (x - q) / (4.0 * s2x)).exp() * dx).collect();
            let m = xs.len();
            // B(d) = Σ_x W(x) ρ(x, x - d) W(x - d)
            let mut b = vec![Complex64::new(0.0, 0.0); 2 * m - 1];
            for a in 0..m {
                for c in 0..m {
                    let r = params.density(xs[a], xs[c], hbar);
                    b[a + m - 1 - c] += r * w[a] * w[c];
                }
            }
            (0..spec.np)
                .map(|j| {
                    let p = spec.p(j);
                    b.iter()
                        .enumerate()
                        .map(|(idx, v)| {
                            let d = (idx as f64 - (m as f64 - 1.0)) * dx;
                            (v * Complex64::from_polar(1.0, -p * d / hbar)).re
                        })
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();
    HusimiGrid::from_values(spec, hbar, rows.concat())?.check_coverage()
}

/// `-Σ Q ln Q · dq dp/(2πħ)`.
pub fn entropy_quadrature(h: &HusimiGrid) -> Result<f64> {
    if let Some(v) = h.values.iter().find(|v| **v < 0.0) {
        return Err(Error::NegativeMass(*v));
    }
    let s: f64 = h.values.iter().filter(|v| **v > 1e-300).map(|v| -v * v.ln()).sum();
    Ok(s * h.weight())
}

/// Position and momentum Shannon entropies of `|ψ(x)|²` and `|φ(p)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalInformation {
    pub i_x: f64,
    pub i_p: f64,
}

impl MarginalInformation {
    pub fn total(&self) -> f64 {
        self.i_x + self.i_p
    }
}

/// Entropic uncertainty lower bound `1 + ln(πħ)`.
pub fn entropic_bound(hbar: f64) -> f64 {
    1.0 + (std::f64::consts::PI * hbar).ln()
}

pub fn marginal_information(psi: &WavefunctionGrid, conv: &Conventions<f64>) -> Result<MarginalInformation> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let hbar = conv.hbar;
    let dx = psi.dx;
    let i_x: f64 = psi.values.iter().map(|v| v.norm_sqr()).filter(|r| *r > 1e-300).map(|r| -r * r.ln() * dx).sum();
    let n = psi.values.len();
    let nfft = (4 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    buf[..n].copy_from_slice(&psi.values);
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let dp = 2.0 * std::f64::consts::PI * hbar / (nfft as f64 * dx);
    let scale = dx / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let dens: Vec<f64> = buf.iter().map(|v| (v * scale).norm_sqr()).collect();
    let mass: f64 = dens.iter().sum::<f64>() * dp;
    // Mass near the Nyquist momentum signals an under-resolved wavefunction.
    let band = (nfft / 64).max(1);
    let edge: f64 = dens[nfft / 2 - band..nfft / 2 + band].iter().sum::<f64>() * dp;
    if edge > 1e-6 * mass {
        return Err(Error::Aliasing(edge));
    }
    let i_p: f64 = dens.iter().filter(|r| **r > 1e-300).map(|r| -r * r.ln() * dp).sum();
    Ok(MarginalInformation { i_x, i_p })
}
