//! Coherent-state quasiprojectors `P_C = ∫_C dq dp/(2πħ) |qp⟩⟨qp|` over rectangular one-mode cells.
//!
//! In the position representation the box integral is done in closed form:
//! `P(x, y) = [erf((q₀+Δq-m)/√2s) - erf((q₀-Δq-m)/√2s)]/(2π) · e^{-d²/8s} e^{ip₀d/ħ} sin(Δp d/ħ)/d`
//! with `m = (x+y)/2`, `d = x-y`, `s` the coherent position variance.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::conventions::Conventions;
use crate::dynamics::TrajectoryBundle;
use crate::error::{Error, Result};
use crate::husimi::{auto_grid, entropy_quadrature, q_function, WavefunctionGrid};
use crate::linalg::herm_eigenvalues;
use crate::state::{Gaussian1DParams, GaussianPureState};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Kernel rows are cut where the envelope `e^{-d²/8s}` falls below `e^{-KERNEL_EXP}`.
const KERNEL_EXP: f64 = 40.0;
/// Grids built by [`state_grid`] refuse to exceed this many samples.
pub const MAX_GRID_POINTS: usize = 400_000;

/// Tunable constants of the classicality verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiprojectorOptions {
    /// `ε = epsilon_scale · (2πħ/[C])^{n/2}`.
    pub epsilon_scale: f64,
    /// Slack `κ` in `I ≤ ln([C]/2πħ) + κε`.
    pub kappa: f64,
    /// Threshold for the volume condition `[C_t]/[C_I] ≪ 1`.
    pub volume_ratio_max: f64,
}

impl Default for QuasiprojectorOptions {
    fn default() -> Self {
        Self { epsilon_scale: 1.0, kappa: 1.0, volume_ratio_max: 0.1 }
    }
}

/// Axis-aligned box `[q₀ ± Δq] × [p₀ ± Δp]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceCell {
    pub center: [f64; 2],
    pub half_widths: [f64; 2],
}

impl PhaseSpaceCell {
    pub fn new(center: [f64; 2], half_widths: [f64; 2]) -> Result<Self> {
        if !(half_widths[0] > 0.0 && half_widths[1] > 0.0) || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParams(format!("cell half-widths must be positive, got {half_widths:?}")));
        }
        Ok(Self { center, half_widths })
    }

    /// Square cell in coherent-scale units: `Δq = λ s_x`, `Δp = λ s_p`, with `[C] = volume`.
    pub fn metric_square(center: [f64; 2], volume: f64, conv: &Conventions<f64>) -> Result<Self> {
        let lambda = (volume / (4.0 * conv.hbar)).sqrt();
        Self::new(center, [lambda * conv.position_scale(), lambda * conv.momentum_scale()])
    }

    pub fn volume(&self) -> f64 {
        4.0 * self.half_widths[0] * self.half_widths[1]
    }

    pub fn is_regular(&self, hbar: f64) -> bool {
        self.volume() > TWO_PI * hbar
    }

    pub fn contains_cell(&self, other: &Self) -> bool {
        (0..2).all(|k| {
            other.center[k] - other.half_widths[k] >= self.center[k] - self.half_widths[k] - 1e-12
                && other.center[k] + other.half_widths[k] <= self.center[k] + self.half_widths[k] + 1e-12
        })
    }

    /// Smallest box containing both cells.
    pub fn union(&self, other: &Self) -> Self {
        let mut center = [0.0; 2];
        let mut half = [0.0; 2];
        for k in 0..2 {
            let lo = (self.center[k] - self.half_widths[k]).min(other.center[k] - other.half_widths[k]);
            let hi = (self.center[k] + self.half_widths[k]).max(other.center[k] + other.half_widths[k]);
            center[k] = 0.5 * (lo + hi);
            half[k] = 0.5 * (hi - lo);
        }
        Self { center, half_widths: half }
    }

    /// Image under `z ↦ center' + J (z - center)`, bounded by its enclosing box.
    pub fn transported(&self, jacobian: &Matrix2<f64>, center: [f64; 2]) -> Self {
        let [dq, dp] = self.half_widths;
        let hq = jacobian[(0, 0)].abs() * dq + jacobian[(0, 1)].abs() * dp;
        let hp = jacobian[(1, 0)].abs() * dq + jacobian[(1, 1)].abs() * dp;
        Self { center, half_widths: [hq, hp] }
    }
}

/// `scale · (2πħ/V)^{n/2}`; errors for irregular volumes `V ≤ (2πħ)^n`.
pub fn epsilon_for_volume(volume: f64, n: usize, hbar: f64, scale: f64) -> Result<f64> {
    let minimum = (TWO_PI * hbar).powi(n as i32);
    if !(volume > minimum) {
        return Err(Error::IrregularCell { volume, minimum });
    }
    Ok(scale * (minimum / volume).powf(0.5))
}

/// `V/(2πħ)^n`.
pub fn trace_for_volume(volume: f64, n: usize, hbar: f64) -> f64 {
    volume / (TWO_PI * hbar).powi(n as i32)
}

pub fn classicality_epsilon(cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<f64> {
    classicality_epsilon_with(cell, conv, &QuasiprojectorOptions::default())
}

pub fn classicality_epsilon_with(cell: &PhaseSpaceCell, conv: &Conventions<f64>, opts: &QuasiprojectorOptions) -> Result<f64> {
    epsilon_for_volume(cell.volume(), 1, conv.hbar, opts.epsilon_scale)
}

pub fn quasiprojector_trace(cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> f64 {
    trace_for_volume(cell.volume(), 1, conv.hbar)
}

/// `erf(b) - erf(a)` for `a ≤ b` without cancellation in the tails.
fn erf_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        erfc(a) - erfc(b)
    } else if b <= 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        2.0 - erfc(-a) - erfc(b)
    }
}

/// Position-space kernel `⟨x|P_C|y⟩`.
pub fn kernel(cell: &PhaseSpaceCell, conv: &Conventions<f64>, x: f64, y: f64) -> Complex64 {
    let s = conv.coherent_position_variance();
    let hbar = conv.hbar;
    let [q0, p0] = cell.center;
    let [dq, dp] = cell.half_widths;
    let m = 0.5 * (x + y);
    let d = x - y;
    let r = (2.0 * s).sqrt();
    let band = erf_diff((q0 - dq - m) / r, (q0 + dq - m) / r) / TWO_PI;
    let sinc = if d.abs() < 1e-300 { dp / hbar } else { (dp * d / hbar).sin() / d };
    Complex64::from_polar(band * (-d * d / (8.0 * s)).exp() * sinc, p0 * d / hbar)
}

fn kernel_half_width(conv: &Conventions<f64>) -> f64 {
    (8.0 * conv.coherent_position_variance() * KERNEL_EXP).sqrt()
}

fn check_resolution(psi: &WavefunctionGrid, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<()> {
    let s = conv.coherent_position_variance();
    if psi.dx > 0.25 * s.sqrt() {
        return Err(Error::GridTooSmall(format!("dx = {} does not resolve the coherent width", psi.dx)));
    }
    let reach = cell.center[1].abs() + cell.half_widths[1];
    if reach * psi.dx > std::f64::consts::PI * conv.hbar {
        return Err(Error::GridTooSmall(format!("dx = {} aliases the cell momentum band", psi.dx)));
    }
    Ok(())
}

fn apply_raw(values: &[Complex64], x_min: f64, dx: f64, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Vec<Complex64> {
    let n = values.len();
    let w = (kernel_half_width(conv) / dx).ceil() as usize;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = x_min + i as f64 * dx;
            let lo = i.saturating_sub(w);
            let hi = (i + w).min(n - 1);
            (lo..=hi).map(|j| kernel(cell, conv, x, x_min + j as f64 * dx) * values[j]).sum::<Complex64>() * dx
        })
        .collect()
}

fn l2_norm(v: &[Complex64], dx: f64) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
}

fn l2_distance(a: &[Complex64], b: &[Complex64], dx: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * dx).sqrt()
}

/// `P_C ψ` on the input grid (not renormalised).
pub fn apply_quasiprojector(psi: &WavefunctionGrid, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<WavefunctionGrid> {
    conv.validate()?;
    check_resolution(psi, cell, conv)?;
    let values = apply_raw(&psi.values, psi.x_min, psi.dx, cell, conv);
    Ok(WavefunctionGrid { x_min: psi.x_min, dx: psi.dx, values })
}

/// `‖P_C ψ - ψ‖`.
pub fn localisation_defect(psi: &WavefunctionGrid, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<f64> {
    let out = apply_quasiprojector(psi, cell, conv)?;
    Ok(l2_distance(&out.values, &psi.values, psi.dx))
}

/// `‖P_C² ψ - P_C ψ‖`.
pub fn idempotency_defect(psi: &WavefunctionGrid, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<f64> {
    let once = apply_quasiprojector(psi, cell, conv)?;
    let twice = apply_raw(&once.values, psi.x_min, psi.dx, cell, conv);
    Ok(l2_distance(&twice, &once.values, psi.dx))
}

/// `‖P_C P_C' ψ‖`.
pub fn cross_defect(psi: &WavefunctionGrid, a: &PhaseSpaceCell, b: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<f64> {
    check_resolution(psi, a, conv)?;
    let once = apply_quasiprojector(psi, b, conv)?;
    let twice = apply_raw(&once.values, psi.x_min, psi.dx, a, conv);
    Ok(l2_norm(&twice, psi.dx))
}

/// `Σ_i ⟨x_i|P_C|x_i⟩ dx` on the given line grid.
pub fn numerical_trace(cell: &PhaseSpaceCell, conv: &Conventions<f64>, x_min: f64, dx: f64, n: usize) -> f64 {
    (0..n).map(|i| {
        let x = x_min + i as f64 * dx;
        kernel(cell, conv, x, x).re
    }).sum::<f64>() * dx
}

/// Grid sampling a one-mode Gaussian finely enough for quasiprojector action on `cell`.
pub fn state_grid(st: &GaussianPureState<f64>, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<WavefunctionGrid> {
    if st.modes() != 1 {
        return Err(Error::UnsupportedDimension(st.modes()));
    }
    let st = st.with_conventions(*conv);
    let cov = st.covariance();
    let (sx, sp) = (cov.sigma[(0, 0)].sqrt(), cov.sigma[(1, 1)].sqrt());
    let (x0, p0) = (st.qbar()[0], st.pbar()[0]);
    let hbar = conv.hbar;
    let s = conv.coherent_position_variance();
    let p_reach = (p0.abs() + 10.0 * sp).max(cell.center[1].abs() + cell.half_widths[1]) + 6.0 * conv.coherent_momentum_variance().sqrt();
    let dx = (sx / 8.0).min(0.25 * s.sqrt()).min(std::f64::consts::PI * hbar / p_reach);
    let half = 10.0 * sx + kernel_half_width(conv);
    let n = (2.0 * half / dx).ceil() as usize + 1;
    if n > MAX_GRID_POINTS {
        return Err(Error::GridTooSmall(format!("state needs {n} samples (limit {MAX_GRID_POINTS})")));
    }
    WavefunctionGrid::from_fn(x0 - half, dx, n, |x| st.wavefunction_1d(x))
}

/// Density matrix `ρ(x_i, x_j)` on a uniform line grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub x_min: f64,
    pub dx: f64,
    pub matrix: DMatrix<Complex64>,
}

impl DensityGrid {
    pub fn from_pure(psi: &WavefunctionGrid) -> Self {
        let v = nalgebra::DVector::from_column_slice(&psi.values);
        Self { x_min: psi.x_min, dx: psi.dx, matrix: &v * v.adjoint() }
    }

    pub fn from_params(p: &Gaussian1DParams<f64>, conv: &Conventions<f64>, x_min: f64, dx: f64, n: usize) -> Result<Self> {
        p.validate()?;
        let hbar = conv.hbar;
        let matrix = DMatrix::from_fn(n, n, |i, j| p.density(x_min + i as f64 * dx, x_min + j as f64 * dx, hbar));
        let tr: f64 = (0..n).map(|i| matrix[(i, i)].re).sum::<f64>() * dx;
        if (tr - 1.0).abs() > 1e-6 {
            return Err(Error::GridTooSmall(format!("density trace {tr} on the given grid")));
        }
        Ok(Self { x_min, dx, matrix })
    }

    fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }
}

/// `‖P_C ρ P_C - ρ‖_tr` by dense diagonalisation on the density grid.
pub fn mixed_localisation_defect(rho: &DensityGrid, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<f64> {
    let n = rho.matrix.nrows();
    let dx = rho.dx;
    let probe = WavefunctionGrid { x_min: rho.x_min, dx, values: vec![Complex64::new(0.0, 0.0); n] };
    check_resolution(&probe, cell, conv)?;
    let p = DMatrix::from_fn(n, n, |i, j| kernel(cell, conv, rho.x(i), rho.x(j)) * dx);
    let r = &rho.matrix * Complex64::new(dx, 0.0);
    let diff = &p * &r * &p - &r;
    let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(herm_eigenvalues(&herm).iter().map(|l| l.abs()).sum())
}

/// Trace-norm defect of `|ψ⟩⟨ψ|` from vector overlaps: `√((‖Pψ‖² + 1)² - 4|⟨ψ|Pψ⟩|²)`.
pub fn rank_one_trace_defect(psi: &WavefunctionGrid, cell: &PhaseSpaceCell, conv: &Conventions<f64>) -> Result<f64> {
    let a = apply_quasiprojector(psi, cell, conv)?;
    let dx = psi.dx;
    let na = a.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
    let nb = psi.norm();
    let ov: Complex64 = psi.values.iter().zip(&a.values).map(|(b, a)| b.conj() * a).sum::<Complex64>() * dx;
    Ok(((na + nb).powi(2) - 4.0 * ov.norm_sqr()).max(0.0).sqrt())
}

/// Both sides of `I[ψ] ≤ ln([C]/2πħ) + κε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyVolume {
    pub information: f64,
    pub bound: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub defect: f64,
    pub margin: f64,
}

pub fn entropy_volume_check(
    psi: &WavefunctionGrid,
    cell: &PhaseSpaceCell,
    conv: &Conventions<f64>,
    opts: &QuasiprojectorOptions,
) -> Result<EntropyVolume> {
    let epsilon = classicality_epsilon_with(cell, conv, opts)?;
    let defect = localisation_defect(psi, cell, conv)?;
    if defect > epsilon {
        return Err(Error::NotLocalised { defect, epsilon });
    }
    let h = q_function(psi, conv, &auto_grid(psi, conv))?;
    let information = entropy_quadrature(&h)?;
    let bound = trace_for_volume(cell.volume(), 1, conv.hbar).ln();
    let margin = bound + opts.kappa * epsilon - information;
    Ok(EntropyVolume { information, bound, epsilon, kappa: opts.kappa, defect, margin })
}

/// Cells transported along a classical one-mode trajectory.
pub fn cell_schedule(cell0: &PhaseSpaceCell, traj: &TrajectoryBundle<f64>) -> Result<Vec<PhaseSpaceCell>> {
    if traj.dim() != 1 {
        return Err(Error::UnsupportedDimension(traj.dim()));
    }
    Ok((0..traj.times.len())
        .map(|i| {
            let j = &traj.jacobian[i];
            let jm = Matrix2::new(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)]);
            cell0.transported(&jm, [traj.q[i][0], traj.p[i][0]])
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "CLASSICAL")]
    Classical,
    #[serde(rename = "NON-CLASSICAL")]
    NonClassical,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Classical => "CLASSICAL",
            Verdict::NonClassical => "NON-CLASSICAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingRow {
    pub t: f64,
    /// `‖P_{C_t}ψ_t - ψ_t‖`; `None` once the capacity test has already failed.
    pub defect: Option<f64>,
    pub epsilon: f64,
    pub volume_ratio: f64,
    pub excess: f64,
    pub capacity: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingReport {
    pub rows: Vec<TrackingRow>,
    pub union_volume: f64,
    pub max_volume_ratio: f64,
    pub flip_time: Option<f64>,
    pub verdict: Verdict,
}

/// Two-condition tracking verdict.
///
/// At each time the state must be ε-localised in the transported (enclosing-box) cell, and its
/// excess `ΔI` must fit the Liouville volume `[C_0]`: `ΔI ≤ ln([C_0]/2πħ) + κε₀`. Overall the
/// largest `[C_t]/[C_I]` must stay below `volume_ratio_max`, with `C_I` the box enclosing all cells.
pub fn classical_tracking_report(
    times: &[f64],
    states: &[GaussianPureState<f64>],
    cells: &[PhaseSpaceCell],
    conv: &Conventions<f64>,
    opts: &QuasiprojectorOptions,
) -> Result<TrackingReport> {
    if states.len() != times.len() || cells.len() != times.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: states.len().min(cells.len()) });
    }
    if times.is_empty() {
        return Err(Error::TooShort("empty tracking series".into()));
    }
    let hbar = conv.hbar;
    let union = cells[1..].iter().fold(cells[0], |acc, c| acc.union(c));
    let union_volume = union.volume();
    let eps0 = classicality_epsilon_with(&cells[0], conv, opts)?;
    let capacity = trace_for_volume(cells[0].volume(), 1, hbar).ln() + opts.kappa * eps0;
    let rows = times
        .par_iter()
        .zip(states.par_iter())
        .zip(cells.par_iter())
        .map(|((&t, st), cell)| -> Result<TrackingRow> {
            let st = st.with_conventions(*conv);
            let epsilon = classicality_epsilon_with(cell, conv, opts)?;
            let excess = st.entropy_excess();
            let fits = excess <= capacity;
            let defect = if fits { Some(localisation_defect(&state_grid(&st, cell, conv)?, cell, conv)?) } else { None };
            let localised = defect.is_some_and(|d| d <= epsilon);
            let verdict = if fits && localised { Verdict::Classical } else { Verdict::NonClassical };
            Ok(TrackingRow { t, defect, epsilon, volume_ratio: cell.volume() / union_volume, excess, capacity, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_volume_ratio = rows.iter().map(|r| r.volume_ratio).fold(0.0, f64::max);
    let flip_time = rows.iter().find(|r| r.verdict == Verdict::NonClassical).map(|r| r.t);
    let verdict = if flip_time.is_none() && max_volume_ratio <= opts.volume_ratio_max { Verdict::Classical } else { Verdict::NonClassical };
    Ok(TrackingReport { rows, union_volume, max_volume_ratio, flip_time, verdict })
}
