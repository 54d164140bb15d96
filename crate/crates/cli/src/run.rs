//! Scenario parsing (all parameters validated up front) and execution.

use std::path::PathBuf;

use nalgebra::DVector;
use phaseclass::bogoliubov::{apply, one_mode_squeeze, two_mode_squeeze};
use phaseclass::dynamics::{breakdown_time, evolve, k_scalar, lyapunov_entropy_rate, time_grid, PotentialModel};
use phaseclass::entropy::{sw_entropy_1d_params, sw_entropy_from_bogoliubov, sw_entropy_gaussian, sw_entropy_pure};
use phaseclass::husimi::{
    auto_grid, entropic_bound, entropy_quadrature, marginal_information, q_function, q_function_mixed_1d, HusimiGrid,
    WavefunctionGrid,
};
use phaseclass::linalg::singular_values;
use phaseclass::modes::{de_sitter_schedule, spectrum_totals, Mode, ModeSpectrum};
use phaseclass::open_system::{cl_moments_evolve, entropy_gap_series, log_time_slope, thermalization_time, BathSpec};
use phaseclass::quasiprojector::{cell_schedule, classical_tracking_report, PhaseSpaceCell, QuasiprojectorOptions};
use phaseclass::{Conventions, CovarianceState, Gaussian1DParams, GaussianPureState};

use crate::error::CliError;
use crate::output::{num, Artifacts, Csv, Summary};
use crate::params::Params;

pub const KINDS: &[&str] = &["squeeze", "evolve", "open-system", "classicality", "modes", "husimi"];

#[derive(Debug, Clone, Copy)]
pub struct Common {
    pub conv: Conventions<f64>,
    pub mass: f64,
}

fn common(p: &Params) -> Common {
    let hbar = p.f64("hbar", 1.0);
    p.positive("hbar", hbar);
    let sigma2 = p.f64("sigma2", 0.25);
    p.positive("sigma2", sigma2);
    let mass = p.f64("mass", 1.0);
    p.positive("mass", mass);
    Common { conv: Conventions::new(hbar, sigma2).unwrap_or_default(), mass }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    Harmonic { omega: f64 },
    Inverted { k: f64 },
    Quartic { a2: f64, a4: f64 },
}

impl Potential {
    fn read(p: &Params, default: &str, allowed: &[&str]) -> Self {
        let name = p.string("potential", default);
        p.one_of("potential", &name, allowed);
        match name.as_str() {
            "harmonic" => {
                let omega = p.f64("omega", 1.0);
                p.positive("omega", omega);
                Potential::Harmonic { omega }
            }
            "inverted" => {
                let k = p.f64("k", 1.0);
                p.positive("k", k);
                Potential::Inverted { k }
            }
            "quartic" => Potential::Quartic { a2: p.f64("a2", 1.0), a4: p.f64("a4", 0.1) },
            _ => Potential::Free,
        }
    }

    fn model(&self, mass: f64) -> Result<PotentialModel<f64>, CliError> {
        Ok(match *self {
            Potential::Free => PotentialModel::free(1, mass)?,
            Potential::Harmonic { omega } => PotentialModel::harmonic(mass, omega)?,
            Potential::Inverted { k } => PotentialModel::inverted(mass, k)?,
            Potential::Quartic { a2, a4 } => PotentialModel::quartic(mass, a2, a4)?,
        })
    }
}

fn time_axis(p: &Params, t_default: f64, steps_default: usize) -> (f64, usize) {
    let t_max = p.f64("t_max", t_default);
    p.positive("t_max", t_max);
    let steps = p.usize("steps", steps_default);
    if steps == 0 {
        p.violate("steps must be >= 1");
    }
    (t_max, steps.max(1))
}

#[derive(Debug, Clone)]
pub struct SqueezeCfg {
    c: Common,
    modes: usize,
    r: f64,
    phi: f64,
    r_max: Option<f64>,
    steps: usize,
}

#[derive(Debug, Clone)]
pub struct EvolveCfg {
    c: Common,
    potential: Potential,
    q0: f64,
    p0: f64,
    t_max: f64,
    steps: usize,
}

#[derive(Debug, Clone)]
pub struct OpenCfg {
    c: Common,
    potential: Potential,
    gamma: f64,
    kt: f64,
    q0: f64,
    p0: f64,
    t_max: f64,
    steps: usize,
    thermal_tol: f64,
}

#[derive(Debug, Clone)]
pub struct ClassicalityCfg {
    c: Common,
    potential: Potential,
    q0: f64,
    p0: f64,
    volume: f64,
    t_max: f64,
    steps: usize,
    opts: QuasiprojectorOptions,
}

#[derive(Debug, Clone)]
pub enum ModesSource {
    Input(PathBuf),
    DeSitter { hubble: f64, ks: Vec<f64>, t_max: f64, steps: usize },
}

#[derive(Debug, Clone)]
pub struct ModesCfg {
    c: Common,
    source: ModesSource,
}

#[derive(Debug, Clone, Copy)]
pub enum HusimiState {
    Coherent,
    Squeezed { r: f64, phi: f64 },
    Cat,
    Mixed(Gaussian1DParams<f64>),
}

#[derive(Debug, Clone)]
pub struct HusimiCfg {
    c: Common,
    state: HusimiState,
    q0: f64,
    p0: f64,
}

#[derive(Debug, Clone)]
pub enum Scenario {
    Squeeze(SqueezeCfg),
    Evolve(EvolveCfg),
    OpenSystem(OpenCfg),
    Classicality(ClassicalityCfg),
    Modes(ModesCfg),
    Husimi(HusimiCfg),
}

/// Reads every parameter of `kind`; problems are collected in `p`.
pub fn build(kind: &str, p: &Params) -> Option<Scenario> {
    let c = common(p);
    let sc = match kind {
        "squeeze" => {
            let modes = p.usize("modes", 1);
            if modes != 1 && modes != 2 {
                p.violate(format!("modes must be 1 or 2, got {modes}"));
            }
            let r = p.f64("r", 1.0);
            p.non_negative("r", r);
            let r_max = p.opt_f64("r_max");
            if let Some(rm) = r_max {
                p.non_negative("r_max", rm);
            }
            let steps = p.usize("steps", 20).max(1);
            Scenario::Squeeze(SqueezeCfg { c, modes, r, phi: p.f64("phi", 0.0), r_max, steps })
        }
        "evolve" => {
            let potential = Potential::read(p, "free", &["free", "harmonic", "inverted", "quartic"]);
            let (q0, p0) = (p.f64("q0", 0.0), p.f64("p0", 0.0));
            let (t_max, steps) = time_axis(p, 10.0, 100);
            Scenario::Evolve(EvolveCfg { c, potential, q0, p0, t_max, steps })
        }
        "open-system" => {
            let potential = Potential::read(p, "harmonic", &["free", "harmonic"]);
            let gamma = p.f64("gamma", 0.1);
            p.non_negative("gamma", gamma);
            let kt = p.f64("kt", 100.0);
            p.positive("kt", kt);
            let (q0, p0) = (p.f64("q0", 0.0), p.f64("p0", 0.0));
            let (t_max, steps) = time_axis(p, 500.0, 500);
            let thermal_tol = p.f64("thermal_tol", 1e-2);
            p.positive("thermal_tol", thermal_tol);
            Scenario::OpenSystem(OpenCfg { c, potential, gamma, kt, q0, p0, t_max, steps, thermal_tol })
        }
        "classicality" => {
            let potential = Potential::read(p, "free", &["free", "harmonic", "inverted"]);
            let (q0, p0) = (p.f64("q0", 0.0), p.f64("p0", 0.0));
            let volume = p.f64("volume", 200.0 * std::f64::consts::PI * c.conv.hbar);
            if !(volume > 2.0 * std::f64::consts::PI * c.conv.hbar) {
                p.violate(format!("volume must exceed 2*pi*hbar (regular cell), got {volume}"));
            }
            let t_default = match potential {
                Potential::Free => 2.0 * 4.0 * c.conv.sigma2 * c.mass * volume / (std::f64::consts::PI * c.conv.hbar),
                _ => 10.0,
            };
            let (t_max, steps) = time_axis(p, t_default, 80);
            let d = QuasiprojectorOptions::default();
            let opts = QuasiprojectorOptions {
                epsilon_scale: p.f64("epsilon_scale", d.epsilon_scale),
                kappa: p.f64("kappa", d.kappa),
                volume_ratio_max: p.f64("volume_ratio_max", d.volume_ratio_max),
            };
            p.positive("epsilon_scale", opts.epsilon_scale);
            p.non_negative("kappa", opts.kappa);
            p.positive("volume_ratio_max", opts.volume_ratio_max);
            Scenario::Classicality(ClassicalityCfg { c, potential, q0, p0, volume, t_max, steps, opts })
        }
        "modes" => {
            let input = p.opt_string("input");
            let hubble = p.opt_f64("hubble");
            let source = match (input, hubble) {
                (Some(path), None) => ModesSource::Input(PathBuf::from(path)),
                (None, Some(h)) => {
                    p.positive("hubble", h);
                    let ks = p.f64_list("k", &[1.0]);
                    let (t_max, steps) = time_axis(p, 10.0, 40);
                    ModesSource::DeSitter { hubble: h, ks, t_max, steps }
                }
                (Some(_), Some(_)) => {
                    p.violate("give either input or hubble, not both");
                    ModesSource::Input(PathBuf::new())
                }
                (None, None) => {
                    p.violate("modes needs input (CSV path) or hubble (de Sitter schedule)");
                    ModesSource::Input(PathBuf::new())
                }
            };
            Scenario::Modes(ModesCfg { c, source })
        }
        "husimi" => {
            let name = p.string("state", "coherent");
            p.one_of("state", &name, &["coherent", "squeezed", "cat", "mixed"]);
            let unit = (c.conv.hbar * c.conv.sigma2).sqrt();
            let (q0_default, state) = match name.as_str() {
                "squeezed" => {
                    let r = p.f64("r", 1.0);
                    p.non_negative("r", r);
                    (0.0, HusimiState::Squeezed { r, phi: p.f64("phi", 0.0) })
                }
                "cat" => (4.0 * unit, HusimiState::Cat),
                "mixed" => {
                    let alpha = p.f64("alpha", 1.0 / (4.0 * c.conv.sigma2));
                    let s = p.f64("s", 0.0);
                    let r = p.f64("r", 0.0);
                    p.positive("alpha", alpha);
                    if !(0.0..1.0).contains(&s) {
                        p.violate(format!("s must satisfy 0 <= s < 1, got {s}"));
                    }
                    (0.0, HusimiState::Mixed(Gaussian1DParams { alpha, s, r }))
                }
                _ => (0.0, HusimiState::Coherent),
            };
            let q0 = p.f64("q0", q0_default);
            let p0 = if matches!(state, HusimiState::Coherent | HusimiState::Squeezed { .. }) { p.f64("p0", 0.0) } else { 0.0 };
            if matches!(state, HusimiState::Cat) && !(q0 > 0.0) {
                p.violate(format!("cat half-separation q0 must be > 0, got {q0}"));
            }
            Scenario::Husimi(HusimiCfg { c, state, q0, p0 })
        }
        other => {
            p.violate(format!("unknown scenario kind '{other}' (expected one of {})", KINDS.join("|")));
            return None;
        }
    };
    Some(sc)
}

fn dv(x: f64) -> DVector<f64> {
    DVector::from_element(1, x)
}

fn conv_block(c: &Common) -> [f64; 3] {
    [c.conv.hbar, c.conv.sigma2, c.mass]
}

pub fn execute(sc: &Scenario, params: std::collections::BTreeMap<String, String>) -> Result<Artifacts, CliError> {
    let (kind, c, (csv, summary)) = match sc {
        Scenario::Squeeze(cfg) => ("squeeze", cfg.c, squeeze(cfg)?),
        Scenario::Evolve(cfg) => ("evolve", cfg.c, evolve_run(cfg)?),
        Scenario::OpenSystem(cfg) => ("open-system", cfg.c, open_run(cfg)?),
        Scenario::Classicality(cfg) => ("classicality", cfg.c, classicality(cfg)?),
        Scenario::Modes(cfg) => ("modes", cfg.c, modes(cfg)?),
        Scenario::Husimi(cfg) => ("husimi", cfg.c, husimi(cfg)?),
    };
    Ok(Artifacts { kind, params, conv: conv_block(&c), csv, summary })
}

fn squeeze(cfg: &SqueezeCfg) -> Result<(Csv, Summary), CliError> {
    let n = cfg.modes;
    let conv = cfg.c.conv;
    let rs: Vec<f64> = match cfg.r_max {
        Some(rm) => (0..=cfg.steps).map(|i| rm * i as f64 / cfg.steps as f64).collect(),
        None => vec![cfg.r],
    };
    let mut csv = Csv::new(&["r", "I_absolute", "I_excess", "I_covariance_route", "I_closed_form"]);
    let mut last = None;
    for &r in &rs {
        let map = if n == 1 { one_mode_squeeze(r, cfg.phi)? } else { two_mode_squeeze(r, cfg.phi)? };
        let e = sw_entropy_from_bogoliubov(&map);
        let st = apply(&map, &GaussianPureState::vacuum(n, conv)?)?;
        let cov = sw_entropy_gaussian(&st.covariance(), &conv)?.absolute;
        let closed = n as f64 * (1.0 + r.cosh().ln());
        csv.push_nums(&[r, e.absolute, e.excess, cov, closed]);
        last = Some((r, map, e, cov, closed));
    }
    let (r, map, e, cov, closed) = last.expect("at least one r");
    let mut s = Summary::default();
    s.put("r", r, "squeeze parameter of the final row");
    s.put("I_absolute", e.absolute, "I = n + dI");
    s.put("I_excess", e.excess, "dI = -1/2 sum ln(1 - k_i^2), k_i singular values of K = A^-1 conj(B)");
    s.put("I_covariance_route", cov, "I = n + 1/2 ln det(Sigma + Sigma_coh)/det(2 Sigma_coh)");
    s.put(
        "I_closed_form",
        closed,
        if n == 1 { "I = 1 + ln cosh r (one-mode squeeze)" } else { "I = 2 + 2 ln cosh r (two-mode squeeze)" },
    );
    s.put("k_singular_values", singular_values(&map.k_matrix()), "singular values of K = A^-1 conj(B)");
    s.put("identity_residual", map.residuals().max(), "max of AA^+ - BB^+ - 1, A^+A - B^T conj(B) - 1, symmetry defects");
    Ok((csv, s))
}

fn closed_form_entropy(pot: &Potential, c: &Common, t: f64) -> Option<f64> {
    let (s2, m) = (c.conv.sigma2, c.mass);
    match *pot {
        Potential::Free => {
            let x = t / (4.0 * s2 * m);
            Some(1.0 + 0.5 * (x * x / 4.0).ln_1p())
        }
        Potential::Inverted { k } if (4.0 * m * k * s2 - 1.0).abs() < 1e-12 => Some(1.0 + (k * t).cosh().ln()),
        Potential::Harmonic { omega } if (4.0 * m * omega * s2 - 1.0).abs() < 1e-12 => Some(1.0),
        _ => None,
    }
}

fn evolve_run(cfg: &EvolveCfg) -> Result<(Csv, Summary), CliError> {
    let conv = cfg.c.conv;
    let model = cfg.potential.model(cfg.c.mass)?;
    let st0 = GaussianPureState::coherent(dv(cfg.q0), dv(cfg.p0), conv)?;
    let times = time_grid(0.0, cfg.t_max, cfg.steps);
    let evo = evolve(&st0, &model, &times, &conv)?;
    let mut csv = Csv::new(&["t", "q", "p", "ReK", "ImK", "I_absolute", "I_excess", "I_closed_form"]);
    let mut worst: Option<f64> = None;
    for (i, st) in evo.states.iter().enumerate() {
        let t = times[i];
        let k = k_scalar(st)?;
        let closed = closed_form_entropy(&cfg.potential, &cfg.c, t);
        if let Some(cf) = closed {
            worst = Some(worst.unwrap_or(0.0).max((cf - evo.entropy.absolute[i]).abs()));
        }
        csv.push_nums(&[
            t,
            st.qbar()[0],
            st.pbar()[0],
            k.re,
            k.im,
            evo.entropy.absolute[i],
            evo.entropy.excess[i],
            closed.unwrap_or(f64::NAN),
        ]);
    }
    let last = times.len() - 1;
    let mut s = Summary::default();
    s.put("t_final", times[last], "end of the time grid");
    s.put("I_final", evo.entropy.absolute[last], "I(t) = 1 + dI[M(t), L(t)] with (M, L) propagated by the classical tangent map");
    s.put("I_excess_final", evo.entropy.excess[last], "dI = ln|det((M + 2 sigma2 L)/(2 sqrt(2 sigma2)))|");
    s.put("I_closed_form_final", closed_form_entropy(&cfg.potential, &cfg.c, times[last]), match cfg.potential {
        Potential::Free => "I = 1 + 1/2 ln(1 + (t/(4 sigma2 m))^2/4)",
        Potential::Inverted { .. } => "I = 1 + ln cosh kt (sigma2 = 1/(4mk))",
        Potential::Harmonic { .. } => "I = 1 (sigma2 = 1/(4 m omega))",
        Potential::Quartic { .. } => "no closed form",
    });
    s.put("max_closed_form_deviation", worst, "max_t |I(t) - I_closed(t)|");
    s.put("heuristic", evo.entropy.heuristic, "true when the potential is anharmonic (Gaussian propagation is an approximation)");
    s.put("symplectic_defect", evo.trajectory.symplectic_defect(), "max_t |J^T Omega J - Omega| / max(1, |J|^2)");
    if let Potential::Harmonic { omega } = cfg.potential {
        s.put("mismatch_bound", 1.0 + (4.0 * cfg.c.mass * omega * conv.sigma2).ln().abs(), "I <= 1 + |ln(4 m omega sigma2)|");
    }
    if let Potential::Inverted { k } = cfg.potential {
        let rate = lyapunov_entropy_rate(&evo.entropy, cfg.t_max / 4.0).ok();
        s.put("entropy_rate", rate, "least-squares dI/dt over the last quarter of the run");
        s.put("lyapunov_exponent", k, "k");
    }
    Ok((csv, s))
}

fn open_run(cfg: &OpenCfg) -> Result<(Csv, Summary), CliError> {
    let conv = cfg.c.conv;
    let model = cfg.potential.model(cfg.c.mass)?;
    let bath = BathSpec::new(cfg.gamma, cfg.kt)?;
    let st0 = CovarianceState::new(DVector::from_vec(vec![cfg.q0, cfg.p0]), conv.coherent_covariance(1), &conv)?;
    let times = time_grid(0.0, cfg.t_max, cfg.steps);
    let series = cl_moments_evolve(&st0, &model, &bath, &times, &conv)?;
    let gaps = entropy_gap_series(&series, &conv)?;
    let mut csv = Csv::new(&["t", "q", "p", "sxx", "sxp", "spp", "I", "S", "gap"]);
    for (i, st) in series.states.iter().enumerate() {
        csv.push_nums(&[
            times[i],
            st.mean[0],
            st.mean[1],
            st.sigma[(0, 0)],
            st.sigma[(0, 1)],
            st.sigma[(1, 1)],
            gaps.sw[i],
            gaps.vn[i],
            gaps.gap[i],
        ]);
    }
    let last = times.len() - 1;
    let fin = &series.states[last].sigma;
    let mut s = Summary::default();
    s.put("t_final", times[last], "end of the time grid");
    s.put("sigma_final", [[fin[(0, 0)], fin[(0, 1)]], [fin[(1, 0)], fin[(1, 1)]]], "second moments from the high-temperature moment equations");
    s.put(
        "sigma_stationary",
        series.stationary.as_ref().map(|m| [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]),
        "diag(kT/(m omega^2), m kT)",
    );
    s.put("I_final", gaps.sw[last], "Husimi entropy of the Gaussian moments");
    s.put("S_final", gaps.vn[last], "S = (N+1) ln(N+1) - N ln N, N = nu/hbar - 1/2");
    s.put("gap_final", gaps.gap[last], "I - S");
    s.put(
        "thermalization_time",
        thermalization_time(&series, cfg.thermal_tol).ok(),
        "first t with |Sigma(t) - Sigma_th| / |Sigma_th| < thermal_tol",
    );
    s.put("uncertainty_violations", series.uncertainty_violations.len(), "samples with nu < hbar/2 (clamped in S)");
    s.put("high_temperature", series.high_temperature, "kT >= 10 hbar max(gamma, omega)");
    if cfg.potential == Potential::Free {
        s.put(
            "log_time_slope",
            log_time_slope(&times, &gaps.sw, cfg.t_max / 10.0).ok(),
            "least-squares dI/d ln t over t >= t_max/10",
        );
    }
    Ok((csv, s))
}

fn classicality(cfg: &ClassicalityCfg) -> Result<(Csv, Summary), CliError> {
    let conv = cfg.c.conv;
    let model = cfg.potential.model(cfg.c.mass)?;
    let st0 = GaussianPureState::coherent(dv(cfg.q0), dv(cfg.p0), conv)?;
    let times = time_grid(0.0, cfg.t_max, cfg.steps);
    let evo = evolve(&st0, &model, &times, &conv)?;
    let cell0 = PhaseSpaceCell::metric_square([cfg.q0, cfg.p0], cfg.volume, &conv)?;
    let cells = cell_schedule(&cell0, &evo.trajectory)?;
    let rep = classical_tracking_report(&times, &evo.states, &cells, &conv, &cfg.opts)?;
    let mut csv = Csv::new(&["t", "defect", "epsilon", "volume_ratio", "excess", "capacity", "verdict"]);
    for r in &rep.rows {
        csv.push(vec![
            num(r.t),
            r.defect.map(num).unwrap_or_default(),
            num(r.epsilon),
            num(r.volume_ratio),
            num(r.excess),
            num(r.capacity),
            r.verdict.to_string(),
        ]);
    }
    let mut s = Summary::default();
    s.put("verdict", rep.verdict, "CLASSICAL iff every row is localised and within capacity and max volume_ratio <= volume_ratio_max");
    s.put("flip_time", rep.flip_time, "first t with a NON-CLASSICAL row");
    s.put("max_volume_ratio", rep.max_volume_ratio, "max_t [C_t]/[C_I], C_I the box enclosing all C_t");
    s.put("epsilon_initial", rep.rows[0].epsilon, "epsilon = epsilon_scale (2 pi hbar/[C])^(1/2)");
    s.put("capacity", rep.rows[0].capacity, "ln([C_0]/(2 pi hbar)) + kappa epsilon_0");
    s.put(
        "rows",
        rep.rows
            .iter()
            .map(|r| serde_json::json!({"t": r.t, "defect": r.defect, "epsilon": r.epsilon, "volume_ratio": r.volume_ratio, "verdict": r.verdict}))
            .collect::<Vec<_>>(),
        "defect = |P_C psi - psi| with P_C the coherent-state box quasiprojector",
    );
    if cfg.potential == Potential::Free {
        s.put(
            "breakdown_time",
            breakdown_time(conv.sigma2, cfg.c.mass, cfg.volume, &conv)?,
            "t = 4 sigma2 m V/(pi hbar)",
        );
    }
    Ok((csv, s))
}

/// Reads `k,r[,phi]`, `k,n`, or `k,r,n` columns; an empty file is an empty spectrum.
pub fn read_spectrum(path: &std::path::Path) -> Result<ModeSpectrum<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Ok(ModeSpectrum::default());
    }
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (k, r, n, phi) = (col("k"), col("r"), col("n"), col("phi"));
    let k = k.ok_or_else(|| CliError::Config(format!("{}: missing column k", path.display())))?;
    if r.is_none() && n.is_none() {
        return Err(CliError::Config(format!("{}: need column r or n", path.display())));
    }
    let mut modes = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let get = |idx: Option<usize>| -> Result<Option<f64>, CliError> {
            match idx.and_then(|i| rec.get(i)).filter(|s| !s.is_empty()) {
                None => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| CliError::Config(format!("{} row {}: '{s}' is not a number", path.display(), line + 1))),
            }
        };
        let kv = get(Some(k))?.ok_or_else(|| CliError::Config(format!("{} row {}: empty k", path.display(), line + 1)))?;
        let mode = Mode::new(kv, get(r)?, get(n)?, get(phi)?)
            .map_err(|e| CliError::Config(format!("{} row {}: {e}", path.display(), line + 1)))?;
        modes.push(mode);
    }
    Ok(ModeSpectrum { modes })
}

fn modes(cfg: &ModesCfg) -> Result<(Csv, Summary), CliError> {
    let mut s = Summary::default();
    match &cfg.source {
        ModesSource::Input(path) => {
            let spec = read_spectrum(path)?;
            let mut csv = Csv::new(&["k", "r", "n", "I_k"]);
            for m in &spec.modes {
                csv.push_nums(&[m.k, m.r, m.n, m.entropy()]);
            }
            let tot = spectrum_totals(&spec);
            s.put("mode_count", spec.modes.len(), "number of modes read");
            s.put("total_excess", tot.excess, "sum_k 2 ln cosh r_k");
            s.put("total_particles", tot.particles, "sum_k sinh^2 r_k");
            Ok((csv, s))
        }
        ModesSource::DeSitter { hubble, ks, t_max, steps } => {
            let times = time_grid(0.0, *t_max, *steps);
            let series = de_sitter_schedule(*hubble, &times, ks)?;
            let mut csv = Csv::new(&["t", "k", "r", "n", "I_k"]);
            for (t, spec) in &series {
                for m in &spec.modes {
                    csv.push_nums(&[*t, m.k, m.r, m.n, m.entropy()]);
                }
            }
            let (t1, s1) = &series[series.len().saturating_sub(2)];
            let (t2, s2) = &series[series.len() - 1];
            let slope = match (s1.modes.first(), s2.modes.first()) {
                (Some(a), Some(b)) if t2 > t1 => Some((b.entropy() - a.entropy()) / (t2 - t1)),
                _ => None,
            };
            let tot = spectrum_totals(s2);
            s.put("late_slope", slope, "dI_k/dt at the end of the schedule (tends to 2H)");
            s.put("two_hubble", 2.0 * hubble, "2H");
            s.put("total_excess_final", tot.excess, "sum_k 2 ln cosh(H t)");
            s.put("total_particles_final", tot.particles, "sum_k sinh^2(H t)");
            Ok((csv, s))
        }
    }
}

fn husimi(cfg: &HusimiCfg) -> Result<(Csv, Summary), CliError> {
    let conv = cfg.c.conv;
    let mut s = Summary::default();
    let (grid, closed, psi): (HusimiGrid, Option<f64>, Option<WavefunctionGrid>) = match cfg.state {
        HusimiState::Coherent | HusimiState::Squeezed { .. } => {
            let base = GaussianPureState::coherent(dv(cfg.q0), dv(cfg.p0), conv)?;
            let st = match cfg.state {
                HusimiState::Squeezed { r, phi } => {
                    let sq = apply(&one_mode_squeeze(r, phi)?, &GaussianPureState::vacuum(1, conv)?)?;
                    sq.translated(dv(cfg.q0), dv(cfg.p0))
                }
                _ => base,
            };
            let psi = WavefunctionGrid::from_state(&st)?;
            let g = q_function(&psi, &conv, &auto_grid(&psi, &conv))?;
            (g, Some(sw_entropy_pure(&st).absolute), Some(psi))
        }
        HusimiState::Cat => {
            let psi = WavefunctionGrid::even_cat(cfg.q0, &conv)?;
            let g = q_function(&psi, &conv, &auto_grid(&psi, &conv))?;
            (g, None, Some(psi))
        }
        HusimiState::Mixed(params) => {
            let g = q_function_mixed_1d(&params, &conv, None)?;
            (g, Some(sw_entropy_1d_params(&params, &conv)?), None)
        }
    };
    let mut csv = Csv::new(&["q", "p", "Q"]);
    for i in 0..grid.spec.nq {
        for j in 0..grid.spec.np {
            csv.push_nums(&[grid.spec.q(i), grid.spec.p(j), grid.value(i, j)]);
        }
    }
    s.put("I_quadrature", entropy_quadrature(&grid)?, "I = -sum Q ln Q dq dp/(2 pi hbar) on the grid");
    s.put("I_closed_form", closed, "Gaussian: I = 1 + 1/2 ln det(Sigma + Sigma_coh)/det(2 Sigma_coh); none for the cat");
    s.put("mass", grid.mass(), "sum Q dq dp/(2 pi hbar)");
    s.put("edge_mass", grid.edge_mass(), "mass on the outermost ring of cells");
    s.put("grid", grid.spec, "q = q_min + i dq, p = p_min + j dp");
    if let Some(psi) = psi {
        let mi = marginal_information(&psi, &conv)?;
        s.put("I_x", mi.i_x, "-int |psi(x)|^2 ln |psi(x)|^2 dx");
        s.put("I_p", mi.i_p, "-int |phi(p)|^2 ln |phi(p)|^2 dp");
        s.put("entropic_sum", mi.total(), "I_x + I_p >= 1 + ln(pi hbar)");
        s.put("entropic_bound", entropic_bound(conv.hbar), "1 + ln(pi hbar)");
    }
    Ok((csv, s))
}
