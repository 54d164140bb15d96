// NaN-rejecting guards are written as `!(x > 0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod output;
mod params;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use params::{parse_assignment, parse_ini, Check, IniFile, Params};

#[derive(Parser, Debug)]
#[command(name = "phaseclass", version, about = "Phase-space classicality diagnostics")]
struct Cli {
    /// Config file: `key = value` lines under `[conventions]` and `[<kind>]` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a parameter (repeatable), e.g. `--set omega=2`.
    #[arg(long = "set", global = true, value_parser = parse_assignment)]
    sets: Vec<(String, String)>,
    /// Write `<kind>.csv` and `<kind>.json` into this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    sigma2: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    #[command(subcommand)]
    cmd: Command,
}

macro_rules! flag_struct {
    ($name:ident { $($field:ident : $ty:ty),* $(,)? }) => {
        #[derive(Args, Debug, Default)]
        struct $name {
            $(#[arg(long)] $field: Option<$ty>,)*
        }

        impl $name {
            fn flags(&self) -> Vec<(&'static str, String)> {
                let mut v = Vec::new();
                $(if let Some(x) = &self.$field { v.push((stringify!($field), x.to_string())); })*
                v
            }
        }
    };
}

flag_struct!(SqueezeArgs { modes: usize, r: f64, phi: f64, r_max: f64, steps: usize });
flag_struct!(EvolveArgs {
    potential: String, omega: f64, k: f64, a2: f64, a4: f64, q0: f64, p0: f64, t_max: f64, steps: usize
});
flag_struct!(OpenArgs {
    potential: String, omega: f64, gamma: f64, kt: f64, q0: f64, p0: f64, t_max: f64, steps: usize, thermal_tol: f64
});
flag_struct!(ClassicalityArgs {
    potential: String, omega: f64, k: f64, q0: f64, p0: f64, volume: f64, t_max: f64, steps: usize,
    epsilon_scale: f64, kappa: f64, volume_ratio_max: f64
});
flag_struct!(ModesArgs { input: String, hubble: f64, k: String, t_max: f64, steps: usize });
flag_struct!(HusimiArgs { state: String, r: f64, phi: f64, q0: f64, p0: f64, alpha: f64, s: f64 });

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Scenario kind to check; defaults to every kind with a section in the config.
    #[arg(long)]
    kind: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy of one- and two-mode squeezed vacua.
    Squeeze(SqueezeArgs),
    /// Gaussian wavepacket in a free, harmonic, inverted or quartic potential.
    Evolve(EvolveArgs),
    /// Quantum Brownian motion moments, entropy and von Neumann gap.
    #[command(name = "open-system")]
    OpenSystem(OpenArgs),
    /// Quasiprojector tracking of a transported phase-space cell.
    Classicality(ClassicalityArgs),
    /// Per-mode entropy from a (k, r) / (k, n) table or a de Sitter schedule.
    Modes(ModesArgs),
    /// Husimi function on a grid and its quadrature entropy.
    Husimi(HusimiArgs),
    /// Check parameters without running anything.
    Validate(ValidateArgs),
}

fn convention_flags(cli: &Cli) -> Vec<(&'static str, String)> {
    let mut v = Vec::new();
    for (k, x) in [("hbar", cli.hbar), ("sigma2", cli.sigma2), ("mass", cli.mass)] {
        if let Some(x) = x {
            v.push((k, x.to_string()));
        }
    }
    v
}

fn load_ini(path: Option<&PathBuf>) -> Result<IniFile, CliError> {
    match path {
        None => Ok(IniFile::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_ini(&text)
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PHASECLASS_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("PHASECLASS_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn check(kind: &str, ini: &IniFile, sets: &[(String, String)], flags: Vec<(&'static str, String)>) -> (Params, Check) {
    let p = Params::new(kind, ini, sets, flags);
    run::build(kind, &p);
    let c = p.finish();
    (p, c)
}

fn validate(cli: &Cli, args: &ValidateArgs, ini: &IniFile) -> Result<bool, CliError> {
    let kinds: Vec<String> = match &args.kind {
        Some(k) => vec![k.clone()],
        None => {
            let ks: Vec<String> =
                ini.sections.keys().filter(|s| run::KINDS.contains(&s.as_str())).cloned().collect();
            if ks.is_empty() {
                return Err(CliError::Config("no scenario section in config; pass --kind".into()));
            }
            ks
        }
    };
    let mut reports = Vec::new();
    let mut clean = true;
    for kind in &kinds {
        let (_, c) = check(kind, ini, &cli.sets, convention_flags(cli));
        clean &= c.violations.is_empty();
        reports.push(serde_json::json!({"kind": kind, "violations": c.violations, "warnings": c.warnings}));
    }
    let out = if reports.len() == 1 { reports.remove(0) } else { serde_json::Value::Array(reports) };
    println!("{}", serde_json::to_string_pretty(&out).expect("json renders"));
    Ok(clean)
}

fn real_main() -> Result<bool, CliError> {
    let cli = Cli::parse();
    init_threads()?;
    let ini = load_ini(cli.config.as_ref())?;
    let (kind, kind_flags) = match &cli.cmd {
        Command::Validate(args) => return validate(&cli, args, &ini),
        Command::Squeeze(a) => ("squeeze", a.flags()),
        Command::Evolve(a) => ("evolve", a.flags()),
        Command::OpenSystem(a) => ("open-system", a.flags()),
        Command::Classicality(a) => ("classicality", a.flags()),
        Command::Modes(a) => ("modes", a.flags()),
        Command::Husimi(a) => ("husimi", a.flags()),
    };
    let mut flags = convention_flags(&cli);
    flags.extend(kind_flags);
    let p = Params::new(kind, &ini, &cli.sets, flags);
    let scenario = run::build(kind, &p);
    let c = p.finish();
    for w in &c.warnings {
        eprintln!("warning: {w}");
    }
    let scenario = match scenario {
        Some(s) if c.violations.is_empty() => s,
        _ => return Err(CliError::Invalid(c.violations)),
    };
    let art = run::execute(&scenario, p.resolved())?;
    if let Some(dir) = &cli.out {
        art.write(dir)?;
    }
    print!("{}", art.json_text());
    Ok(true)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
