//! Command-line grammar and the key=value config file merge.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fjerk_core::solver::MemoryPolicy;
use fjerk_core::{Branch, OrderSpec};

#[derive(Debug, Parser)]
#[command(name = "fjerk", version, about = "Fractional-order quadratic jerk system toolkit", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hopf critical values (γ_H, ε_H) at an equilibrium.
    Hopf(HopfArgs),
    /// Integrate one trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Bifurcation sweep over ε: attractor extrema, optionally Lyapunov spectra.
    Sweep(SweepArgs),
    /// Lyapunov spectrum at one ε, or over an ε grid.
    Lyapunov(LyapunovArgs),
    /// Phase portrait projection of one trajectory.
    Portrait(PortraitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Commensurate order α ∈ (0, 1].
    #[arg(long, conflicts_with = "alphas", required_unless_present = "alphas")]
    pub alpha: Option<f64>,
    /// Per-equation orders `v1/u1,v2/u2,v3/u3` (decimals are read exactly).
    #[arg(long)]
    pub alphas: Option<String>,
    /// key=value file; every key mirrors a flag and flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl SystemArgs {
    pub fn orders(&self) -> fjerk_core::Result<OrderSpec> {
        let spec = match (&self.alphas, self.alpha) {
            (Some(triple), _) => OrderSpec::parse_triple(triple)?,
            (None, Some(alpha)) => OrderSpec::Commensurate(alpha),
            (None, None) => unreachable!("clap requires one of --alpha/--alphas"),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 0.005)]
    pub h: f64,
    #[arg(long, default_value_t = 300.0)]
    pub t_end: f64,
    /// Initial state `x,y,z`.
    #[arg(long, default_value = "0,0,0", value_parser = parse_triple_f64, allow_hyphen_values = true)]
    pub x0: [f64; 3],
    /// `full` or `short:W` with the window W in time units.
    #[arg(long, default_value = "full", value_parser = parse_memory)]
    pub memory: MemoryPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
    Both,
}

impl BranchArg {
    pub fn branches(self) -> Vec<Branch> {
        match self {
            BranchArg::Plus => vec![Branch::Plus],
            BranchArg::Minus => vec![Branch::Minus],
            BranchArg::Both => vec![Branch::Plus, Branch::Minus],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct HopfArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub branch: BranchArg,
    /// Also write hopf.csv and hopf.txt here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub eps_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub eps_max: f64,
    #[arg(long)]
    pub n: usize,
    /// Leading fraction of each run discarded before collecting extrema.
    #[arg(long, default_value_t = 0.3)]
    pub transient: f64,
    /// Also estimate the Lyapunov spectrum at every grid point.
    #[arg(long)]
    pub lyapunov: bool,
    #[arg(long, default_value_t = 100)]
    pub renorm_every: usize,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_hyphen_values = true, required_unless_present_all = ["eps_min", "eps_max", "n"], conflicts_with_all = ["eps_min", "eps_max", "n"])]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["eps_max", "n"])]
    pub eps_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["eps_min", "n"])]
    pub eps_max: Option<f64>,
    #[arg(long, requires_all = ["eps_min", "eps_max"])]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub renorm_every: usize,
    /// Leading fraction of the run excluded from the averages.
    #[arg(long, default_value_t = 0.3)]
    pub transient: f64,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

impl Plane {
    pub fn components(self) -> (usize, usize) {
        match self {
            Plane::Xy => (0, 1),
            Plane::Xz => (0, 2),
            Plane::Yz => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Plane::Xy => "xy",
            Plane::Xz => "xz",
            Plane::Yz => "yz",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "xy")]
    pub plane: Plane,
    /// Leading fraction of the run left out of the picture.
    #[arg(long, default_value_t = 0.3)]
    pub transient: f64,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_triple_f64(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("`{part}` is not a number"))?;
    }
    Ok(out)
}

pub fn parse_memory(s: &str) -> Result<MemoryPolicy, String> {
    match s.trim() {
        "full" => Ok(MemoryPolicy::Full),
        other => {
            let window = other
                .strip_prefix("short:")
                .ok_or_else(|| format!("expected `full` or `short:W`, got `{other}`"))?;
            let window: f64 = window.parse().map_err(|_| format!("`{window}` is not a window length"))?;
            Ok(MemoryPolicy::ShortMemory { window })
        }
    }
}

/// Splices the entries of a `--config` file in front of the command-line
/// flags. Flags override themselves, so the ones typed later win.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let strings: Vec<Option<&str>> = argv.iter().map(|a| a.to_str()).collect();
    let mut path = None;
    for (i, arg) in strings.iter().enumerate() {
        match arg {
            Some("--config") => path = strings.get(i + 1).copied().flatten(),
            Some(a) if a.starts_with("--config=") => path = Some(&a["--config=".len()..]),
            _ => {}
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config `{path}`: {e}"))?;
    let mut spliced = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let value = value.trim();
        match value {
            "true" => spliced.push(OsString::from(flag)),
            "false" => {}
            _ => {
                spliced.push(OsString::from(flag));
                spliced.push(OsString::from(value));
            }
        }
    }
    // after the binary and the subcommand name
    let at = argv.len().min(2);
    let mut out = argv[..at].to_vec();
    out.extend(spliced);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}
