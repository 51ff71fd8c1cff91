//! `fjerk`: command-line front end. Exit codes: 0 success, 1 domain or I/O
//! error, 2 usage error.

pub mod args;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;
use fjerk_core::chaos::{
    classify_attractor, extract_extrema, lyapunov_spectrum, sweep_bifurcation, LyapunovConfig, LyapunovSpectrum, SweepConfig,
    SweepResult, CHAOS_CLUSTERS, CHAOS_EXPONENT, CLUSTER_TOLERANCE,
};
use fjerk_core::hopf::{hopf_commensurate, hopf_incommensurate};
use fjerk_core::solver::{integrate, MemoryPolicy, SolveConfig, Trajectory};
use fjerk_core::{JerkParams, OrderSpec};

use args::{Cli, Command, HopfArgs, LyapunovArgs, PortraitArgs, SimulateArgs, SolveArgs, SweepArgs, SystemArgs};
use output::float;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

type Failure = Box<dyn std::error::Error>;

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match args::expand_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Hopf(a) => hopf(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Lyapunov(a) => lyapunov(a),
        Command::Portrait(a) => portrait(a),
    };
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create output directory {}: {e}", dir.display()))?;
    let probe = dir.join(".fjerk-write-check");
    std::fs::write(&probe, b"").map_err(|e| format!("output directory {} is not writable: {e}", dir.display()))?;
    let _ = std::fs::remove_file(probe);
    Ok(())
}

fn solve_config(s: &SolveArgs) -> Result<SolveConfig, Failure> {
    let cfg = SolveConfig::new(s.h, s.t_end, s.x0).with_memory(s.memory);
    cfg.validate()?;
    Ok(cfg)
}

fn memory_label(m: MemoryPolicy) -> String {
    match m {
        MemoryPolicy::Full => "full".into(),
        MemoryPolicy::ShortMemory { window } => format!("short:{window}"),
    }
}

fn orders_label(orders: &OrderSpec) -> String {
    match orders {
        OrderSpec::Commensurate(alpha) => format!("α={alpha}"),
        OrderSpec::Incommensurate(o) => format!(
            "α=({}/{}, {}/{}, {}/{})",
            o[0].numer(),
            o[0].denom(),
            o[1].numer(),
            o[1].denom(),
            o[2].numer(),
            o[2].denom()
        ),
    }
}

/// Shared key=value lines describing the system and the solver.
fn run_metadata(system: &SystemArgs, orders: &OrderSpec, cfg: &SolveConfig) -> Vec<(&'static str, String)> {
    vec![
        ("a", float(system.a)),
        ("b", float(system.b)),
        ("orders", orders.to_string()),
        ("h", float(cfg.h)),
        ("t_end", float(cfg.t_end)),
        ("x0", cfg.initial_state.map(float).join(",")),
        ("memory", memory_label(cfg.memory)),
    ]
}

fn threshold_metadata() -> Vec<(&'static str, String)> {
    vec![
        ("chaos_exponent", float(CHAOS_EXPONENT)),
        ("chaos_clusters", CHAOS_CLUSTERS.to_string()),
        ("cluster_tolerance", float(CLUSTER_TOLERANCE)),
    ]
}

fn hopf(args: &HopfArgs) -> Result<String, Failure> {
    let orders = args.system.orders()?;
    if let Some(dir) = &args.out {
        prepare_dir(dir)?;
    }
    let mut solutions = Vec::new();
    let mut blocks = Vec::new();
    let mut failures = Vec::new();
    for branch in args.branch.branches() {
        let solved = match &orders {
            OrderSpec::Commensurate(alpha) => hopf_commensurate(args.system.a, args.system.b, *alpha, branch),
            OrderSpec::Incommensurate(_) => hopf_incommensurate(args.system.a, args.system.b, &orders, branch),
        };
        match solved {
            Ok(s) => {
                blocks.push(output::hopf_block(&orders, &s));
                solutions.push(s);
            }
            Err(e) => failures.push(format!("branch {branch}: {e}")),
        }
    }
    print!("{}", blocks.join("\n"));
    if let Some(dir) = &args.out {
        output::write_hopf(&dir.join("hopf.csv"), &orders, &solutions)?;
        output::write_text(&dir.join("hopf.txt"), &blocks.join("\n"))?;
    }
    if !failures.is_empty() {
        return Err(failures.join("; ").into());
    }
    Ok(format!("hopf: {} solution(s) for {}", solutions.len(), orders_label(&orders)))
}

fn simulate(args: &SimulateArgs) -> Result<String, Failure> {
    let orders = args.system.orders()?;
    let cfg = solve_config(&args.solve)?;
    prepare_dir(&args.out)?;
    let params = JerkParams::new(args.system.a, args.system.b, args.eps);
    let traj = integrate(&params, &orders, &cfg)?;
    let path = args.out.join("trajectory.csv");
    output::write_trajectory(&path, &traj)?;
    let mut meta = run_metadata(&args.system, &orders, &cfg);
    meta.push(("epsilon", float(args.eps)));
    meta.push(("samples", traj.len().to_string()));
    let ranges: Vec<(f64, f64)> = (0..3).map(|c| component_range(&traj, c)).collect();
    let keys = [("x_min", "x_max"), ("y_min", "y_max"), ("z_min", "z_max")];
    for ((lo_key, hi_key), (lo, hi)) in keys.into_iter().zip(&ranges) {
        meta.push((lo_key, float(*lo)));
        meta.push((hi_key, float(*hi)));
    }
    output::write_key_values(&args.out.join("simulate.txt"), &meta)?;
    Ok(format!(
        "simulate: {} samples to t={}, x in [{:.6}, {:.6}], wrote {}",
        traj.len(),
        cfg.t_end,
        ranges[0].0,
        ranges[0].1,
        path.display()
    ))
}

fn component_range(traj: &Trajectory, c: usize) -> (f64, f64) {
    traj.states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s[c]), hi.max(s[c])))
}

fn run_sweep(
    system: &SystemArgs,
    orders: &OrderSpec,
    range: (f64, f64),
    n: usize,
    cfg: &SolveConfig,
    sweep_cfg: &SweepConfig,
) -> Result<SweepResult, Failure> {
    let base = JerkParams::new(system.a, system.b, range.0);
    Ok(sweep_bifurcation(&base, orders, range, n, cfg, sweep_cfg)?)
}

fn spectra(result: &SweepResult) -> Vec<(f64, LyapunovSpectrum)> {
    result.points.iter().filter_map(|p| p.spectrum().map(|s| (p.epsilon, *s))).collect()
}

fn write_lyapunov_outputs(dir: &Path, rows: &[(f64, LyapunovSpectrum)], title: &str) -> Result<(), Failure> {
    output::write_lyapunov(&dir.join("lyapunov.csv"), rows)?;
    if !rows.is_empty() {
        let eps: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let exps: Vec<[f64; 3]> = rows.iter().map(|r| r.1.exponents).collect();
        output::write_text(&dir.join("lyapunov.svg"), &svg::lyapunov(&eps, &exps, title))?;
    }
    Ok(())
}

fn attractor_summary(result: &SweepResult) -> String {
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for p in &result.points {
        let kind = classify_attractor(p.extrema(), p.spectrum());
        let key = match kind {
            fjerk_core::chaos::AttractorKind::Periodic(_) => "periodic".to_string(),
            other => other.to_string(),
        };
        *counts.entry(key).or_default() += 1;
    }
    counts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn sweep(args: &SweepArgs) -> Result<String, Failure> {
    let orders = args.system.orders()?;
    let cfg = solve_config(&args.solve)?;
    prepare_dir(&args.out)?;
    let sweep_cfg = SweepConfig {
        transient_fraction: args.transient,
        lyapunov: args
            .lyapunov
            .then_some(LyapunovConfig { renorm_every: args.renorm_every, transient_fraction: args.transient }),
        threads: None,
    };
    let result = run_sweep(&args.system, &orders, (args.eps_min, args.eps_max), args.n, &cfg, &sweep_cfg)?;
    let title = format!("a={}, b={}, {}", args.system.a, args.system.b, orders_label(&orders));
    output::write_sweep(&args.out.join("sweep.csv"), &result)?;
    let scatter: Vec<(f64, f64)> =
        output::sweep_rows(&result).into_iter().filter_map(|r| r.value.map(|v| (r.epsilon, v))).collect();
    output::write_text(&args.out.join("bifurcation.svg"), &svg::bifurcation(&scatter, &format!("Bifurcation, {title}")))?;
    if args.lyapunov {
        write_lyapunov_outputs(&args.out, &spectra(&result), &format!("Lyapunov exponents, {title}"))?;
    }
    let mut meta = run_metadata(&args.system, &orders, &cfg);
    meta.extend([
        ("eps_min", float(args.eps_min)),
        ("eps_max", float(args.eps_max)),
        ("n", args.n.to_string()),
        ("transient", float(args.transient)),
        ("lyapunov", args.lyapunov.to_string()),
        ("renorm_every", args.renorm_every.to_string()),
    ]);
    meta.extend(threshold_metadata());
    output::write_key_values(&args.out.join("sweep.txt"), &meta)?;
    Ok(format!("sweep: {} points ({}), wrote {}", result.points.len(), attractor_summary(&result), args.out.display()))
}

fn lyapunov(args: &LyapunovArgs) -> Result<String, Failure> {
    let orders = args.system.orders()?;
    let cfg = solve_config(&args.solve)?;
    prepare_dir(&args.out)?;
    let lcfg = LyapunovConfig { renorm_every: args.renorm_every, transient_fraction: args.transient };
    let title = format!("Lyapunov exponents, a={}, b={}, {}", args.system.a, args.system.b, orders_label(&orders));
    let mut meta = run_metadata(&args.system, &orders, &cfg);
    meta.extend([("renorm_every", args.renorm_every.to_string()), ("transient", float(args.transient))]);
    meta.extend(threshold_metadata());
    let summary = match (args.eps, args.eps_min, args.eps_max, args.n) {
        (Some(eps), ..) => {
            let params = JerkParams::new(args.system.a, args.system.b, eps);
            let (traj, spectrum) = lyapunov_spectrum(&params, &orders, &cfg, &lcfg)?;
            let kind = extract_extrema(&traj, args.transient).map(|e| classify_attractor(Some(&e), Some(&spectrum)))?;
            write_lyapunov_outputs(&args.out, &[(eps, spectrum)], &title)?;
            meta.extend([
                ("epsilon", float(eps)),
                ("t_span", float(spectrum.t_span)),
                ("renorm_count", spectrum.renorm_count.to_string()),
                ("drift", float(spectrum.drift)),
                ("attractor", kind.to_string()),
            ]);
            let l = spectrum.exponents;
            format!("lyapunov: ε={eps} λ=({:.6}, {:.6}, {:.6}) {kind}", l[0], l[1], l[2])
        }
        (None, Some(lo), Some(hi), Some(n)) => {
            let sweep_cfg = SweepConfig { transient_fraction: args.transient, lyapunov: Some(lcfg), threads: None };
            let result = run_sweep(&args.system, &orders, (lo, hi), n, &cfg, &sweep_cfg)?;
            write_lyapunov_outputs(&args.out, &spectra(&result), &title)?;
            meta.extend([("eps_min", float(lo)), ("eps_max", float(hi)), ("n", n.to_string())]);
            format!("lyapunov: {} points ({})", result.points.len(), attractor_summary(&result))
        }
        _ => unreachable!("clap requires --eps or the full ε range"),
    };
    output::write_key_values(&args.out.join("lyapunov.txt"), &meta)?;
    Ok(summary)
}

fn portrait(args: &PortraitArgs) -> Result<String, Failure> {
    let orders = args.system.orders()?;
    let cfg = solve_config(&args.solve)?;
    if !(0.0..1.0).contains(&args.transient) {
        return Err(format!("transient fraction {} outside [0, 1)", args.transient).into());
    }
    prepare_dir(&args.out)?;
    let params = JerkParams::new(args.system.a, args.system.b, args.eps);
    let traj = integrate(&params, &orders, &cfg)?;
    output::write_trajectory(&args.out.join("trajectory.csv"), &traj)?;
    let (i, j) = args.plane.components();
    let start = (traj.len() as f64 * args.transient).floor() as usize;
    let points: Vec<(f64, f64)> = traj.states[start..].iter().map(|s| (s[i], s[j])).collect();
    let names = ["x", "y", "z"];
    let title = format!(
        "Phase portrait, a={}, b={}, ε={}, {}",
        args.system.a,
        args.system.b,
        args.eps,
        orders_label(&orders)
    );
    let file = format!("portrait_{}.svg", args.plane.name());
    output::write_text(&args.out.join(&file), &svg::portrait(&points, (names[i], names[j]), &title))?;
    Ok(format!("portrait: {} points in the {} plane, wrote {}", points.len(), args.plane.name(), args.out.join(file).display()))
}
