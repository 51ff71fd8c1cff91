use std::path::Path;
use std::process::{Command, Output};

use fjerk_cli::output::{read_lyapunov, read_sweep, read_trajectory};
use fjerk_cli::svg;
use fjerk_core::solver::{integrate, SolveConfig};
use fjerk_core::{JerkParams, OrderSpec};

fn fjerk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fjerk")).args(args).output().unwrap()
}

fn block_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn hopf_block_carries_critical_values() {
    let out = fjerk(&["hopf", "--a", "0.129", "--b", "7", "--alpha", "0.99", "--branch", "minus"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // values of the grid-scan oracle in the core Hopf tests
    assert!((block_value(&text, "gamma_H") - 2.648138240792169).abs() < 1e-9);
    assert!((block_value(&text, "epsilon_H") - 0.532590179115874).abs() < 1e-9);
    assert!(block_value(&text, "residual_re").abs() < 1e-8 && block_value(&text, "residual_im").abs() < 1e-8);
}

#[test]
fn hopf_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = fjerk(&["hopf", "--a", "0.129", "--b", "7", "--alphas", "1,99/100,1", "--branch", "plus", "--out", d]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("hopf.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "branch,alpha_or_orders,gamma_H,epsilon_H,residual_re,residual_im");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&fields[..2], &["plus", "1/1;99/100;1/1"]);
    assert!((fields[3].parse::<f64>().unwrap() + 0.100708515067448).abs() < 1e-9);
}

#[test]
fn excluded_angle_is_a_domain_error() {
    let out = fjerk(&["hopf", "--a", "0.129", "--b", "7", "--alpha", "0.6667", "--branch", "plus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular angle"));
}

#[test]
fn usage_errors_name_the_flag() {
    let out = fjerk(&["simulate", "--a", "0.129", "--b", "7", "--alpha", "0.99", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--eps"));
    let out = fjerk(&["simulate", "--a", "0.129", "--b", "7", "--eps", "5", "--alpha", "0.99", "--memory", "half", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--memory"));
}

fn simulate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--a", "0.129", "--b", "7", "--eps", "7.78", "--alpha", "0.99", "--out"];
    args.push(dir.to_str().unwrap());
    args.extend_from_slice(extra);
    fjerk(&args)
}

#[test]
fn trajectory_rows_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // three samples: t = 0, 0.01, 0.02
    let out = simulate(dir.path(), &["--h", "0.01", "--t-end", "0.02"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains('\r'));

    let out = simulate(dir.path(), &["--t-end", "5", "--x0", "0.1,-0.2,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_trajectory(&dir.path().join("trajectory.csv")).unwrap();
    let cfg = SolveConfig::new(0.005, 5.0, [0.1, -0.2, 0.3]);
    let traj = integrate(&JerkParams::new(0.129, 7.0, 7.78), &OrderSpec::Commensurate(0.99), &cfg).unwrap();
    assert_eq!(rows.len(), traj.len());
    for ((t, s), (t2, s2)) in rows.iter().zip(traj.times.iter().zip(&traj.states)) {
        assert_eq!(t.to_bits(), t2.to_bits());
        assert!(s.iter().zip(s2).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(simulate(dir.path(), &["--t-end", "20"]).status.code(), Some(0));
    }
    for file in ["trajectory.csv", "simulate.txt"] {
        assert_eq!(std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap());
    }
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "a=0.129\nb=7\neps=7.78\nalpha=0.99\nh=0.01\nt_end=2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = fjerk(&["simulate", "--config", conf.to_str().unwrap(), "--t-end", "1", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // h from the file, t_end from the flag
    assert_eq!(read_trajectory(&out_dir.join("trajectory.csv")).unwrap().len(), 101);
}

#[test]
fn sweep_marks_divergent_points() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["sweep", "--a", "0.129", "--b", "7", "--eps-min", "5", "--eps-max", "40", "--n", "2", "--alpha", "0.99"];
    let out = fjerk(&[&args[..], &["--t-end", "100", "--h", "0.01", "--lyapunov", "--out", d]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_sweep(&dir.path().join("sweep.csv")).unwrap();
    let divergent: Vec<_> = rows.iter().filter(|r| r.kind == "divergent").collect();
    assert_eq!(divergent.len(), 1);
    assert_eq!((divergent[0].epsilon, divergent[0].value), (40.0, None));
    assert!(rows.iter().any(|r| r.kind == "max" && r.epsilon == 5.0));
    let raw = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(raw.lines().any(|l| l.ends_with(",divergent,")));
    // the diverged point has no spectrum
    let spectra = read_lyapunov(&dir.path().join("lyapunov.csv")).unwrap();
    assert_eq!(spectra.len(), 1);
    let meta = std::fs::read_to_string(dir.path().join("sweep.txt")).unwrap();
    assert!(meta.contains("chaos_exponent=") && meta.contains("chaos_clusters=32"));
}

#[test]
fn portrait_stays_inside_the_plot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["portrait", "--a", "0.129", "--b", "7", "--eps", "7.78", "--alpha", "0.99", "--t-end", "60", "--out", d];
    assert_eq!(fjerk(&args).status.code(), Some(0));
    let svg_text = std::fs::read_to_string(dir.path().join("portrait_xy.svg")).unwrap();
    let points = svg_text.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    let coords: Vec<(f64, f64)> = points
        .split(' ')
        .map(|p| {
            let (x, y) = p.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert!(coords.len() > 1000);
    assert!(coords.iter().all(|(x, y)| (0.0..=800.0).contains(x) && (0.0..=560.0).contains(y)));
    // a chaotic orbit does not close on itself
    assert_ne!(coords.first(), coords.last());
}

#[test]
fn svg_structure() {
    let one = svg::bifurcation(&[(7.78, 1.5)], "single point");
    assert_eq!(one.matches("class=\"marker\"").count(), 1);
    let lyap = svg::lyapunov(&[1.0, 2.0], &[[0.1, 0.0, -1.0], [0.2, -0.1, -0.9]], "spectra");
    assert_eq!(lyap.matches("class=\"zero\"").count(), 1);
    assert_eq!(lyap.matches("class=\"exponent\"").count(), 3);
    assert!(one.starts_with("<svg") && one.trim_end().ends_with("</svg>"));
}
