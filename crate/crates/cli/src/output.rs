//! CSV and key=value artifacts.
//!
//! Floats are written with 17 significant digits so that reading a file back
//! reproduces every value bit for bit. Lines end in LF.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use csv::{ReaderBuilder, Terminator, WriterBuilder};
use fjerk_core::chaos::{LyapunovSpectrum, PointResult, SweepResult};
use fjerk_core::hopf::HopfSolution;
use fjerk_core::solver::Trajectory;
use fjerk_core::OrderSpec;

pub const TRAJECTORY_HEADER: [&str; 4] = ["t", "x", "y", "z"];
pub const SWEEP_HEADER: [&str; 3] = ["epsilon", "kind", "x_value"];
pub const LYAPUNOV_HEADER: [&str; 5] = ["epsilon", "lambda1", "lambda2", "lambda3", "converged"];
pub const HOPF_HEADER: [&str; 6] = ["branch", "alpha_or_orders", "gamma_H", "epsilon_H", "residual_re", "residual_im"];

/// `v` in scientific notation with 17 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug)]
pub struct OutputError {
    pub path: String,
    pub source: io::Error,
}

impl std::fmt::Display for OutputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.source)
    }
}

impl std::error::Error for OutputError {}

fn at(path: &Path) -> impl Fn(io::Error) -> OutputError + '_ {
    move |source| OutputError { path: path.display().to_string(), source }
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> OutputError + '_ {
    move |e| OutputError { path: path.display().to_string(), source: io::Error::other(e) }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), OutputError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).map_err(at(path))?;
    let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
    w.write_record(header).map_err(csv_error(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_error(path))?;
    }
    w.flush().map_err(at(path))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, OutputError> {
    let mut r = ReaderBuilder::new().from_path(path).map_err(csv_error(path))?;
    let found = r.headers().map_err(csv_error(path))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(OutputError {
            path: path.display().to_string(),
            source: io::Error::new(io::ErrorKind::InvalidData, format!("unexpected header {found:?}")),
        });
    }
    r.records().collect::<Result<_, _>>().map_err(csv_error(path))
}

fn parse_field(path: &Path, record: &csv::StringRecord, i: usize) -> Result<f64, OutputError> {
    let field = record.get(i).unwrap_or("");
    field.parse().map_err(|_| OutputError {
        path: path.display().to_string(),
        source: io::Error::new(io::ErrorKind::InvalidData, format!("`{field}` is not a number")),
    })
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), OutputError> {
    let rows = traj.times.iter().zip(&traj.states).map(|(t, s)| vec![float(*t), float(s[0]), float(s[1]), float(s[2])]);
    write_rows(path, &TRAJECTORY_HEADER, rows)
}

/// `(t, [x, y, z])` rows of a trajectory CSV.
pub fn read_trajectory(path: &Path) -> Result<Vec<(f64, [f64; 3])>, OutputError> {
    read_rows(path, &TRAJECTORY_HEADER)?
        .iter()
        .map(|r| {
            Ok((
                parse_field(path, r, 0)?,
                [parse_field(path, r, 1)?, parse_field(path, r, 2)?, parse_field(path, r, 3)?],
            ))
        })
        .collect()
}

/// One sweep CSV row. `value` is `None` for grid points without extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub kind: String,
    pub value: Option<f64>,
}

/// Rows of the bifurcation CSV: every post-transient maximum and minimum,
/// one `fixed` row for a run that settled on a point, and one `divergent`
/// (or `failed`) row with an empty value for runs without an attractor.
pub fn sweep_rows(result: &SweepResult) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for point in &result.points {
        let row = |kind: &str, value| SweepRow { epsilon: point.epsilon, kind: kind.into(), value };
        match &point.result {
            PointResult::Completed { extrema, .. } => {
                if extrema.maxima.is_empty() && extrema.minima.is_empty() {
                    rows.push(row("fixed", Some(extrema.x_max)));
                }
                rows.extend(extrema.maxima.iter().map(|v| row("max", Some(*v))));
                rows.extend(extrema.minima.iter().map(|v| row("min", Some(*v))));
            }
            PointResult::Diverged { .. } => rows.push(row("divergent", None)),
            PointResult::Failed(_) => rows.push(row("failed", None)),
        }
    }
    rows
}

pub fn write_sweep(path: &Path, result: &SweepResult) -> Result<(), OutputError> {
    let rows = sweep_rows(result)
        .into_iter()
        .map(|r| vec![float(r.epsilon), r.kind, r.value.map(float).unwrap_or_default()]);
    write_rows(path, &SWEEP_HEADER, rows)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>, OutputError> {
    read_rows(path, &SWEEP_HEADER)?
        .iter()
        .map(|r| {
            let value = match r.get(2).unwrap_or("") {
                "" => None,
                _ => Some(parse_field(path, r, 2)?),
            };
            Ok(SweepRow { epsilon: parse_field(path, r, 0)?, kind: r.get(1).unwrap_or("").to_string(), value })
        })
        .collect()
}

/// `(ε, spectrum)` pairs; points without a spectrum are left out.
pub fn write_lyapunov(path: &Path, rows: &[(f64, LyapunovSpectrum)]) -> Result<(), OutputError> {
    let rows = rows.iter().map(|(eps, s)| {
        let mut row = vec![float(*eps)];
        row.extend(s.exponents.iter().map(|l| float(*l)));
        row.push(s.converged.to_string());
        row
    });
    write_rows(path, &LYAPUNOV_HEADER, rows)
}

/// `(ε, [λ₁, λ₂, λ₃], converged)` rows.
pub fn read_lyapunov(path: &Path) -> Result<Vec<(f64, [f64; 3], bool)>, OutputError> {
    read_rows(path, &LYAPUNOV_HEADER)?
        .iter()
        .map(|r| {
            let exps = [parse_field(path, r, 1)?, parse_field(path, r, 2)?, parse_field(path, r, 3)?];
            Ok((parse_field(path, r, 0)?, exps, r.get(4) == Some("true")))
        })
        .collect()
}

pub fn hopf_row(orders: &OrderSpec, s: &HopfSolution) -> Vec<String> {
    vec![
        s.branch.to_string(),
        orders.to_string(),
        float(s.modulus),
        float(s.epsilon),
        float(s.residual_re),
        float(s.residual_im),
    ]
}

pub fn write_hopf(path: &Path, orders: &OrderSpec, solutions: &[HopfSolution]) -> Result<(), OutputError> {
    write_rows(path, &HOPF_HEADER, solutions.iter().map(|s| hopf_row(orders, s)))
}

/// Flat key=value block describing a Hopf solution.
pub fn hopf_block(orders: &OrderSpec, s: &HopfSolution) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    kv("branch", s.branch.to_string());
    kv("orders", orders.to_string());
    kv("gamma_H", float(s.modulus));
    kv("epsilon_H", float(s.epsilon));
    kv("theta_over_pi", float(s.theta.turns()));
    kv("eigenvalue_modulus", float(s.eigenvalue_modulus()));
    kv("residual_re", float(s.residual_re));
    kv("residual_im", float(s.residual_im));
    if let Some(report) = &s.sign_report {
        kv("lift_case", format!("{:?}", report.case));
        kv("argument_position", format!("{:?}", report.position));
        kv("coefficient_signs", report.sign_string());
        kv("sign_inversions", report.inversions.to_string());
    }
    out
}

/// Writes `key=value` lines in the given order.
pub fn write_key_values(path: &Path, pairs: &[(&str, String)]) -> Result<(), OutputError> {
    let mut w = BufWriter::new(File::create(path).map_err(at(path))?);
    for (k, v) in pairs {
        writeln!(w, "{k}={v}").map_err(at(path))?;
    }
    w.flush().map_err(at(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), OutputError> {
    std::fs::write(path, text).map_err(at(path))
}
