use rayon::prelude::*;

use super::extrema::{extract_extrema, Extrema};
use super::lyapunov::{lyapunov_spectrum, LyapunovConfig, LyapunovSpectrum};
use super::{classify_attractor, AttractorKind};
use crate::error::{Error, Result};
use crate::model::{JerkParams, OrderSpec};
use crate::solver::{integrate, SolveConfig};

/// Environment variable overriding the sweep worker count.
pub const THREADS_ENV: &str = "FJERK_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub transient_fraction: f64,
    /// Also estimate the Lyapunov spectrum at each grid point.
    pub lyapunov: Option<LyapunovConfig>,
    /// Worker threads; `None` defers to [`worker_count`].
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { transient_fraction: 0.3, lyapunov: None, threads: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointResult {
    Completed {
        extrema: Extrema,
        spectrum: Option<LyapunovSpectrum>,
        kind: AttractorKind,
    },
    Diverged {
        time: f64,
    },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub result: PointResult,
}

impl SweepPoint {
    pub fn extrema(&self) -> Option<&Extrema> {
        match &self.result {
            PointResult::Completed { extrema, .. } => Some(extrema),
            _ => None,
        }
    }

    pub fn spectrum(&self) -> Option<&LyapunovSpectrum> {
        match &self.result {
            PointResult::Completed { spectrum, .. } => spectrum.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ascending in ε.
    pub points: Vec<SweepPoint>,
    pub params: JerkParams,
    pub orders: OrderSpec,
    pub solve: SolveConfig,
    pub sweep: SweepConfig,
}

impl SweepResult {
    pub fn epsilon_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.epsilon).collect()
    }
}

/// Worker count from [`THREADS_ENV`], else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `n` uniformly spaced values from `lo` to `hi` inclusive.
pub fn epsilon_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

/// Runs one integration per ε on a uniform grid, in parallel. Each run is
/// sequential and independent, so the result does not depend on the worker
/// count. Per-point failures are recorded, not propagated.
pub fn sweep_bifurcation(
    base: &JerkParams,
    orders: &OrderSpec,
    eps_range: (f64, f64),
    n_points: usize,
    cfg: &SolveConfig,
    sweep: &SweepConfig,
) -> Result<SweepResult> {
    let (lo, hi) = eps_range;
    if n_points == 0 {
        return Err(Error::InvalidConfig("sweep needs at least one point".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo || (n_points > 1 && hi == lo) {
        return Err(Error::InvalidConfig(format!("ε range [{lo}, {hi}] must be ascending")));
    }
    orders.validate()?;
    cfg.validate()?;
    if !(0.0..1.0).contains(&sweep.transient_fraction) {
        return Err(Error::InvalidConfig(format!("transient fraction {} outside [0, 1)", sweep.transient_fraction)));
    }
    let grid = epsilon_grid(lo, hi, n_points);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.threads.filter(|n| *n > 0).unwrap_or_else(worker_count))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        grid.par_iter()
            .map(|&epsilon| SweepPoint {
                epsilon,
                result: run_point(&base.with_epsilon(epsilon), orders, cfg, sweep),
            })
            .collect::<Vec<_>>()
    });
    Ok(SweepResult { points, params: *base, orders: orders.clone(), solve: *cfg, sweep: *sweep })
}

fn run_point(params: &JerkParams, orders: &OrderSpec, cfg: &SolveConfig, sweep: &SweepConfig) -> PointResult {
    let outcome = match &sweep.lyapunov {
        Some(lcfg) => lyapunov_spectrum(params, orders, cfg, lcfg).map(|(t, s)| (t, Some(s))),
        None => integrate(params, orders, cfg).map(|t| (t, None)),
    };
    match outcome {
        Ok((traj, spectrum)) => match extract_extrema(&traj, sweep.transient_fraction) {
            Ok(extrema) => {
                let kind = classify_attractor(Some(&extrema), spectrum.as_ref());
                PointResult::Completed { extrema, spectrum, kind }
            }
            Err(e) => PointResult::Failed(e.to_string()),
        },
        Err(Error::Divergence { time }) => PointResult::Diverged { time },
        Err(e) => PointResult::Failed(e.to_string()),
    }
}
