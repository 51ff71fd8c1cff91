use crate::error::{Error, Result};
use crate::model::{JerkParams, OrderSpec};
use crate::solver::{integrate_system_with_tangent, FractionalSystem, SolveConfig, TangentLog, Trajectory};

/// Shortest horizon for which exponents are estimated.
const MIN_HORIZON: f64 = 100.0;
/// Largest change of the running λ₁ over the last quarter for a converged estimate.
const DRIFT_TOLERANCE: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovConfig {
    /// Steps between Gram–Schmidt renormalisations.
    pub renorm_every: usize,
    /// Leading fraction of the horizon excluded from the averages.
    pub transient_fraction: f64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig { renorm_every: 100, transient_fraction: 0.3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSpectrum<const N: usize = 3> {
    /// Descending.
    pub exponents: [f64; N],
    /// Length of the averaging window.
    pub t_span: f64,
    pub renorm_count: usize,
    /// Spread of the running λ₁ estimate over the last quarter of the window.
    pub drift: f64,
    pub converged: bool,
}

/// Lyapunov spectrum of the jerk system from the tangent-space integration.
pub fn lyapunov_spectrum(
    params: &JerkParams,
    orders: &OrderSpec,
    cfg: &SolveConfig,
    lcfg: &LyapunovConfig,
) -> Result<(Trajectory, LyapunovSpectrum)> {
    orders.validate()?;
    lyapunov_spectrum_system(params, orders.alphas(), cfg, lcfg)
}

pub fn lyapunov_spectrum_system<S: FractionalSystem<N>, const N: usize>(
    system: &S,
    alphas: [f64; N],
    cfg: &SolveConfig<N>,
    lcfg: &LyapunovConfig,
) -> Result<(Trajectory<N>, LyapunovSpectrum<N>)> {
    if cfg.t_end < MIN_HORIZON {
        return Err(Error::InvalidConfig(format!(
            "Lyapunov horizon {} is shorter than {MIN_HORIZON}",
            cfg.t_end
        )));
    }
    if !(0.0..1.0).contains(&lcfg.transient_fraction) {
        return Err(Error::InvalidConfig(format!(
            "transient fraction {} outside [0, 1)",
            lcfg.transient_fraction
        )));
    }
    let (traj, log) = integrate_system_with_tangent(system, alphas, cfg, lcfg.renorm_every)?;
    let spectrum = spectrum_from_log(&log, lcfg.transient_fraction * cfg.t_end)?;
    Ok((traj, spectrum))
}

/// Averages the log stretch factors of renormalisations after `t_skip`.
pub(crate) fn spectrum_from_log<const N: usize>(log: &TangentLog<N>, t_skip: f64) -> Result<LyapunovSpectrum<N>> {
    // the averaging window starts at the last renormalisation inside the transient
    let first = log.renorm_times.iter().position(|t| *t > t_skip).unwrap_or(log.len());
    let t0 = if first == 0 { 0.0 } else { log.renorm_times[first - 1] };
    if log.len() - first < 4 {
        return Err(Error::InvalidConfig("too few renormalisations after the transient".into()));
    }
    let mut sums = [0.0; N];
    let mut running = Vec::with_capacity(log.len() - first);
    for (t, logs) in log.renorm_times[first..].iter().zip(&log.log_norms[first..]) {
        for (s, l) in sums.iter_mut().zip(logs) {
            *s += l;
        }
        running.push(sums[0] / (t - t0));
    }
    let t_span = log.renorm_times[log.len() - 1] - t0;
    let mut exponents = sums.map(|s| s / t_span);
    exponents.sort_by(|x, y| y.total_cmp(x));
    let tail = &running[running.len() - running.len() / 4..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let drift = hi - lo;
    Ok(LyapunovSpectrum {
        exponents,
        t_span,
        renorm_count: log.len() - first,
        drift,
        converged: drift < DRIFT_TOLERANCE,
    })
}
