//! Caputo predictor-corrector integration of fractional systems.
//!
//! Each equation carries its own order and weight table. The history
//! convolution is evaluated directly, so a run of `N` steps costs `O(N²)`
//! unless a short-memory window bounds it.

mod kernel;
mod tangent;
mod weights;

pub use tangent::{gram_schmidt, TangentLog};
pub use weights::{abm_weights, AbmWeights};

use crate::error::{Error, Result};
use crate::model::{jacobian, vector_field, JerkParams, OrderSpec};
use kernel::Kernel;

/// A fractional system `D^α u = F(u)` of dimension `N`.
pub trait FractionalSystem<const N: usize> {
    fn rhs(&self, state: &[f64; N]) -> [f64; N];

    /// `∂F/∂u`, row-major.
    fn jacobian(&self, state: &[f64; N]) -> [[f64; N]; N];
}

impl FractionalSystem<3> for JerkParams {
    fn rhs(&self, state: &[f64; 3]) -> [f64; 3] {
        vector_field(self, *state)
    }

    fn jacobian(&self, state: &[f64; 3]) -> [[f64; 3]; 3] {
        let j = jacobian(self, *state);
        [0, 1, 2].map(|r| [j[(r, 0)], j[(r, 1)], j[(r, 2)]])
    }
}

/// Scalar linear test equation `D^α u = rate · u`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarLinear {
    pub rate: f64,
}

impl FractionalSystem<1> for ScalarLinear {
    fn rhs(&self, state: &[f64; 1]) -> [f64; 1] {
        [self.rate * state[0]]
    }

    fn jacobian(&self, _state: &[f64; 1]) -> [[f64; 1]; 1] {
        [[self.rate]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryPolicy {
    Full,
    /// Only the most recent `window` time units of history enter the convolution.
    ShortMemory { window: f64 },
}

/// How the history sums are evaluated. Both give the same scheme; `Fft`
/// replaces the O(N²) direct sums by blocked FFT convolutions, O(N log² N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistoryEval {
    Direct,
    #[default]
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig<const N: usize = 3> {
    pub h: f64,
    pub t_end: f64,
    pub memory: MemoryPolicy,
    pub initial_state: [f64; N],
    pub history: HistoryEval,
}

impl Default for SolveConfig<3> {
    fn default() -> Self {
        SolveConfig {
            h: 0.005,
            t_end: 300.0,
            memory: MemoryPolicy::Full,
            initial_state: [0.0; 3],
            history: HistoryEval::Fft,
        }
    }
}

impl<const N: usize> SolveConfig<N> {
    pub fn new(h: f64, t_end: f64, initial_state: [f64; N]) -> Self {
        SolveConfig { h, t_end, memory: MemoryPolicy::Full, initial_state, history: HistoryEval::Fft }
    }

    pub fn with_memory(mut self, memory: MemoryPolicy) -> Self {
        self.memory = memory;
        self
    }

    pub fn with_history(mut self, history: HistoryEval) -> Self {
        self.history = history;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidConfig(format!("step h must be positive, got {}", self.h)));
        }
        if !(self.t_end >= self.h && self.t_end.is_finite()) {
            return Err(Error::InvalidConfig(format!("t_end = {} must be at least h = {}", self.t_end, self.h)));
        }
        if let MemoryPolicy::ShortMemory { window } = self.memory {
            if !(window >= 10.0 * self.h) {
                return Err(Error::InvalidConfig(format!("memory window {window} is shorter than 10·h")));
            }
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("initial state must be finite".into()));
        }
        Ok(())
    }

    /// Number of steps taken, `round(t_end / h)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.h).round().max(1.0) as usize
    }

    fn window_steps(&self) -> Option<usize> {
        match self.memory {
            MemoryPolicy::Full => None,
            MemoryPolicy::ShortMemory { window } => Some((window / self.h).round() as usize),
        }
    }
}

/// Uniformly sampled solution, `times[k] = k·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize = 3> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub config: SolveConfig<N>,
    /// Per-equation orders used.
    pub alphas: [f64; N],
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.config.h
    }

    /// One coordinate of the state over time.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    for &a in alphas {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::OrderOutOfRange(a.to_string()));
        }
    }
    Ok(())
}

/// Integrates the jerk system with the given orders.
pub fn integrate(params: &JerkParams, orders: &OrderSpec, cfg: &SolveConfig) -> Result<Trajectory> {
    orders.validate()?;
    integrate_system(params, orders.alphas(), cfg)
}

/// Integrates any [`FractionalSystem`] with per-equation orders.
pub fn integrate_system<S: FractionalSystem<N>, const N: usize>(
    system: &S,
    alphas: [f64; N],
    cfg: &SolveConfig<N>,
) -> Result<Trajectory<N>> {
    cfg.validate()?;
    check_alphas(&alphas)?;
    let steps = cfg.steps();
    let mut kernel = Kernel::new(&alphas, cfg.h, steps, cfg.window_steps(), cfg.initial_state.to_vec(), cfg.history)?;
    let mut rhs = |y: &[f64], out: &mut [f64]| {
        let s: [f64; N] = y.try_into().expect("state dimension");
        out.copy_from_slice(&system.rhs(&s));
    };
    kernel.start(&mut rhs);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(cfg.initial_state);
    let mut next = [0.0; N];
    for k in 0..steps {
        kernel.step(k, &mut rhs, &mut next)?;
        times.push((k + 1) as f64 * cfg.h);
        states.push(next);
    }
    Ok(Trajectory { times, states, config: *cfg, alphas })
}

/// Integrates the jerk system together with three tangent vectors.
pub fn integrate_with_tangent(
    params: &JerkParams,
    orders: &OrderSpec,
    cfg: &SolveConfig,
    renorm_every: usize,
) -> Result<(Trajectory, TangentLog)> {
    orders.validate()?;
    integrate_system_with_tangent(params, orders.alphas(), cfg, renorm_every)
}

/// Co-integrates `N` tangent vectors of the variational equation
/// `D^α δ = J(u(t)) δ` alongside the state, starting from the identity basis.
///
/// Every `renorm_every` steps the tangent basis is re-orthonormalised by
/// Gram–Schmidt, `Δ = Q·R`. The variational equation is linear, so the whole
/// tangent history (initial value and stored right-hand sides) is mapped by
/// `R⁻¹` as well; the memory term then continues from the orthonormal basis
/// without a jump. The log diagonal of `R` is recorded per renormalisation.
pub fn integrate_system_with_tangent<S: FractionalSystem<N>, const N: usize>(
    system: &S,
    alphas: [f64; N],
    cfg: &SolveConfig<N>,
    renorm_every: usize,
) -> Result<(Trajectory<N>, TangentLog<N>)> {
    cfg.validate()?;
    check_alphas(&alphas)?;
    if renorm_every == 0 {
        return Err(Error::InvalidConfig("renormalisation interval must be at least one step".into()));
    }
    let steps = cfg.steps();
    let dim = N + N * N;

    // tangent vector v occupies components N + v·N .. N + (v+1)·N
    let mut aug_alphas = alphas.to_vec();
    for _ in 0..N {
        aug_alphas.extend_from_slice(&alphas);
    }
    let mut y0 = cfg.initial_state.to_vec();
    for v in 0..N {
        for i in 0..N {
            y0.push(if i == v { 1.0 } else { 0.0 });
        }
    }
    let mut kernel = Kernel::new(&aug_alphas, cfg.h, steps, cfg.window_steps(), y0, cfg.history)?;
    let mut rhs = |y: &[f64], out: &mut [f64]| {
        let s: [f64; N] = y[..N].try_into().expect("state dimension");
        out[..N].copy_from_slice(&system.rhs(&s));
        let jac = system.jacobian(&s);
        for v in 0..N {
            let delta = &y[N + v * N..N + (v + 1) * N];
            for i in 0..N {
                out[N + v * N + i] = (0..N).map(|l| jac[i][l] * delta[l]).sum();
            }
        }
    };
    kernel.start(&mut rhs);

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(cfg.initial_state);
    let mut log = TangentLog::default();
    let mut next = vec![0.0; dim];
    for k in 0..steps {
        kernel.step(k, &mut rhs, &mut next)?;
        let t = (k + 1) as f64 * cfg.h;
        times.push(t);
        states.push(next[..N].try_into().expect("state dimension"));
        if (k + 1) % renorm_every == 0 {
            let basis: Vec<[f64; N]> =
                (0..N).map(|v| next[N + v * N..N + (v + 1) * N].try_into().expect("tangent dimension")).collect();
            let qr = gram_schmidt(&basis);
            let mut logs = [0.0; N];
            for (v, slot) in logs.iter_mut().enumerate() {
                let r = qr.r[v][v];
                if !(r > 1e-300) || !r.is_finite() {
                    return Err(Error::TangentCollapse { time: t, direction: v });
                }
                *slot = r.ln();
            }
            let rinv = invert_upper(&qr.r);
            let mut flat = vec![0.0; N * N];
            for v in 0..N {
                for w in 0..N {
                    flat[v * N + w] = rinv[v][w];
                }
            }
            kernel.transform_columns(N, N, &flat);
            for v in 0..N {
                next[N + v * N..N + (v + 1) * N].copy_from_slice(&qr.q[v]);
            }
            log.push(t, logs, &qr.q);
        }
    }
    Ok((Trajectory { times, states, config: *cfg, alphas }, log))
}

fn invert_upper<const N: usize>(r: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut inv = [[0.0; N]; N];
    for col in 0..N {
        for row in (0..=col).rev() {
            let mut s = if row == col { 1.0 } else { 0.0 };
            for k in row + 1..=col {
                s -= r[row][k] * inv[k][col];
            }
            inv[row][col] = s / r[row][row];
        }
    }
    inv
}
