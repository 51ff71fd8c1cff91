use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::weights::AbmWeights;
use super::HistoryEval;
use crate::error::{Error, Result};

/// Pairs closer than one leaf are summed directly by the FFT engine.
const LEAF: usize = 64;

/// Predictor-corrector stepper over the full (or windowed) history of
/// right-hand-side values. Components may carry different orders.
///
/// A window of `L` steps drops every weight at lag `≥ L`; the integral still
/// starts from `y_0`.
pub(crate) struct Kernel {
    tables: Vec<AbmWeights>,
    table_of: Vec<usize>,
    /// `states[c][j] = y_j` of component `c`.
    states: Vec<Vec<f64>>,
    hist: Vec<Vec<f64>>,
    window: Option<usize>,
    steps: usize,
    h: f64,
    engine: Engine,
    // Unit-order components step locally from their current value (Euler
    // predictor, trapezoid corrector). The product-integration form keeps a
    // permanent O(h·f_0) term in the predictor and cannot resolve solutions
    // that decay below rounding of the initial scale.
    local: Vec<bool>,
    scratch_pred: Vec<f64>,
    scratch_base: Vec<f64>,
    scratch_f: Vec<f64>,
}

enum Engine {
    Direct(Direct),
    Fft(Box<Blocked>),
}

struct Direct {
    // Weights stored back to front so that the weight for f_j at step k is
    // a contiguous slice aligned with the history.
    rev_b: Vec<Vec<f64>>,
    rev_a: Vec<Vec<f64>>,
}

/// Online convolution by dyadic blocks. When step `k` is the midpoint of an
/// aligned block of size `S`, the contributions of `f[k−S/2, k)` to the
/// sums at steps `[k, k+S/2)` are added with one FFT of length `S`. Pairs in
/// the same leaf are summed directly, so every pair `j ≤ k` is counted once.
struct Blocked {
    // window-truncated weights, indexed by lag
    b: Vec<Vec<f64>>,
    a: Vec<Vec<f64>>,
    levels: Vec<Level>,
    acc_b: Vec<Vec<f64>>,
    acc_a: Vec<Vec<f64>>,
    buf: Vec<Complex64>,
    fft_scratch: Vec<Complex64>,
}

struct Level {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // FFT of (b + i·a) over lags [0, size), one per table
    spectra: Vec<Vec<Complex64>>,
}

impl Kernel {
    pub fn new(
        alphas: &[f64],
        h: f64,
        steps: usize,
        window: Option<usize>,
        y0: Vec<f64>,
        eval: HistoryEval,
    ) -> Result<Self> {
        let mut tables: Vec<AbmWeights> = Vec::new();
        let mut table_of = Vec::with_capacity(alphas.len());
        for &alpha in alphas {
            let idx = match tables.iter().position(|t| t.alpha() == alpha) {
                Some(i) => i,
                None => {
                    tables.push(AbmWeights::new(alpha, steps, h)?);
                    tables.len() - 1
                }
            };
            table_of.push(idx);
        }
        let dim = alphas.len();
        let engine = match eval {
            HistoryEval::Direct => Engine::Direct(Direct::new(&tables)),
            HistoryEval::Fft => Engine::Fft(Box::new(Blocked::new(&tables, dim, steps, window))),
        };
        let local = alphas.iter().map(|&alpha| alpha == 1.0).collect();
        let states = y0
            .iter()
            .map(|&y| {
                let mut v = Vec::with_capacity(steps + 1);
                v.push(y);
                v
            })
            .collect();
        Ok(Kernel {
            tables,
            table_of,
            states,
            local,
            hist: (0..dim).map(|_| Vec::with_capacity(steps + 1)).collect(),
            window,
            steps,
            h,
            engine,
            scratch_pred: vec![0.0; dim],
            scratch_base: vec![0.0; dim],
            scratch_f: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Records `f_0 = rhs(y0)`.
    pub fn start<F: FnMut(&[f64], &mut [f64])>(&mut self, rhs: &mut F) {
        let y0: Vec<f64> = self.states.iter().map(|s| s[0]).collect();
        let mut f = vec![0.0; self.dim()];
        rhs(&y0, &mut f);
        for (c, v) in f.into_iter().enumerate() {
            self.hist[c].push(v);
        }
    }

    /// Advances from `y_k` to `y_{k+1}`, writing it into `out`.
    pub fn step<F: FnMut(&[f64], &mut [f64])>(&mut self, k: usize, rhs: &mut F, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(self.hist[0].len(), k + 1);
        if let Engine::Fft(blocked) = &mut self.engine {
            blocked.absorb(k, &self.hist, &self.table_of, &self.local);
        }
        let lo = match self.window {
            Some(len) => (k + 1).saturating_sub(len),
            None => 0,
        };
        for c in 0..self.dim() {
            let t = self.table_of[c];
            let table = &self.tables[t];
            let f = &self.hist[c];
            if self.local[c] {
                let y = self.states[c][k];
                self.scratch_pred[c] = y + self.h * f[k];
                self.scratch_base[c] = y + 0.5 * self.h * f[k];
                continue;
            }
            let (pred, corr) = match &self.engine {
                Engine::Direct(d) => d.sums(t, k, lo, self.steps, f),
                Engine::Fft(blocked) => blocked.sums(t, c, k, f),
            };
            let corr = if lo == 0 { corr + start_weight(table, k) * f[0] } else { corr };
            let base = self.states[c][0];
            self.scratch_pred[c] = base + table.predictor_scale() * pred;
            self.scratch_base[c] = base + table.corrector_scale() * corr;
        }
        rhs(&self.scratch_pred, &mut self.scratch_f);
        for c in 0..self.dim() {
            let table = &self.tables[self.table_of[c]];
            out[c] = self.scratch_base[c] + table.corrector_scale() * self.scratch_f[c];
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: (k + 1) as f64 * self.h });
        }
        rhs(out, &mut self.scratch_f);
        if self.scratch_f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: (k + 1) as f64 * self.h });
        }
        for c in 0..self.dim() {
            self.hist[c].push(self.scratch_f[c]);
            self.states[c].push(out[c]);
        }
        Ok(())
    }

    /// Replaces the `dim` column vectors of size `dim` stored from component
    /// `offset` on by `Δ·T`, in the stored states and right-hand sides. The
    /// recursion is linear in both, so the transformed state is the solution
    /// started from the transformed initial basis.
    pub fn transform_columns(&mut self, offset: usize, dim: usize, t: &[f64]) {
        let len = self.hist[0].len();
        // unit-order components only ever read their latest values
        let from: Vec<usize> = (0..dim).map(|i| if self.local[offset + i] { len - 1 } else { 0 }).collect();
        mix_columns(&mut self.hist, offset, dim, t, &from);
        mix_columns(&mut self.states, offset, dim, t, &from);
        if let Engine::Fft(blocked) = &mut self.engine {
            let from: Vec<usize> = from.iter().map(|&f| if f == 0 { 0 } else { usize::MAX }).collect();
            mix_columns(&mut blocked.acc_b, offset, dim, t, &from);
            mix_columns(&mut blocked.acc_a, offset, dim, t, &from);
        }
    }
}

/// `series[offset + w·n + i][j] ← Σ_v series[offset + v·n + i][j] · t[v·n + w]`
/// for `j ≥ from[i]`.
fn mix_columns(series: &mut [Vec<f64>], offset: usize, n: usize, t: &[f64], from: &[usize]) {
    let mut old = vec![0.0; n];
    for (i, &start) in from.iter().enumerate() {
        let len = series[offset + i].len();
        for j in start.min(len)..len {
            for (v, slot) in old.iter_mut().enumerate() {
                *slot = series[offset + v * n + i][j];
            }
            for w in 0..n {
                series[offset + w * n + i][j] = (0..n).map(|v| old[v] * t[v * n + w]).sum();
            }
        }
    }
}

impl Direct {
    fn new(tables: &[AbmWeights]) -> Self {
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        Direct {
            rev_b: tables.iter().map(|t| rev(t.raw_predictor())).collect(),
            rev_a: tables.iter().map(|t| rev(t.raw_corrector())).collect(),
        }
    }

    /// Predictor sum over `j ∈ [lo, k]` and corrector sum over `j ∈ [max(lo,1), k]`.
    fn sums(&self, t: usize, k: usize, lo: usize, steps: usize, f: &[f64]) -> (f64, f64) {
        let last = steps - 1;
        let pred = dot(&self.rev_b[t][last - k + lo..], &f[lo..=k]);
        let j0 = lo.max(1);
        let corr = if j0 <= k { dot(&self.rev_a[t][last - k + j0..], &f[j0..=k]) } else { 0.0 };
        (pred, corr)
    }
}

impl Blocked {
    fn new(tables: &[AbmWeights], dim: usize, steps: usize, window: Option<usize>) -> Self {
        let truncate = |w: &[f64]| -> Vec<f64> {
            let mut w = w.to_vec();
            if let Some(len) = window {
                w.iter_mut().skip(len).for_each(|v| *v = 0.0);
            }
            w
        };
        let b: Vec<Vec<f64>> = tables.iter().map(|t| truncate(t.raw_predictor())).collect();
        let a: Vec<Vec<f64>> = tables.iter().map(|t| truncate(t.raw_corrector())).collect();

        let mut planner = FftPlanner::new();
        let mut levels = Vec::new();
        let mut scratch_len = 0;
        let mut size = 2 * LEAF;
        while size / 2 < steps {
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            scratch_len = scratch_len.max(forward.get_inplace_scratch_len()).max(inverse.get_inplace_scratch_len());
            let spectra = b
                .iter()
                .zip(&a)
                .map(|(wb, wa)| {
                    let mut s: Vec<Complex64> = (0..size)
                        .map(|i| Complex64::new(wb.get(i).copied().unwrap_or(0.0), wa.get(i).copied().unwrap_or(0.0)))
                        .collect();
                    forward.process(&mut s);
                    s
                })
                .collect();
            levels.push(Level { size, forward, inverse, spectra });
            size *= 2;
        }
        let largest = levels.last().map_or(0, |l| l.size);
        Blocked {
            b,
            a,
            levels,
            acc_b: vec![vec![0.0; steps]; dim],
            acc_a: vec![vec![0.0; steps]; dim],
            buf: vec![Complex64::default(); largest],
            fft_scratch: vec![Complex64::default(); scratch_len],
        }
    }

    /// Adds the block contributions that become available at step `k`.
    fn absorb(&mut self, k: usize, hist: &[Vec<f64>], table_of: &[usize], local: &[bool]) {
        let steps = self.acc_b[0].len();
        for level in &self.levels {
            let half = level.size / 2;
            if k % level.size != half {
                continue;
            }
            let start = k - half;
            let end = (k + half).min(steps);
            let norm = 1.0 / level.size as f64;
            let buf = &mut self.buf[..level.size];
            for (c, f) in hist.iter().enumerate() {
                if local[c] {
                    continue;
                }
                for (dst, src) in buf.iter_mut().zip(&f[start..k]) {
                    *dst = Complex64::new(*src, 0.0);
                }
                buf[half..].fill(Complex64::default());
                level.forward.process_with_scratch(buf, &mut self.fft_scratch);
                for (x, w) in buf.iter_mut().zip(&level.spectra[table_of[c]]) {
                    *x *= w;
                }
                level.inverse.process_with_scratch(buf, &mut self.fft_scratch);
                for kk in k..end {
                    let v = buf[kk - start];
                    self.acc_b[c][kk] += v.re * norm;
                    self.acc_a[c][kk] += v.im * norm;
                }
            }
        }
    }

    /// Same sums as [`Direct::sums`], with the window folded into the weights.
    fn sums(&self, t: usize, c: usize, k: usize, f: &[f64]) -> (f64, f64) {
        let (b, a) = (&self.b[t], &self.a[t]);
        let mut pred = self.acc_b[c][k];
        let mut corr = self.acc_a[c][k];
        for j in k - k % LEAF..=k {
            pred += b[k - j] * f[j];
            corr += a[k - j] * f[j];
        }
        // f_0 carries the start weight instead, added by the caller; beyond
        // the window a[k] is already zero
        corr -= a[k] * f[0];
        (pred, corr)
    }
}

fn start_weight(table: &AbmWeights, k: usize) -> f64 {
    table.corrector_start(k) / table.corrector_scale()
}

/// Dot product over the common prefix with fixed lane order, so results do
/// not depend on the caller's thread or chunking.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive() {
        for n in [0usize, 1, 7, 8, 9, 31, 100] {
            let a: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
            let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            assert!((dot(&a, &b) - naive).abs() < 1e-12);
        }
    }

    fn run(eval: HistoryEval, window: Option<usize>, steps: usize) -> Vec<Vec<f64>> {
        let alphas = [0.6, 0.9];
        let mut kernel = Kernel::new(&alphas, 0.01, steps, window, vec![1.0, 0.5], eval).unwrap();
        let mut rhs = |y: &[f64], out: &mut [f64]| {
            out[0] = -y[0] + 0.3 * y[1];
            out[1] = -0.2 * y[0] - 0.5 * y[1] + (3.0 * y[0]).sin();
        };
        kernel.start(&mut rhs);
        let mut out = vec![0.0; 2];
        (0..steps)
            .map(|k| {
                kernel.step(k, &mut rhs, &mut out).unwrap();
                out.clone()
            })
            .collect()
    }

    #[test]
    fn fft_history_matches_direct() {
        for window in [None, Some(150)] {
            let direct = run(HistoryEval::Direct, window, 1500);
            let fast = run(HistoryEval::Fft, window, 1500);
            for (d, f) in direct.iter().zip(&fast) {
                for (x, y) in d.iter().zip(f) {
                    assert!((x - y).abs() < 1e-11, "{x} vs {y} (window {window:?})");
                }
            }
        }
    }
}
