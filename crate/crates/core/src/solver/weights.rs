//! Product-integration weights of the fractional Adams–Bashforth–Moulton
//! scheme for the kernel `(t − τ)^(α−1) / Γ(α)`.
//!
//! Computing `y_{k+1}` from the history `f_0 … f_k`:
//!
//! ```text
//! predictor:  y0 + P · Σ_{j=0..k}  B_{k−j} f_j                 P = h^α / Γ(α+1)
//! corrector:  y0 + C · (f^P_{k+1} + S_k f_0 + Σ_{j=1..k} A_{k−j} f_j)
//!                                                             C = h^α / Γ(α+2)
//! B_i = (i+1)^α − i^α
//! A_i = (i+2)^(α+1) + i^(α+1) − 2(i+1)^(α+1)
//! S_k = k^(α+1) − (k−α)(k+1)^α
//! ```
//!
//! `A_i` and `S_k` are second differences of a power and lose most of their
//! digits to cancellation for large indices, so past [`SERIES_FROM`] they
//! are evaluated from binomial series in `1/i`.

use crate::error::{Error, Result};

const SERIES_FROM: usize = 16;

/// Weight tables for one order α, precomputed up to a step count.
#[derive(Debug, Clone)]
pub struct AbmWeights {
    alpha: f64,
    h: f64,
    predictor_scale: f64,
    corrector_scale: f64,
    b: Vec<f64>,
    a: Vec<f64>,
}

impl AbmWeights {
    pub fn new(alpha: f64, n: usize, h: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::OrderOutOfRange(alpha.to_string()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {h}")));
        }
        let len = n.max(1);
        Ok(AbmWeights {
            alpha,
            h,
            predictor_scale: h.powf(alpha) / libm::tgamma(alpha + 1.0),
            corrector_scale: h.powf(alpha) / libm::tgamma(alpha + 2.0),
            b: (0..len).map(|i| rectangle_coeff(alpha, i)).collect(),
            a: (0..len).map(|i| trapezoid_coeff(alpha, i)).collect(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// Scaled predictor weight `P·B_i` on `f_{k−i}`.
    pub fn predictor(&self, i: usize) -> f64 {
        self.predictor_scale * self.b[i]
    }

    /// Scaled corrector weight `C·A_i` on `f_{k−i}`, for `k − i ≥ 1`.
    pub fn corrector(&self, i: usize) -> f64 {
        self.corrector_scale * self.a[i]
    }

    /// Scaled corrector weight `C·S_k` on `f_0` when computing `y_{k+1}`.
    pub fn corrector_start(&self, k: usize) -> f64 {
        self.corrector_scale * start_coeff(self.alpha, k)
    }

    /// Scaled corrector weight `C` on the predicted value `f^P_{k+1}`.
    pub fn corrector_self(&self) -> f64 {
        self.corrector_scale
    }

    /// All predictor weights, index `i` multiplying `f_{k−i}`.
    pub fn predictor_weights(&self) -> Vec<f64> {
        self.b.iter().map(|w| w * self.predictor_scale).collect()
    }

    /// All interior corrector weights, index `i` multiplying `f_{k−i}`.
    pub fn corrector_weights(&self) -> Vec<f64> {
        self.a.iter().map(|w| w * self.corrector_scale).collect()
    }

    pub(crate) fn raw_predictor(&self) -> &[f64] {
        &self.b
    }

    pub(crate) fn raw_corrector(&self) -> &[f64] {
        &self.a
    }

    pub(crate) fn predictor_scale(&self) -> f64 {
        self.predictor_scale
    }

    pub(crate) fn corrector_scale(&self) -> f64 {
        self.corrector_scale
    }
}

/// Predictor and corrector weight sequences for `n` history points.
pub fn abm_weights(alpha: f64, n: usize, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = AbmWeights::new(alpha, n, h)?;
    Ok((w.predictor_weights(), w.corrector_weights()))
}

/// `(i+1)^α − i^α`
fn rectangle_coeff(alpha: f64, i: usize) -> f64 {
    if i == 0 {
        return 1.0;
    }
    let x = i as f64;
    x.powf(alpha) * (alpha * (1.0 / x).ln_1p()).exp_m1()
}

/// `(i+2)^β + i^β − 2(i+1)^β` with `β = α + 1`.
fn trapezoid_coeff(alpha: f64, i: usize) -> f64 {
    let beta = alpha + 1.0;
    if i < SERIES_FROM {
        let x = i as f64;
        return (x + 2.0).powf(beta) + x.powf(beta) - 2.0 * (x + 1.0).powf(beta);
    }
    // (i+1)^β · [(1+u)^β + (1−u)^β − 2] = (i+1)^β · 2 Σ_{j≥1} C(β,2j) u^{2j}
    let x = i as f64 + 1.0;
    let u = 1.0 / x;
    let u2 = u * u;
    let mut binom = 1.0;
    let mut pow = 1.0;
    let mut sum = 0.0;
    let mut k = 0.0;
    loop {
        binom *= (beta - k) / (k + 1.0);
        binom *= (beta - k - 1.0) / (k + 2.0);
        k += 2.0;
        pow *= u2;
        let term = binom * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || k > 60.0 {
            break;
        }
    }
    x.powf(beta) * 2.0 * sum
}

/// `k^(α+1) − (k−α)(k+1)^α`.
fn start_coeff(alpha: f64, k: usize) -> f64 {
    if k < SERIES_FROM {
        let x = k as f64;
        return x.powf(alpha + 1.0) - (x - alpha) * (x + 1.0).powf(alpha);
    }
    // k^(α+1) · g(1/k),  g(u) = −Σ_{j≥2} [C(α,j) − α·C(α,j−1)] u^j
    let x = k as f64;
    let u = 1.0 / x;
    let mut prev = alpha; // C(α,1)
    let mut pow = u;
    let mut sum = 0.0;
    let mut j = 2.0;
    loop {
        let cur = prev * (alpha - (j - 1.0)) / j;
        pow *= u;
        let term = -(cur - alpha * prev) * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || j > 60.0 {
            break;
        }
        prev = cur;
        j += 1.0;
    }
    x.powf(alpha + 1.0) * sum
}
