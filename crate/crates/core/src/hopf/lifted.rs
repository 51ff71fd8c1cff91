//! Critical values for per-equation rational orders.
//!
//! With `M = lcm` of the order denominators and `(p, q, m) = M·(α₁, α₂, α₃)`,
//! the substitution `w = λ^{1/M}` turns the characteristic equation into
//!
//! ```text
//! w^{p+q+m} + aε·w^{p+q} + b·w^p + σ·2ε = 0
//! ```
//!
//! whose boundary roots are `w = r·e^{iθ}`, `θ = π/(2M)`. Eliminating ε
//! between the real and imaginary parts leaves the sparse polynomial
//!
//! ```text
//! a·sin(mθ)·r^{2p+2q+m} − ab·sin(qθ)·r^{2p+q} + σ·2·sin((p+q+m)θ)·r^{p+q+m} + σ·2b·sin(pθ)·r^p
//! ```
//!
//! and `ε = −(r^{p+q+m}cos((p+q+m)θ) + b·r^p·cos(pθ)) / (a·r^{p+q}cos((p+q)θ) + σ·2)`.

use std::fmt;

use roots::{find_root_brent, SimpleConvergency};

use super::{critical_quotient, HopfSolution, ImaginaryPart, Quotient, DENOMINATOR_GUARD};
use crate::angle::PiAngle;
use crate::error::{Error, Result};
use crate::model::{reduce_orders, Branch, JerkParams, OrderSpec, ReducedOrders};

/// Coefficients smaller than this make the sign pattern ambiguous.
const ZERO_COEFFICIENT: f64 = 1e-14;
/// Powers above this degree are evaluated through logarithms.
const LOG_FORM_DEGREE: u64 = 300;
const SCAN_POINTS: usize = 4096;
/// Largest acceptable `|poly(r)| / max term` at a returned root.
const ROOT_RESIDUAL: f64 = 1e-9;

/// Polynomial with few nonzero terms and possibly large exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    /// `(exponent, coefficient)`, exponents strictly descending.
    pub terms: Vec<(u64, f64)>,
    pub theta: PiAngle,
}

impl SparsePoly {
    pub fn new(mut terms: Vec<(u64, f64)>, theta: PiAngle) -> Self {
        terms.sort_by(|x, y| y.0.cmp(&x.0));
        terms.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1;
                true
            } else {
                false
            }
        });
        SparsePoly { terms, theta }
    }

    pub fn degree(&self) -> u64 {
        self.terms.first().map_or(0, |t| t.0)
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.1).collect()
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|&(n, c)| c * power(r, n)).sum()
    }

    /// `poly(e^t) / max_i |c_i·e^{n_i·t}|`, finite for any `t`.
    pub fn eval_scaled_log(&self, t: f64) -> f64 {
        let logs: Vec<f64> = self.terms.iter().map(|&(n, c)| n as f64 * t + c.abs().ln()).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.terms
            .iter()
            .zip(&logs)
            .map(|(&(_, c), l)| c.signum() * (l - top).exp())
            .sum()
    }

    /// Dense coefficients from the highest power down.
    pub fn to_dense(&self) -> Vec<f64> {
        let deg = self.degree() as usize;
        let mut out = vec![0.0; deg + 1];
        for &(n, c) in &self.terms {
            out[deg - n as usize] += c;
        }
        out
    }
}

fn power(r: f64, n: u64) -> f64 {
    if n > LOG_FORM_DEGREE || n > i32::MAX as u64 {
        (n as f64 * r.ln()).exp()
    } else {
        r.powi(n as i32)
    }
}

/// Real and imaginary parts of the lifted characteristic polynomial at `r·e^{iθ}`.
pub fn polar_residual_lifted(params: &JerkParams, reduced: &ReducedOrders, branch: Branch, r: f64) -> (f64, f64) {
    let JerkParams { a, b, epsilon } = *params;
    let ReducedOrders { p, q, m, theta, .. } = *reduced;
    let total = p + q + m;
    let terms = [(total, 1.0), (p + q, a * epsilon), (p, b)];
    let (mut re, mut im) = (branch.sigma() * 2.0 * epsilon, 0.0);
    for (n, c) in terms {
        let mag = c * power(r, n);
        re += mag * theta.times(n).cos();
        im += mag * theta.times(n).sin();
    }
    (re, im)
}

/// ε at which a boundary root of modulus `gamma` exists.
pub fn critical_epsilon_lifted(a: f64, b: f64, reduced: &ReducedOrders, gamma: f64, branch: Branch) -> Result<f64> {
    let (numerator, denominator, _) = epsilon_parts(a, b, reduced, gamma, branch);
    if denominator.abs() < DENOMINATOR_GUARD {
        return Err(Error::ExcludedDenominator { denominator });
    }
    Ok(if numerator == 0.0 { 0.0 } else { -numerator / denominator })
}

/// Numerator and denominator of the ε quotient, and the imaginary part of
/// the characteristic equation split by its dependence on ε.
fn epsilon_parts(a: f64, b: f64, reduced: &ReducedOrders, gamma: f64, branch: Branch) -> (f64, f64, ImaginaryPart) {
    let ReducedOrders { p, q, m, theta, .. } = *reduced;
    let total = p + q + m;
    let denominator = a * power(gamma, p + q) * theta.times(p + q).cos() + branch.sigma() * 2.0;
    let (high, low) = (power(gamma, total), b * power(gamma, p));
    let numerator = high * theta.times(total).cos() + low * theta.times(p).cos();
    let im = ImaginaryPart {
        free: high * theta.times(total).sin() + low * theta.times(p).sin(),
        slope: a * power(gamma, p + q) * theta.times(p + q).sin(),
        scale: high + low.abs(),
    };
    (numerator, denominator, im)
}

/// The polynomial in `r` left after eliminating ε. When `p = m` two terms
/// share an exponent; they are merged and the common factor `r^p` removed.
pub fn critical_polynomial(a: f64, b: f64, reduced: &ReducedOrders, branch: Branch) -> SparsePoly {
    let ReducedOrders { p, q, m, theta, .. } = *reduced;
    let sigma = branch.sigma();
    let total = p + q + m;
    let sin = |k: u64| theta.times(k).sin();
    if p == m {
        return SparsePoly::new(
            vec![
                (2 * p + 2 * q, a * sin(p)),
                (p + q, -a * b * sin(q) + sigma * 2.0 * sin(total)),
                (0, sigma * 2.0 * b * sin(p)),
            ],
            theta,
        );
    }
    SparsePoly::new(
        vec![
            (2 * p + 2 * q + m, a * sin(m)),
            (2 * p + q, -a * b * sin(q)),
            (total, sigma * 2.0 * sin(total)),
            (p, sigma * 2.0 * b * sin(p)),
        ],
        theta,
    )
}

/// How the first and third lifted orders compare; this fixes the order in
/// which the middle terms of the critical polynomial appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftCase {
    /// `p > m`
    FirstExceedsThird,
    /// `p < m`
    ThirdExceedsFirst,
    /// `p = m`
    Equal,
}

impl fmt::Display for LiftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiftCase::FirstExceedsThird => "p>m",
            LiftCase::ThirdExceedsFirst => "p<m",
            LiftCase::Equal => "p=m",
        })
    }
}

/// Position of `(p+q+m)θ` relative to π.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgumentPosition {
    BelowPi,
    AtPi,
    AbovePi,
}

impl fmt::Display for ArgumentPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgumentPosition::BelowPi => "below_pi",
            ArgumentPosition::AtPi => "at_pi",
            ArgumentPosition::AbovePi => "above_pi",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignCaseReport {
    pub case: LiftCase,
    pub position: ArgumentPosition,
    /// Signs (+1/−1) of the coefficients by descending exponent.
    pub signs: Vec<i8>,
    pub inversions: usize,
    /// Exactly one sign change, so exactly one positive root.
    pub positive_root_guaranteed: bool,
}

impl SignCaseReport {
    pub fn sign_string(&self) -> String {
        self.signs.iter().map(|s| if *s > 0 { '+' } else { '-' }).collect()
    }
}

/// Descartes sign count of the critical polynomial.
pub fn sign_change_analysis(poly: &SparsePoly, reduced: &ReducedOrders) -> Result<SignCaseReport> {
    for &(exponent, value) in &poly.terms {
        if value.abs() < ZERO_COEFFICIENT {
            return Err(Error::ZeroCoefficient { exponent, value });
        }
    }
    let case = match reduced.p.cmp(&reduced.m) {
        std::cmp::Ordering::Greater => LiftCase::FirstExceedsThird,
        std::cmp::Ordering::Less => LiftCase::ThirdExceedsFirst,
        std::cmp::Ordering::Equal => LiftCase::Equal,
    };
    // (p+q+m)·π/(2M) against π
    let position = match reduced.total().cmp(&(2 * reduced.lcm)) {
        std::cmp::Ordering::Less => ArgumentPosition::BelowPi,
        std::cmp::Ordering::Equal => ArgumentPosition::AtPi,
        std::cmp::Ordering::Greater => ArgumentPosition::AbovePi,
    };
    let signs: Vec<i8> = poly.terms.iter().map(|t| if t.1 > 0.0 { 1 } else { -1 }).collect();
    let inversions = signs.windows(2).filter(|w| w[0] != w[1]).count();
    Ok(SignCaseReport { case, position, signs, inversions, positive_root_guaranteed: inversions == 1 })
}

/// Smallest positive root of the critical polynomial.
///
/// The search runs in `t = ln r` between the Cauchy bounds of the
/// polynomial and its reversal, using the scaled evaluation so that large
/// exponents neither overflow nor underflow; the first sign change on a
/// uniform grid is refined with Brent's method.
pub fn critical_modulus_lifted(a: f64, b: f64, reduced: &ReducedOrders, branch: Branch) -> Result<f64> {
    smallest_positive_root(&critical_polynomial(a, b, reduced, branch))
}

fn smallest_positive_root(poly: &SparsePoly) -> Result<f64> {
    let (roots, lo, hi) = positive_roots(poly)?;
    roots.first().copied().ok_or(Error::NoPositiveRoot { lo, hi })
}

/// Every positive root found by the scan, ascending, with the search bounds.
fn positive_roots(poly: &SparsePoly) -> Result<(Vec<f64>, f64, f64)> {
    let terms: Vec<(u64, f64)> = poly.terms.iter().copied().filter(|t| t.1 != 0.0).collect();
    if terms.len() < 2 {
        return Err(Error::NoPositiveRoot { lo: 0.0, hi: f64::INFINITY });
    }
    let lead = terms[0].1.abs();
    let low = terms[terms.len() - 1].1.abs();
    let max_but_lead = terms[1..].iter().map(|t| t.1.abs()).fold(0.0, f64::max);
    let max_but_low = terms[..terms.len() - 1].iter().map(|t| t.1.abs()).fold(0.0, f64::max);
    let hi = 1.0 + max_but_lead / lead;
    let lo = low / (low + max_but_low);
    let poly = SparsePoly { terms, theta: poly.theta };

    let (t_lo, t_hi) = (lo.ln(), hi.ln());
    let g = |t: f64| poly.eval_scaled_log(t);
    let step = (t_hi - t_lo) / SCAN_POINTS as f64;
    let mut roots = Vec::new();
    let mut t_prev = t_lo;
    let mut g_prev = g(t_prev);
    for i in 1..=SCAN_POINTS {
        let t = if i == SCAN_POINTS { t_hi } else { t_lo + step * i as f64 };
        let gt = g(t);
        if g_prev == 0.0 {
            roots.push(t_prev.exp());
        } else if g_prev * gt < 0.0 {
            let mut conv = SimpleConvergency { eps: 1e-15, max_iter: 200 };
            let root = find_root_brent(t_prev, t, g, &mut conv).map_err(|_| Error::NoPositiveRoot { lo, hi })?;
            if g(root).abs() > ROOT_RESIDUAL {
                return Err(Error::NoPositiveRoot { lo, hi });
            }
            roots.push(root.exp());
        }
        t_prev = t;
        g_prev = gt;
    }
    if g_prev == 0.0 {
        roots.push(t_prev.exp());
    }
    Ok((roots, lo, hi))
}

/// Whether the orders fall under one of the two cases for which the
/// existence of a critical root is established: `p ≥ m`, or `m > p` with
/// `(p+q+m)θ ≤ π`.
pub fn lift_case_supported(reduced: &ReducedOrders) -> bool {
    reduced.p >= reduced.m || reduced.total() <= 2 * reduced.lcm
}

/// Critical `(γ, ε)` for rational per-equation orders. Requires `a > 0`,
/// `b > 0`.
pub fn hopf_incommensurate(a: f64, b: f64, orders: &OrderSpec, branch: Branch) -> Result<HopfSolution> {
    JerkParams::new(a, b, 0.0).check_analysis()?;
    if b <= 0.0 {
        return Err(Error::InvalidParams(format!("b must be positive, got {b}")));
    }
    let reduced = reduce_orders(orders)?;
    if !lift_case_supported(&reduced) {
        return Err(Error::CaseNotSatisfied(format!(
            "m = {} > p = {} and (p+q+m)θ = {}π/{} exceeds π",
            reduced.m,
            reduced.p,
            reduced.total(),
            2 * reduced.lcm
        )));
    }
    let poly = critical_polynomial(a, b, &reduced, branch);
    let report = sign_change_analysis(&poly, &reduced)?;
    let (roots, lo, hi) = positive_roots(&poly)?;
    let mut found = None;
    let mut vanishing = None;
    for gamma in roots {
        let (numerator, denominator, im) = epsilon_parts(a, b, &reduced, gamma, branch);
        match critical_quotient(numerator, denominator, im) {
            Quotient::Value(epsilon) => {
                found = Some((gamma, epsilon));
                break;
            }
            Quotient::Spurious => vanishing = Some(denominator),
            Quotient::Excluded => return Err(Error::ExcludedDenominator { denominator }),
        }
    }
    let Some((modulus, epsilon)) = found else {
        return Err(match vanishing {
            Some(denominator) => Error::ExcludedDenominator { denominator },
            None => Error::NoPositiveRoot { lo, hi },
        });
    };
    let (residual_re, residual_im) = polar_residual_lifted(&JerkParams::new(a, b, epsilon), &reduced, branch, modulus);
    Ok(HopfSolution {
        modulus,
        epsilon,
        theta: reduced.theta,
        branch,
        residual_re,
        residual_im,
        modulus_power: reduced.lcm as f64,
        sign_report: Some(report),
    })
}
