//! Hopf critical values of the jerk system equilibria.
//!
//! Near `E = (±ε, 0, 0)` the linearisation has characteristic polynomial
//! `s³ + aε·s² + b·s ∓ 2ε` in `s = λ^α`. A root pair crosses the stability
//! boundary when `s = r·e^{iθ}` with `θ = πα/2`; splitting into real and
//! imaginary parts gives two equations in `(r, ε)`:
//!
//! ```text
//! re:  r³cos3θ + aε·r²cos2θ + b·r·cosθ + σ·2ε = 0
//! im:  r³sin3θ + aε·r²sin2θ + b·r·sinθ        = 0
//! ```
//!
//! with `σ = −1` on E₁ and `+1` on E₂. The real part is linear in ε;
//! substituting it into the imaginary part leaves a quadratic in `r²`:
//!
//! ```text
//! a·sinθ·r⁴ + (σ·2·sin3θ − ab·sinθ)·r² + σ·2b·sinθ = 0
//! ε = −(r³cos3θ + b·r·cosθ) / (a·r²cos2θ + σ·2)
//! ```
//!
//! The incommensurate case works the same way after lifting the orders to a
//! common denominator, see [`lifted`].

pub mod lifted;
pub mod stability;

use num_complex::Complex64;

use crate::angle::PiAngle;
use crate::error::{Error, Result};
use crate::model::{Branch, JerkParams};

pub use lifted::{
    critical_epsilon_lifted, critical_modulus_lifted, critical_polynomial, hopf_incommensurate,
    polar_residual_lifted, sign_change_analysis, ArgumentPosition, LiftCase, SignCaseReport, SparsePoly,
};
pub use stability::{classify_stability, stability_from_roots, Stability};

/// Below this `|sin3θ|` the imaginary-part quadratic degenerates (α = 2/3).
const SINGULAR_SIN3: f64 = 1e-12;
/// Commensurate critical values are refused this close to α = 2/3, where
/// the root in `r` runs off to infinity.
const SINGULAR_SIN3_HOPF: f64 = 1e-3;
/// Smallest admissible `|a·r²cos2θ ∓ 2|` in the ε formula.
pub const DENOMINATOR_GUARD: f64 = 1e-10;
const MIN_MODULUS: f64 = 1e-6;

/// Characteristic cubic `λ³ + aε·λ² + b·λ ∓ 2ε` of an equilibrium,
/// coefficients from the cubic term down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicCubic {
    pub coefficients: [f64; 4],
    pub branch: Branch,
}

impl CharacteristicCubic {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

pub fn characteristic_cubic(params: &JerkParams, branch: Branch) -> CharacteristicCubic {
    let JerkParams { a, b, epsilon } = *params;
    CharacteristicCubic {
        coefficients: [1.0, a * epsilon, b, branch.sigma() * 2.0 * epsilon],
        branch,
    }
}

/// Real and imaginary parts of the characteristic cubic at `r·e^{iθ}`.
pub fn polar_residual_commensurate(params: &JerkParams, branch: Branch, r: f64, theta: PiAngle) -> (f64, f64) {
    let JerkParams { a, b, epsilon } = *params;
    let (t1, t2, t3) = (theta, theta.times(2), theta.times(3));
    let (r2, r3) = (r * r, r * r * r);
    let re = r3 * t3.cos() + r2 * a * epsilon * t2.cos() + b * r * t1.cos() + branch.sigma() * 2.0 * epsilon;
    let im = r3 * t3.sin() + r2 * a * epsilon * t2.sin() + b * r * t1.sin();
    (re, im)
}

/// Discriminant `a²ε²sin²2θ − 4b·sin3θ·sinθ` of the imaginary-part quadratic in `r`.
pub fn modulus_discriminant(params: &JerkParams, theta: PiAngle) -> f64 {
    let JerkParams { a, b, epsilon } = *params;
    let s2 = theta.times(2).sin();
    a * a * epsilon * epsilon * s2 * s2 - 4.0 * b * theta.times(3).sin() * theta.sin()
}

/// Both roots of `sin3θ·r² + aε·sin2θ·r + b·sinθ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusCandidates {
    /// `(−aε·sin2θ + √Δ) / (2sin3θ)`
    pub r1: f64,
    /// `(−aε·sin2θ − √Δ) / (2sin3θ)`
    pub r2: f64,
    pub product: f64,
}

impl ModulusCandidates {
    pub fn positive(&self) -> Vec<f64> {
        [self.r1, self.r2].into_iter().filter(|r| *r > 0.0).collect()
    }
}

pub fn modulus_candidates(params: &JerkParams, theta: PiAngle) -> Result<ModulusCandidates> {
    let JerkParams { a, b, epsilon } = *params;
    let sin3 = theta.times(3).sin();
    if sin3.abs() < SINGULAR_SIN3 {
        return Err(Error::SingularAngle { alpha: 2.0 * theta.turns(), sin3 });
    }
    let delta = modulus_discriminant(params, theta);
    if delta < 0.0 {
        return Err(Error::NegativeDiscriminant { delta });
    }
    let (lead, mid, tail) = (sin3, a * epsilon * theta.times(2).sin(), b * theta.sin());
    let (plus, minus) = quadratic_roots(lead, mid, tail, delta.sqrt());
    Ok(ModulusCandidates { r1: plus, r2: minus, product: plus * minus })
}

/// Roots `(−B + √Δ)/(2A)` and `(−B − √Δ)/(2A)` evaluated without cancellation.
fn quadratic_roots(lead: f64, mid: f64, tail: f64, sqrt_delta: f64) -> (f64, f64) {
    if mid >= 0.0 {
        let q = -(mid + sqrt_delta) / 2.0;
        if q == 0.0 {
            return (0.0, 0.0);
        }
        (tail / q, q / lead)
    } else {
        let q = (-mid + sqrt_delta) / 2.0;
        (q / lead, tail / q)
    }
}

/// A Hopf critical point: the root pair `γ·e^{±iθ}` of the characteristic
/// equation (in the variable the analysis uses) sits on the stability
/// boundary when ε = `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfSolution {
    /// Modulus γ of the critical root in the analysis variable.
    pub modulus: f64,
    /// Critical value of the bifurcation parameter.
    pub epsilon: f64,
    pub theta: PiAngle,
    pub branch: Branch,
    pub residual_re: f64,
    pub residual_im: f64,
    /// `|s| = modulus^modulus_power` for the critical root `s` of the
    /// fractional characteristic equation (`1/α` for commensurate orders,
    /// `M` for lifted ones).
    pub modulus_power: f64,
    /// Sign analysis of the lifted critical polynomial, when one was used.
    pub sign_report: Option<SignCaseReport>,
}

impl HopfSolution {
    /// `|s|`, comparable across the commensurate and lifted analyses.
    pub fn eigenvalue_modulus(&self) -> f64 {
        (self.modulus.ln() * self.modulus_power).exp()
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_re.abs().max(self.residual_im.abs())
    }
}

/// Critical `(γ, ε)` for a commensurate order α, solving the real and
/// imaginary boundary equations simultaneously. When the quadratic in `r²`
/// has two positive roots the smaller one is returned.
pub fn hopf_commensurate(a: f64, b: f64, alpha: f64, branch: Branch) -> Result<HopfSolution> {
    JerkParams::new(a, b, 0.0).check_analysis()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OrderOutOfRange(alpha.to_string()));
    }
    let theta = PiAngle::half_pi_times(alpha);
    let (sin1, sin3) = (theta.sin(), theta.times(3).sin());
    if sin3.abs() < SINGULAR_SIN3_HOPF {
        return Err(Error::SingularAngle { alpha, sin3 });
    }
    let sigma = branch.sigma();
    let (lead, mid, tail) = (a * sin1, sigma * 2.0 * sin3 - a * b * sin1, sigma * 2.0 * b * sin1);
    let r_max = 1.0 + (mid.abs().max(tail.abs()) / lead.abs()).sqrt();
    let no_root = Error::NoPositiveRoot { lo: MIN_MODULUS, hi: r_max };
    let disc = mid * mid - 4.0 * lead * tail;
    if disc < 0.0 {
        return Err(no_root);
    }
    let (u1, u2) = quadratic_roots(lead, mid, tail, disc.sqrt());
    let mut candidates: Vec<f64> = [u1, u2].into_iter().filter(|u| *u > MIN_MODULUS * MIN_MODULUS).collect();
    candidates.sort_by(f64::total_cmp);
    if candidates.is_empty() {
        return Err(no_root);
    }
    // one Newton step on the quartic cleans up the last bits of the square root
    let quartic = |r: f64| {
        let r2 = r * r;
        ((lead * r2 + mid) * r2 + tail, (4.0 * lead * r2 + 2.0 * mid) * r)
    };
    let mut found = None;
    let mut vanishing = None;
    for u in candidates {
        let mut r = u.sqrt();
        let (g, dg) = quartic(r);
        if dg != 0.0 && (g / dg).abs() < 1e-6 * r {
            r -= g / dg;
        }
        let numerator = r * r * r * theta.times(3).cos() + b * r * theta.cos();
        let denominator = a * r * r * theta.times(2).cos() + sigma * 2.0;
        let im = ImaginaryPart {
            free: r * r * r * theta.times(3).sin() + b * r * theta.sin(),
            slope: a * r * r * theta.times(2).sin(),
            scale: r * r * r + b.abs() * r,
        };
        match critical_quotient(numerator, denominator, im) {
            Quotient::Value(epsilon) => {
                found = Some((r, epsilon));
                break;
            }
            Quotient::Spurious => vanishing = Some(denominator),
            Quotient::Excluded => return Err(Error::ExcludedAlpha { denominator }),
        }
    }
    let Some((r, epsilon)) = found else {
        return Err(match vanishing {
            Some(denominator) => Error::ExcludedAlpha { denominator },
            None => no_root,
        });
    };
    let (residual_re, residual_im) = polar_residual_commensurate(&JerkParams::new(a, b, epsilon), branch, r, theta);
    Ok(HopfSolution {
        modulus: r,
        epsilon,
        theta,
        branch,
        residual_re,
        residual_im,
        modulus_power: 1.0 / alpha,
        sign_report: None,
    })
}

pub(crate) enum Quotient {
    Value(f64),
    /// The denominator vanishes and no ε zeroes the imaginary part either:
    /// the root came from clearing the denominator during elimination.
    Spurious,
    /// The denominator vanishes at a genuine root (an excluded order).
    Excluded,
}

/// Imaginary part of the characteristic equation split as
/// `free + ε·slope`, with `scale` the size of its terms.
pub(crate) struct ImaginaryPart {
    pub free: f64,
    pub slope: f64,
    pub scale: f64,
}

/// `ε = −numerator / denominator`, or why there is no such value.
pub(crate) fn critical_quotient(numerator: f64, denominator: f64, im: ImaginaryPart) -> Quotient {
    if denominator.abs() >= DENOMINATOR_GUARD {
        return Quotient::Value(if numerator == 0.0 { 0.0 } else { -numerator / denominator });
    }
    let scale = im.scale.max(1.0);
    if im.slope.abs() < 1e-12 * scale && im.free.abs() > 1e-9 * scale {
        Quotient::Spurious
    } else {
        Quotient::Excluded
    }
}

/// Orders α ∈ (0, 1] at which `a·γ²·cos(πα) ∓ 2 = 0`, i.e. where the ε
/// formula has no finite value for a root of modulus γ.
pub fn excluded_orders(a: f64, gamma: f64) -> Vec<f64> {
    let c = 2.0 / (a * gamma * gamma);
    if !(c.abs() <= 1.0) {
        return Vec::new();
    }
    let mut out: Vec<f64> = [c.acos(), (-c).acos()]
        .into_iter()
        .map(|x| x / std::f64::consts::PI)
        .filter(|alpha| *alpha > 0.0 && *alpha <= 1.0)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
