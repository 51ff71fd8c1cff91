//! The quadratic jerk system, its equilibria and the fractional order lift.
//!
//! ```text
//! D^α₁ x = y
//! D^α₂ y = z
//! D^α₃ z = -ε² - b·y - a·ε·z + x²
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use num_integer::Integer;
use num_rational::Ratio;

use crate::angle::PiAngle;
use crate::error::{Error, Result};

/// Exact positive rational used for incommensurate orders.
pub type Rational = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JerkParams {
    pub a: f64,
    pub b: f64,
    /// Bifurcation parameter ε.
    pub epsilon: f64,
}

impl JerkParams {
    pub fn new(a: f64, b: f64, epsilon: f64) -> Self {
        JerkParams { a, b, epsilon }
    }

    /// `a = 0.129`, `b = 7`, the constants used throughout the reference experiments.
    pub fn reference(epsilon: f64) -> Self {
        JerkParams::new(0.129, 7.0, epsilon)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        JerkParams { epsilon, ..self }
    }

    /// Checks the constraints the stability analysis relies on.
    pub fn check_analysis(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParams(format!("a must be positive, got {}", self.a)));
        }
        if self.b == 0.0 || !self.b.is_finite() {
            return Err(Error::InvalidParams(format!("b must be non-zero, got {}", self.b)));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidParams("ε must be finite".into()));
        }
        Ok(())
    }
}

/// Which equilibrium a quantity refers to.
///
/// `Plus` is E₁ = (ε, 0, 0), whose characteristic cubic has constant term
/// −2ε; `Minus` is E₂ = (−ε, 0, 0) with constant term +2ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    /// Sign of the equilibrium abscissa, `x = sign·ε`.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    /// Sign σ multiplying the `2ε` terms of the critical-value equations
    /// (σ = −1 on E₁).
    pub fn sigma(self) -> f64 {
        -self.sign()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" | "e1" => Ok(Branch::Plus),
            "minus" | "-" | "e2" => Ok(Branch::Minus),
            other => Err(Error::InvalidParams(format!("unknown branch `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub point: [f64; 3],
    pub branch: Branch,
}

impl Equilibrium {
    pub fn of(params: &JerkParams, branch: Branch) -> Self {
        Equilibrium {
            point: [branch.sign() * params.epsilon, 0.0, 0.0],
            branch,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibria {
    pub points: Vec<Equilibrium>,
    /// Set when ε = 0 and E₁, E₂ coincide at the origin.
    pub degenerate: bool,
}

/// Right-hand side of the jerk system.
pub fn vector_field(params: &JerkParams, state: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = state;
    let JerkParams { a, b, epsilon } = *params;
    [y, z, -epsilon * epsilon - b * y - a * epsilon * z + x * x]
}

/// Jacobian of [`vector_field`] at an arbitrary state.
pub fn jacobian(params: &JerkParams, state: [f64; 3]) -> Matrix3<f64> {
    Matrix3::new(
        0.0, 1.0, 0.0, //
        0.0, 0.0, 1.0, //
        2.0 * state[0], -params.b, -params.a * params.epsilon,
    )
}

pub fn equilibria(params: &JerkParams) -> Equilibria {
    if params.epsilon == 0.0 {
        return Equilibria {
            points: vec![Equilibrium { point: [0.0; 3], branch: Branch::Plus }],
            degenerate: true,
        };
    }
    Equilibria {
        points: vec![
            Equilibrium::of(params, Branch::Plus),
            Equilibrium::of(params, Branch::Minus),
        ],
        degenerate: false,
    }
}

pub fn jacobian_at(params: &JerkParams, eq: &Equilibrium) -> Matrix3<f64> {
    jacobian(params, eq.point)
}

/// Fractional orders of the three equations.
#[derive(Debug, Clone, PartialEq)]
pub enum OrderSpec {
    /// One order α shared by all equations.
    Commensurate(f64),
    /// Per-equation exact rational orders (α₁, α₂, α₃).
    Incommensurate([Rational; 3]),
}

impl OrderSpec {
    pub fn incommensurate(orders: [Rational; 3]) -> Result<Self> {
        let spec = OrderSpec::Incommensurate(orders);
        spec.validate()?;
        Ok(spec)
    }

    /// Parses `v1/u1,v2/u2,v3/u3` (decimal components such as `0.99` are read exactly).
    pub fn parse_triple(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::NonRational(s.to_string()));
        }
        let mut orders = [Rational::new(1, 1); 3];
        for (slot, part) in orders.iter_mut().zip(&parts) {
            *slot = parse_rational(part)?;
        }
        OrderSpec::incommensurate(orders)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OrderSpec::Commensurate(alpha) => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::OrderOutOfRange(alpha.to_string()));
                }
            }
            OrderSpec::Incommensurate(orders) => {
                for r in orders {
                    if *r.numer() == 0 || r.numer() > r.denom() {
                        return Err(Error::OrderOutOfRange(format!("{}/{}", r.numer(), r.denom())));
                    }
                }
            }
        }
        Ok(())
    }

    /// Per-equation orders as floats, as the solver consumes them.
    pub fn alphas(&self) -> [f64; 3] {
        match self {
            OrderSpec::Commensurate(alpha) => [*alpha; 3],
            OrderSpec::Incommensurate(orders) => orders.map(|r| ratio_to_f64(&r)),
        }
    }

    pub fn is_commensurate(&self) -> bool {
        match self {
            OrderSpec::Commensurate(_) => true,
            OrderSpec::Incommensurate(o) => o[0] == o[1] && o[1] == o[2],
        }
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::Commensurate(alpha) => write!(f, "{alpha}"),
            OrderSpec::Incommensurate(o) => write!(
                f,
                "{}/{};{}/{};{}/{}",
                o[0].numer(),
                o[0].denom(),
                o[1].numer(),
                o[1].denom(),
                o[2].numer(),
                o[2].denom()
            ),
        }
    }
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses `v/u`, an integer, or a finite decimal such as `0.99` into an exact
/// reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::NonRational(s.to_string());
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad())?;
        let den: u64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) || frac_part.len() > 18 {
        return Err(bad());
    }
    let den = 10u64.pow(frac_part.len() as u32);
    let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let frac: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
    Ok(Rational::new(num, den))
}

/// Order lift `M = lcm(u₁,u₂,u₃)`, `(p,q,m) = M·(α₁,α₂,α₃)`, `θ = π/(2M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedOrders {
    pub lcm: u64,
    pub p: u64,
    pub q: u64,
    pub m: u64,
    pub theta: PiAngle,
}

impl ReducedOrders {
    pub fn from_integers(lcm: u64, p: u64, q: u64, m: u64) -> Result<Self> {
        if lcm == 0 || [p, q, m].iter().any(|&k| k == 0 || k > lcm) {
            return Err(Error::OrderOutOfRange(format!("({p},{q},{m})/{lcm}")));
        }
        Ok(ReducedOrders { lcm, p, q, m, theta: PiAngle::lift(lcm) })
    }

    /// `p + q + m`, the degree of the lifted characteristic polynomial.
    pub fn total(&self) -> u64 {
        self.p + self.q + self.m
    }

    pub fn orders(&self) -> [Rational; 3] {
        [self.p, self.q, self.m].map(|k| Rational::new(k, self.lcm))
    }

    pub fn is_commensurate(&self) -> bool {
        self.p == self.q && self.q == self.m
    }
}

/// Lifts rational orders onto a common denominator.
///
/// A commensurate float order is accepted only when it is exactly a ratio
/// with denominator at most 10⁶ (e.g. `0.99` → 99/100).
pub fn reduce_orders(orders: &OrderSpec) -> Result<ReducedOrders> {
    orders.validate()?;
    let ratios = match orders {
        OrderSpec::Incommensurate(o) => *o,
        OrderSpec::Commensurate(alpha) => {
            let r = exact_ratio(*alpha, 1_000_000).ok_or_else(|| Error::NonRational(alpha.to_string()))?;
            [r; 3]
        }
    };
    let lcm = ratios.iter().fold(1u64, |acc, r| acc.lcm(r.denom()));
    let lift = |r: &Rational| r.numer() * (lcm / r.denom());
    ReducedOrders::from_integers(lcm, lift(&ratios[0]), lift(&ratios[1]), lift(&ratios[2]))
}

/// Finds `v/u` with `u ≤ max_den` whose float quotient is bitwise `x`.
fn exact_ratio(x: f64, max_den: u64) -> Option<Rational> {
    if !(x > 0.0) {
        return None;
    }
    // continued-fraction convergents
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        if h2 as f64 / k2 as f64 == x {
            return Some(Rational::new(h2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rem - a as f64;
        if frac <= 0.0 {
            break;
        }
        rem = 1.0 / frac;
    }
    None
}
