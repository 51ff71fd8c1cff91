//! Angles carried as multiples of π.
//!
//! The stability boundaries of the jerk system sit at θ = πα/2 and
//! θ = π/(2M), and the critical-value formulas evaluate sin(kθ), cos(kθ)
//! for integer k. Storing the coefficient of π instead of radians lets
//! quadrant boundaries (cos(π/2), sin(π), ...) come out as exact zeros.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PiAngle(f64);

impl PiAngle {
    /// The angle `π · turns`.
    pub fn new(turns: f64) -> Self {
        PiAngle(turns)
    }

    /// Boundary angle `πα/2` for a commensurate order α.
    pub fn half_pi_times(alpha: f64) -> Self {
        PiAngle(alpha / 2.0)
    }

    /// Boundary angle `π/(2M)` of the order lift.
    pub fn lift(lcm: u64) -> Self {
        PiAngle(1.0 / (2.0 * lcm as f64))
    }

    /// Coefficient of π.
    pub fn turns(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 * PI
    }

    /// `k·θ`, for integer multiples.
    pub fn times(self, k: u64) -> Self {
        PiAngle(self.0 * k as f64)
    }

    pub fn sin(self) -> f64 {
        sin_pi(self.0)
    }

    pub fn cos(self) -> f64 {
        cos_pi(self.0)
    }
}

/// `sin(πx)` with exact zeros at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (r - 0.5)).cos()
    } else if r <= 1.25 {
        -(PI * (r - 1.0)).sin()
    } else if r <= 1.75 {
        -(PI * (r - 1.5)).cos()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `cos(πx)` with exact zeros at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r <= 0.25 {
        (PI * r).cos()
    } else if r <= 0.75 {
        -(PI * (r - 0.5)).sin()
    } else if r <= 1.25 {
        -(PI * (r - 1.0)).cos()
    } else if r <= 1.75 {
        (PI * (r - 1.5)).sin()
    } else {
        (PI * (r - 2.0)).cos()
    }
}
