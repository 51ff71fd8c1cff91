//! Simulation and bifurcation analysis of the fractional-order quadratic
//! jerk system.

pub mod angle;
pub mod chaos;
pub mod error;
pub mod hopf;
pub mod model;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Branch, Equilibrium, JerkParams, OrderSpec, Rational, ReducedOrders};
