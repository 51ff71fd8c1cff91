use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fractional order {0} is outside (0, 1]")]
    OrderOutOfRange(String),

    #[error("order `{0}` is not an exact rational")]
    NonRational(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("state became non-finite at t = {time}")]
    Divergence { time: f64 },

    #[error("tangent direction {direction} collapsed at t = {time}")]
    TangentCollapse { time: f64, direction: usize },

    #[error("singular angle: sin(3θ) = {sin3:e} vanishes at α = {alpha} (α = 2/3 is excluded)")]
    SingularAngle { alpha: f64, sin3: f64 },

    #[error("negative discriminant Δ = {delta:e}")]
    NegativeDiscriminant { delta: f64 },

    #[error("no positive root found on ({lo:e}, {hi:e})")]
    NoPositiveRoot { lo: f64, hi: f64 },

    #[error("excluded order: critical denominator {denominator:e} vanishes")]
    ExcludedAlpha { denominator: f64 },

    #[error("excluded denominator {denominator:e} in the critical-value quotient")]
    ExcludedDenominator { denominator: f64 },

    #[error("coefficient of r^{exponent} is {value:e}, sign is ambiguous")]
    ZeroCoefficient { exponent: u64, value: f64 },

    #[error("Hopf case conditions not satisfied: {0}")]
    CaseNotSatisfied(String),

    #[error("ε = 0 is degenerate: both equilibria coincide")]
    DegenerateEpsilon,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("trajectory has fewer than 3 samples after discarding the transient")]
    EmptyAfterTransient,
}
