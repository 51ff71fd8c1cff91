//! Chaos diagnostics: Lyapunov spectra, attractor extrema and parameter sweeps.

pub mod extrema;
pub mod lyapunov;
pub mod sweep;

pub use extrema::{cluster_values, extract_extrema, Extrema};
pub use lyapunov::{lyapunov_spectrum, lyapunov_spectrum_system, LyapunovConfig, LyapunovSpectrum};
pub use sweep::{epsilon_grid, sweep_bifurcation, worker_count, PointResult, SweepConfig, SweepPoint, SweepResult};

/// λ₁ above this counts as chaotic.
pub const CHAOS_EXPONENT: f64 = 0.005;
/// More distinct maxima than this counts as chaotic.
pub const CHAOS_CLUSTERS: usize = 32;
/// Maxima closer than this fraction of the x range are merged.
pub const CLUSTER_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorKind {
    FixedPoint,
    /// Number of distinct maxima.
    Periodic(usize),
    Chaotic,
    Divergent,
}

impl std::fmt::Display for AttractorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttractorKind::FixedPoint => f.write_str("fixed_point"),
            AttractorKind::Periodic(n) => write!(f, "periodic({n})"),
            AttractorKind::Chaotic => f.write_str("chaotic"),
            AttractorKind::Divergent => f.write_str("divergent"),
        }
    }
}

/// Classifies a run from its extrema (`None` for a run that diverged) and,
/// when available, its Lyapunov spectrum.
pub fn classify_attractor(extrema: Option<&Extrema>, spectrum: Option<&LyapunovSpectrum>) -> AttractorKind {
    let Some(extrema) = extrema else {
        return AttractorKind::Divergent;
    };
    if extrema.maxima.is_empty() || extrema.range < 1e-6 {
        return AttractorKind::FixedPoint;
    }
    if spectrum.is_some_and(|s| s.exponents[0] > CHAOS_EXPONENT) {
        return AttractorKind::Chaotic;
    }
    let clusters = cluster_values(&extrema.maxima, CLUSTER_TOLERANCE * extrema.range).len();
    if clusters > CHAOS_CLUSTERS {
        AttractorKind::Chaotic
    } else {
        AttractorKind::Periodic(clusters)
    }
}
