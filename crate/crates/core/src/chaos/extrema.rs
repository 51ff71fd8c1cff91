use crate::error::{Error, Result};
use crate::solver::Trajectory;

/// Local extrema of `x` after the transient.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrema {
    pub maxima: Vec<f64>,
    pub minima: Vec<f64>,
    /// Smallest and largest post-transient sample of `x`.
    pub x_min: f64,
    pub x_max: f64,
    /// `x_max − x_min`
    pub range: f64,
}

/// Interior local maxima and minima of the x-component, each refined by the
/// vertex of the parabola through the sample and its two neighbours
/// (clamped to the sampled range).
pub fn extract_extrema<const N: usize>(traj: &Trajectory<N>, transient_fraction: f64) -> Result<Extrema> {
    if !(0.0..1.0).contains(&transient_fraction) {
        return Err(Error::InvalidConfig(format!("transient fraction {transient_fraction} outside [0, 1)")));
    }
    let start = (traj.len() as f64 * transient_fraction).floor() as usize;
    let x: Vec<f64> = traj.states[start.min(traj.len())..].iter().map(|s| s[0]).collect();
    extrema_of(&x)
}

pub(crate) fn extrema_of(x: &[f64]) -> Result<Extrema> {
    if x.len() < 3 {
        return Err(Error::EmptyAfterTransient);
    }
    let x_min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut maxima, mut minima) = (Vec::new(), Vec::new());
    for w in x.windows(3) {
        let (l, c, r) = (w[0], w[1], w[2]);
        if c > l && c >= r {
            maxima.push(vertex(l, c, r).clamp(x_min, x_max));
        } else if c < l && c <= r {
            minima.push(vertex(l, c, r).clamp(x_min, x_max));
        }
    }
    Ok(Extrema { maxima, minima, x_min, x_max, range: x_max - x_min })
}

fn vertex(l: f64, c: f64, r: f64) -> f64 {
    let curvature = l - 2.0 * c + r;
    if curvature == 0.0 {
        return c;
    }
    c - (r - l) * (r - l) / (8.0 * curvature)
}

/// Single-linkage clusters of `values`: sorted values closer than `tol` to
/// their neighbour share a cluster. Returns `(mean, count)` per cluster.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut prev = f64::NAN;
    for v in sorted {
        if count > 0 && v - prev > tol {
            out.push((sum / count as f64, count));
            sum = 0.0;
            count = 0;
        }
        sum += v;
        count += 1;
        prev = v;
    }
    if count > 0 {
        out.push((sum / count as f64, count));
    }
    out
}
