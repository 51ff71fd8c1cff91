//! Stability of an equilibrium by the argument of its characteristic roots.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{jacobian_at, reduce_orders, Equilibrium, JerkParams, OrderSpec, ReducedOrders};

/// Half-width of the band around the threshold angle reported as marginal.
const ARG_MARGIN: f64 = 1e-9;
/// Largest lifted degree for which the companion eigenvalues are trusted.
const MAX_LIFTED_DEGREE: u64 = 600;
/// QR sweeps allowed per eigenvalue before the Schur iteration gives up.
const SCHUR_SWEEPS_PER_ROOT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// Compares `min |arg z|` over the roots with `threshold` (radians). A zero
/// root counts as marginal.
pub fn stability_from_roots(roots: &[Complex64], threshold: f64) -> Stability {
    let mut min_arg = f64::INFINITY;
    for z in roots {
        if z.norm() < 1e-12 {
            return Stability::Marginal;
        }
        min_arg = min_arg.min(z.arg().abs());
    }
    if min_arg > threshold + ARG_MARGIN {
        Stability::Stable
    } else if min_arg < threshold - ARG_MARGIN {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Commensurate orders compare the Jacobian eigenvalues with `απ/2`;
/// rational per-equation orders compare the roots of the lifted polynomial
/// `w^{p+q+m} + aε·w^{p+q} + b·w^p − 2x*` with `π/(2M)`.
pub fn classify_stability(params: &JerkParams, orders: &OrderSpec, eq: &Equilibrium) -> Result<Stability> {
    orders.validate()?;
    if orders.is_commensurate() {
        let alpha = orders.alphas()[0];
        let eigs = eigenvalues(DMatrix::from_iterator(3, 3, jacobian_at(params, eq).iter().copied()))?;
        return Ok(stability_from_roots(&eigs, alpha * PI / 2.0));
    }
    classify_lifted(params, &reduce_orders(orders)?, eq)
}

pub(crate) fn classify_lifted(params: &JerkParams, reduced: &ReducedOrders, eq: &Equilibrium) -> Result<Stability> {
    let degree = reduced.total();
    if degree > MAX_LIFTED_DEGREE {
        return Err(Error::Unsupported(format!(
            "lifted degree {degree} exceeds {MAX_LIFTED_DEGREE} for root-based classification"
        )));
    }
    let JerkParams { a, b, epsilon } = *params;
    let mut dense = vec![0.0; degree as usize + 1];
    let at = |n: u64| (degree - n) as usize;
    dense[at(degree)] += 1.0;
    dense[at(reduced.p + reduced.q)] += a * epsilon;
    dense[at(reduced.p)] += b;
    dense[at(0)] += -2.0 * eq.point[0];
    Ok(stability_from_roots(&polynomial_roots(&dense)?, reduced.theta.radians()))
}

/// All complex roots of a dense polynomial (highest power first, nonzero
/// leading coefficient) as companion-matrix eigenvalues.
pub fn polynomial_roots(coefficients: &[f64]) -> Result<Vec<Complex64>> {
    let n = coefficients.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coefficients[0];
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -coefficients[j + 1] / lead;
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    eigenvalues(companion)
}

/// Eigenvalues by a real Schur decomposition. The matrix is first conjugated
/// by a fixed Householder reflection: shifted QR without exceptional shifts
/// stalls on the cyclic structure of sparse companion matrices.
fn eigenvalues(matrix: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = matrix.nrows();
    // fractional parts of multiples of the plastic-number reciprocal: a
    // deterministic direction with no special alignment
    let v = DVector::from_fn(n, |i, _| 1.0 + ((i as f64 + 1.0) * 0.754_877_666_246_692_7).fract());
    let reflector = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared());
    let scrambled = &reflector * matrix * &reflector;
    let schur = Schur::try_new(scrambled, f64::EPSILON, SCHUR_SWEEPS_PER_ROOT * n.max(1))
        .ok_or_else(|| Error::Unsupported(format!("eigenvalue iteration did not converge for a {n}×{n} matrix")))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Branch;

    #[test]
    fn spectrum_example() {
        let spectrum = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(-1.0, 0.0)];
        assert_eq!(stability_from_roots(&spectrum, 0.5 * PI / 2.0), Stability::Stable);
        assert_eq!(stability_from_roots(&spectrum, PI / 2.0), Stability::Marginal);
        assert_eq!(stability_from_roots(&spectrum, 0.99 * PI), Stability::Unstable);
    }

    #[test]
    fn companion_roots() {
        // (z − 1)(z + 2)(z² + 1)
        let roots = polynomial_roots(&[1.0, 1.0, -1.0, 1.0, -2.0]).unwrap();
        for expected in [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 1.0)] {
            assert!(roots.iter().any(|z| (z - expected).norm() < 1e-12));
        }
    }

    #[test]
    fn lifted_reduces_to_jacobian() {
        let p = JerkParams::reference(5.0);
        let reduced = ReducedOrders::from_integers(10, 9, 9, 9).unwrap();
        for eps in [-3.0, 0.5, 5.0] {
            let p = p.with_epsilon(eps);
            for branch in [Branch::Plus, Branch::Minus] {
                let eq = Equilibrium::of(&p, branch);
                let direct = classify_stability(&p, &OrderSpec::Commensurate(0.9), &eq).unwrap();
                assert_eq!(direct, classify_lifted(&p, &reduced, &eq).unwrap(), "ε={eps} {branch}");
            }
        }
    }
}
