//! Independent reference computations shared by the integration tests and
//! the acceptance suite. Nothing here calls into the library's own solvers.
#![allow(dead_code)]

use fjerk_core::model::{Branch, JerkParams, ReducedOrders};
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `E_α(−t^α)` by its power series. Once the terms decrease monotonically
/// the series alternates, so the first omitted term bounds the remainder.
pub fn mittag_leffler_decay(alpha: f64, t: f64) -> (f64, f64) {
    let x = t.powf(alpha);
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..400 {
        let ln_term = k as f64 * x.ln() - libm::lgamma(alpha * k as f64 + 1.0);
        let term = ln_term.exp();
        if term < 1e-18 && term < prev {
            return (sum, term);
        }
        let signed = if k % 2 == 0 { term } else { -term };
        let y = signed - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        prev = term;
    }
    panic!("series did not converge for α={alpha}, t={t}");
}

/// Adaptive Dormand–Prince 5(4) between consecutive sample times.
pub fn dormand_prince(params: &JerkParams, y0: [f64; 3], h_out: f64, samples: usize, tol: f64) -> Vec<[f64; 3]> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];
    let f = |y: [f64; 3]| {
        let [x, v, w] = y;
        let e = params.epsilon;
        [v, w, -e * e - params.b * v - params.a * e * w + x * x]
    };
    let mut out = vec![y0];
    let mut y = y0;
    let mut dt = h_out / 4.0;
    for _ in 0..samples {
        let mut left = h_out;
        while left > 0.0 {
            let step = dt.min(left);
            let mut k = [[0.0; 3]; 7];
            for s in 0..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    for i in 0..3 {
                        ys[i] += step * A[s][j] * kj[i];
                    }
                }
                k[s] = f(ys);
            }
            let mut y5 = y;
            let mut err: f64 = 0.0;
            for i in 0..3 {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] += step * d5;
                let scale = tol * (1.0 + y[i].abs().max(y5[i].abs()));
                err = err.max((step * (d5 - d4)).abs() / scale);
            }
            if err <= 1.0 {
                y = y5;
                left -= step;
                if left < 1e-14 * h_out {
                    left = 0.0;
                }
            }
            dt = step * (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        }
        out.push(y);
    }
    out
}

pub fn constant_sign(branch: Branch) -> f64 {
    match branch {
        Branch::Plus => -1.0,
        Branch::Minus => 1.0,
    }
}

/// `λ³ + aελ² + bλ ∓ 2ε` at `λ = r·e^{iθ}` in complex arithmetic.
pub fn cubic_at(a: f64, b: f64, eps: f64, branch: Branch, r: f64, theta: f64) -> Complex64 {
    let l = Complex64::from_polar(r, theta);
    l * l * l + a * eps * l * l + b * l + constant_sign(branch) * 2.0 * eps
}

/// Dense coefficients (highest power first) of the critical polynomial,
/// assembled directly from its four monomials with zero roots removed.
pub fn dense_critical(a: f64, b: f64, red: &ReducedOrders, branch: Branch) -> Vec<f64> {
    let (p, q, m) = (red.p as usize, red.q as usize, red.m as usize);
    let theta = PI / (2.0 * red.lcm as f64);
    let sigma = constant_sign(branch);
    let s = |k: usize| (k as f64 * theta).sin();
    let degree = 2 * p + 2 * q + m;
    let mut by_power = vec![0.0; degree + 1];
    by_power[2 * p + 2 * q + m] += a * s(m);
    by_power[2 * p + q] += -a * b * s(q);
    by_power[p + q + m] += sigma * 2.0 * s(p + q + m);
    by_power[p] += sigma * 2.0 * b * s(p);
    let low = by_power.iter().position(|c| c.abs() > 1e-12).unwrap();
    let high = by_power.iter().rposition(|c| c.abs() > 1e-12).unwrap();
    by_power[low..=high].iter().rev().copied().collect()
}

pub fn descartes_count(coefficients: &[f64]) -> usize {
    let signs: Vec<bool> = coefficients.iter().filter(|c| **c != 0.0).map(|c| *c > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn companion_positive_roots(coefficients: &[f64]) -> Vec<f64> {
    let n = coefficients.len() - 1;
    let mut c = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        c[(0, j)] = -coefficients[j + 1] / coefficients[0];
    }
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    let horner = |x: f64| coefficients.iter().fold((0.0, 0.0), |(f, df), &k| (f * x + k, df * x + f));
    // conjugating by a fixed reflection keeps shifted QR from stalling on
    // the cyclic structure of sparse companions
    let v = DVector::from_fn(n, |i, _| 2.0 + (i as f64 * 0.618_033_988_749_895).fract());
    let h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared());
    let schur = Schur::try_new(&h * c * &h, f64::EPSILON, 100_000).expect("companion eigenvalues");
    schur
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.re > 0.0 && z.im.abs() <= 1e-7 * z.norm().max(1.0))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..20 {
                let (f, df) = horner(x);
                if df == 0.0 {
                    break;
                }
                x -= f / df;
            }
            x
        })
        .collect()
}

