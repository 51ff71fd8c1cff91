use fjerk_core::model::{jacobian_at, Branch, Equilibrium, JerkParams, OrderSpec};
use fjerk_core::solver::{
    abm_weights, integrate, integrate_system, integrate_with_tangent, AbmWeights, HistoryEval, MemoryPolicy,
    ScalarLinear, SolveConfig,
};
use proptest::prelude::*;
use std::time::Instant;

mod oracles;
use oracles::{dormand_prince, mittag_leffler_decay};

fn scalar_decay_at_one(alpha: f64, h: f64) -> f64 {
    let cfg = SolveConfig::new(h, 1.0, [1.0]);
    let traj = integrate_system(&ScalarLinear { rate: -1.0 }, [alpha], &cfg).unwrap();
    traj.states.last().unwrap()[0]
}

#[test]
fn mittag_leffler_oracle_sanity() {
    let (e1, bound) = mittag_leffler_decay(1.0, 1.0);
    assert!((e1 - (-1.0f64).exp()).abs() < 1e-15 && bound < 1e-17);
    // E_{1/2}(−1) = e·erfc(1)
    let (half, _) = mittag_leffler_decay(0.5, 1.0);
    assert!((half - std::f64::consts::E * libm::erfc(1.0)).abs() < 1e-14);
}

#[test]
fn scalar_decay_matches_mittag_leffler() {
    for alpha in [0.5, 0.7, 0.99] {
        let start = Instant::now();
        let u = scalar_decay_at_one(alpha, 1e-3);
        let elapsed = start.elapsed();
        let (exact, remainder) = mittag_leffler_decay(alpha, 1.0);
        let rel = (u - exact).abs() / exact;
        assert!(remainder < 1e-12);
        assert!(rel < 1e-4, "α={alpha}: u(1)={u}, E={exact}, rel={rel:e}");
        assert!(elapsed.as_secs_f64() < 5.0);
    }
}

#[test]
fn halving_the_step_reduces_error() {
    for alpha in [0.5, 0.7, 0.99] {
        let (exact, _) = mittag_leffler_decay(alpha, 1.0);
        let errors: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&h| (scalar_decay_at_one(alpha, h) - exact).abs()).collect();
        for pair in errors.windows(2) {
            let factor = pair[0] / pair[1];
            assert!(factor >= 1.8, "α={alpha}: errors {errors:?}");
        }
    }
}

#[test]
fn predictor_weights_telescope() {
    for alpha in [0.1, 0.5, 0.7, 0.99, 1.0] {
        for n in [1, 17, 100, 2500] {
            let h = 0.01;
            let (pred, _) = abm_weights(alpha, n, h).unwrap();
            let sum: f64 = pred[..n].iter().sum();
            let closed = (n as f64 * h).powf(alpha) / libm::tgamma(alpha + 1.0);
            assert!((sum - closed).abs() < 1e-12 * closed, "α={alpha} n={n}: {sum} vs {closed}");
        }
    }
}

#[test]
fn unit_order_weights_are_euler_and_trapezoid() {
    let h = 0.02;
    let w = AbmWeights::new(1.0, 50, h).unwrap();
    for i in 0..50 {
        assert!((w.predictor(i) - h).abs() < 1e-15);
    }
    for k in 1..40 {
        assert!((w.corrector_start(k) - h / 2.0).abs() < 1e-15);
    }
    assert!((w.corrector_self() - h / 2.0).abs() < 1e-15);
    for i in 1..50 {
        assert!((w.corrector(i) - h).abs() < 1e-15);
    }
}

#[test]
fn half_order_first_weight() {
    let h: f64 = 0.01;
    let (pred, _) = abm_weights(0.5, 4, h).unwrap();
    assert!((pred[0] - h.sqrt() / libm::tgamma(1.5)).abs() < 1e-15);
}

#[test]
fn rejects_orders_outside_unit_interval() {
    assert!(abm_weights(0.0, 10, 0.01).is_err());
    assert!(abm_weights(1.2, 10, 0.01).is_err());
    assert!(integrate_system(&ScalarLinear { rate: -1.0 }, [1.5], &SolveConfig::new(0.01, 1.0, [1.0])).is_err());
}

#[test]
fn unit_orders_match_runge_kutta() {
    let params = JerkParams::reference(5.0);
    // the scheme is second order here and |z| reaches ~50, so an absolute
    // 1e-4 comparison needs a finer step than the default
    let h = 2e-4;
    let cfg = SolveConfig { h, t_end: 10.0, ..Default::default() };
    let traj = integrate(&params, &OrderSpec::Commensurate(1.0), &cfg).unwrap();
    let reference = dormand_prince(&params, cfg.initial_state, h, traj.len() - 1, 1e-12);
    let sup = traj
        .states
        .iter()
        .zip(&reference)
        .flat_map(|(a, b)| (0..3).map(move |i| (a[i] - b[i]).abs()))
        .fold(0.0, f64::max);
    assert!(sup < 1e-4, "sup-norm difference {sup:e}");
}

#[test]
fn equilibrium_stays_put() {
    for eps in [3.0, 7.78] {
        let params = JerkParams::reference(eps);
        for branch in [Branch::Plus, Branch::Minus] {
            let eq = Equilibrium::of(&params, branch);
            for orders in [OrderSpec::Commensurate(0.9), OrderSpec::parse_triple("1,99/100,1").unwrap()] {
                let cfg = SolveConfig::new(0.01, 100.0, eq.point);
                let traj = integrate(&params, &orders, &cfg).unwrap();
                let dev = traj
                    .states
                    .iter()
                    .flat_map(|s| (0..3).map(move |i| (s[i] - eq.point[i]).abs()))
                    .fold(0.0, f64::max);
                assert!(dev < 1e-9, "{branch} ε={eps}: {dev:e}");
            }
        }
    }
}

#[test]
fn window_covering_the_horizon_equals_full_memory() {
    let params = JerkParams::reference(7.78);
    let base = SolveConfig { h: 0.01, t_end: 30.0, ..Default::default() };
    let full = integrate(&params, &OrderSpec::Commensurate(0.95), &base).unwrap();
    let short = integrate(
        &params,
        &OrderSpec::Commensurate(0.95),
        &base.with_memory(MemoryPolicy::ShortMemory { window: base.t_end }),
    )
    .unwrap();
    for (a, b) in full.states.iter().zip(&short.states) {
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn fft_history_matches_direct_on_jerk_system() {
    let params = JerkParams::reference(4.1);
    for orders in [OrderSpec::Commensurate(0.91), OrderSpec::parse_triple("1,99/100,1").unwrap()] {
        for memory in [MemoryPolicy::Full, MemoryPolicy::ShortMemory { window: 10.0 }] {
            let cfg = SolveConfig { t_end: 20.0, memory, ..Default::default() };
            let fast = integrate(&params, &orders, &cfg.with_history(HistoryEval::Fft)).unwrap();
            let direct = integrate(&params, &orders, &cfg.with_history(HistoryEval::Direct)).unwrap();
            for (a, b) in fast.states.iter().zip(&direct.states) {
                for i in 0..3 {
                    assert!((a[i] - b[i]).abs() < 1e-10 * (1.0 + b[i].abs()), "{orders} {memory:?}");
                }
            }
        }
    }
}

#[test]
fn integration_is_deterministic_across_threads() {
    let params = JerkParams::reference(7.78);
    let cfg = SolveConfig { t_end: 40.0, ..Default::default() };
    let orders = OrderSpec::Commensurate(0.99);
    let here = integrate(&params, &orders, &cfg).unwrap();
    let handles: Vec<_> = (0..3)
        .map(|_| {
            let orders = orders.clone();
            std::thread::spawn(move || integrate(&params, &orders, &cfg).unwrap())
        })
        .collect();
    for handle in handles {
        let there = handle.join().unwrap();
        assert_eq!(here.states, there.states);
    }
}

#[test]
fn tangent_basis_stays_orthonormal() {
    let params = JerkParams::reference(7.78);
    let cfg = SolveConfig { t_end: 50.0, ..Default::default() };
    for orders in [OrderSpec::Commensurate(0.99), OrderSpec::parse_triple("1,99/100,1").unwrap()] {
        let (_, log) = integrate_with_tangent(&params, &orders, &cfg, 10).unwrap();
        assert!(log.max_orthonormality_defect < 1e-10);
        assert_eq!(log.len(), cfg.steps() / 10);
        assert!(log.log_norms.iter().flatten().all(|v| v.is_finite()));
    }
}

#[test]
fn tangent_growth_negative_at_attracting_equilibrium() {
    let params = JerkParams::reference(3.0);
    let alpha = 0.91;
    let eq = Equilibrium::of(&params, Branch::Minus);
    // eigenvalue sign oracle: every root lies outside the απ/2 sector
    let eigs = jacobian_at(&params, &eq).complex_eigenvalues();
    let min_arg = eigs.iter().map(|z| z.arg().abs()).fold(f64::INFINITY, f64::min);
    assert!(min_arg > alpha * std::f64::consts::FRAC_PI_2);

    let cfg = SolveConfig::new(0.01, 100.0, eq.point);
    let (_, log) = integrate_with_tangent(&params, &OrderSpec::Commensurate(alpha), &cfg, 50).unwrap();
    let t = log.renorm_times.last().unwrap();
    for v in 0..3 {
        let total: f64 = log.log_norms.iter().map(|l| l[v]).sum();
        assert!(total / t < 0.0, "direction {v}: {}", total / t);
    }
}

#[test]
fn rejects_bad_configs() {
    let params = JerkParams::reference(5.0);
    let orders = OrderSpec::Commensurate(0.9);
    let bad = [
        SolveConfig { h: 0.0, ..Default::default() },
        SolveConfig { h: 0.1, t_end: 0.05, ..Default::default() },
        SolveConfig { h: 0.1, memory: MemoryPolicy::ShortMemory { window: 0.5 }, ..Default::default() },
    ];
    for cfg in bad {
        assert!(integrate(&params, &orders, &cfg).is_err(), "{cfg:?}");
    }
    let cfg = SolveConfig { t_end: 1.0, ..Default::default() };
    assert!(integrate_with_tangent(&params, &orders, &cfg, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_positive_and_telescoping(alpha in 0.05f64..=1.0, n in 1usize..400, h in 1e-4f64..0.1) {
        let (pred, corr) = abm_weights(alpha, n, h).unwrap();
        prop_assert!(pred.iter().chain(&corr).all(|w| w.is_finite() && *w > 0.0));
        let sum: f64 = pred[..n].iter().sum();
        let closed = (n as f64 * h).powf(alpha) / libm::tgamma(alpha + 1.0);
        prop_assert!((sum - closed).abs() < 1e-11 * closed);
    }

    #[test]
    fn trajectory_sampling_invariants(alpha in 0.5f64..=1.0, h in 0.005f64..0.05, x0 in -1.0f64..1.0) {
        let cfg = SolveConfig::new(h, 2.0, [x0, 0.0, 0.0]);
        let traj = integrate(&JerkParams::reference(2.0), &OrderSpec::Commensurate(alpha), &cfg).unwrap();
        prop_assert_eq!(traj.times.len(), traj.states.len());
        prop_assert_eq!(traj.states[0], cfg.initial_state);
        for (k, t) in traj.times.iter().enumerate() {
            prop_assert_eq!(*t, k as f64 * h);
        }
    }
}

// Gram–Schmidt keeps the first tangent column parallel to Φ(T)e₁ and the
// three together span a volume |det Φ(T)|, so the accumulated log stretches
// must match a finite-difference Jacobian of the nonlinear flow.
#[test]
fn tangent_growth_matches_finite_differences() {
    let params = JerkParams::reference(4.102);
    let cfg = SolveConfig { t_end: 40.0, initial_state: [0.5, -0.2, 0.1], ..Default::default() };
    for orders in [OrderSpec::Commensurate(0.95), OrderSpec::parse_triple("1,99/100,1").unwrap()] {
        let (traj, log) = integrate_with_tangent(&params, &orders, &cfg, 100).unwrap();
        assert_eq!(*log.renorm_times.last().unwrap(), *traj.times.last().unwrap());
        let end = |x0: [f64; 3]| {
            let c = SolveConfig { initial_state: x0, ..cfg };
            *integrate(&params, &orders, &c).unwrap().states.last().unwrap()
        };
        let delta = 1e-6;
        let mut phi = nalgebra::Matrix3::zeros();
        for j in 0..3 {
            let (mut up, mut down) = (cfg.initial_state, cfg.initial_state);
            up[j] += delta;
            down[j] -= delta;
            let (a, b) = (end(up), end(down));
            for i in 0..3 {
                phi[(i, j)] = (a[i] - b[i]) / (2.0 * delta);
            }
        }
        let first: f64 = log.log_norms.iter().map(|l| l[0]).sum();
        let volume: f64 = log.log_norms.iter().map(|l| l.iter().sum::<f64>()).sum();
        let fd_first = phi.column(0).norm().ln();
        let fd_volume = phi.determinant().abs().ln();
        assert!((first - fd_first).abs() < 1e-5, "{orders}: {first} vs {fd_first}");
        assert!((volume - fd_volume).abs() < 1e-4, "{orders}: {volume} vs {fd_volume}");
    }
}
