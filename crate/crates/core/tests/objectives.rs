use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use seqfed::data::generate_synthetic;
use seqfed::objectives::{
    build_hard_instance, build_quadratic_group, heterogeneity_stats, HardKind, HardParams, Regime,
};
use seqfed::{ClientObjective, LogisticClient, QuadraticClient};

fn fd_rel_error(c: &ClientObjective, x: &[f64]) -> f64 {
    let g = c.gradient(x).unwrap();
    let h = 1e-6;
    let mut err = 0.0;
    for i in 0..x.len() {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[i] += h;
        xm[i] -= h;
        let fd = (c.value(&xp).unwrap() - c.value(&xm).unwrap()) / (2.0 * h);
        err += (fd - g[i]).powi(2);
    }
    err.sqrt() / g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0)
}

fn all_group_clients() -> Vec<ClientObjective> {
    (1..=10)
        .flat_map(|id| build_quadratic_group(id).unwrap())
        .collect()
}

fn hard_clients() -> Vec<ClientObjective> {
    let mut out = Vec::new();
    let p = HardParams::new(4, 2, 3);
    for (kind, regime) in [
        (HardKind::Stochastic, Regime::TwoSlope),
        (HardKind::Stochastic, Regime::MidLr),
        (HardKind::Heterogeneity, Regime::TwoSlope),
        (HardKind::Heterogeneity, Regime::HighLr),
        (HardKind::CompositeSc, Regime::MidLr),
    ] {
        out.extend(build_hard_instance(kind, regime, &p).unwrap().clients());
    }
    out
}

/// A coordinate bounded away from the curvature switch at 0.
fn off_kink() -> impl Strategy<Value = f64> {
    (1e-3..5.0f64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn quadratic_gradients_match_finite_differences(x in off_kink()) {
        for c in all_group_clients() {
            prop_assert!(fd_rel_error(&c, &[x]) <= 1e-6);
        }
    }

    #[test]
    fn hard_instance_gradients_match_finite_differences(xs in proptest::collection::vec(off_kink(), 9)) {
        for c in hard_clients() {
            let x = &xs[..c.dim()];
            prop_assert!(fd_rel_error(&c, x) <= 1e-6);
        }
    }

    #[test]
    fn logistic_gradients_match_finite_differences(xs in proptest::collection::vec(-2.0..2.0f64, 4)) {
        let data = Arc::new(generate_synthetic(80, 4, 3));
        let c: ClientObjective = LogisticClient::new(data, (10..60).collect(), 0.05, 8).into();
        prop_assert!(fd_rel_error(&c, &xs) <= 1e-6);
    }

    #[test]
    fn clients_are_convex(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        for c in all_group_clients().iter().chain(&hard_clients()) {
            let d = c.dim();
            let (xv, yv) = (vec![x; d], vec![y; d]);
            let g = c.gradient(&yv).unwrap();
            let lin: f64 = g.iter().map(|gi| gi * (x - y)).sum();
            let gap = c.value(&xv).unwrap() - c.value(&yv).unwrap() - lin;
            prop_assert!(gap >= -1e-9 * (1.0 + c.value(&xv).unwrap().abs()), "gap {}", gap);
        }
    }

    #[test]
    fn piecewise_gradients_are_lipschitz(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        for c in all_group_clients() {
            let ClientObjective::Quadratic(q) = &c else { unreachable!() };
            let diff = (q.gradient(x) - q.gradient(y)).abs();
            prop_assert!(diff <= q.max_curvature() * (x - y).abs() + 1e-12);
        }
    }
}

#[test]
fn kink_uses_the_right_branch() {
    let q = QuadraticClient::piecewise(3.0, 1.0, 0.5);
    assert_eq!(q.curvature_at(0.0), 1.0);
    assert_eq!(q.gradient(0.0), 0.5);
}

#[test]
fn group_statistics() {
    // (ζ*, δ, H) per group
    let expected = [
        (1.0, 0.0, 0.0),
        (1.0, 0.5, 0.0),
        (1.0, 1.0, 0.0),
        (1.0, 0.0, 0.5),
        (1.0, 0.0, 1.0),
        (10.0, 0.0, 0.0),
        (10.0, 0.5, 0.0),
        (10.0, 1.0, 0.0),
        (10.0, 0.0, 0.5),
        (10.0, 0.0, 1.0),
    ];
    for (id, (zs, delta, h)) in (1..=10).zip(expected) {
        let s = heterogeneity_stats(&build_quadratic_group(id).unwrap(), &[0.0]).unwrap();
        assert_eq!(s.zeta_star, zs, "group {id}");
        assert_eq!(s.delta, Some(delta), "group {id}");
        assert_eq!(s.hessian_lip, Some(h), "group {id}");
    }
}

#[test]
fn rademacher_gradients_average_exactly() {
    let q = QuadraticClient::piecewise(2.0, 1.0, 0.3).with_noise(0.7);
    let c: ClientObjective = q.into();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = [0.4];
    let exact = c.gradient(&x).unwrap()[0];
    let n = 100_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| c.stochastic_gradient(&x, &mut rng).unwrap()[0])
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    // each draw is exact ± σ, so the standard error is σ/√n
    assert!((mean - exact).abs() <= 5.0 * 0.7 / (n as f64).sqrt());
    let distinct: Vec<f64> = {
        let mut v = samples.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    assert_eq!(distinct.len(), 2);
    assert!(((distinct[0] + distinct[1]) / 2.0 - exact).abs() < 1e-15);
}
