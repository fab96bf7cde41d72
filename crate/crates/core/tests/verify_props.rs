use std::f64::consts::{FRAC_PI_4, PI};

use corrmetric_core::verify::RatioAccumulator;
use corrmetric_core::{
    f_gamma, find_counterexample, g_alpha_beta, ratio_angles, ratio_vectors, realize_angles,
    sharpness_ratio, AngleTriple, RelaxConfig, Sample,
};
use proptest::prelude::*;

/// Triples strictly inside the feasible region, `margin` away from every face.
fn interior_triple(margin: f64) -> impl Strategy<Value = AngleTriple> {
    (margin..PI - margin, margin..PI - margin, 0.0f64..1.0).prop_filter_map(
        "thin",
        move |(a, b, s)| {
            let lo = (a - b).abs() + margin;
            let hi = (a + b).min(2.0 * PI - a - b) - margin;
            (hi > lo).then(|| AngleTriple::new(a, b, lo + s * (hi - lo)).unwrap())
        },
    )
}

fn gram_det(t: &AngleTriple) -> f64 {
    let (a, b, g) = (t.alpha.cos(), t.beta.cos(), t.gamma.cos());
    1.0 - a * a - b * b - g * g + 2.0 * a * b * g
}

fn samples(v: &[corrmetric_core::CenteredUnit; 3]) -> [Sample; 3] {
    [v[0].to_sample(), v[1].to_sample(), v[2].to_sample()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn g_and_f_symmetries(a in 0.0..PI, b in 0.0..PI) {
        let cfg = RelaxConfig::default();
        let g = g_alpha_beta(a, b, &cfg).unwrap();
        prop_assert_eq!(g.to_bits(), g_alpha_beta(b, a, &cfg).unwrap().to_bits());
        prop_assert!((g - g_alpha_beta(PI - a, b, &cfg).unwrap()).abs() <= 1e-15);
        prop_assert!((g - g_alpha_beta(a, PI - b, &cfg).unwrap()).abs() <= 1e-15);
        prop_assert!((f_gamma(a).unwrap() - f_gamma(PI - a).unwrap()).abs() <= 1e-15);
        prop_assert!((0.0..=2.0 * cfg.k).contains(&g));
    }

    // Feasibility agrees with positive semidefiniteness of the Gram matrix
    // (determinant test), away from the boundary.
    #[test]
    fn feasibility_matches_gram_psd(a in 0.0..PI, b in 0.0..PI, c in 0.0..PI) {
        let t = AngleTriple::new(a, b, c).unwrap();
        let det = gram_det(&t);
        prop_assume!(det.abs() > 1e-6);
        prop_assert_eq!(t.is_feasible(), det > 0.0);
        prop_assert_eq!(realize_angles(&t, 4).is_ok(), det > 0.0);
    }

    #[test]
    fn angle_and_vector_ratios_agree(t in interior_triple(0.01)) {
        let cfg = RelaxConfig::default();
        let v = realize_angles(&t, 5).unwrap();
        let [x, y, z] = samples(&v);
        let by_angles = ratio_angles(&t, &cfg).unwrap().unwrap();
        let by_vectors = ratio_vectors(&x, &y, &z, &cfg).unwrap().unwrap();
        prop_assert!((by_angles - by_vectors).abs() <= 1e-8, "{} vs {}", by_angles, by_vectors);
        prop_assert!(by_angles <= 2.0 + 1e-9);
    }

    #[test]
    fn realized_angles_match(t in interior_triple(0.05), n in 4usize..9) {
        let v = realize_angles(&t, n).unwrap();
        let angle = |i: usize, j: usize| {
            let d: f64 = v[i].values().iter().zip(v[j].values()).map(|(p, q)| p * q).sum();
            d.clamp(-1.0, 1.0).acos()
        };
        prop_assert!((angle(0, 1) - t.alpha).abs() <= 1e-9);
        prop_assert!((angle(1, 2) - t.beta).abs() <= 1e-9);
        prop_assert!((angle(0, 2) - t.gamma).abs() <= 1e-9);
    }

    #[test]
    fn k2_bound_holds_on_random_feasible_triples(t in interior_triple(1e-6)) {
        if let Some(r) = ratio_angles(&t, &RelaxConfig::default()).unwrap() {
            prop_assert!(r <= 2.0 + 1e-9);
        }
    }
}

#[test]
fn counterexamples_beat_every_k_below_two() {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let k: f64 = rng.random_range(1.0..2.0);
        let c = find_counterexample(k).unwrap();
        let [x, y, z] = samples(&c.vectors);
        let r = ratio_vectors(&x, &y, &z, &RelaxConfig::default())
            .unwrap()
            .unwrap();
        assert!(r > k, "k = {k}, ratio = {r}");
        assert_eq!(r, c.ratio);
    }
}

#[test]
fn sharpness_decreases_strictly_and_stays_below_two() {
    let mut prev = f64::INFINITY;
    for i in 1..=2000 {
        let a = FRAC_PI_4 * i as f64 / 2000.0;
        let r = sharpness_ratio(a).unwrap();
        assert!(r < prev, "not decreasing at {a}");
        assert!(r < 2.0);
        prev = r;
    }
    for eps in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let r = sharpness_ratio(eps / 2.0).unwrap();
        assert!(r > 2.0 - eps && r < 2.0, "eps {eps}: {r}");
    }
}

#[test]
fn degenerate_triples_never_hide_violations() {
    // Tiny alpha, beta: whenever the denominator drops below epsilon, d(x, z)
    // is tiny as well.
    let cfg = RelaxConfig::default();
    for a in [0.0f64, 1e-9, 1e-7, 1e-6, 3e-6] {
        for b in [0.0f64, 1e-9, 1e-7, 1e-6, 3e-6] {
            for s in [0.0, 0.5, 1.0] {
                let g = (a - b).abs() + s * (a + b - (a - b).abs());
                let t = AngleTriple::new(a, b, g).unwrap();
                let v = realize_angles(&t, 4).unwrap();
                let [x, y, z] = samples(&v);
                let dxy = corrmetric_core::abs_corr_distance(&x, &y).unwrap().get();
                let dyz = corrmetric_core::abs_corr_distance(&y, &z).unwrap().get();
                let dxz = corrmetric_core::abs_corr_distance(&x, &z).unwrap().get();
                if dxy + dyz < cfg.denom_epsilon {
                    assert!(dxz < 1e-6);
                    assert_eq!(ratio_vectors(&x, &y, &z, &cfg).unwrap(), None);
                }
            }
        }
    }
}

#[test]
fn accumulator_merge_is_order_independent() {
    use corrmetric_core::verify::sweep_grid_rows;
    let cfg = RelaxConfig::default();
    let parts: Vec<RatioAccumulator> = (0..8)
        .map(|i| sweep_grid_rows(0.1, &cfg, i * 4..(i + 1) * 4).unwrap())
        .collect();
    let fwd = parts
        .iter()
        .copied()
        .fold(RatioAccumulator::default(), RatioAccumulator::merge);
    let rev = parts
        .iter()
        .rev()
        .copied()
        .fold(RatioAccumulator::default(), RatioAccumulator::merge);
    assert_eq!(fwd, rev);
}
