use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use corrmetric_core::{
    abs_corr_distance_unit, brute_force_knn, center_and_normalize, lower_bound_angle,
    lower_bound_relaxed, projective_angle, realize_angles, AngleTriple, IndexConfig, QmIndex,
    Sample, Strategy,
};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normal_samples(n: usize, dim: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Sample::new((0..dim).map(|_| rng.sample(StandardNormal)).collect()).unwrap())
        .collect()
}

/// Random corpus with a few affine and negated copies mixed in.
fn corpus_with_copies(n: usize, dim: usize, seed: u64) -> Vec<Sample> {
    let mut pts = normal_samples(n, dim, seed);
    for i in 0..n / 5 {
        let src = pts[(i * 7) % n].values().to_vec();
        let a = if i % 2 == 0 { -2.5 } else { 0.75 };
        pts.push(Sample::new(src.iter().map(|v| a * v + i as f64).collect()).unwrap());
    }
    pts
}

fn strategies() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop_oneof![
        Just(Strategy::RelaxedK),
        Just(Strategy::ProjectiveAngle),
        Just(Strategy::Brute)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn knn_and_range_equal_brute_force(
        n in 1usize..150,
        dim in 3usize..12,
        leaf_size in 1usize..10,
        k in 1usize..20,
        r in 0.0f64..1.0,
        seed in any::<u64>(),
        strategy in strategies(),
    ) {
        let pts = corpus_with_copies(n, dim, seed);
        let cfg = IndexConfig { strategy, leaf_size, seed, k_constant: 2.0 };
        let idx = QmIndex::build(&pts, cfg).unwrap();
        idx.validate().unwrap();
        for q in normal_samples(5, dim, seed ^ 1).iter().chain(&pts[..pts.len().min(3)]) {
            let qu = center_and_normalize(q).unwrap();
            let got = idx.knn(q, k).unwrap();
            let want = brute_force_knn(idx.points(), &qu, k).unwrap();
            prop_assert_eq!(&got.neighbors, &want.neighbors);
            prop_assert_eq!(got.neighbors.len(), k.min(pts.len()));
            prop_assert!(got.distance_evaluations <= pts.len() as u64);

            let want_ids: Vec<usize> = (0..pts.len())
                .filter(|&i| abs_corr_distance_unit(&qu, &idx.points()[i]).unwrap().get() <= r)
                .collect();
            prop_assert_eq!(idx.range_query(q, r).unwrap().ids, want_ids);
        }
    }

    #[test]
    fn angle_strategy_never_evaluates_more(n in 20usize..300, dim in 3usize..30, seed in any::<u64>(), k in 1usize..12) {
        let pts = normal_samples(n, dim, seed);
        let build = |s| QmIndex::build(&pts, IndexConfig { leaf_size: 4, seed, ..IndexConfig::with_strategy(s) }).unwrap();
        let relaxed = build(Strategy::RelaxedK);
        let angle = build(Strategy::ProjectiveAngle);
        for q in normal_samples(10, dim, seed.wrapping_add(1)) {
            let a = angle.knn(&q, k).unwrap();
            let b = relaxed.knn(&q, k).unwrap();
            prop_assert_eq!(&a.neighbors, &b.neighbors);
            prop_assert!(a.distance_evaluations <= b.distance_evaluations);
        }
    }

    #[test]
    fn serial_index_is_independent_of_strategy_switch(seed in any::<u64>()) {
        let pts = normal_samples(60, 6, seed);
        let mut idx = QmIndex::build(&pts, IndexConfig { leaf_size: 3, ..Default::default() }).unwrap();
        let before = idx.nodes().to_vec();
        idx.set_strategy(Strategy::ProjectiveAngle).unwrap();
        prop_assert_eq!(idx.nodes(), &before[..]);
    }
}

#[test]
fn lower_bounds_are_sound_and_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..10_000 {
        let dim = 3 + i % 10;
        let draw = |rng: &mut ChaCha8Rng| {
            let s = Sample::new((0..dim).map(|_| rng.sample(StandardNormal)).collect()).unwrap();
            center_and_normalize(&s).unwrap()
        };
        let (q, p, x) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let d = |a, b| abs_corr_distance_unit(a, b).unwrap().get();
        let th = |a, b| projective_angle(a, b).unwrap();
        let relaxed = lower_bound_relaxed(d(&q, &p), d(&p, &x), 2.0)
            .unwrap()
            .get();
        let angle = lower_bound_angle(th(&q, &p), th(&p, &x)).unwrap().get();
        assert!(relaxed <= d(&q, &x) + 1e-12);
        assert!(angle <= d(&q, &x) + 1e-12);
        assert!(angle >= relaxed - 1e-12);
    }
}

/// The configuration of three vectors at angles (pi/4, pi/4, pi/2): with the
/// plain triangle inequality (K = 1) the pruning bound from Z to Y exceeds
/// the true d(X, Y) and the neighbour is lost.
#[test]
fn unrelaxed_constant_dismisses_true_neighbour() {
    let t = AngleTriple::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_2).unwrap();
    let [x, y, z] = realize_angles(&t, 3).unwrap();
    let corpus = [z.to_sample(), y.to_sample()];
    let query = x.to_sample();
    let r = 0.3; // d(X, Y) = 1 - cos(pi/4) ~ 0.293

    let mut dismissed = 0;
    for seed in 0..16 {
        let cfg = IndexConfig {
            k_constant: 1.0,
            leaf_size: 1,
            seed,
            strategy: Strategy::RelaxedK,
        };
        let unsound = QmIndex::build_unsound(&corpus, cfg).unwrap();
        if unsound.range_query(&query, r).unwrap().ids.is_empty() {
            dismissed += 1;
        }
        let sound = QmIndex::build(
            &corpus,
            IndexConfig {
                k_constant: 2.0,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(sound.range_query(&query, r).unwrap().ids, vec![1]);
    }
    assert!(dismissed >= 1);
}
