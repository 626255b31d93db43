use flakelab::{
    distortion_of_map, hamming_c2_exact, hamming_cube, lipschitz_constant, lp_point_metric,
    optimal_euclidean_distortion, snowflake, C2Options, C2Result, FiniteMetricSpace, MetricMap,
    PointSetLp,
};
use proptest::prelude::*;

fn euclidean_points() -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 3..10)
        .prop_filter_map("coincident points", |pts| {
            lp_point_metric(&PointSetLp::new(2.0, pts).ok()?).ok()
        })
        .prop_filter("near-coincident points", |m| m.min_distance() > 1e-3)
}

fn witness_distortion(m: &FiniteMetricSpace, r: &C2Result) -> f64 {
    let target = r.witness.distance_space().unwrap();
    distortion_of_map(&MetricMap::identity(m.clone(), target).unwrap())
        .unwrap()
        .distortion
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distortion_is_scale_invariant(
        a in euclidean_points(),
        seed in prop::collection::vec(-10.0f64..10.0, 30),
        s in 0.01f64..100.0,
        t in 0.01f64..100.0,
    ) {
        let n = a.n();
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![seed[i], seed[i + 10], seed[i + 20]]).collect();
        let Ok(b) = lp_point_metric(&PointSetLp::new(2.0, pts).unwrap()) else { return Ok(()); };
        let base = distortion_of_map(&MetricMap::identity(a.clone(), b.clone()).unwrap()).unwrap();
        let scaled = distortion_of_map(
            &MetricMap::identity(a.scaled(s).unwrap(), b.scaled(t).unwrap()).unwrap(),
        )
        .unwrap();
        prop_assert!(base.distortion >= 1.0 - 1e-12);
        prop_assert!((scaled.distortion / base.distortion - 1.0).abs() < 1e-12);
        prop_assert!((scaled.lip_forward / base.lip_forward - t / s).abs() < 1e-12 * t / s);
    }

    #[test]
    fn lipschitz_constants_compose(
        a in euclidean_points(),
        alpha in 0.1f64..=1.0,
        beta in 0.1f64..=1.0,
    ) {
        let b = snowflake(&a, alpha).unwrap();
        let c = snowflake(&b, beta).unwrap();
        let f = lipschitz_constant(&MetricMap::identity(a.clone(), b.clone()).unwrap()).unwrap();
        let g = lipschitz_constant(&MetricMap::identity(b, c.clone()).unwrap()).unwrap();
        let gf = lipschitz_constant(&MetricMap::identity(a, c).unwrap()).unwrap();
        prop_assert!(gf.value <= f.value * g.value * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solver_bracket_is_consistent(m in euclidean_points(), alpha in 0.3f64..=1.0) {
        let m = snowflake(&m, alpha).unwrap();
        let opts = C2Options { rel_tol: 1e-2, ..C2Options::default() };
        let r = optimal_euclidean_distortion(&m, &opts).unwrap();
        prop_assert!(1.0 <= r.lower && r.lower <= r.upper);
        prop_assert!(r.upper <= r.initial_upper * (1.0 + 1e-9));
        prop_assert!(r.upper / r.lower <= 1.0 + opts.rel_tol + 1e-9);
        prop_assert!(witness_distortion(&m, &r) <= r.upper * (1.0 + 1e-6));
    }
}

#[test]
fn euclidean_input_is_isometric() {
    let pts = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 2.0],
        vec![3.0, 1.0],
        vec![-1.0, 4.0],
    ];
    let m = lp_point_metric(&PointSetLp::new(2.0, pts).unwrap()).unwrap();
    let r = optimal_euclidean_distortion(&m, &C2Options::default()).unwrap();
    assert!(r.upper < 1.0 + 1e-6, "{}", r.upper);
}

#[test]
fn distortion_grows_with_snowflake_exponent() {
    let h = hamming_cube(3, 1.0).unwrap();
    let uppers: Vec<f64> = [0.5, 0.75, 1.0]
        .iter()
        .map(|&a| {
            optimal_euclidean_distortion(&snowflake(&h, a).unwrap(), &C2Options::default())
                .unwrap()
                .upper
        })
        .collect();
    assert!(uppers[0] < 1.0 + 1e-6);
    for w in uppers.windows(2) {
        assert!(w[0] <= w[1] * (1.0 + 1e-3), "{uppers:?}");
    }
}

#[test]
fn cube_bracket_pinches_enflo_bound() {
    // Enflo gives c₂(H_n) ≥ √n; the half-snowflake witness gives ≤ √n.
    for n in [2, 3] {
        let r = optimal_euclidean_distortion(&hamming_cube(n, 1.0).unwrap(), &C2Options::default())
            .unwrap();
        let root = (n as f64).sqrt();
        assert!(r.upper >= root * (1.0 - 1e-6));
        assert!((r.upper / root - 1.0).abs() < 0.02, "n = {n}: {r:?}");
    }
}

#[test]
fn lp_cube_solver_cross_check() {
    let p = 4.0 / 3.0;
    let exact = hamming_c2_exact(3, p).unwrap();
    let r = optimal_euclidean_distortion(&hamming_cube(3, p).unwrap(), &C2Options::default())
        .unwrap();
    assert!(r.upper >= exact * (1.0 - 1e-6), "{r:?}");
    assert!(r.upper <= exact * 1.03, "{r:?}");
}

#[test]
fn six_cycle_beats_classical_scaling() {
    // c₂(C_6) = 3/2 while the MDS start is √3.
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|i: i32| (0..6).map(|j: i32| ((i - j).rem_euclid(6)).min((j - i).rem_euclid(6)) as f64).collect())
        .collect();
    let m = FiniteMetricSpace::from_rows(&rows).unwrap();
    let r = optimal_euclidean_distortion(&m, &C2Options::default()).unwrap();
    assert!(r.initial_upper > 1.7);
    assert!((r.upper - 1.5).abs() < 0.01, "{r:?}");
}

#[test]
fn oversized_space_is_refused() {
    let h = hamming_cube(9, 1.0).unwrap();
    assert!(optimal_euclidean_distortion(&h, &C2Options::default()).is_err());
}
