use flakelab::kernel::{basepoint_gram, lp_power_kernel, quadratic_form, PSD_TOL};
use flakelab::metric::lp_power_sum;
use flakelab::{
    check_negative_definite, cube_vertices, embed_snowflake_lp, psd_factorize, symmetric_eigen,
    EuclideanEmbedding, LabError, Matrix, PointSetLp,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-4.0..4.0)).collect())
        .collect()
}

#[test]
fn schoenberg_reproduces_snowflaked_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for set in 0..40 {
        let p = [0.5, 1.0, 1.5, 2.0][set % 4];
        let n = rng.random_range(2..=64);
        let dim = rng.random_range(1..=16);
        let ps = PointSetLp::new(p, random_points(&mut rng, n, dim)).unwrap();
        let e = embed_snowflake_lp(&ps).unwrap();
        let err = e.max_relative_error(|i, j| {
            lp_power_sum(&ps.points[i], &ps.points[j], p).sqrt()
        });
        assert!(err < 1e-9, "set {set}: p = {p}, n = {n}, error {err}");
        assert!(e.dim < n);
    }
}

#[test]
fn cube_embedding_matches_direct_gram() {
    // ℓ_1 cube: the embedding is the ½-snowflake of Hamming distance, whose
    // basepoint Gram is ½(|x| + |y| - |x ⊕ y|) = |x ∧ y|.
    let ps = PointSetLp::new(1.0, cube_vertices(4)).unwrap();
    let e = embed_snowflake_lp(&ps).unwrap();
    assert!(e.residual < 1e-9);
    for a in 0..16usize {
        for b in 0..16usize {
            let expected = (a & b).count_ones() as f64;
            let g = basepoint_gram(&lp_power_kernel(&ps));
            assert_eq!(g[(a, b)], expected);
            let d = e.distance(a, b);
            assert!((d * d - (a ^ b).count_ones() as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn two_norm_recovers_point_configuration() {
    // p = 2: the squared embedded distances are the squared Euclidean ones,
    // so the embedding is an isometric copy in the points' own dimension.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = random_points(&mut rng, 20, 3);
    let ps = PointSetLp::new(2.0, pts.clone()).unwrap();
    let e = embed_snowflake_lp(&ps).unwrap();
    assert_eq!(e.dim, 3);
    for i in 0..20 {
        for j in 0..20 {
            let d = lp_power_sum(&pts[i], &pts[j], 2.0).sqrt();
            assert!((e.distance(i, j) - d).abs() < 1e-9 * d.max(1.0));
        }
    }
}

#[test]
fn single_point_embeds_at_origin() {
    let ps = PointSetLp::new(1.5, vec![vec![3.0, -1.0]]).unwrap();
    let e = embed_snowflake_lp(&ps).unwrap();
    assert_eq!(e.n, 1);
    assert!(e.point(0).iter().all(|&x| x == 0.0));
    assert_eq!(e.residual, 0.0);
}

#[test]
fn p_above_two_is_refused_with_witness() {
    // |x - y|³ on {0, 1, 2}: c = (1, -2, 1) gives ⟨c, Kc⟩ = 8.
    let ps = PointSetLp::new(3.0, vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
    let k = lp_power_kernel(&ps);
    assert_eq!(quadratic_form(&k, &[1.0, -2.0, 1.0]), 8.0);
    match embed_snowflake_lp(&ps) {
        Err(LabError::NotNegativeDefinite { witness, value }) => {
            assert!(value > 0.0);
            assert!(witness.iter().sum::<f64>().abs() < 1e-12);
            assert!(quadratic_form(&k, &witness) > 0.0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn p_above_two_on_cube_coordinates_is_still_refused() {
    // On 0/1 coordinates ‖x - y‖_3^3 is the Hamming distance, which is
    // negative definite; p > 2 is refused regardless.
    let ps = PointSetLp::new(3.0, cube_vertices(2)).unwrap();
    assert!(matches!(embed_snowflake_lp(&ps), Err(LabError::Domain(_))));
}

#[test]
fn duplicate_points_are_degenerate() {
    let ps = PointSetLp::new(1.0, vec![vec![1.0], vec![1.0]]).unwrap();
    assert!(matches!(embed_snowflake_lp(&ps), Err(LabError::Degenerate(_))));
}

#[test]
fn embedding_document_round_trips() {
    let ps = PointSetLp::new(0.5, cube_vertices(3)).unwrap();
    let e = embed_snowflake_lp(&ps).unwrap();
    let doc = serde_json::to_string(&e).unwrap();
    let back: EuclideanEmbedding = serde_json::from_str(&doc).unwrap();
    assert_eq!(back, e);
}

/// Brute-force negative-definiteness: sample centered vectors and look for a
/// positive quadratic form.
fn sampled_max_form(k: &Matrix, rng: &mut ChaCha8Rng, samples: usize) -> f64 {
    let n = k.rows();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let mean = c.iter().sum::<f64>() / n as f64;
        c.iter_mut().for_each(|x| *x -= mean);
        let norm2: f64 = c.iter().map(|x| x * x).sum();
        best = best.max(quadratic_form(k, &c) / norm2);
    }
    best
}

#[test]
fn negative_definite_test_agrees_with_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut refusals = 0;
    for trial in 0..60 {
        let n = rng.random_range(2..=8);
        let dim = rng.random_range(1..=4);
        let p = [0.5, 1.0, 2.0, 3.0, 4.0, 6.0][trial % 6];
        let pts = random_points(&mut rng, n, dim);
        let k = lp_power_kernel(&PointSetLp::new(p, pts).unwrap());
        let report = check_negative_definite(&k, PSD_TOL).unwrap();
        let sampled = sampled_max_form(&k, &mut rng, 10_000);
        let scale = k.max_abs();
        if report.negative_definite {
            assert!(sampled <= 1e-9 * scale, "trial {trial}: sampled form {sampled}");
        } else {
            refusals += 1;
            assert!(report.witness_value > 0.0);
            // The witness is the best direction; sampling cannot beat it.
            let w = report.witness.as_ref().unwrap();
            let w2: f64 = w.iter().map(|x| x * x).sum();
            assert!(sampled <= report.witness_value / w2 * (1.0 + 1e-9) + 1e-12 * scale);
        }
        if p <= 2.0 {
            assert!(report.negative_definite, "trial {trial}: p = {p}");
        }
    }
    assert!(refusals > 0);
}

#[test]
fn symmetric_non_kernel_is_refused() {
    // c = (1, 1, -2): 2·9 - 4·1 - 4·1 = 10 > 0.
    let k = Matrix::from_rows(&[
        vec![0.0, 9.0, 1.0],
        vec![9.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ])
    .unwrap();
    let r = check_negative_definite(&k, PSD_TOL).unwrap();
    assert!(!r.negative_definite);
    let c = [1.0, 1.0, -2.0];
    assert_eq!(quadratic_form(&k, &c), 10.0);
}

#[test]
fn psd_factorize_recovers_constructed_gram() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..30 {
        let n = rng.random_range(1..=24);
        let rank = rng.random_range(1..=n);
        let x = Matrix::from_fn(n, rank, |_, _| StandardNormal.sample(&mut rng));
        let g = x.gram();
        let c = psd_factorize(&g, PSD_TOL).unwrap();
        assert!(c.cols() <= rank, "trial {trial}");
        let back = c.gram();
        assert!(back.max_abs_diff(&g) <= 1e-9 * g.max_abs().max(1.0), "trial {trial}");
    }
}

#[test]
fn psd_factorize_refuses_indefinite() {
    let g = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    match psd_factorize(&g, PSD_TOL) {
        Err(LabError::NotPsd { eigenvalue, .. }) => assert!((eigenvalue + 1.0).abs() < 1e-12),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn eigen_reconstructs_random_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = rng.random_range(2..=30);
        let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let s = Matrix::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)]);
        let e = symmetric_eigen(&s).unwrap();
        assert!(e.reconstruct().max_abs_diff(&s) < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }
}
