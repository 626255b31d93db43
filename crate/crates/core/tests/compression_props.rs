use flakelab::compression::least_squares;
use flakelab::{
    austin_certificate, austin_upper_bound, coarse_moduli, compression_estimate, cube_embedding_into_lp,
    cube_vertices, enflo_type_constant, general_host_bound, hamming_cube, lp_point_metric,
    model_space_descriptors, snowflake, snowflake_exponent_scan_with, theoretical_exponent,
    AustinBound, AustinHypothesis, AustinMember, C2Options, CoarseModuli, DistortionEvidence,
    LabError, MetricMap, PointSetLp, QuasiNormModel,
};
use proptest::prelude::*;

const P_GRID: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];

#[test]
fn exponent_arithmetic_agrees_on_p_grid() {
    for p in P_GRID {
        let m = model_space_descriptors(p).unwrap();
        let theory = theoretical_exponent(&m).unwrap();
        assert_eq!(austin_upper_bound(m.r / m.p_x, 0.5).unwrap(), theory, "p = {p}");
        assert_eq!(general_host_bound(&m, 2.0).unwrap(), theory, "p = {p}");
        let expected = if p <= 1.0 { 0.5 } else { p / 2.0 };
        assert_eq!(theory, expected, "p = {p}");
    }
}

#[test]
fn non_embeddable_models_have_zero_exponent() {
    for p in [2.5, 3.0, 8.0] {
        assert_eq!(theoretical_exponent(&model_space_descriptors(p).unwrap()).unwrap(), 0.0);
    }
}

#[test]
fn cube_sandwich_holds_with_unit_constants() {
    for p in [0.5, 0.75, 1.0, 1.5, 2.0] {
        let model = model_space_descriptors(p).unwrap();
        for n in 1..=8 {
            let e = cube_embedding_into_lp(n, &model).unwrap();
            assert!(e.report.weak_sandwich_holds, "p = {p}, n = {n}");
            assert!(e.report.unit_sandwich_holds, "p = {p}, n = {n}");
            assert!(e.report.max_left_gap <= 1e-12, "p = {p}, n = {n}");
            assert!(e.report.min_right_margin >= -1e-12);
            assert_eq!(e.report.gamma, model.r / model.p_x);
        }
    }
}

#[test]
fn sandwich_with_smaller_r() {
    let model = model_space_descriptors(1.5).unwrap().with_r(0.5).unwrap();
    let e = cube_embedding_into_lp(4, &model).unwrap();
    assert!(e.report.unit_sandwich_holds);
    assert!((e.report.gamma - 1.0 / 3.0).abs() < 1e-15);
    assert!(model_space_descriptors(0.5).unwrap().with_r(0.75).is_err());
}

/// Sign cube identity into ℓ_2; C = 1 so the lower bound is √n.
fn euclidean_cube_certificate(n: usize) -> flakelab::EnfloCertificate {
    let pts = cube_vertices(n)
        .into_iter()
        .map(|v| v.into_iter().map(|b| 2.0 * b - 1.0).collect())
        .collect();
    let target = lp_point_metric(&PointSetLp::new(2.0, pts).unwrap()).unwrap();
    let f = MetricMap::identity(hamming_cube(n, 1.0).unwrap(), target).unwrap();
    enflo_type_constant(format!("sign-cube-{n}"), &f, 2.0).unwrap()
}

fn half_model_family() -> Vec<AustinMember> {
    let model = model_space_descriptors(0.5).unwrap();
    [2, 3, 4]
        .iter()
        .map(|&n| {
            let e = cube_embedding_into_lp(n, &model).unwrap();
            AustinMember {
                space: e.map.source.clone(),
                map: e.map,
                evidence: DistortionEvidence::Enflo(euclidean_cube_certificate(n)),
            }
        })
        .collect()
}

fn hypothesis(eta: f64) -> AustinHypothesis {
    AustinHypothesis {
        gamma: 1.0,
        eta,
        a: 1.0,
        b: 1.0,
        k: 1.0,
        d: 1.0,
        family_ids: vec!["H2".into(), "H3".into(), "H4".into()],
    }
}

#[test]
fn austin_certificate_for_half_model() {
    let bound = austin_certificate(&hypothesis(0.5), &half_model_family()).unwrap();
    let theory = theoretical_exponent(&model_space_descriptors(0.5).unwrap()).unwrap();
    assert_eq!(bound.bound, theory);
    for (m, n) in bound.members.iter().zip([2.0f64, 3.0, 4.0]) {
        assert!((m.distortion_lower_bound - n.sqrt()).abs() < 1e-12);
        assert!(m.growth_slack.abs() < 1e-12);
    }
    let doc = serde_json::to_string(&bound).unwrap();
    let back: AustinBound = serde_json::from_str(&doc).unwrap();
    assert_eq!(back, bound);
    assert_eq!(bound.to_csv().unwrap().lines().count(), 4);
}

#[test]
fn austin_certificate_refuses_fast_growth() {
    match austin_certificate(&hypothesis(0.9), &half_model_family()) {
        Err(LabError::CertificateRefused { hypothesis, member, detail }) => {
            assert_eq!(hypothesis, "distortion growth");
            assert_eq!(member, 0);
            assert!(detail.contains("K diam^η"));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn austin_certificate_accepts_solver_evidence() {
    let mut family = half_model_family();
    for (m, n) in family.iter_mut().zip([2.0f64, 3.0, 4.0]) {
        m.evidence = DistortionEvidence::Solver { lower: n.sqrt() };
    }
    assert_eq!(austin_certificate(&hypothesis(0.5), &family).unwrap().bound, 0.5);
    family[1].evidence = DistortionEvidence::Solver { lower: 1.5 };
    assert!(austin_certificate(&hypothesis(0.5), &family).is_err());
}

#[test]
fn austin_certificate_refuses_coarse_discreteness() {
    let h = AustinHypothesis { d: 2.0, ..hypothesis(0.5) };
    match austin_certificate(&h, &half_model_family()) {
        Err(LabError::CertificateRefused { hypothesis, .. }) => assert_eq!(hypothesis, "discreteness"),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn moduli_bracket_samples(
        samples in prop::collection::vec((0.0f64..20.0, 0.0f64..50.0), 1..60),
        repeats in prop::collection::vec(0usize..60, 0..20),
    ) {
        // Repeat some source distances so groups have several images.
        let mut pairs = samples.clone();
        for r in repeats {
            let (s, _) = samples[r % samples.len()];
            pairs.push((s, samples[(r * 7) % samples.len()].1));
        }
        let m = coarse_moduli(&pairs).unwrap();
        prop_assert!(m.breakpoints.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(m.rho1.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(m.rho2.windows(2).all(|w| w[0] <= w[1]));
        for (s, i) in pairs {
            let k = m.breakpoints.iter().position(|&t| t == s).unwrap();
            prop_assert!(m.rho1[k] <= i && i <= m.rho2[k]);
        }
    }

    #[test]
    fn power_map_exponent_is_recovered(
        a in 0.05f64..2.0,
        c in 0.1f64..10.0,
        mut ts in prop::collection::vec(0.5f64..100.0, 8..40),
        window in 0.3f64..=1.0,
    ) {
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        prop_assume!(ts.len() >= 5 && ts[ts.len() - 1] / ts[0] >= 4.0);
        let pairs: Vec<(f64, f64)> = ts.iter().map(|&t| (t, c * t.powf(a))).collect();
        let m = coarse_moduli(&pairs).unwrap();
        match compression_estimate(&m, window) {
            Ok(e) => {
                prop_assert!((e.alpha_hat - a).abs() < 1e-6, "{} vs {}", e.alpha_hat, a);
                prop_assert!((e.c_hat / c - 1.0).abs() < 1e-6);
                prop_assert!(e.fit_residual < 1e-6);
            }
            Err(LabError::InsufficientSpan(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn estimate_recovers_half_snowflake_and_isometry() {
    let h = hamming_cube(8, 1.0).unwrap();
    let flake = CoarseModuli::of_map(&MetricMap::identity(h.clone(), snowflake(&h, 0.5).unwrap()).unwrap())
        .unwrap();
    let e = compression_estimate(&flake, 0.5).unwrap();
    assert!((e.alpha_hat - 0.5).abs() < 1e-12);
    let iso = CoarseModuli::of_map(&MetricMap::identity(h.clone(), h).unwrap()).unwrap();
    assert!((compression_estimate(&iso, 0.5).unwrap().alpha_hat - 1.0).abs() < 1e-12);
}

#[test]
fn least_squares_on_a_line() {
    let (m, b) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
    assert_eq!((m, b), (2.0, 1.0));
}

/// Cube family carried by the model: `H_n` with the image metric
/// `‖x - y‖_{p_X}^r = d_1^{r/p_X}`.
fn model_cube(model: &QuasiNormModel, n: usize) -> flakelab::Result<flakelab::FiniteMetricSpace> {
    Ok(cube_embedding_into_lp(n, model)?.map.target)
}

#[test]
fn exponent_ordering_on_model_cube_families() {
    // Models whose cube images span a distance ratio of 4 within the
    // 9-cube; for p > 1.5 the exponent r/p_X is too small for that.
    let opts = C2Options::default();
    for p in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5] {
        let model = model_space_descriptors(p).unwrap();
        let scan = snowflake_exponent_scan_with(&[2, 3], &[0.25, 0.5, 0.75, 1.0], &opts, |n| {
            model_cube(&model, n)
        })
        .unwrap();
        let s_hat = scan.s_hat.unwrap();

        // Compression of the same family into Hilbert space through the
        // ℓ_2 cube, whose distances are d_1^{1/2}.
        let source = model_cube(&model, 9).unwrap();
        let hilbert = lp_point_metric(&PointSetLp::new(2.0, cube_vertices(9)).unwrap()).unwrap();
        let moduli = CoarseModuli::of_map(&MetricMap::identity(source, hilbert).unwrap()).unwrap();
        let alpha_hat = compression_estimate(&moduli, 0.5).unwrap().alpha_hat;

        assert!(0.0 <= s_hat, "p = {p}");
        assert!(s_hat <= alpha_hat + 1e-9, "p = {p}: s_hat {s_hat} > alpha_hat {alpha_hat}");
        assert!(alpha_hat <= 1.0 + 1e-9, "p = {p}");
        let theory = theoretical_exponent(&model).unwrap();
        assert!((alpha_hat - theory).abs() < 1e-9, "p = {p}");
    }
}

#[test]
fn scan_rejects_bad_ranges() {
    let opts = C2Options::default();
    let fam = |n| hamming_cube(n, 1.0);
    assert!(snowflake_exponent_scan_with(&[2, 7], &[1.0], &opts, fam).is_err());
    assert!(snowflake_exponent_scan_with(&[3, 3], &[1.0], &opts, fam).is_err());
    assert!(snowflake_exponent_scan_with(&[2, 3], &[1.5], &opts, fam).is_err());
    assert!(snowflake_exponent_scan_with(&[], &[1.0], &opts, fam).is_err());
}
