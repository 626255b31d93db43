//! Exponent arithmetic for compression and snowflake exponents of ℓ_p
//! models, with finite witnesses: cube embeddings into the model metric,
//! Austin-type certificates, empirical coarse moduli, and a bounded-growth
//! scan for the snowflake exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::c2::{optimal_euclidean_distortion, C2Options};
use crate::certificates::EnfloCertificate;
use crate::error::{LabError, Result};
use crate::metric::{
    cube_vertices, hamming_cube, norm_power_metric, snowflake, FiniteMetricSpace, MetricMap,
    PointSetLp, QuasiNormModel,
};

/// Relative slack for the numerical hypothesis checks.
pub const CHECK_TOL: f64 = 1e-12;
/// Largest cube dimension for [`cube_embedding_into_lp`].
pub const MAX_EMBED_CUBE_DIM: usize = 12;

/// Verification of `δ^γ ≤ ‖f(x) - f(y)‖^r ≤ 2^r δ^γ ≤ 2^r δ` over all
/// pairs, `γ = r/p_X`, together with the sharper `A = B = 1` form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub gamma: f64,
    pub pairs: usize,
    /// `δ^γ ≤ image ≤ 2^r δ^γ ≤ 2^r δ` on every pair.
    pub weak_sandwich_holds: bool,
    /// `δ^γ ≤ image ≤ δ` on every pair.
    pub unit_sandwich_holds: bool,
    /// `max |image / δ^γ - 1|`.
    pub max_left_gap: f64,
    /// `min (δ - image) / δ`.
    pub min_right_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeEmbedding {
    pub model: QuasiNormModel,
    pub map: MetricMap,
    pub report: SandwichReport,
}

/// Maps `(H_n, d_1)` coordinate-wise into `ℓ_{p_X}^n` carrying the metric
/// `‖x - y‖_{p_X}^r`. Since `|x_i - y_i| ∈ {0, 1}`, the image distance is
/// exactly `d_1(x, y)^{r/p_X}`.
pub fn cube_embedding_into_lp(n: usize, model: &QuasiNormModel) -> Result<CubeEmbedding> {
    model.validate()?;
    if n == 0 || n > MAX_EMBED_CUBE_DIM {
        return Err(LabError::Size(format!(
            "cube dimension {n} outside 1..={MAX_EMBED_CUBE_DIM}"
        )));
    }
    let source = hamming_cube(n, 1.0)?;
    let points = PointSetLp::new(model.p_x, cube_vertices(n))?;
    let target = norm_power_metric(&points, model.r)?;
    let map = MetricMap::identity(source, target)?;

    let gamma = model.r / model.p_x;
    let two_r = 2f64.powf(model.r);
    let mut weak = true;
    let mut unit = true;
    let mut max_left_gap = 0.0_f64;
    let mut min_right_margin = f64::INFINITY;
    for (i, j, delta) in map.source.pairs() {
        let image = map.image_dist(i, j);
        let left = delta.powf(gamma);
        let lower_ok = left <= image * (1.0 + CHECK_TOL);
        weak &= lower_ok
            && image <= two_r * left * (1.0 + CHECK_TOL)
            && two_r * left <= two_r * delta * (1.0 + CHECK_TOL);
        unit &= lower_ok && image <= delta * (1.0 + CHECK_TOL);
        max_left_gap = max_left_gap.max((image / left - 1.0).abs());
        min_right_margin = min_right_margin.min((delta - image) / delta);
    }
    let report = SandwichReport {
        gamma,
        pairs: map.source.n() * (map.source.n() - 1) / 2,
        weak_sandwich_holds: weak,
        unit_sandwich_holds: unit,
        max_left_gap,
        min_right_margin: if min_right_margin.is_finite() { min_right_margin } else { 0.0 },
    };
    Ok(CubeEmbedding {
        model: *model,
        map,
        report,
    })
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(LabError::Domain(format!("{name} = {v} outside (0, 1]")));
    }
    Ok(())
}

/// `(1 - η) / γ`: the upper bound on the compression exponent delivered by
/// a family with sandwich exponent `γ` and distortion growth `diam^η`.
pub fn austin_upper_bound(gamma: f64, eta: f64) -> Result<f64> {
    check_unit_interval("gamma", gamma)?;
    check_unit_interval("eta", eta)?;
    Ok((1.0 - eta) / gamma)
}

/// `s = α = min{p_X / (2r), 1}` for coarsely embeddable models, else 0.
pub fn theoretical_exponent(model: &QuasiNormModel) -> Result<f64> {
    model.validate()?;
    if !model.coarsely_embeddable {
        return Ok(0.0);
    }
    Ok((model.p_x / (2.0 * model.r)).min(1.0))
}

/// `min{p_X / (r p_Y), 1}`: compression bound into a Banach host of type
/// `p_Y ∈ [1, 2]`.
pub fn general_host_bound(model: &QuasiNormModel, p_y: f64) -> Result<f64> {
    model.validate()?;
    if !(1.0..=2.0).contains(&p_y) {
        return Err(LabError::Domain(format!("host type p_Y = {p_y} outside [1, 2]")));
    }
    Ok((model.p_x / (model.r * p_y)).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AustinHypothesis {
    pub gamma: f64,
    pub eta: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// Common discreteness of the family.
    pub d: f64,
    pub family_ids: Vec<String>,
}

/// Evidence that `c_Y(M_n) ≥ K diam(M_n)^η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionEvidence {
    Enflo(EnfloCertificate),
    /// Lower end of an [`optimal_euclidean_distortion`] bracket.
    Solver { lower: f64 },
}

impl DistortionEvidence {
    fn lower_bound(&self) -> Option<f64> {
        match self {
            DistortionEvidence::Enflo(c) => c.lower_bound,
            DistortionEvidence::Solver { lower } => Some(*lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AustinMember {
    pub space: FiniteMetricSpace,
    /// `f_n : M_n → (X, ‖·‖^r)`; the target carries the `r`-power metric.
    pub map: MetricMap,
    pub evidence: DistortionEvidence,
}

/// Worst slacks found for one family member; every slack is relative and
/// nonnegative on an accepted certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberLedger {
    pub id: String,
    pub points: usize,
    pub diameter: f64,
    pub discreteness_slack: f64,
    pub left_sandwich_slack: f64,
    pub right_sandwich_slack: f64,
    pub distortion_lower_bound: f64,
    pub growth_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AustinBound {
    pub hypothesis: AustinHypothesis,
    /// `(1 - η) / γ`.
    pub bound: f64,
    pub members: Vec<MemberLedger>,
}

fn refuse(hypothesis: &str, member: usize, detail: String) -> LabError {
    LabError::CertificateRefused {
        hypothesis: hypothesis.into(),
        member,
        detail,
    }
}

/// Checks the hypotheses of the Austin-type lemma on a finite family and
/// emits `(1 - η)/γ` if all hold.
///
/// For every member: `d`-discreteness, `A δ^γ ≤ image ≤ B δ` over all pairs,
/// and `c(M_n) ≥ K diam(M_n)^η` from the supplied evidence. Diameters must
/// strictly increase along the family.
pub fn austin_certificate(h: &AustinHypothesis, family: &[AustinMember]) -> Result<AustinBound> {
    check_unit_interval("gamma", h.gamma)?;
    check_unit_interval("eta", h.eta)?;
    for (name, v) in [("A", h.a), ("B", h.b), ("K", h.k), ("d", h.d)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(LabError::Domain(format!("{name} = {v} must be positive")));
        }
    }
    if family.len() < 3 {
        return Err(LabError::Size(format!(
            "family of {} members; at least 3 are needed",
            family.len()
        )));
    }
    if !h.family_ids.is_empty() && h.family_ids.len() != family.len() {
        return Err(LabError::Size(format!(
            "{} family ids for {} members",
            h.family_ids.len(),
            family.len()
        )));
    }

    let mut members = Vec::with_capacity(family.len());
    let mut previous_diameter = f64::NEG_INFINITY;
    for (idx, m) in family.iter().enumerate() {
        let id = h
            .family_ids
            .get(idx)
            .cloned()
            .unwrap_or_else(|| format!("member-{idx}"));
        if m.map.source != m.space {
            return Err(refuse("map source", idx, "map source differs from the member space".into()));
        }
        let diameter = m.space.diameter();
        if !(diameter > previous_diameter) {
            return Err(refuse(
                "diameter growth",
                idx,
                format!("diameter {diameter} does not exceed previous {previous_diameter}"),
            ));
        }
        previous_diameter = diameter;

        let min_dist = m.space.min_distance();
        let discreteness_slack = min_dist / h.d - 1.0;
        if m.space.n() >= 2 && discreteness_slack < -CHECK_TOL {
            return Err(refuse(
                "discreteness",
                idx,
                format!("minimum distance {min_dist} < d = {}", h.d),
            ));
        }

        let mut left_slack = f64::INFINITY;
        let mut right_slack = f64::INFINITY;
        for (i, j, delta) in m.space.pairs() {
            let image = m.map.image_dist(i, j);
            let left = h.a * delta.powf(h.gamma);
            let right = h.b * delta;
            let ls = image / left - 1.0;
            let rs = 1.0 - image / right;
            if ls < -CHECK_TOL {
                return Err(refuse(
                    "lower sandwich",
                    idx,
                    format!("pair ({i}, {j}): image {image} < A δ^γ = {left}"),
                ));
            }
            if rs < -CHECK_TOL {
                return Err(refuse(
                    "upper sandwich",
                    idx,
                    format!("pair ({i}, {j}): image {image} > B δ = {right}"),
                ));
            }
            left_slack = left_slack.min(ls);
            right_slack = right_slack.min(rs);
        }

        if let DistortionEvidence::Enflo(cert) = &m.evidence {
            if 1usize.checked_shl(cert.n as u32) != Some(m.space.n()) {
                return Err(refuse(
                    "distortion growth",
                    idx,
                    format!(
                        "Enflo certificate is for a {}-cube, member has {} points",
                        cert.n,
                        m.space.n()
                    ),
                ));
            }
        }
        let Some(lower) = m.evidence.lower_bound() else {
            return Err(refuse(
                "distortion growth",
                idx,
                "evidence carries no distortion lower bound".into(),
            ));
        };
        let required = h.k * diameter.powf(h.eta);
        let growth_slack = lower / required - 1.0;
        if growth_slack < -CHECK_TOL {
            return Err(refuse(
                "distortion growth",
                idx,
                format!("lower bound {lower} < K diam^η = {required}"),
            ));
        }

        members.push(MemberLedger {
            id,
            points: m.space.n(),
            diameter,
            discreteness_slack,
            left_sandwich_slack: left_slack,
            right_sandwich_slack: right_slack,
            distortion_lower_bound: lower,
            growth_slack,
        });
    }
    Ok(AustinBound {
        hypothesis: h.clone(),
        bound: austin_upper_bound(h.gamma, h.eta)?,
        members,
    })
}

/// Tightest nondecreasing envelopes `ρ₁ ≤ image ≤ ρ₂` of a sampled map,
/// tabulated at the distinct source distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseModuli {
    pub breakpoints: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
}

impl CoarseModuli {
    /// Samples `(d(x, y), d(f(x), f(y)))` over all source pairs of a map.
    pub fn of_map(f: &MetricMap) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = f.source.pairs().map(|(i, j, d)| (d, f.image_dist(i, j))).collect();
        coarse_moduli(&pairs)
    }
}

/// `ρ₁(t)` is the least image distance over source distances `≥ t`,
/// `ρ₂(t)` the greatest over source distances `≤ t`.
pub fn coarse_moduli(pairs: &[(f64, f64)]) -> Result<CoarseModuli> {
    if pairs.is_empty() {
        return Err(LabError::Degenerate("no samples".into()));
    }
    if let Some(&(s, i)) = pairs.iter().find(|(s, i)| !(*s >= 0.0 && *i >= 0.0)) {
        return Err(LabError::Domain(format!("negative or NaN distance in sample ({s}, {i})")));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    // Group samples by exact source distance.
    let mut breakpoints = Vec::new();
    let mut group_min = Vec::new();
    let mut group_max = Vec::new();
    for (s, i) in sorted {
        if breakpoints.last() == Some(&s) {
            let k = breakpoints.len() - 1;
            group_min[k] = f64::min(group_min[k], i);
            group_max[k] = f64::max(group_max[k], i);
        } else {
            breakpoints.push(s);
            group_min.push(i);
            group_max.push(i);
        }
    }
    let m = breakpoints.len();
    let mut rho1 = group_min;
    for k in (0..m.saturating_sub(1)).rev() {
        rho1[k] = rho1[k].min(rho1[k + 1]);
    }
    let mut rho2 = group_max;
    for k in 1..m {
        rho2[k] = rho2[k].max(rho2[k - 1]);
    }
    Ok(CoarseModuli {
        breakpoints,
        rho1,
        rho2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionEstimate {
    pub alpha_hat: f64,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    pub t_hat: f64,
    /// `max (C_hat t^α / ρ₁(t) - 1, 0)` over the fitted breakpoints.
    pub fit_residual: f64,
    pub scale_range: (f64, f64),
    pub points_used: usize,
}

/// Least-squares fit of `log ρ₁` against `log t` over the largest scales.
///
/// The window keeps breakpoints whose `log t` lies in the top `fit_window`
/// fraction of the observed log-range.
pub fn compression_estimate(moduli: &CoarseModuli, fit_window: f64) -> Result<CompressionEstimate> {
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(LabError::Domain(format!("fit window {fit_window} outside (0, 1]")));
    }
    let positive: Vec<(f64, f64)> = moduli
        .breakpoints
        .iter()
        .zip(&moduli.rho1)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, r)| (*t, *r))
        .collect();
    if positive.len() < 5 {
        return Err(LabError::InsufficientSpan(format!(
            "{} positive breakpoints, need at least 5",
            positive.len()
        )));
    }
    let t_min = positive[0].0;
    let t_max = positive[positive.len() - 1].0;
    if t_max / t_min < 4.0 {
        return Err(LabError::InsufficientSpan(format!(
            "breakpoints span a ratio of {} < 4",
            t_max / t_min
        )));
    }
    let cut = t_min.ln() + (1.0 - fit_window) * (t_max.ln() - t_min.ln());
    let window: Vec<(f64, f64)> = positive.into_iter().filter(|(t, _)| t.ln() >= cut - 1e-12).collect();
    if window.len() < 2 {
        return Err(LabError::InsufficientSpan(format!(
            "only {} breakpoint(s) in the fit window",
            window.len()
        )));
    }
    if let Some((t, _)) = window.iter().find(|(_, r)| !(*r > 0.0)) {
        return Err(LabError::Degenerate(format!("ρ₁ vanishes at t = {t}")));
    }
    let xs: Vec<f64> = window.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|(_, r)| r.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let c_hat = intercept.exp();
    let fit_residual = window
        .iter()
        .map(|(t, r)| c_hat * t.powf(slope) / r - 1.0)
        .fold(0.0_f64, f64::max);
    Ok(CompressionEstimate {
        alpha_hat: slope,
        c_hat,
        t_hat: window[0].0,
        fit_residual,
        scale_range: (window[0].0, window[window.len() - 1].0),
        points_used: window.len(),
    })
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Growth exponents at or below this count as bounded in the scan.
pub const BOUNDED_GROWTH: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub n: usize,
    pub alpha: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    /// Slope of `log c₂` against `log n`; `None` if a cell failed.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub cells: Vec<ScanCell>,
    pub rows: Vec<ScanRow>,
    /// Largest grid exponent whose growth stays bounded.
    pub s_hat: Option<f64>,
    /// How `s_hat` is operationalized; finite spaces have no snowflake
    /// exponent of their own.
    pub proxy: String,
}

/// Snowflake scan over `H_n(d_1)`.
pub fn snowflake_exponent_scan(
    n_range: &[usize],
    alpha_grid: &[f64],
    opts: &C2Options,
) -> Result<ScanTable> {
    snowflake_exponent_scan_with(n_range, alpha_grid, opts, |n| hamming_cube(n, 1.0))
}

/// Snowflake scan over an arbitrary cube-indexed family.
///
/// For each `α`, computes `c₂(M_n^α)` across `n` (cells run in parallel and
/// are assembled by index) and fits the growth exponent `β(α)` of `c₂` in
/// `n`. `s_hat` is the largest `α` with `β(α) ≤` [`BOUNDED_GROWTH`].
pub fn snowflake_exponent_scan_with<F>(
    n_range: &[usize],
    alpha_grid: &[f64],
    opts: &C2Options,
    family: F,
) -> Result<ScanTable>
where
    F: Fn(usize) -> Result<FiniteMetricSpace> + Sync,
{
    if n_range.is_empty() || alpha_grid.is_empty() {
        return Err(LabError::Size("scan needs a nonempty range and grid".into()));
    }
    if let Some(&n) = n_range.iter().find(|&&n| n == 0 || n > 6) {
        return Err(LabError::Size(format!("scan cube dimension {n} outside 1..=6")));
    }
    for &a in alpha_grid {
        check_unit_interval("alpha", a)?;
    }
    let mut distinct = n_range.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(LabError::InsufficientSpan("scan needs at least two cube dimensions".into()));
    }

    let jobs: Vec<(f64, usize)> = alpha_grid
        .iter()
        .flat_map(|&a| n_range.iter().map(move |&n| (a, n)))
        .collect();
    let cells: Vec<ScanCell> = jobs
        .par_iter()
        .map(|&(alpha, n)| {
            let outcome = family(n)
                .and_then(|m| snowflake(&m, alpha))
                .and_then(|m| optimal_euclidean_distortion(&m, opts));
            match outcome {
                Ok(r) => ScanCell {
                    n,
                    alpha,
                    lower: Some(r.lower),
                    upper: Some(r.upper),
                    iterations: Some(r.iterations),
                    error: None,
                },
                Err(e) => ScanCell {
                    n,
                    alpha,
                    lower: None,
                    upper: None,
                    iterations: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let rows: Vec<ScanRow> = alpha_grid
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let row = &cells[k * n_range.len()..(k + 1) * n_range.len()];
            let beta = row
                .iter()
                .map(|c| c.upper.map(|u| ((c.n as f64).ln(), u.ln())))
                .collect::<Option<Vec<_>>>()
                .map(|pts| {
                    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                    least_squares(&xs, &ys).0
                });
            ScanRow { alpha, beta }
        })
        .collect();

    let s_hat = rows
        .iter()
        .filter(|r| r.beta.is_some_and(|b| b <= BOUNDED_GROWTH))
        .map(|r| r.alpha)
        .fold(None, |best: Option<f64>, a| Some(best.map_or(a, |b| b.max(a))));

    Ok(ScanTable {
        cells,
        rows,
        s_hat,
        proxy: format!(
            "s_hat = largest grid alpha whose c2 growth exponent in n is <= {BOUNDED_GROWTH}"
        ),
    })
}
