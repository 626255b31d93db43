//! Finite metric spaces, the canonical ℓ_p and quasi-norm metrics, Hamming
//! cubes and snowflake transforms.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::matrix::Matrix;

/// Largest number of points a space may hold.
pub const MAX_POINTS: usize = 4096;
/// Largest Hamming cube dimension (`2^12 = MAX_POINTS`).
pub const MAX_CUBE_DIM: usize = 12;
/// Relative slack allowed in the triangle inequality, measured against the
/// larger side.
pub const TRIANGLE_TOL: f64 = 1e-12;

/// `n` labelled points with a validated distance matrix.
///
/// Symmetric, zero on the diagonal, strictly positive off it, and
/// satisfies the triangle inequality up to [`TRIANGLE_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricSpaceDoc", into = "MetricSpaceDoc")]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Matrix,
}

/// On-disk layout: `n`, `labels`, and the row-major `dist` buffer.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MetricSpaceDoc {
    n: usize,
    labels: Vec<String>,
    dist: Vec<f64>,
}

impl TryFrom<MetricSpaceDoc> for FiniteMetricSpace {
    type Error = LabError;

    fn try_from(doc: MetricSpaceDoc) -> Result<Self> {
        let dist = Matrix::from_row_major(doc.n, doc.n, doc.dist)?;
        FiniteMetricSpace::new(doc.labels, &dist.to_rows())
    }
}

impl From<FiniteMetricSpace> for MetricSpaceDoc {
    fn from(m: FiniteMetricSpace) -> Self {
        MetricSpaceDoc {
            n: m.n(),
            labels: m.labels,
            dist: m.dist.into_vec(),
        }
    }
}

impl FiniteMetricSpace {
    /// Validates every metric axiom before accepting the matrix.
    pub fn new(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(LabError::Size("a metric space needs at least one point".into()));
        }
        if n > MAX_POINTS {
            return Err(LabError::Size(format!("{n} points exceeds the cap of {MAX_POINTS}")));
        }
        if labels.len() != n {
            return Err(LabError::Size(format!(
                "{} labels for {n} points",
                labels.len()
            )));
        }
        let report = verify_metric_axioms(rows)?;
        if let Some(msg) = report.first_failure() {
            return Err(LabError::InvalidMetric(msg));
        }
        Ok(FiniteMetricSpace {
            labels,
            dist: Matrix::from_rows(rows)?,
        })
    }

    /// Like [`FiniteMetricSpace::new`] with labels `0..n`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(labels, rows)
    }

    /// Builds a space from a matrix produced by a formula that is a metric by
    /// construction. Only the O(n²) checks run here; the cubic triangle
    /// check is skipped.
    pub(crate) fn from_formula(labels: Vec<String>, dist: Matrix) -> Result<Self> {
        let n = dist.rows();
        debug_assert!(dist.is_square());
        if n == 0 || n > MAX_POINTS {
            return Err(LabError::Size(format!("{n} points outside 1..={MAX_POINTS}")));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist[(i, j)];
                if !(d.is_finite() && d > 0.0) {
                    return Err(LabError::Degenerate(format!(
                        "points {i} and {j} are at distance {d}"
                    )));
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.dist.rows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.dist.max_abs()
    }

    /// Smallest off-diagonal distance; zero for a single point.
    pub fn min_distance(&self) -> f64 {
        let n = self.n();
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                m = m.min(self.dist[(i, j)]);
            }
        }
        if m.is_finite() {
            m
        } else {
            0.0
        }
    }

    /// True iff all distinct points are at least `d` apart.
    pub fn is_discrete(&self, d: f64) -> bool {
        self.n() < 2 || self.min_distance() >= d
    }

    /// Every distance multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(LabError::Domain(format!("scale factor {factor} must be positive")));
        }
        let n = self.n();
        let dist = Matrix::from_fn(n, n, |i, j| self.dist[(i, j)] * factor);
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist,
        })
    }

    /// Iterator over `(i, j, d(i, j))` for `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j, self.dist[(i, j)])))
    }
}

/// Points of `ℓ_p^dim` for some `p > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetLp {
    pub p: f64,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointSetLp {
    pub fn new(p: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let ps = PointSetLp { p, dim, points };
        ps.validate()?;
        Ok(ps)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(LabError::Domain(format!("p = {} must be positive", self.p)));
        }
        if self.dim == 0 {
            return Err(LabError::Size("point dimension must be positive".into()));
        }
        if self.points.is_empty() {
            return Err(LabError::Size("point set is empty".into()));
        }
        if self.points.len() > MAX_POINTS {
            return Err(LabError::Size(format!(
                "{} points exceeds the cap of {MAX_POINTS}",
                self.points.len()
            )));
        }
        for (k, x) in self.points.iter().enumerate() {
            if x.len() != self.dim {
                return Err(LabError::Size(format!(
                    "point {k} has {} coordinates, expected {}",
                    x.len(),
                    self.dim
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(LabError::Domain(format!("point {k} has a non-finite coordinate")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `Σ |x_i - y_i|^p`.
pub fn lp_power_sum(x: &[f64], y: &[f64], p: f64) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs().powf(p)).sum()
}

/// The p-norm expression `(Σ |v_i|^p)^{1/p}`, a quasi-norm for `p < 1`.
pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    v.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Model descriptor for `ℓ_p`/`L_p`: the type exponent `p_X`, the
/// Aoki–Rolewicz exponent `r_X`, and the metric exponent `r` in use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormModel {
    pub p: f64,
    pub r: f64,
    #[serde(rename = "p_X")]
    pub p_x: f64,
    #[serde(rename = "r_X")]
    pub r_x: f64,
    pub coarsely_embeddable: bool,
}

impl QuasiNormModel {
    /// The canonical descriptor: `p_X = min{p,2}`, `r = r_X = min{p,1}`.
    pub fn canonical(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(LabError::Domain(format!("model parameter p = {p} must be positive")));
        }
        let p_x = p.min(2.0);
        let r_x = p_x.min(1.0);
        Ok(QuasiNormModel {
            p,
            r: r_x,
            p_x,
            r_x,
            coarsely_embeddable: p <= 2.0,
        })
    }

    /// Same model with metric exponent `r ∈ (0, r_X]`.
    pub fn with_r(self, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0 && r <= self.r_x) {
            return Err(LabError::Model(format!(
                "r = {r} outside (0, {}]: r-subadditivity fails for ℓ_{}",
                self.r_x, self.p
            )));
        }
        Ok(QuasiNormModel { r, ..self })
    }

    /// Checks the descriptor relations.
    pub fn validate(&self) -> Result<()> {
        let canonical = QuasiNormModel::canonical(self.p)?;
        if self.p_x != canonical.p_x
            || self.r_x != canonical.r_x
            || self.coarsely_embeddable != canonical.coarsely_embeddable
        {
            return Err(LabError::Model(format!(
                "descriptor inconsistent with p = {}: expected p_X = {}, r_X = {}",
                self.p, canonical.p_x, canonical.r_x
            )));
        }
        canonical.with_r(self.r).map(|_| ())
    }
}

/// An assignment of source points to target points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMap {
    pub source: FiniteMetricSpace,
    pub target: FiniteMetricSpace,
    pub assignment: Vec<usize>,
}

impl MetricMap {
    pub fn new(
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.n() {
            return Err(LabError::Size(format!(
                "assignment has {} entries for {} source points",
                assignment.len(),
                source.n()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&t| t >= target.n()) {
            return Err(LabError::Size(format!(
                "assignment index {bad} outside target of {} points",
                target.n()
            )));
        }
        Ok(MetricMap {
            source,
            target,
            assignment,
        })
    }

    /// Index-preserving map between spaces of equal size.
    pub fn identity(source: FiniteMetricSpace, target: FiniteMetricSpace) -> Result<Self> {
        let n = source.n();
        Self::new(source, target, (0..n).collect())
    }

    /// Distance in the target between the images of source points `i`, `j`.
    #[inline]
    pub fn image_dist(&self, i: usize, j: usize) -> f64 {
        self.target.dist(self.assignment[i], self.assignment[j])
    }

    /// First pair of distinct source points sharing an image, if any.
    pub fn collapsed_pair(&self) -> Option<(usize, usize)> {
        let mut seen = vec![usize::MAX; self.target.n()];
        for (i, &t) in self.assignment.iter().enumerate() {
            if seen[t] != usize::MAX {
                return Some((seen[t], i));
            }
            seen[t] = i;
        }
        None
    }

    pub fn is_injective(&self) -> bool {
        self.collapsed_pair().is_none()
    }
}

/// Coordinates of the cube vertices `{0,1}^n` in lexicographic order
/// (first coordinate most significant, `0 < 1`).
pub fn cube_vertices(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|k| {
            (0..n)
                .map(|i| ((k >> (n - 1 - i)) & 1) as f64)
                .collect()
        })
        .collect()
}

fn cube_labels(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|k| {
            (0..n)
                .map(|i| if (k >> (n - 1 - i)) & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect()
}

/// The Hamming cube `H_n = {0,1}^n` with the ℓ_p metric
/// `d_p(x, y) = h(x, y)^{1/p}`, `h` the Hamming distance.
pub fn hamming_cube(n: usize, p: f64) -> Result<FiniteMetricSpace> {
    if n == 0 || n > MAX_CUBE_DIM {
        return Err(LabError::Size(format!(
            "cube dimension {n} outside 1..={MAX_CUBE_DIM}"
        )));
    }
    if !p.is_finite() || p < 1.0 {
        return Err(LabError::Domain(format!(
            "p = {p} < 1: on the Hamming cube every ℓ_p metric with 0 < p < 1 equals d_1, request p = 1"
        )));
    }
    // Distances depend only on the Hamming distance; tabulate h^{1/p} once.
    let table: Vec<f64> = (0..=n).map(|h| (h as f64).powf(1.0 / p)).collect();
    let size = 1usize << n;
    let dist = Matrix::from_fn(size, size, |a, b| table[(a ^ b).count_ones() as usize]);
    FiniteMetricSpace::from_formula(cube_labels(n), dist)
}

/// The α-snowflake `d^α`, `0 < α ≤ 1`.
pub fn snowflake(m: &FiniteMetricSpace, alpha: f64) -> Result<FiniteMetricSpace> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(LabError::Domain(format!(
            "snowflake exponent {alpha} outside (0, 1]; exponents above 1 can break the triangle inequality"
        )));
    }
    let n = m.n();
    let dist = Matrix::from_fn(n, n, |i, j| m.dist(i, j).powf(alpha));
    FiniteMetricSpace::from_formula(m.labels.clone(), dist)
}

fn point_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Metric induced on an ℓ_p point set: the norm distance for `p ≥ 1`,
/// `Σ|x_i - y_i|^p` for `0 < p < 1`.
pub fn lp_point_metric(ps: &PointSetLp) -> Result<FiniteMetricSpace> {
    ps.validate()?;
    let exponent = if ps.p >= 1.0 { 1.0 / ps.p } else { 1.0 };
    power_metric(ps, exponent)
}

/// The invariant metric `‖x - y‖_p^r` for a model with `r ≤ min{p, 1}`.
pub fn quasinorm_metric(ps: &PointSetLp, model: &QuasiNormModel) -> Result<FiniteMetricSpace> {
    ps.validate()?;
    if model.p != ps.p {
        return Err(LabError::Model(format!(
            "model p = {} does not match point set p = {}",
            model.p, ps.p
        )));
    }
    norm_power_metric(ps, model.r)
}

/// `‖x - y‖_p^r` on the point set's own `p`, for any `r ∈ (0, min{p,1}]`.
pub(crate) fn norm_power_metric(ps: &PointSetLp, r: f64) -> Result<FiniteMetricSpace> {
    let r_max = ps.p.min(1.0);
    if !(r > 0.0 && r <= r_max) {
        return Err(LabError::Model(format!(
            "r = {r} outside (0, {r_max}]: r-subadditivity fails for ℓ_{}",
            ps.p
        )));
    }
    power_metric(ps, r / ps.p)
}

/// `(Σ|x_i - y_i|^p)^exponent`.
fn power_metric(ps: &PointSetLp, exponent: f64) -> Result<FiniteMetricSpace> {
    let n = ps.len();
    let mut dist = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = lp_power_sum(&ps.points[i], &ps.points[j], ps.p);
            if s == 0.0 {
                return Err(LabError::Degenerate(format!(
                    "points {i} and {j} coincide (zero off-diagonal distance)"
                )));
            }
            let d = s.powf(exponent);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    FiniteMetricSpace::from_formula(point_labels(n), dist)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityViolation {
    pub index: usize,
    /// `‖x + y‖^r`
    pub lhs: f64,
    /// `‖x‖^r + ‖y‖^r`
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityReport {
    pub p: f64,
    pub r: f64,
    pub checked: usize,
    pub violations: Vec<SubadditivityViolation>,
}

impl SubadditivityReport {
    pub fn certified(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `‖x + y‖_p^r ≤ ‖x‖_p^r + ‖y‖_p^r` on every sampled pair.
pub fn check_r_subadditive(
    p: f64,
    pairs: &[(Vec<f64>, Vec<f64>)],
    r: f64,
) -> Result<SubadditivityReport> {
    if !(p.is_finite() && p > 0.0) {
        return Err(LabError::Domain(format!("p = {p} must be positive")));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(LabError::Domain(format!("r = {r} must be positive")));
    }
    if pairs.is_empty() {
        return Err(LabError::Degenerate("empty sample".into()));
    }
    let mut violations = Vec::new();
    for (index, (x, y)) in pairs.iter().enumerate() {
        if x.len() != y.len() {
            return Err(LabError::Size(format!("pair {index} mixes dimensions")));
        }
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let lhs = lp_norm(&sum, p).powf(r);
        let rhs = lp_norm(x, p).powf(r) + lp_norm(y, p).powf(r);
        if lhs > rhs * (1.0 + TRIANGLE_TOL) {
            violations.push(SubadditivityViolation {
                index,
                lhs,
                rhs,
                slack: lhs - rhs,
            });
        }
    }
    Ok(SubadditivityReport {
        p,
        r,
        checked: pairs.len(),
        violations,
    })
}

/// Outcome of a per-pair axiom with the worst offending pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub passed: bool,
    pub witness: Option<(usize, usize)>,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleCheck {
    pub passed: bool,
    /// `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k)`.
    pub witness: Option<(usize, usize, usize)>,
    /// Largest relative excess `d(i,k) / (d(i,j) + d(j,k)) - 1`.
    pub worst_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub n: usize,
    pub symmetry: PairCheck,
    pub zero_diagonal: PairCheck,
    pub positivity: PairCheck,
    pub triangle: TriangleCheck,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.symmetry.passed
            && self.zero_diagonal.passed
            && self.positivity.passed
            && self.triangle.passed
    }

    pub fn first_failure(&self) -> Option<String> {
        if !self.symmetry.passed {
            let (i, j) = self.symmetry.witness.unwrap_or_default();
            return Some(format!("asymmetric at ({i}, {j}), gap {:e}", self.symmetry.worst));
        }
        if !self.zero_diagonal.passed {
            let (i, _) = self.zero_diagonal.witness.unwrap_or_default();
            return Some(format!("nonzero diagonal at {i}: {}", self.zero_diagonal.worst));
        }
        if !self.positivity.passed {
            let (i, j) = self.positivity.witness.unwrap_or_default();
            return Some(format!(
                "non-positive or non-finite distance {} at ({i}, {j})",
                self.positivity.worst
            ));
        }
        if !self.triangle.passed {
            let (i, j, k) = self.triangle.witness.unwrap_or_default();
            return Some(format!(
                "triangle inequality fails for ({i}, {j}, {k}), relative excess {:e}",
                self.triangle.worst_excess
            ));
        }
        None
    }
}

/// Checks every metric axiom on a square matrix, reporting the worst
/// witness for each.
pub fn verify_metric_axioms(rows: &[Vec<f64>]) -> Result<AxiomReport> {
    let n = rows.len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(LabError::NotSquare {
                rows: n,
                row,
                len: r.len(),
            });
        }
    }
    let d = |i: usize, j: usize| rows[i][j];

    let mut symmetry = PairCheck {
        passed: true,
        witness: None,
        worst: 0.0,
    };
    let mut positivity = symmetry.clone();
    let mut zero_diagonal = symmetry.clone();
    positivity.worst = f64::INFINITY;

    for i in 0..n {
        let v = d(i, i);
        if v != 0.0 && (zero_diagonal.passed || v.abs() > zero_diagonal.worst.abs()) {
            zero_diagonal = PairCheck {
                passed: false,
                witness: Some((i, i)),
                worst: v,
            };
        }
        for j in (i + 1)..n {
            let gap = (d(i, j) - d(j, i)).abs();
            let scale = d(i, j).abs().max(d(j, i).abs());
            if !(gap <= TRIANGLE_TOL * scale) && (symmetry.passed || gap > symmetry.worst) {
                symmetry = PairCheck {
                    passed: false,
                    witness: Some((i, j)),
                    worst: gap,
                };
            }
            for (a, b) in [(i, j), (j, i)] {
                let v = d(a, b);
                let bad = !(v.is_finite() && v > 0.0);
                if bad && (positivity.passed || v < positivity.worst || v.is_nan()) {
                    positivity = PairCheck {
                        passed: false,
                        witness: Some((a, b)),
                        worst: v,
                    };
                }
            }
        }
    }
    if positivity.passed {
        positivity.worst = if n < 2 {
            0.0
        } else {
            (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| d(i, j))
                .fold(f64::INFINITY, f64::min)
        };
    }

    let mut triangle = TriangleCheck {
        passed: true,
        witness: None,
        worst_excess: 0.0,
    };
    // Triangle check only makes sense on finite entries.
    if rows.iter().flatten().all(|v| v.is_finite()) {
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let lhs = d(i, k);
                    let rhs = d(i, j) + d(j, k);
                    if lhs > rhs * (1.0 + TRIANGLE_TOL) {
                        let excess = if rhs > 0.0 { lhs / rhs - 1.0 } else { f64::INFINITY };
                        if triangle.passed || excess > triangle.worst_excess {
                            triangle = TriangleCheck {
                                passed: false,
                                witness: Some((i, j, k)),
                                worst_excess: excess,
                            };
                        }
                    }
                }
            }
        }
    }

    Ok(AxiomReport {
        n,
        symmetry,
        zero_diagonal,
        positivity,
        triangle,
    })
}
