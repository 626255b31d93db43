//! Negative-definite kernels and the Schoenberg embedding of snowflaked
//! ℓ_p metrics into Euclidean space.
//!
//! For `0 < p ≤ 2` the kernel `K(x, y) = ‖x - y‖_p^p` is negative definite,
//! so `√K` is a Euclidean distance. The embedding picks the first point as
//! basepoint, forms the Gram matrix
//!
//! ```text
//! G(i, j) = ½ (K(i, 0) + K(j, 0) - K(i, j))
//! ```
//!
//! and factorizes it through the eigendecomposition. The resulting points
//! sit at mutual distance `‖x_i - x_j‖_p^{p/2}`.

use serde::{Deserialize, Serialize};

use crate::eigen::{require_square, symmetric_eigen, SYMMETRY_TOL};
use crate::error::{LabError, Result};
use crate::matrix::Matrix;
use crate::metric::{lp_power_sum, FiniteMetricSpace, PointSetLp};

/// Default relative clamp for eigenvalues of kernel Gram matrices.
pub const PSD_TOL: f64 = 1e-9;

/// Points in `ℝ^dim` together with their Gram matrix and the largest
/// relative error against the distances they were built to realize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingDoc", into = "EmbeddingDoc")]
pub struct EuclideanEmbedding {
    pub n: usize,
    pub dim: usize,
    pub coords: Matrix,
    pub gram: Matrix,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EmbeddingDoc {
    n: usize,
    dim: usize,
    coords: Vec<f64>,
    residual: f64,
}

impl TryFrom<EmbeddingDoc> for EuclideanEmbedding {
    type Error = LabError;

    fn try_from(doc: EmbeddingDoc) -> Result<Self> {
        let coords = Matrix::from_row_major(doc.n, doc.dim, doc.coords)?;
        Ok(EuclideanEmbedding::from_coords(coords, doc.residual))
    }
}

impl From<EuclideanEmbedding> for EmbeddingDoc {
    fn from(e: EuclideanEmbedding) -> Self {
        EmbeddingDoc {
            n: e.n,
            dim: e.dim,
            coords: e.coords.into_vec(),
            residual: e.residual,
        }
    }
}

impl EuclideanEmbedding {
    /// Wraps coordinates, taking `coords · coordsᵀ` as the Gram matrix.
    pub fn from_coords(coords: Matrix, residual: f64) -> Self {
        EuclideanEmbedding {
            n: coords.rows(),
            dim: coords.cols(),
            gram: coords.gram(),
            coords,
            residual,
        }
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.coords.row(i)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest relative gap between embedded distances and `target(i, j)`.
    pub fn max_relative_error(&self, target: impl Fn(usize, usize) -> f64) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let t = target(i, j);
                worst = worst.max((self.distance(i, j) - t).abs() / t);
            }
        }
        worst
    }

    /// The Euclidean metric on the embedded points. Fails if two points
    /// coincide.
    pub fn distance_space(&self) -> Result<FiniteMetricSpace> {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { 0.0 } else { self.distance(i, j) }).collect())
            .collect();
        FiniteMetricSpace::from_formula(
            (0..self.n).map(|i| i.to_string()).collect(),
            Matrix::from_rows(&rows)?,
        )
    }
}

/// Coordinates from the eigenvalues above `tol · λ_max`, without checking
/// the negative part of the spectrum.
pub(crate) fn factorize_clamped(g: &Matrix, tol: f64) -> Result<Matrix> {
    let eig = symmetric_eigen(g)?;
    Ok(coords_from_eigen(&eig.values, &eig.vectors, tol))
}

fn coords_from_eigen(values: &[f64], vectors: &Matrix, tol: f64) -> Matrix {
    let n = vectors.rows();
    let lambda_max = values.first().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > tol * lambda_max && l > 0.0)
        .map(|(k, _)| k)
        .collect();
    Matrix::from_fn(n, kept.len(), |i, c| {
        let k = kept[c];
        values[k].sqrt() * vectors[(i, k)]
    })
}

/// Factorizes a PSD matrix as `coords · coordsᵀ`.
///
/// Eigenvalues in `[-tol·λ_max, tol·λ_max]` are treated as zero and
/// dropped, so the returned width is the numerical rank.
pub fn psd_factorize(g: &Matrix, tol: f64) -> Result<Matrix> {
    require_square(g)?;
    let eig = symmetric_eigen(g)?;
    let lambda_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let lambda_min = eig.values.last().copied().unwrap_or(0.0);
    let threshold = tol * lambda_max;
    if lambda_min < -threshold {
        return Err(LabError::NotPsd {
            eigenvalue: lambda_min,
            threshold,
        });
    }
    Ok(coords_from_eigen(&eig.values, &eig.vectors, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeDefiniteReport {
    pub negative_definite: bool,
    /// Smallest eigenvalue of `-J K J`.
    pub min_eigenvalue: f64,
    /// Centered vector with `cᵀ K c > 0`, present when the test fails.
    pub witness: Option<Vec<f64>>,
    /// `cᵀ K c` for the witness.
    pub witness_value: f64,
}

/// `-J K J` with `J = I - 11ᵀ/n`.
fn centered_negation(k: &Matrix) -> Matrix {
    let n = k.rows();
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n).map(|i| k.row(i).iter().sum::<f64>() / nf).collect();
    let col_mean: Vec<f64> = (0..n).map(|j| (0..n).map(|i| k[(i, j)]).sum::<f64>() / nf).collect();
    let grand = row_mean.iter().sum::<f64>() / nf;
    Matrix::from_fn(n, n, |i, j| -(k[(i, j)] - row_mean[i] - col_mean[j] + grand))
}

/// Decides whether `Σ c_i c_j K(i, j) ≤ 0` for every `c` with `Σ c_i = 0`
/// by testing `-J K J` for positive semidefiniteness.
pub fn check_negative_definite(k: &Matrix, tol: f64) -> Result<NegativeDefiniteReport> {
    require_square(k)?;
    k.check_symmetric(SYMMETRY_TOL)?;
    let n = k.rows();
    if let Some(i) = (0..n).find(|&i| k[(i, i)] != 0.0) {
        return Err(LabError::Domain(format!(
            "kernel diagonal entry {i} is {}, expected 0",
            k[(i, i)]
        )));
    }
    if n == 0 {
        return Ok(NegativeDefiniteReport {
            negative_definite: true,
            min_eigenvalue: 0.0,
            witness: None,
            witness_value: 0.0,
        });
    }
    let m = centered_negation(k);
    let eig = symmetric_eigen(&m)?;
    let scale = eig.values.iter().fold(0.0_f64, |s, l| s.max(l.abs()));
    let min_eigenvalue = *eig.values.last().expect("n > 0");
    if min_eigenvalue >= -tol * scale {
        return Ok(NegativeDefiniteReport {
            negative_definite: true,
            min_eigenvalue,
            witness: None,
            witness_value: 0.0,
        });
    }
    let mut c = eig.vector(n - 1);
    let mean = c.iter().sum::<f64>() / n as f64;
    c.iter_mut().for_each(|x| *x -= mean);
    let value = quadratic_form(k, &c);
    Ok(NegativeDefiniteReport {
        negative_definite: false,
        min_eigenvalue,
        witness: Some(c),
        witness_value: value,
    })
}

pub fn quadratic_form(k: &Matrix, c: &[f64]) -> f64 {
    let n = k.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += c[i] * c[j] * k[(i, j)];
        }
    }
    s
}

/// `K(i, j) = Σ_t |x_i,t - x_j,t|^p`, i.e. `‖x_i - x_j‖_p^p`.
pub fn lp_power_kernel(ps: &PointSetLp) -> Matrix {
    let n = ps.len();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = lp_power_sum(&ps.points[i], &ps.points[j], ps.p);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Gram matrix of a kernel-distance profile relative to basepoint 0.
pub fn basepoint_gram(k: &Matrix) -> Matrix {
    let n = k.rows();
    Matrix::from_fn(n, n, |i, j| 0.5 * (k[(i, 0)] + k[(j, 0)] - k[(i, j)]))
}

/// Embeds an ℓ_p point set, `0 < p ≤ 2`, so that Euclidean distances equal
/// `‖x_i - x_j‖_p^{p/2}`.
pub fn embed_snowflake_lp(ps: &PointSetLp) -> Result<EuclideanEmbedding> {
    ps.validate()?;
    let k = lp_power_kernel(ps);
    let n = ps.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if k[(i, j)] == 0.0 {
                return Err(LabError::Degenerate(format!("points {i} and {j} coincide")));
            }
        }
    }
    if ps.p > 2.0 {
        let report = check_negative_definite(&k, PSD_TOL)?;
        return Err(match report.witness {
            Some(witness) => LabError::NotNegativeDefinite {
                witness,
                value: report.witness_value,
            },
            None => LabError::Domain(format!(
                "p = {} > 2: ‖·‖_p^p is not negative definite in general",
                ps.p
            )),
        });
    }
    let coords = psd_factorize(&basepoint_gram(&k), PSD_TOL)?;
    let mut embedding = EuclideanEmbedding::from_coords(coords, 0.0);
    embedding.residual = embedding.max_relative_error(|i, j| k[(i, j)].sqrt());
    Ok(embedding)
}
