//! Optimal Euclidean distortion `c₂(M)` by bisection on a PSD feasibility
//! problem.
//!
//! `M` embeds in Hilbert space with distortion `C` iff some PSD matrix `Q`
//! satisfies, for every pair `i < j`,
//!
//! ```text
//! d(i,j)² ≤ Q(i,i) + Q(j,j) - 2 Q(i,j) ≤ C² d(i,j)²
//! ```
//!
//! Each pair constraint is a slab in the space of symmetric matrices. A
//! feasible point is sought by Dykstra's cyclic projections between the
//! slabs and the PSD cone. Infeasibility is never proven: a candidate `C`
//! whose iteration budget runs out is treated as infeasible, so `lower`
//! brackets `c₂` only up to solver accuracy. `upper` is always certified by
//! the witness embedding.

use serde::{Deserialize, Serialize};

use crate::eigen::symmetric_eigen;
use crate::error::{LabError, Result};
use crate::kernel::{factorize_clamped, EuclideanEmbedding};
use crate::matrix::Matrix;
use crate::metric::FiniteMetricSpace;

/// Largest space the solver accepts.
pub const MAX_C2_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C2Options {
    /// Bisection stops once `upper / lower ≤ 1 + rel_tol`.
    pub rel_tol: f64,
    /// Largest relative pair-constraint violation accepted as feasible.
    pub feasibility_tol: f64,
    /// Dykstra sweeps per candidate `C`.
    pub max_iterations: usize,
}

impl Default for C2Options {
    fn default() -> Self {
        C2Options {
            rel_tol: 1e-3,
            feasibility_tol: 1e-6,
            max_iterations: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2Result {
    pub lower: f64,
    pub upper: f64,
    /// Distortion of the classical-MDS (or simplex) starting embedding.
    pub initial_upper: f64,
    /// Dykstra sweeps summed over all bisection steps.
    pub iterations: usize,
    /// Embedding of `M` with distortion `≤ upper`; its `residual` is the
    /// relative pair-constraint violation of the final feasible Gram matrix.
    pub witness: EuclideanEmbedding,
}

/// Distances of `M` rescaled to unit diameter, squared.
struct Problem {
    n: usize,
    sq: Matrix,
    diameter: f64,
}

impl Problem {
    fn new(m: &FiniteMetricSpace) -> Self {
        let n = m.n();
        let diameter = m.diameter();
        let sq = Matrix::from_fn(n, n, |i, j| {
            let d = m.dist(i, j) / diameter;
            d * d
        });
        Problem { n, sq, diameter }
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    /// Largest of `(d² - v)/d²` and `(v - C²d²)/d²` over pairs, where
    /// `v = Q(i,i) + Q(j,j) - 2Q(i,j)`.
    fn violation(&self, q: &Matrix, c2: f64) -> f64 {
        let mut worst = 0.0_f64;
        for (i, j) in self.pairs() {
            let s = self.sq[(i, j)];
            let v = q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)];
            worst = worst.max((s - v) / s).max((v - c2 * s) / s);
        }
        worst
    }

    /// Distortion of the points `coords` against the normalized metric, or
    /// `None` if two points coincide.
    fn distortion_of(&self, coords: &Matrix) -> Option<f64> {
        let mut expand = 0.0_f64;
        let mut contract = 0.0_f64;
        for (i, j) in self.pairs() {
            let e2: f64 = coords
                .row(i)
                .iter()
                .zip(coords.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if e2 <= 0.0 {
                return None;
            }
            let ratio = (e2 / self.sq[(i, j)]).sqrt();
            expand = expand.max(ratio);
            contract = contract.max(1.0 / ratio);
        }
        Some(expand * contract)
    }

    /// Smallest `e(i,j)² / d(i,j)²` over pairs.
    fn min_sq_ratio(&self, coords: &Matrix) -> f64 {
        self.pairs()
            .map(|(i, j)| {
                let e2: f64 = coords
                    .row(i)
                    .iter()
                    .zip(coords.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                e2 / self.sq[(i, j)]
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Classical MDS on squared distances, negative eigenvalues clamped;
    /// falls back to a regular simplex if MDS collapses points or distorts
    /// more. The result is rescaled to be non-contracting.
    fn initial_witness(&self) -> Result<(Matrix, f64)> {
        let n = self.n;
        let nf = n as f64;
        let row_mean: Vec<f64> = (0..n).map(|i| self.sq.row(i).iter().sum::<f64>() / nf).collect();
        let grand = row_mean.iter().sum::<f64>() / nf;
        let b = Matrix::from_fn(n, n, |i, j| {
            -0.5 * (self.sq[(i, j)] - row_mean[i] - row_mean[j] + grand)
        });
        let mds = factorize_clamped(&b, 1e-12)?;

        let d_min = self
            .pairs()
            .map(|(i, j)| self.sq[(i, j)])
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        let simplex = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 / 2f64.sqrt() } else { 0.0 });
        let simplex_distortion = 1.0 / d_min;

        let (coords, distortion) = match self.distortion_of(&mds) {
            Some(dist) if dist <= simplex_distortion => (mds, dist),
            _ => (simplex, simplex_distortion),
        };
        let scale = self.min_sq_ratio(&coords);
        Ok((
            Matrix::from_fn(n, coords.cols(), |i, k| coords[(i, k)] / scale.sqrt()),
            distortion,
        ))
    }

    /// Dykstra's cyclic projections from `start`. Returns the final PSD
    /// iterate and its violation once it drops to `tol`, along with the
    /// number of sweeps used.
    fn feasible_point(
        &self,
        start: &Matrix,
        c: f64,
        opts: &C2Options,
        trace: &mut Vec<f64>,
    ) -> Result<(Option<(Matrix, f64)>, usize)> {
        let n = self.n;
        let c2 = c * c;
        let mut q = start.clone();
        let v0 = self.violation(&q, c2);
        if v0 <= opts.feasibility_tol {
            return Ok((Some((q, v0)), 0));
        }
        let pairs: Vec<(usize, usize)> = self.pairs().collect();
        let mut slab_increment = vec![0.0_f64; pairs.len()];
        let mut psd_increment = Matrix::zeros(n, n);

        for sweep in 1..=opts.max_iterations {
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let s = self.sq[(i, j)];
                let y = slab_increment[k];
                let v = q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)] + 4.0 * y;
                let excess = v - v.clamp(s, c2 * s);
                let shift = y - excess / 4.0;
                q[(i, i)] += shift;
                q[(j, j)] += shift;
                q[(i, j)] -= shift;
                q[(j, i)] -= shift;
                slab_increment[k] = excess / 4.0;
            }

            let z = Matrix::from_fn(n, n, |a, b| q[(a, b)] + psd_increment[(a, b)]);
            q = project_psd(&z)?;
            psd_increment = Matrix::from_fn(n, n, |a, b| z[(a, b)] - q[(a, b)]);

            let v = self.violation(&q, c2);
            if sweep % 100 == 0 {
                trace.push(v);
            }
            if v <= opts.feasibility_tol {
                return Ok((Some((q, v)), sweep));
            }
        }
        trace.push(self.violation(&q, c2));
        Ok((None, opts.max_iterations))
    }
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues set to zero.
fn project_psd(z: &Matrix) -> Result<Matrix> {
    let n = z.rows();
    let eig = symmetric_eigen(z)?;
    let mut out = Matrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            break;
        }
        for i in 0..n {
            let vi = lambda * eig.vectors[(i, k)];
            for j in i..n {
                out[(i, j)] += vi * eig.vectors[(j, k)];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[(i, j)] = out[(j, i)];
        }
    }
    Ok(out)
}

/// Brackets `c₂(M)`, the least distortion of an embedding of `M` into
/// Hilbert space.
pub fn optimal_euclidean_distortion(m: &FiniteMetricSpace, opts: &C2Options) -> Result<C2Result> {
    let n = m.n();
    if n < 2 {
        return Err(LabError::Size("c₂ needs at least two points".into()));
    }
    if n > MAX_C2_POINTS {
        return Err(LabError::Size(format!(
            "{n} points exceeds the solver cap of {MAX_C2_POINTS}"
        )));
    }
    if !(opts.rel_tol > 0.0 && opts.feasibility_tol > 0.0 && opts.max_iterations > 0) {
        return Err(LabError::Domain("solver tolerances and budget must be positive".into()));
    }

    let problem = Problem::new(m);
    let (coords0, c_init) = problem.initial_witness()?;
    let mut trace = Vec::new();
    let (found, used) = problem.feasible_point(&coords0.gram(), c_init, opts, &mut trace)?;
    let Some((mut best_q, mut best_violation)) = found else {
        return Err(LabError::SolverFailure {
            message: format!("initial bound C = {c_init} not reached within the iteration budget"),
            trace,
        });
    };
    let mut iterations = used;

    let mut lo = 1.0_f64;
    let mut hi = c_init;
    while hi > lo * (1.0 + 0.5 * opts.rel_tol) {
        let mid = 0.5 * (lo + hi);
        let (found, used) = problem.feasible_point(&best_q, mid, opts, &mut trace)?;
        iterations += used;
        match found {
            Some((q, v)) => {
                hi = mid;
                best_q = q;
                best_violation = v;
            }
            None => lo = mid,
        }
    }

    let coords = factorize_clamped(&best_q, 1e-12)?;
    let upper = match problem.distortion_of(&coords) {
        Some(d) => d,
        None => {
            return Err(LabError::SolverFailure {
                message: "feasible Gram matrix factorized to coincident points".into(),
                trace,
            })
        }
    };
    let coords = Matrix::from_fn(n, coords.cols(), |i, k| coords[(i, k)] * problem.diameter);
    Ok(C2Result {
        lower: lo.min(upper),
        upper,
        initial_upper: c_init,
        iterations,
        witness: EuclideanEmbedding::from_coords(coords, best_violation),
    })
}
