//! Benchmark fixtures shared by the criterion targets.

use flakelab::{cube_vertices, Matrix, PointSetLp};

/// Deterministic symmetric matrix with entries in `[-1, 1]`.
pub fn symmetric_fixture(n: usize) -> Matrix {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = move || {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let a = Matrix::from_fn(n, n, |_, _| next());
    Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// 0/1 vertices of the n-cube as an ℓ_p point set.
pub fn cube_points(n: usize, p: f64) -> PointSetLp {
    PointSetLp::new(p, cube_vertices(n)).expect("cube vertices are a valid point set")
}
