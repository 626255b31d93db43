//! Exact-enumeration type constants.
//!
//! Expectations over random signs are computed exactly by walking the sign
//! counter `0..2^n`; bit `i` of the counter is the sign `ε_i`, with `0 ↦ -1`
//! and `1 ↦ +1`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::metric::{lp_norm, MetricMap, QuasiNormModel};

/// Most vectors accepted by [`rademacher_type_constant`].
pub const MAX_RADEMACHER_VECTORS: usize = 20;
/// Largest sign cube accepted by [`enflo_type_constant`].
pub const MAX_ENFLO_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeConstantReport {
    pub sample_id: String,
    /// Norm parameter of the ambient ℓ_q.
    pub q: f64,
    /// Type exponent.
    pub p: f64,
    pub n: usize,
    /// `(E‖Σ ε_i x_i‖^p / Σ‖x_i‖^p)^{1/p}`.
    pub constant: f64,
    /// `E‖Σ ε_i x_i‖_q^p`.
    pub expectation: f64,
    /// `Σ ‖x_i‖_q^p`.
    pub norm_sum: f64,
    /// Sign counter whose term `‖Σ ε_i x_i‖^p` is largest.
    pub max_sign_pattern: u64,
}

/// Smallest `C` with `E‖Σ ε_i x_i‖^p ≤ C^p Σ ‖x_i‖^p` on this sample, norms
/// taken in ℓ_q.
pub fn rademacher_type_constant(
    sample_id: impl Into<String>,
    vectors: &[Vec<f64>],
    q: f64,
    p: f64,
) -> Result<TypeConstantReport> {
    let n = vectors.len();
    if n == 0 || n > MAX_RADEMACHER_VECTORS {
        return Err(LabError::Size(format!(
            "{n} vectors outside 1..={MAX_RADEMACHER_VECTORS}"
        )));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(LabError::Domain(format!("norm parameter q = {q} must be positive")));
    }
    if !(p > 0.0 && p <= 2.0) {
        return Err(LabError::Domain(format!("type exponent p = {p} outside (0, 2]")));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(LabError::Size("vectors have different dimensions".into()));
    }
    let norm_sum: f64 = vectors.iter().map(|v| lp_norm(v, q).powf(p)).sum();
    if norm_sum == 0.0 {
        return Err(LabError::Degenerate("all vectors are zero".into()));
    }

    let mut total = 0.0;
    let mut best = (f64::NEG_INFINITY, 0u64);
    let mut sum = vec![0.0; dim];
    for counter in 0..(1u64 << n) {
        sum.iter_mut().for_each(|s| *s = 0.0);
        for (i, v) in vectors.iter().enumerate() {
            let eps = if (counter >> i) & 1 == 1 { 1.0 } else { -1.0 };
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += eps * x);
        }
        let term = lp_norm(&sum, q).powf(p);
        if term > best.0 {
            best = (term, counter);
        }
        total += term;
    }
    let expectation = total / (1u64 << n) as f64;
    Ok(TypeConstantReport {
        sample_id: sample_id.into(),
        q,
        p,
        n,
        constant: (expectation / norm_sum).powf(1.0 / p),
        expectation,
        norm_sum,
        max_sign_pattern: best.1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnfloCertificate {
    pub map_id: String,
    pub n: usize,
    pub p: f64,
    /// `E d(f(ε), f(-ε))^p`.
    pub lhs: f64,
    /// `Σ_i E d(f(ε), f(ε with ε_i flipped))^p`.
    pub rhs: f64,
    /// `(lhs / rhs)^{1/p}`; infinite when `rhs = 0 < lhs`, zero for a
    /// constant map.
    pub constant: f64,
    /// `(1/constant) · n^{1 - 1/p}`, a lower bound on the distortion of
    /// the map; `None` when the map is not injective.
    pub lower_bound: Option<f64>,
}

/// Dimension `n` such that `m` is the materialized sign cube `{-1,1}^n`:
/// `2^n` points in lexicographic order at Hamming distance.
fn sign_cube_dim(m: &crate::metric::FiniteMetricSpace) -> Result<usize> {
    let size = m.n();
    if !size.is_power_of_two() || size < 2 {
        return Err(LabError::Size(format!(
            "source has {size} points; a sign cube has 2^n ≥ 2"
        )));
    }
    let n = size.trailing_zeros() as usize;
    if n > MAX_ENFLO_DIM {
        return Err(LabError::Size(format!("sign cube dimension {n} exceeds {MAX_ENFLO_DIM}")));
    }
    for a in 0..size {
        for b in (a + 1)..size {
            if m.dist(a, b) != (a ^ b).count_ones() as f64 {
                return Err(LabError::Domain(format!(
                    "source is not the Hamming sign cube: d({a}, {b}) = {}",
                    m.dist(a, b)
                )));
            }
        }
    }
    Ok(n)
}

/// Point index in the lexicographic cube of the sign vector encoded by
/// `counter`: coordinate `i` is bit `i` of the counter and bit `n - 1 - i`
/// of the index.
#[inline]
pub fn sign_counter_to_index(counter: usize, n: usize) -> usize {
    let mut k = 0;
    for i in 0..n {
        k |= ((counter >> i) & 1) << (n - 1 - i);
    }
    k
}

/// Both sides of the Enflo inequality
///
/// ```text
/// E d(f(ε), f(-ε))^p ≤ C^p Σ_i E d(f(ε), f(ε_1, …, -ε_i, …, ε_n))^p
/// ```
///
/// for one map `f` from the sign cube, enumerated exactly.
pub fn enflo_type_constant(
    map_id: impl Into<String>,
    f: &MetricMap,
    p: f64,
) -> Result<EnfloCertificate> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(LabError::Domain(format!("Enflo exponent p = {p} must be ≥ 1")));
    }
    let n = sign_cube_dim(&f.source)?;
    let size = 1usize << n;
    let mask = size - 1;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for counter in 0..size {
        let x = sign_counter_to_index(counter, n);
        lhs += f.image_dist(x, x ^ mask).powf(p);
        for i in 0..n {
            let y = x ^ (1 << (n - 1 - i));
            rhs += f.image_dist(x, y).powf(p);
        }
    }
    lhs /= size as f64;
    rhs /= size as f64;

    let constant = if rhs > 0.0 {
        (lhs / rhs).powf(1.0 / p)
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let lower_bound = (f.is_injective() && constant > 0.0 && constant.is_finite())
        .then(|| enflo_distortion_lower_bound(n, p, constant))
        .transpose()?;
    Ok(EnfloCertificate {
        map_id: map_id.into(),
        n,
        p,
        lhs,
        rhs,
        constant,
        lower_bound,
    })
}

/// `(1/C) · n^{1 - 1/p}`: least distortion of an injective map from the
/// `n`-dimensional sign cube into a space with Enflo type `p`, constant `C`.
pub fn enflo_distortion_lower_bound(n: usize, p: f64, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(LabError::Size("cube dimension must be positive".into()));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(LabError::Domain(format!("Enflo exponent p = {p} must be ≥ 1")));
    }
    if !(c > 0.0) {
        return Err(LabError::Domain(format!("Enflo constant {c} must be positive")));
    }
    Ok((n as f64).powf(1.0 - 1.0 / p) / c)
}

/// Descriptor of the `ℓ_p`/`L_p` model: `p_X = min{p, 2}`,
/// `r = r_X = min{p, 1}`, coarsely embeddable iff `p ≤ 2`.
pub fn model_space_descriptors(p: f64) -> Result<QuasiNormModel> {
    QuasiNormModel::canonical(p)
}
