//! Lipschitz constants and distortion of maps between finite metric spaces,
//! plus the closed-form Euclidean distortion of ℓ_p Hamming cubes.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::metric::MetricMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBound {
    pub value: f64,
    /// Source pair attaining `value`.
    pub witness: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub lip_forward: f64,
    pub lip_inverse: f64,
    pub distortion: f64,
    pub forward_witness: (usize, usize),
    pub inverse_witness: (usize, usize),
}

fn require_pairs(f: &MetricMap) -> Result<()> {
    if f.source.n() < 2 {
        return Err(LabError::Size(
            "Lipschitz constants need a source with at least two points".into(),
        ));
    }
    Ok(())
}

/// `max d_target(f(x), f(y)) / d_source(x, y)` over distinct source pairs.
pub fn lipschitz_constant(f: &MetricMap) -> Result<LipschitzBound> {
    require_pairs(f)?;
    let mut best = LipschitzBound {
        value: f64::NEG_INFINITY,
        witness: (0, 1),
    };
    for (i, j, d) in f.source.pairs() {
        let ratio = f.image_dist(i, j) / d;
        if ratio > best.value {
            best = LipschitzBound {
                value: ratio,
                witness: (i, j),
            };
        }
    }
    Ok(best)
}

/// `lip(f) · lip(f⁻¹)` for an injective map.
pub fn distortion_of_map(f: &MetricMap) -> Result<DistortionReport> {
    require_pairs(f)?;
    if let Some((i, j)) = f.collapsed_pair() {
        return Err(LabError::NotInjective(i, j));
    }
    let forward = lipschitz_constant(f)?;
    let mut inverse = LipschitzBound {
        value: f64::NEG_INFINITY,
        witness: (0, 1),
    };
    for (i, j, d) in f.source.pairs() {
        let ratio = d / f.image_dist(i, j);
        if ratio > inverse.value {
            inverse = LipschitzBound {
                value: ratio,
                witness: (i, j),
            };
        }
    }
    Ok(DistortionReport {
        lip_forward: forward.value,
        lip_inverse: inverse.value,
        distortion: forward.value * inverse.value,
        forward_witness: forward.witness,
        inverse_witness: inverse.witness,
    })
}

/// `c₂(H_n, d_p) = diam(H_n, d_p)^{1 - p/2} = n^{(1/p)(1 - p/2)}` for
/// `1 ≤ p ≤ 2`.
pub fn hamming_c2_exact(n: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(LabError::Size("cube dimension must be positive".into()));
    }
    if !(1.0..=2.0).contains(&p) {
        return Err(LabError::Domain(format!("p = {p} outside [1, 2]")));
    }
    Ok((n as f64).powf((1.0 / p) * (1.0 - p / 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{hamming_cube, snowflake, FiniteMetricSpace};

    fn path3() -> FiniteMetricSpace {
        FiniteMetricSpace::from_rows(&[
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 2.0],
            vec![3.0, 2.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn identity_has_unit_constants() {
        let m = path3();
        let f = MetricMap::identity(m.clone(), m).unwrap();
        assert_eq!(lipschitz_constant(&f).unwrap().value, 1.0);
        assert_eq!(distortion_of_map(&f).unwrap().distortion, 1.0);
    }

    #[test]
    fn scaling_by_three() {
        let m = path3();
        let f = MetricMap::identity(m.clone(), m.scaled(3.0).unwrap()).unwrap();
        assert_eq!(lipschitz_constant(&f).unwrap().value, 3.0);
        let r = distortion_of_map(&f).unwrap();
        assert!((r.distortion - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_into_half_snowflake() {
        // Pairs of H_2: four at distance 1, two at distance 2; ratio d^{1/2}/d.
        let h = hamming_cube(2, 1.0).unwrap();
        let f = MetricMap::identity(h.clone(), snowflake(&h, 0.5).unwrap()).unwrap();
        let lip = lipschitz_constant(&f).unwrap();
        assert_eq!(lip.value, 1.0);
        assert_eq!(h.dist(lip.witness.0, lip.witness.1), 1.0);
    }

    #[test]
    fn half_snowflake_distortion_is_root_n() {
        for n in 1..=8 {
            let h = hamming_cube(n, 1.0).unwrap();
            let f = MetricMap::identity(h.clone(), snowflake(&h, 0.5).unwrap()).unwrap();
            let r = distortion_of_map(&f).unwrap();
            assert_eq!(r.lip_forward, 1.0);
            assert!((r.lip_inverse - (n as f64).sqrt()).abs() < 1e-12);
            let (a, b) = r.inverse_witness;
            assert_eq!(h.dist(a, b), n as f64);
        }
    }

    #[test]
    fn witnesses_reproduce_ratios() {
        let m = path3();
        let t = FiniteMetricSpace::from_rows(&[
            vec![0.0, 2.0, 3.0],
            vec![2.0, 0.0, 1.5],
            vec![3.0, 1.5, 0.0],
        ])
        .unwrap();
        let f = MetricMap::identity(m.clone(), t.clone()).unwrap();
        let r = distortion_of_map(&f).unwrap();
        let (a, b) = r.forward_witness;
        assert_eq!(t.dist(a, b) / m.dist(a, b), r.lip_forward);
        let (a, b) = r.inverse_witness;
        assert_eq!(m.dist(a, b) / t.dist(a, b), r.lip_inverse);
        assert!(r.distortion >= 1.0);
    }

    #[test]
    fn collapse_is_reported() {
        let m = path3();
        let f = MetricMap::new(m.clone(), m, vec![0, 2, 2]).unwrap();
        assert!(matches!(distortion_of_map(&f), Err(LabError::NotInjective(1, 2))));
    }

    #[test]
    fn single_point_source_rejected() {
        let m = FiniteMetricSpace::from_rows(&[vec![0.0]]).unwrap();
        let f = MetricMap::identity(m.clone(), m).unwrap();
        assert!(lipschitz_constant(&f).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(hamming_c2_exact(4, 1.0).unwrap(), 2.0);
        for n in 1..10 {
            assert_eq!(hamming_c2_exact(n, 2.0).unwrap(), 1.0);
        }
        assert!((hamming_c2_exact(4, 4.0 / 3.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(hamming_c2_exact(4, 2.5).is_err());
        assert!(hamming_c2_exact(4, 0.5).is_err());
    }
}
