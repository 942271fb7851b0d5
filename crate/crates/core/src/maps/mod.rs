//! Test maps with exact derivatives and a declared distortion bound.
//!
//! Every map implements [`QrMap`]. Planar maps are holomorphic or radial
//! and assemble their derivative matrix from a complex derivative, so all
//! downstream code sees the same `n × n` interface in every dimension.

mod compose;
mod mobius;
mod planar;
mod registry;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{halton, Dimension, Matrix, Vector};

pub use compose::{bka, compose, Compose, Scaled};
pub use mobius::MobiusBall;
pub use planar::{Beurling, HalfPlane, HalfPlaneInverse, Identity, RadialStretch};
pub use registry::{parse_map, zoo, REGISTRY};

pub trait QrMap: Send + Sync + fmt::Debug {
    fn dim(&self) -> Dimension;

    /// Registry id, e.g. `beurling:a=0.9`.
    fn id(&self) -> String;

    fn eval(&self, x: &Vector) -> Result<Vector>;

    fn derivative(&self, x: &Vector) -> Result<Matrix>;

    fn jacobian(&self, x: &Vector) -> Result<f64> {
        Ok(self.derivative(x)?.determinant())
    }

    fn declared_k(&self) -> f64;

    /// Boundary points where the derivative blows up.
    fn singular_points(&self) -> Vec<Vector> {
        Vec::new()
    }

    fn origin_fixed(&self) -> bool;

    /// Whether `x` lies in the (open) domain of definition.
    fn in_domain(&self, x: &Vector) -> bool;
}

pub type MapHandle = Arc<dyn QrMap>;

pub(crate) fn check_dim(map: &dyn QrMap, x: &Vector) -> Result<()> {
    crate::geometry::check_vector(map.dim(), x)
}

/// Largest singular value of a square matrix.
pub fn operator_norm(m: &Matrix) -> f64 {
    if m.nrows() == 2 {
        // Closed form for 2×2: σ_max² = (s + √(s² − 4 det²)) / 2 with s = ‖m‖_F².
        let s = m.norm_squared();
        let d = m.determinant();
        let disc = (s * s - 4.0 * d * d).max(0.0).sqrt();
        return (0.5 * (s + disc)).sqrt();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b))
}

/// Central-difference derivative with step `h = 1e-5·min(1, 1 − |x|)`,
/// floored at `1e-8`.
pub fn finite_difference(map: &dyn QrMap, x: &Vector) -> Result<Matrix> {
    check_dim(map, x)?;
    let n = map.dim().get();
    let h = (1e-5 * (1.0 - x.norm()).clamp(0.0, 1.0)).max(1e-8);
    let mut out = Matrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (map.eval(&xp)? - map.eval(&xm)?) / (2.0 * h);
        out.set_column(j, &col);
    }
    Ok(out)
}

/// Empirical distortion `‖Df‖^n / J` over interior sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub map_id: String,
    pub samples: usize,
    pub max_ratio: f64,
    /// `(probability, ratio quantile)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    pub nonpositive_jacobian: usize,
}

pub const REPORT_QUANTILES: [f64; 5] = [0.0, 0.5, 0.9, 0.99, 1.0];

/// Sample `samples` points of the ball of radius 0.999 (scrambled Halton,
/// seeded) and report the distortion ratios.
pub fn distortion_report(map: &dyn QrMap, samples: usize, seed: u64) -> Result<DistortionReport> {
    if samples < 1 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    let points = interior_points(map.dim(), samples, 0.999, seed);
    let n = map.dim().get() as i32;
    let results: Vec<Result<Option<f64>>> = points
        .par_iter()
        .map(|x| {
            let df = map.derivative(x)?;
            let j = map.jacobian(x)?;
            if j > 0.0 {
                Ok(Some(operator_norm(&df).powi(n) / j))
            } else {
                Ok(None)
            }
        })
        .collect();
    let mut ratios = Vec::with_capacity(samples);
    let mut bad = 0;
    for r in results {
        match r? {
            Some(v) => ratios.push(v),
            None => bad += 1,
        }
    }
    let fraction = bad as f64 / samples as f64;
    if fraction > 0.01 || ratios.is_empty() {
        return Err(Error::DegenerateJacobian {
            fraction: 100.0 * fraction,
            samples,
        });
    }
    ratios.sort_by(f64::total_cmp);
    let quantiles = REPORT_QUANTILES
        .iter()
        .map(|&q| {
            let idx = ((ratios.len() - 1) as f64 * q).round() as usize;
            (q, ratios[idx])
        })
        .collect();
    Ok(DistortionReport {
        map_id: map.id(),
        samples,
        max_ratio: *ratios.last().unwrap(),
        quantiles,
        nonpositive_jacobian: bad,
    })
}

/// Deterministic low-discrepancy points in the centered ball of radius
/// `radius`, with a seed-dependent Cranley–Patterson shift.
pub fn interior_points(n: Dimension, count: usize, radius: f64, seed: u64) -> Vec<Vector> {
    use rand::{Rng, SeedableRng};
    let dims = n.get() + 1;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|i| {
            let u: Vec<f64> = halton(i as u64 + 1, dims)
                .iter()
                .zip(&shift)
                .map(|(a, b)| (a + b).fract().clamp(1e-12, 1.0 - 1e-12))
                .collect();
            let mut g = Vector::from_iterator(
                n.get(),
                u[1..]
                    .iter()
                    .map(|&p| crate::geometry::inverse_normal_cdf(p)),
            );
            let norm = g.norm();
            if norm > 0.0 {
                g /= norm;
            } else {
                g[0] = 1.0;
            }
            g * (radius * u[0].powf(1.0 / n.as_f64()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_norm_matches_svd() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]);
        let svd = m.clone().svd(false, false).singular_values.max();
        assert!((operator_norm(&m) - svd).abs() < 1e-12);
    }

    #[test]
    fn interior_points_stay_inside() {
        for n in 2..=4 {
            let pts = interior_points(Dimension::new(n).unwrap(), 500, 0.9, 4);
            assert!(pts.iter().all(|p| p.norm() <= 0.9 + 1e-12));
        }
    }
}
