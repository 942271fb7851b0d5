use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::csv_table;
use crate::error::{Error, Result};
use crate::geometry::{inverse_normal_cdf, sphere_area, Dimension, Vector};
use crate::maps::QrMap;

/// Radii `t_k = 1 − 2^{−k}`, `k = 1..=k_max`, and the stabilization test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TracePolicy {
    pub k_max: u32,
    /// Relative tolerance on the last three values.
    pub tol: f64,
    /// Directions within this distance of a singular point are capped
    /// rather than failed when they do not stabilize.
    pub singular_radius: f64,
}

impl Default for TracePolicy {
    fn default() -> Self {
        TracePolicy {
            k_max: 20,
            tol: 1e-4,
            singular_radius: 1e-2,
        }
    }
}

impl TracePolicy {
    pub fn t_sequence(&self) -> Vec<f64> {
        (1..=self.k_max)
            .map(|k| 1.0 - 0.5_f64.powi(k as i32))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStatus {
    Converged,
    /// Not stabilized but next to a singular point; value kept.
    Capped,
    /// Excluded from distributions and integrals.
    NoConvergence,
}

/// Sampled radial limits `|f*(ζ)|` with per-direction status.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSet {
    pub n: Dimension,
    pub directions: Vec<Vector>,
    pub values: Vec<f64>,
    pub t_sequence: Vec<f64>,
    pub status: Vec<TraceStatus>,
}

/// Equal-weight direction set on `S^{n-1}`: a randomly rotated equispaced
/// circle (n = 2), a Fibonacci spiral (n = 3), or normalized Gaussians.
pub fn sphere_directions(n: Dimension, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match n.get() {
        2 => {
            let u: f64 = rng.random();
            (0..count)
                .map(|i| {
                    let t = 2.0 * PI * (i as f64 + u) / count as f64;
                    Vector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect()
        }
        3 => {
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            let u: f64 = rng.random();
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                    let phi = 2.0 * PI * (i as f64 / golden + u);
                    let s = (1.0 - z * z).sqrt();
                    Vector::from_vec(vec![s * phi.cos(), s * phi.sin(), z])
                })
                .collect()
        }
        d => (0..count)
            .map(|_| {
                let g = Vector::from_iterator(
                    d,
                    (0..d).map(|_| inverse_normal_cdf(rng.random::<f64>().max(1e-300))),
                );
                let norm = g.norm();
                g / norm
            })
            .collect(),
    }
}

/// Radial limits along `count` directions.
pub fn trace_set(
    map: &dyn QrMap,
    count: usize,
    policy: &TracePolicy,
    seed: u64,
) -> Result<TraceSet> {
    if count < 1 {
        return Err(Error::param("directions", "must be at least 1"));
    }
    if policy.k_max < 3 {
        return Err(Error::param("k_max", "needs at least three radii"));
    }
    let n = map.dim();
    let ts = policy.t_sequence();
    let directions = sphere_directions(n, count, seed);
    let singular = map.singular_points();
    let results: Vec<Result<(f64, TraceStatus)>> = directions
        .par_iter()
        .map(|zeta| {
            let mut vals = Vec::with_capacity(ts.len());
            for &t in &ts {
                let v = map.eval(&(zeta * t))?.norm();
                vals.push(v);
            }
            let k = vals.len();
            let last = vals[k - 1];
            let stable = vals[k - 3..]
                .windows(2)
                .all(|w| (w[1] - w[0]).abs() <= policy.tol * w[1].abs().max(f64::MIN_POSITIVE))
                && last.is_finite();
            let status = if stable {
                TraceStatus::Converged
            } else if singular
                .iter()
                .any(|s| (s - zeta).norm() < policy.singular_radius)
            {
                TraceStatus::Capped
            } else {
                TraceStatus::NoConvergence
            };
            Ok((last, status))
        })
        .collect();
    let mut values = Vec::with_capacity(count);
    let mut status = Vec::with_capacity(count);
    for r in results {
        let (v, s) = r?;
        values.push(v);
        status.push(s);
    }
    Ok(TraceSet {
        n,
        directions,
        values,
        t_sequence: ts,
        status,
    })
}

impl TraceSet {
    pub fn converged(&self) -> Vec<bool> {
        self.status
            .iter()
            .map(|s| *s == TraceStatus::Converged)
            .collect()
    }

    pub fn converged_fraction(&self) -> f64 {
        self.status
            .iter()
            .filter(|s| **s == TraceStatus::Converged)
            .count() as f64
            / self.status.len() as f64
    }

    /// Values entering distributions (converged or capped).
    pub fn usable(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.status)
            .filter(|(_, s)| **s != TraceStatus::NoConvergence)
            .map(|(v, _)| *v)
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        self.usable().into_iter().fold(0.0, f64::max)
    }

    /// Multiply every trace value by `lambda` (range rescaling).
    pub fn scaled(&self, lambda: f64) -> TraceSet {
        TraceSet {
            values: self.values.iter().map(|v| v * lambda).collect(),
            ..self.clone()
        }
    }

    /// Equal-weight quadrature of `∫_{S^{n-1}} exp(β|f*|^{n/(n−1)})` over the
    /// usable directions.
    pub fn direct_exp_integral(&self, beta: f64) -> Result<f64> {
        let usable = self.usable();
        if usable.is_empty() {
            return Err(Error::EmptyTraces);
        }
        let q = self.n.conjugate();
        let mean =
            usable.iter().map(|v| (beta * v.powf(q)).exp()).sum::<f64>() / usable.len() as f64;
        Ok(sphere_area(self.n) * mean)
    }

    /// CSV with one row per direction: coordinates, value, status code
    /// (1 converged, 0.5 capped, 0 excluded).
    pub fn to_csv(&self) -> String {
        let n = self.n.get();
        let mut header: Vec<String> = (1..=n).map(|i| format!("zeta{i}")).collect();
        header.push("value".into());
        header.push("status".into());
        let rows: Vec<Vec<f64>> = self
            .directions
            .iter()
            .zip(self.values.iter().zip(&self.status))
            .map(|(d, (v, s))| {
                let mut row: Vec<f64> = d.iter().copied().collect();
                row.push(*v);
                row.push(match s {
                    TraceStatus::Converged => 1.0,
                    TraceStatus::Capped => 0.5,
                    TraceStatus::NoConvergence => 0.0,
                });
                row
            })
            .collect();
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        csv_table(
            "boundary trace |f*|; direction dimensionless; value dimensionless; estimate (radial limit)",
            &header_refs,
            &rows,
        )
    }
}

/// `s ↦ H_{n-1}(F*_s)` with `F*_s = {|f*| > s}` (strict).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFn {
    pub n: Dimension,
    pub s_grid: Vec<f64>,
    pub measure: Vec<f64>,
    /// Binomial standard error.
    pub half_width: Vec<f64>,
}

pub fn distribution(traces: &TraceSet, s_grid: &[f64]) -> Result<DistributionFn> {
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("s_grid", "must be strictly increasing"));
    }
    let mut usable = traces.usable();
    if usable.is_empty() {
        return Err(Error::EmptyTraces);
    }
    usable.sort_by(f64::total_cmp);
    let total = usable.len() as f64;
    let omega = sphere_area(traces.n);
    let mut measure = Vec::with_capacity(s_grid.len());
    let mut half_width = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let above = usable.len() - usable.partition_point(|&v| v <= s);
        let p = above as f64 / total;
        measure.push(omega * p);
        half_width.push(omega * (p * (1.0 - p) / total).sqrt());
    }
    Ok(DistributionFn {
        n: traces.n,
        s_grid: s_grid.to_vec(),
        measure,
        half_width,
    })
}

impl DistributionFn {
    pub fn to_csv(&self) -> String {
        let rows: Vec<[f64; 3]> = self
            .s_grid
            .iter()
            .zip(self.measure.iter().zip(&self.half_width))
            .map(|(s, (m, h))| [*s, *m, *h])
            .collect();
        csv_table(
            "distribution H(F*_s) with F*_s = {|f*| > s}; s dimensionless; measure in units of (n-1)-measure; estimate",
            &["s", "measure", "stderr"],
            &rows,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavalieriResult {
    pub value: f64,
    /// The last grid node still carries measure above `1e-6·ω_{n-1}`.
    pub truncated: bool,
}

/// Layer-cake evaluation of `∫ exp(β|f*|^{n/(n−1)}) dH_{n-1}`:
/// `ω + ∫₀^∞ H(s) d(e^{βs^q})` with `q = n/(n−1)`. Each grid cell uses the
/// trapezoid value of `H` against the exact increment of `e^{βs^q}`; below
/// the first node `H` is taken as `measure[0]`, and beyond the last node
/// the tail is dropped.
pub fn exp_integral_via_cavalieri(
    dist: &DistributionFn,
    beta: f64,
    n: Dimension,
) -> Result<CavalieriResult> {
    if !(beta > 0.0) {
        return Err(Error::param(
            "beta",
            format!("must be positive, got {beta}"),
        ));
    }
    if dist.s_grid.is_empty() {
        return Err(Error::EmptyTraces);
    }
    let q = n.conjugate();
    let omega = sphere_area(n);
    let e = |s: f64| (beta * s.max(0.0).powf(q)).exp();
    let s = &dist.s_grid;
    let h = &dist.measure;
    let mut value = omega + h[0] * (e(s[0]) - 1.0);
    for i in 0..s.len() - 1 {
        value += 0.5 * (h[i] + h[i + 1]) * (e(s[i + 1]) - e(s[i]));
    }
    Ok(CavalieriResult {
        value,
        truncated: *h.last().unwrap() > 1e-6 * omega,
    })
}
