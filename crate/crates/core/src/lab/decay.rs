use serde::{Deserialize, Serialize};

use super::eggyolk::sup_on_ball;
use super::TraceConfig;
use crate::error::{Error, Result};
use crate::geometry::{sphere_area, QuadratureSpec};
use crate::level_sets::{distribution, level_profile, trace_set, uniform_grid};
use crate::maps::QrMap;

/// Bins of the level profile behind the exponent integral.
pub const DECAY_PROFILE_BINS: usize = 400;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub map_id: String,
    pub k: f64,
    pub r: f64,
    /// `max_{|x|≤r} |f|`.
    pub m: f64,
    pub s_grid: Vec<f64>,
    /// `H_{n-1}(F*_s)`.
    pub lhs: Vec<f64>,
    /// `∫_M^s A(t)^{−1/(n−1)} dt`.
    pub exponent_integral: Vec<f64>,
    /// `exp((1−n)(ω_{n−1}/2K)^{1/(n−1)} · exponent_integral)`.
    pub rhs_shape: Vec<f64>,
    /// `max_i lhs_i / rhs_shape_i` (zero where both vanish).
    pub fitted_c1: f64,
}

impl DecayReport {
    pub fn rhs_monotone(&self) -> bool {
        self.rhs_shape.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.lhs
            .iter()
            .zip(&self.rhs_shape)
            .map(|(l, r)| ratio(*l, *r))
            .collect()
    }
}

fn ratio(l: f64, r: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else if r == 0.0 {
        f64::INFINITY
    } else {
        l / r
    }
}

/// Fit `C₁` in `H(F*_s) ≤ C₁ exp((1−n)(ω/2K)^{1/(n−1)} ∫_M^s A^{−1/(n−1)})`.
/// The profile is piecewise constant on [`DECAY_PROFILE_BINS`] bins of
/// `[0, max s]` (empty bins merged forward), so the exponent integral is
/// exact for it; area vanishing past the support makes it infinite.
pub fn decay_check(
    map: &dyn QrMap,
    r: f64,
    s_grid: &[f64],
    spec: &QuadratureSpec,
    traces: &TraceConfig,
) -> Result<DecayReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", format!("must lie in (0, 1), got {r}")));
    }
    if s_grid.is_empty() || s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(
            "s_grid",
            "must be non-empty and strictly increasing",
        ));
    }
    let n = map.dim();
    let (m, _) = sup_on_ball(map, r, spec.seed)?;
    if !(s_grid[0] > m) {
        return Err(Error::SGridBelowM {
            first: s_grid[0],
            m,
        });
    }
    let s_max = *s_grid.last().unwrap();
    let profile =
        level_profile(map, &uniform_grid(s_max, DECAY_PROFILE_BINS), spec)?.merged_positive();
    let p = 1.0 / (n.as_f64() - 1.0);
    let exponent_integral: Vec<f64> = s_grid
        .iter()
        .map(|&s| {
            profile.integrate_with(m, s, |a| if a > 0.0 { a.powf(-p) } else { f64::INFINITY })
        })
        .collect();
    let coeff = (1.0 - n.as_f64()) * (sphere_area(n) / (2.0 * map.declared_k())).powf(p);
    let rhs_shape: Vec<f64> = exponent_integral
        .iter()
        .map(|e| (coeff * e).exp())
        .collect();
    let set = trace_set(map, traces.directions, &traces.policy, traces.seed)?;
    let lhs = distribution(&set, s_grid)?.measure;
    let fitted_c1 = lhs
        .iter()
        .zip(&rhs_shape)
        .map(|(l, r)| ratio(*l, *r))
        .fold(0.0, f64::max);
    Ok(DecayReport {
        map_id: map.id(),
        k: map.declared_k(),
        r,
        m,
        s_grid: s_grid.to_vec(),
        lhs,
        exponent_integral,
        rhs_shape,
        fitted_c1,
    })
}
