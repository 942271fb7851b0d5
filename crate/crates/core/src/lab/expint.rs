use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants::beta;
use super::TraceConfig;
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, gauss_legendre, integrate_ball, Ball, QuadratureSpec};
use crate::level_sets::{distribution, exp_integral_via_cavalieri, trace_set};
use crate::maps::QrMap;

/// Nodes of the uniform `s`-grid fed to the layer-cake formula.
pub const CAVALIERI_NODES: usize = 4000;

/// Integrals above this are reported as `+∞`.
pub const OVERFLOW_SENTINEL: f64 = 1e300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangMarshallReport {
    pub map_id: String,
    pub k: f64,
    pub beta: f64,
    /// `∫_{B^n} J dx` before rescaling.
    pub jacobian_integral: f64,
    pub jacobian_stderr: f64,
    /// `∫ J ≤ α_n (1 + 2%)` held as given.
    pub normalized: bool,
    /// Range factor applied to traces, `(α_n/∫J)^{1/n}` or `1`.
    pub scale: f64,
    /// `∫_{S^{n−1}} exp(β|f*|^{n/(n−1)})` by the layer-cake route.
    pub integral: f64,
    /// Same integral as an equal-weight mean over trace directions.
    pub direct: f64,
    pub converged_fraction: f64,
}

pub fn changmarshall_check(
    map: &dyn QrMap,
    spec: &QuadratureSpec,
    traces: &TraceConfig,
) -> Result<ChangMarshallReport> {
    if !map.origin_fixed() {
        return Err(Error::param(
            "map",
            format!("{} does not fix the origin", map.id()),
        ));
    }
    let n = map.dim();
    let jac = integrate_ball(&Ball::unit(n), spec, &map.singular_points(), |x| {
        map.jacobian(x).unwrap_or(f64::NAN)
    })?;
    let alpha = ball_volume(n);
    let normalized = jac.value <= alpha * 1.02;
    let scale = if normalized {
        1.0
    } else {
        (alpha / jac.value).powf(1.0 / n.as_f64())
    };
    let k = map.declared_k();
    let b = beta(n, k);
    let set = trace_set(map, traces.directions, &traces.policy, traces.seed)?.scaled(scale);
    let top = set.max_value() * (1.0 + 1e-9) + 1e-12;
    let s_grid: Vec<f64> = (0..CAVALIERI_NODES)
        .map(|i| top * i as f64 / (CAVALIERI_NODES - 1) as f64)
        .collect();
    let dist = distribution(&set, &s_grid)?;
    let integral = exp_integral_via_cavalieri(&dist, b, n)?.value;
    Ok(ChangMarshallReport {
        map_id: map.id(),
        k,
        beta: b,
        jacobian_integral: jac.value,
        jacobian_stderr: jac.stderr,
        normalized,
        scale,
        integral,
        direct: set.direct_exp_integral(b)?,
        converged_fraction: set.converged_fraction(),
    })
}

/// `|B_a(e^{iθ})|²` with `1 − a cos θ` formed as `(1−a) + 2a sin²(θ/2)`.
pub fn beurling_boundary_sq(a: f64, theta: f64) -> f64 {
    let scale_sq = 1.0 / -(-a * a).ln_1p();
    let half = (0.5 * theta).sin();
    let re = (1.0 - a) + 2.0 * a * half * half;
    let im = -a * theta.sin();
    let modulus_sq = (1.0 - a) * (1.0 - a) + 4.0 * a * half * half;
    let log_mod = 0.5 * modulus_sq.ln();
    let arg = im.atan2(re);
    scale_sq * (log_mod * log_mod + arg * arg)
}

/// Boundary correspondence of `H_c^{-1} ∘ S_K ∘ H_c`:
/// `tan(θ'/2) = sign(θ) c^{K−1} |tan(θ/2)|^K` on `(−π, π)`.
pub fn stretch_boundary_angle(k: f64, c: f64, theta: f64) -> f64 {
    let t = (0.5 * theta).tan();
    2.0 * (t.signum() * c.powf(k - 1.0) * t.abs().powf(k)).atan()
}

const LOG_THETA_MIN: f64 = -690.0;
const PANEL_WIDTH: f64 = 0.5;
const PANEL_ORDER: usize = 16;

/// `∫_0^{2π} exp(β|B_{K,a}*(e^{iθ})|²) dθ` for each `a`, from the
/// closed-form boundary values. By symmetry this is twice the integral
/// over `(0, π)`, done by composite Gauss–Legendre in `ln θ`.
pub fn sharpness_sweep(k: f64, beta: f64, a_grid: &[f64], c: f64) -> Result<Vec<f64>> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::param("K", format!("must be at least 1, got {k}")));
    }
    if !(beta > 0.0) || !(c > 0.0) {
        return Err(Error::param("beta", "beta and c must be positive"));
    }
    if a_grid.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::param("a_grid", "every a must lie in (0, 1)"));
    }
    let (nodes, weights) = gauss_legendre(PANEL_ORDER, 0.0, 1.0);
    let hi = PI.ln();
    let panels = ((hi - LOG_THETA_MIN) / PANEL_WIDTH).ceil() as usize;
    let width = (hi - LOG_THETA_MIN) / panels as f64;
    Ok(a_grid
        .iter()
        .map(|&a| {
            let f =
                |theta: f64| beta * beurling_boundary_sq(a, stretch_boundary_angle(k, c, theta));
            // Mass on (0, e^{LOG_THETA_MIN}) bounded by its width times the peak.
            let mut total = LOG_THETA_MIN.exp() * f(0.0).exp();
            for p in 0..panels {
                let u0 = LOG_THETA_MIN + p as f64 * width;
                for (x, w) in nodes.iter().zip(&weights) {
                    let theta = (u0 + x * width).exp();
                    total += w * width * theta * f(theta).exp();
                }
            }
            let v = 2.0 * total;
            if v > OVERFLOW_SENTINEL {
                f64::INFINITY
            } else {
                v
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Beurling;

    #[test]
    fn boundary_square_matches_complex_evaluation() {
        let b = Beurling::new(0.9).unwrap();
        for k in 1..20 {
            let t = -3.0 + 0.3 * k as f64;
            let want = b.boundary_modulus(t).powi(2);
            assert!((beurling_boundary_sq(0.9, t) - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn stretch_angle_fixes_special_points() {
        for k in [1.0, 2.0, 3.5] {
            assert_eq!(stretch_boundary_angle(k, 1.0, 0.0), 0.0);
            assert!((stretch_boundary_angle(k, 1.0, PI / 2.0) - PI / 2.0).abs() < 1e-12);
            assert!(
                (stretch_boundary_angle(k, 1.0, -1.0) + stretch_boundary_angle(k, 1.0, 1.0)).abs()
                    < 1e-15
            );
        }
        assert!((stretch_boundary_angle(1.0, 3.0, 0.7) - 0.7).abs() < 1e-12);
    }
}
