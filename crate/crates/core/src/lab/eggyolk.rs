use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, Estimate, QuadratureSpec, SamplePlan, Vector};
use crate::level_sets::sphere_directions;
use crate::maps::{interior_points, MapHandle, QrMap};

/// Direction count for sup-norm searches on a ball.
pub const SUP_SAMPLES: usize = 4096;

/// Radii below this are checked here instead; a pass at a larger radius
/// covers every M the smaller radius would test.
pub const RADIUS_FLOOR: f64 = 0.02;

/// `max_{|x| ≤ r} |f(x)|` and a maximizer: sphere and interior sample
/// points, then a shrinking pattern search from the best one.
pub fn sup_on_ball(map: &dyn QrMap, r: f64, seed: u64) -> Result<(f64, Vector)> {
    let n = map.dim();
    let mut candidates: Vec<Vector> = sphere_directions(n, SUP_SAMPLES, seed)
        .into_iter()
        .map(|d| d * r)
        .collect();
    candidates.extend(interior_points(n, SUP_SAMPLES / 4, r, seed));
    let mut best = (f64::NEG_INFINITY, Vector::zeros(n.get()));
    for x in candidates {
        let v = map.eval(&x)?.norm();
        if v > best.0 {
            best = (v, x);
        }
    }
    let mut step = r * 4.0 / (SUP_SAMPLES as f64).powf(1.0 / (n.as_f64() - 1.0));
    while step > 1e-12 * r {
        let mut moved = false;
        for i in 0..n.get() {
            for sign in [1.0, -1.0] {
                let mut y = best.1.clone();
                y[i] += sign * step;
                let norm = y.norm();
                if norm > r {
                    y *= r / norm;
                }
                let v = map.eval(&y)?.norm();
                if v > best.0 {
                    best = (v, y);
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EggYolkReport {
    pub map_id: String,
    pub k: f64,
    /// Requested radius, as a logarithm.
    pub ln_r0_candidate: f64,
    /// Radius actually probed: `max(r0_candidate, RADIUS_FLOOR)`.
    pub r_evaluated: f64,
    pub sup: f64,
    pub m_grid: Vec<f64>,
    /// `∫_{|f| < M} J dx`.
    pub lhs: Vec<f64>,
    pub lhs_stderr: Vec<f64>,
    /// `α_n M^n`.
    pub rhs: Vec<f64>,
    pub pass: bool,
}

/// Sub-level masses `∫_{|f|<M_i} J dx` over dyadic shells
/// `2^{-j-1} < |x| < 2^{-j}` down to `floor`, then the ball of radius
/// `floor`; every scale gets the full sample budget.
fn sublevel_masses(
    map: &dyn QrMap,
    m_grid: &[f64],
    floor: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<Estimate>> {
    let n = map.dim();
    let k = m_grid.len();
    let origin = Vector::zeros(n.get());
    let run = |plan: &SamplePlan, hole: f64| -> Result<Vec<Estimate>> {
        let sums = plan.accumulate(k, |x, w, acc| {
            if x.norm() < hole {
                return Ok(());
            }
            let (y, j) = match (map.eval(x), map.jacobian(x)) {
                (Ok(y), Ok(j)) if y.norm().is_finite() && j.is_finite() => (y.norm(), j),
                _ if plan.near_singular(x) => return Ok(()),
                (Err(e), _) | (_, Err(e)) => return Err(e),
                _ => {
                    return Err(Error::NonFiniteSample {
                        point: x.iter().copied().collect(),
                    })
                }
            };
            for (slot, &m) in m_grid.iter().enumerate() {
                if y < m {
                    acc[slot] += w * j;
                }
            }
            Ok(())
        })?;
        Ok((0..k)
            .map(|slot| {
                let per: Vec<f64> = sums.iter().map(|s| s[slot]).collect();
                plan.combine(&per)
            })
            .collect())
    };
    let mut total = vec![
        Estimate {
            value: 0.0,
            stderr: 0.0
        };
        k
    ];
    let mut outer = 1.0;
    loop {
        let hole = if outer * 0.5 >= floor {
            outer * 0.5
        } else {
            0.0
        };
        let singular = if outer == 1.0 {
            map.singular_points()
        } else {
            Vec::new()
        };
        let part = run(&SamplePlan::ball(n, &origin, outer, spec, &singular)?, hole)?;
        for (t, p) in total.iter_mut().zip(part) {
            t.value += p.value;
            t.stderr = t.stderr.hypot(p.stderr);
        }
        if hole == 0.0 {
            break;
        }
        outer = hole;
    }
    Ok(total)
}

/// Check `∫_{|f|<M} J ≥ α_n M^n (1 − 2%)` for `M_i = sup·i/(m+1)`, where
/// `sup = max_{|x|≤r}|f|`.
pub fn eggyolk_check(
    map: &dyn QrMap,
    ln_r0_candidate: f64,
    m_points: usize,
    spec: &QuadratureSpec,
) -> Result<EggYolkReport> {
    if !map.origin_fixed() {
        return Err(Error::param(
            "map",
            format!("{} does not fix the origin", map.id()),
        ));
    }
    if !(ln_r0_candidate < 0.0) || m_points == 0 {
        return Err(Error::param(
            "r0_candidate",
            "need 0 < r0 < 1 and at least one M",
        ));
    }
    let r = ln_r0_candidate.exp().max(RADIUS_FLOOR);
    let (sup, _) = sup_on_ball(map, r, spec.seed)?;
    let m_grid: Vec<f64> = (1..=m_points)
        .map(|i| sup * i as f64 / (m_points + 1) as f64)
        .collect();
    let masses = sublevel_masses(map, &m_grid, r / (16.0 * (m_points + 1) as f64), spec)?;
    let alpha = ball_volume(map.dim());
    let n = map.dim().get() as i32;
    let rhs: Vec<f64> = m_grid.iter().map(|m| alpha * m.powi(n)).collect();
    let lhs: Vec<f64> = masses.iter().map(|e| e.value).collect();
    let pass = lhs.iter().zip(&rhs).all(|(l, r)| *l >= r * (1.0 - 0.02));
    Ok(EggYolkReport {
        map_id: map.id(),
        k: map.declared_k(),
        ln_r0_candidate,
        r_evaluated: r,
        sup,
        m_grid,
        lhs_stderr: masses.iter().map(|e| e.stderr).collect(),
        lhs,
        rhs,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalR0 {
    /// Largest radius at which every map passed, within `tolerance`.
    pub r0: f64,
    pub tolerance: f64,
    /// Whether the check passed at the top of the search range.
    pub passes_everywhere: bool,
}

/// Bisection for the largest radius where [`eggyolk_check`] passes for
/// every map, searched on `[RADIUS_FLOOR, 1 − tolerance]`.
pub fn empirical_r0(
    maps: &[MapHandle],
    tolerance: f64,
    m_points: usize,
    spec: &QuadratureSpec,
) -> Result<EmpiricalR0> {
    if maps.is_empty() || !(tolerance > 0.0 && tolerance < 0.5) {
        return Err(Error::param(
            "maps",
            "need at least one map and a tolerance in (0, 1/2)",
        ));
    }
    let passes = |r: f64| -> Result<bool> {
        for m in maps {
            if !eggyolk_check(m.as_ref(), r.ln(), m_points, spec)?.pass {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let top = 1.0 - tolerance;
    if passes(top)? {
        return Ok(EmpiricalR0 {
            r0: top,
            tolerance,
            passes_everywhere: true,
        });
    }
    let (mut lo, mut hi) = (RADIUS_FLOOR, top);
    if !passes(lo)? {
        return Ok(EmpiricalR0 {
            r0: 0.0,
            tolerance,
            passes_everywhere: false,
        });
    }
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EmpiricalR0 {
        r0: lo,
        tolerance,
        passes_everywhere: false,
    })
}
