use serde::{Deserialize, Serialize};

use super::csv_table;
use crate::error::{Error, Result};
use crate::geometry::{Estimate, QuadratureSpec, SamplePlan, Vector};
use crate::maps::QrMap;

/// Counting-multiplicity area `t ↦ A(t)` of the image of the level set
/// `{|f| = t}`, piecewise constant on the bins `[t_grid[i], t_grid[i+1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelProfile {
    /// Bin edges, strictly increasing, starting at `0` unless the caller
    /// chose otherwise.
    pub t_grid: Vec<f64>,
    /// Bin averages of `A`, one per bin.
    pub area: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `∫₀^∞ A dt`, including mass below the first edge and above the last.
    pub total_mass: f64,
    pub total_mass_stderr: f64,
    /// Mass carried by `|f| ≥ t_grid.last()`.
    pub overflow_mass: f64,
}

/// `m` equal bins on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| t_max * i as f64 / m as f64).collect()
}

/// `0` followed by `m` log-spaced edges on `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, m: usize) -> Vec<f64> {
    let (a, b) = (t_min.ln(), t_max.ln());
    std::iter::once(0.0)
        .chain((0..m).map(|i| (a + (b - a) * i as f64 / (m - 1).max(1) as f64).exp()))
        .collect()
}

/// Pushforward estimate of `A`: bin `J(x, f)` by `|f(x)|` over ball samples
/// and divide by the bin width.
pub fn level_profile(
    map: &dyn QrMap,
    t_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<LevelProfile> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] < 0.0 {
        return Err(Error::param(
            "t_grid",
            "needs at least two increasing, non-negative edges",
        ));
    }
    let n = map.dim();
    let singular = map.singular_points();
    let plan = SamplePlan::ball(n, &Vector::zeros(n.get()), 1.0, spec, &singular)?;
    let m = t_grid.len() - 1;
    // Slots: bins 0..m, underflow m, overflow m+1, non-positive count m+2, count m+3.
    let sums = plan.accumulate(m + 4, |x, w, acc| {
        acc[m + 3] += 1.0;
        let j = map.jacobian(x);
        let y = map.eval(x);
        let (j, r) = match (j, y) {
            (Ok(j), Ok(y)) if j.is_finite() && y.norm().is_finite() => (j, y.norm()),
            _ if plan.near_singular(x) => return Ok(()),
            (Err(e), _) | (_, Err(e)) => return Err(e),
            _ => {
                return Err(Error::NonFiniteSample {
                    point: x.iter().copied().collect(),
                })
            }
        };
        if j <= 0.0 {
            // The origin of a stretch has J = 0; only negative values matter.
            if j < 0.0 {
                acc[m + 2] += 1.0;
            }
            return Ok(());
        }
        let slot = if r < t_grid[0] {
            m
        } else if r >= t_grid[m] {
            m + 1
        } else {
            t_grid.partition_point(|&t| t <= r) - 1
        };
        acc[slot] += w * j;
        Ok(())
    })?;
    let bad: f64 = sums.iter().map(|s| s[m + 2]).sum();
    let count: f64 = sums.iter().map(|s| s[m + 3]).sum();
    if bad / count > 0.01 {
        return Err(Error::DegenerateJacobian {
            fraction: 100.0 * bad / count,
            samples: count as usize,
        });
    }
    let slot = |k: usize| -> Estimate {
        let per: Vec<f64> = sums.iter().map(|s| s[k]).collect();
        plan.combine(&per)
    };
    let mut area = Vec::with_capacity(m);
    let mut stderr = Vec::with_capacity(m);
    for i in 0..m {
        let e = slot(i);
        let width = t_grid[i + 1] - t_grid[i];
        area.push(e.value / width);
        stderr.push(e.stderr / width);
    }
    let totals: Vec<f64> = sums.iter().map(|s| s[..m + 2].iter().sum()).collect();
    let total = plan.combine(&totals);
    Ok(LevelProfile {
        t_grid: t_grid.to_vec(),
        area,
        stderr,
        total_mass: total.value,
        total_mass_stderr: total.stderr,
        overflow_mass: slot(m + 1).value,
    })
}

impl LevelProfile {
    /// Build a profile from a closed-form area function sampled at bin
    /// midpoints. Used for oracles and for profiles known analytically.
    pub fn from_fn(t_grid: &[f64], area: impl Fn(f64) -> f64) -> Self {
        let a: Vec<f64> = t_grid
            .windows(2)
            .map(|w| area(0.5 * (w[0] + w[1])))
            .collect();
        let total = t_grid
            .windows(2)
            .zip(&a)
            .map(|(w, a)| a * (w[1] - w[0]))
            .sum();
        LevelProfile {
            t_grid: t_grid.to_vec(),
            stderr: vec![0.0; a.len()],
            area: a,
            total_mass: total,
            total_mass_stderr: 0.0,
            overflow_mass: 0.0,
        }
    }

    pub fn bins(&self) -> usize {
        self.area.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.t_grid
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// `A(t)` (bin average); zero outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < self.t_grid[0] || t >= *self.t_grid.last().unwrap() {
            return 0.0;
        }
        self.area[self.t_grid.partition_point(|&e| e <= t) - 1]
    }

    /// `∫_a^b g(A(t)) dt` over the grid, exact for the piecewise-constant profile.
    pub fn integrate_with(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (w, &v) in self.t_grid.windows(2).zip(&self.area) {
            let lo = w[0].max(a);
            let hi = w[1].min(b);
            if hi > lo {
                acc += g(v) * (hi - lo);
            }
        }
        acc
    }

    /// `∫_a^b A dt`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.integrate_with(a, b, |v| v)
    }

    /// `∫_a^∞ A dt` including overflow mass beyond the grid.
    pub fn tail_mass(&self, a: f64) -> f64 {
        self.mass_between(a, f64::INFINITY) + self.overflow_mass
    }

    /// Copy in which every run of zero bins followed by a positive bin is
    /// merged with it, spreading that bin's mass evenly. Sampling leaves
    /// sparse high levels empty although `A > 0` up to `sup |f|`.
    pub fn merged_positive(&self) -> LevelProfile {
        let mut out = self.clone();
        let mut run_start = 0;
        for i in 0..self.bins() {
            if self.area[i] > 0.0 {
                let lo = self.t_grid[run_start];
                let mass = self.area[i] * (self.t_grid[i + 1] - self.t_grid[i]);
                let var = (self.stderr[i] * (self.t_grid[i + 1] - self.t_grid[i])).powi(2);
                let width = self.t_grid[i + 1] - lo;
                for j in run_start..=i {
                    out.area[j] = mass / width;
                    out.stderr[j] = var.sqrt() / width;
                }
                run_start = i + 1;
            }
        }
        out
    }

    /// Profile of `λ f`: edges scaled by `λ`, areas by `λ^{n−1}`, masses by `λ^n`.
    pub fn scaled(&self, lambda: f64, n: crate::geometry::Dimension) -> LevelProfile {
        let a = lambda.powf(n.as_f64() - 1.0);
        let m = a * lambda;
        LevelProfile {
            t_grid: self.t_grid.iter().map(|t| t * lambda).collect(),
            area: self.area.iter().map(|v| v * a).collect(),
            stderr: self.stderr.iter().map(|v| v * a).collect(),
            total_mass: self.total_mass * m,
            total_mass_stderr: self.total_mass_stderr * m,
            overflow_mass: self.overflow_mass * m,
        }
    }

    /// Sup of `t` with positive area on the grid.
    pub fn support_end(&self) -> f64 {
        self.area
            .iter()
            .rposition(|&a| a > 0.0)
            .map(|i| self.t_grid[i + 1])
            .unwrap_or(self.t_grid[0])
    }

    /// CSV with columns `t, area, stderr` at bin centers.
    pub fn to_csv(&self, provenance: &str) -> String {
        let rows: Vec<[f64; 3]> = self
            .centers()
            .into_iter()
            .zip(self.area.iter().zip(&self.stderr))
            .map(|(t, (a, s))| [t, *a, *s])
            .collect();
        csv_table(
            &format!("level profile A(t); t dimensionless (bin center); area in units of (n-1)-measure; {provenance}"),
            &["t", "area", "stderr"],
            &rows,
        )
    }
}
