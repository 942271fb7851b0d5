use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::CurveFamily;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::geometry::Vector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub max_sweeps: usize,
    /// Relative objective change and relative duality gap targets.
    pub rel_tol: f64,
    pub residual_tol: f64,
    /// Over-relaxation factor in `(0, 2)` for the multiplier updates.
    pub relaxation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_sweeps: 20_000,
            rel_tol: 1e-6,
            residual_tol: 1e-3,
            relaxation: 1.5,
        }
    }
}

/// Cellwise density on the family's grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Domain fraction of each cell.
    pub weights: Vec<f64>,
    pub cell_volume: f64,
}

impl DensityGrid {
    /// `Σ ρ^p · cell_volume · weight`.
    pub fn energy(&self, p: f64) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(r, w)| r.powf(p) * w)
            .sum::<f64>()
            * self.cell_volume
    }

    /// `∫_γ ρ ds` along a polyline, with exact cell-crossing lengths.
    pub fn line_integral(&self, curve: &[Vector]) -> f64 {
        let mut cells = Vec::new();
        for w in curve.windows(2) {
            self.grid.segment_cells(&w[0], &w[1], &mut cells);
        }
        cells.iter().map(|(c, l)| self.values[*c] * l).sum()
    }

    /// `max(0, 1 − min_γ ∫_γ ρ ds)`.
    pub fn admissibility_residual(&self, family: &CurveFamily) -> f64 {
        let min = family
            .curves
            .par_iter()
            .map(|c| self.line_integral(c))
            .reduce(|| f64::INFINITY, f64::min);
        (1.0 - min).max(0.0)
    }

    /// CSV with cell centers and values, skipping empty cells.
    pub fn to_csv(&self) -> String {
        let n = self.grid.dim();
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.push("rho".into());
        header.push("weight".into());
        let rows: Vec<Vec<f64>> = (0..self.values.len())
            .filter(|&c| self.values[c] > 0.0)
            .map(|c| {
                let mut row: Vec<f64> = self.grid.cell_center(c).iter().copied().collect();
                row.push(self.values[c]);
                row.push(self.weights[c]);
                row
            })
            .collect();
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        crate::level_sets::csv_table(
            "extremal density; coordinates dimensionless; rho in 1/length; weight = domain fraction; estimate",
            &refs,
            &rows,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusResult {
    /// Energy of the returned (exactly admissible) density.
    pub value: f64,
    /// Dual objective; a lower bound for the discrete optimum.
    pub lower_bound: f64,
    pub duality_gap_estimate: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub density: DensityGrid,
}

/// Sparse constraint rows over the compacted set of touched cells.
struct Problem {
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
    /// Per-touched-cell weighted volume `v_c`.
    vol: Vec<f64>,
    /// Touched cell → grid cell.
    cells: Vec<usize>,
    weights: Vec<f64>,
}

fn assemble(family: &CurveFamily) -> Result<Problem> {
    let grid = &family.grid;
    let rows: Vec<Vec<(usize, f64)>> = family
        .curves
        .par_iter()
        .map(|curve| {
            let mut cells = Vec::new();
            for w in curve.windows(2) {
                grid.segment_cells(&w[0], &w[1], &mut cells);
            }
            cells.sort_by_key(|c| c.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(cells.len());
            for (c, l) in cells {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += l,
                    _ => merged.push((c, l)),
                }
            }
            merged
        })
        .collect();
    let mut touched: Vec<usize> = rows.iter().flatten().map(|c| c.0).collect();
    touched.par_sort_unstable();
    touched.dedup();
    let weights: Vec<f64> = touched
        .par_iter()
        .map(|&c| family.domain.cell_fraction(grid, c))
        .collect();
    let lookup = |c: usize| touched.binary_search(&c).expect("touched") as u32;
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    row_ptr.push(0);
    let mut col = Vec::new();
    let mut val = Vec::new();
    for row in &rows {
        if row.is_empty() {
            return Err(Error::param(
                "curves",
                "a curve lies entirely outside the grid",
            ));
        }
        for &(c, l) in row {
            let k = lookup(c);
            // Cells outside the domain carry no density; drop them.
            if weights[k as usize] > 0.0 {
                col.push(k);
                val.push(l);
            }
        }
        if col.len() == *row_ptr.last().unwrap() {
            return Err(Error::param(
                "curves",
                "a curve lies entirely outside the domain",
            ));
        }
        row_ptr.push(col.len());
    }
    let cv = grid.cell_volume();
    Ok(Problem {
        row_ptr,
        col,
        val,
        vol: weights.iter().map(|w| w * cv).collect(),
        cells: touched,
        weights,
    })
}

/// Discrete `p`-modulus: minimize `Σ ρ_c^p v_c` subject to `∫_γ ρ ≥ 1` for
/// every curve, by coordinate ascent on the dual (one multiplier per curve)
/// with primal recovery `ρ_c = ((Aᵀλ)_c / (p v_c))^{1/(p−1)}`.
///
/// Sweeps run sequentially over curves so the result is independent of the
/// thread count. The returned density is the last iterate scaled to exact
/// admissibility, so `value` is an upper bound and `lower_bound` the dual
/// value.
pub fn discrete_modulus(
    family: &CurveFamily,
    p: f64,
    options: &SolverOptions,
) -> Result<ModulusResult> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("must exceed 1, got {p}")));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !(options.relaxation > 0.0 && options.relaxation < 2.0) {
        return Err(Error::param("relaxation", "must lie in (0, 2)"));
    }
    let prob = assemble(family)?;
    let m = prob.vol.len();
    let rows = prob.row_ptr.len() - 1;
    let expo = 1.0 / (p - 1.0);
    let primal = |s: f64, v: f64| -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            (s / (p * v)).powf(expo)
        }
    };
    // p = 2: the row map t ↦ a·ρ(λ + t e_j) is affine with slope Σ a²/(2v).
    let slope: Vec<f64> = (0..rows)
        .map(|j| {
            (prob.row_ptr[j]..prob.row_ptr[j + 1])
                .map(|k| prob.val[k] * prob.val[k] / (2.0 * prob.vol[prob.col[k] as usize]))
                .sum()
        })
        .collect();
    let quadratic = (p - 2.0).abs() < 1e-15;

    let mut lambda = vec![0.0; rows];
    let mut s = vec![0.0; m];
    let mut rho = vec![0.0; m];
    let mut prev_upper = f64::INFINITY;
    let mut best: Option<(f64, f64, f64, Vec<f64>)> = None;
    let mut converged = false;
    let mut iterations = 0;
    let row_dot = |rho: &[f64], j: usize| -> f64 {
        (prob.row_ptr[j]..prob.row_ptr[j + 1])
            .map(|k| prob.val[k] * rho[prob.col[k] as usize])
            .sum()
    };

    for sweep in 1..=options.max_sweeps {
        iterations = sweep;
        for j in 0..rows {
            let range = prob.row_ptr[j]..prob.row_ptr[j + 1];
            if range.is_empty() {
                continue;
            }
            let cur = row_dot(&rho, j);
            let new = if quadratic {
                (lambda[j] + options.relaxation * (1.0 - cur) / slope[j]).max(0.0)
            } else {
                let phi = |t: f64| -> (f64, f64) {
                    let mut f = -1.0;
                    let mut df = 0.0;
                    for k in range.clone() {
                        let c = prob.col[k] as usize;
                        let a = prob.val[k];
                        let sc = (s[c] + t * a).max(0.0);
                        let base = sc / (p * prob.vol[c]);
                        if base > 0.0 {
                            let r = base.powf(expo);
                            f += a * r;
                            df += a * a * expo * r / sc;
                        }
                    }
                    (f, df)
                };
                let lo0 = -lambda[j];
                let target = solve_monotone(phi, lo0, cur - 1.0);
                lambda[j] + options.relaxation * (target)
            }
            .max(0.0);
            let delta = new - lambda[j];
            if delta != 0.0 {
                lambda[j] = new;
                for k in range {
                    let c = prob.col[k] as usize;
                    s[c] += delta * prob.val[k];
                    rho[c] = primal(s[c], prob.vol[c]);
                }
            }
        }
        // Diagnostics.
        let min_dot = (0..rows)
            .map(|j| row_dot(&rho, j))
            .fold(f64::INFINITY, f64::min);
        let energy: f64 = rho.iter().zip(&prob.vol).map(|(r, v)| r.powf(p) * v).sum();
        let dual = lambda.iter().sum::<f64>() - (p - 1.0) * energy;
        let residual = (1.0 - min_dot).max(0.0);
        if min_dot > 0.0 {
            let upper = energy / min_dot.powf(p);
            let better = best.as_ref().is_none_or(|b| upper < b.0);
            let best_dual = best.as_ref().map_or(dual, |b| b.1.max(dual));
            if better {
                best = Some((upper, best_dual, residual, rho.clone()));
            } else if let Some(b) = best.as_mut() {
                b.1 = best_dual;
            }
            let (bu, bd) = best.as_ref().map(|b| (b.0, b.1)).unwrap();
            let gap = (bu - bd) / bu;
            let change = (prev_upper - upper).abs() / upper;
            prev_upper = upper;
            if gap < options.rel_tol
                || (change < options.rel_tol && residual < options.residual_tol && sweep > 10)
            {
                converged = true;
                break;
            }
        }
    }
    let (upper, dual, _, rho_best) = best.ok_or(Error::EmptyFamily)?;
    let min_dot = row_min(&prob, &rho_best);
    let scale = 1.0 / min_dot;
    let mut values = vec![0.0; family.grid.cell_count()];
    let mut weights = vec![0.0; family.grid.cell_count()];
    for (k, &c) in prob.cells.iter().enumerate() {
        values[c] = rho_best[k] * scale;
        weights[c] = prob.weights[k];
    }
    Ok(ModulusResult {
        value: upper,
        lower_bound: dual,
        duality_gap_estimate: (upper - dual).max(0.0),
        residual: (1.0 - min_dot * scale).max(0.0),
        iterations,
        converged,
        density: DensityGrid {
            grid: family.grid.clone(),
            values,
            weights,
            cell_volume: family.grid.cell_volume(),
        },
    })
}

fn row_min(prob: &Problem, rho: &[f64]) -> f64 {
    (0..prob.row_ptr.len() - 1)
        .map(|j| {
            (prob.row_ptr[j]..prob.row_ptr[j + 1])
                .map(|k| prob.val[k] * rho[prob.col[k] as usize])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Root of the non-decreasing `phi` on `[lo, ∞)`, or `lo` when `phi(lo) ≥ 0`.
/// `phi0` is `phi(0)`, used to pick the bracket side.
fn solve_monotone(phi: impl Fn(f64) -> (f64, f64), lo: f64, phi0: f64) -> f64 {
    let (mut a, mut b) = if phi0 < 0.0 {
        let mut b = 1e-12_f64.max(lo.abs());
        let mut guard = 0;
        while phi(b).0 < 0.0 && guard < 200 {
            b *= 2.0;
            guard += 1;
        }
        (0.0, b)
    } else {
        if phi(lo).0 >= 0.0 {
            return lo;
        }
        (lo, 0.0)
    };
    let mut t = 0.5 * (a + b);
    for _ in 0..100 {
        let (f, df) = phi(t);
        if f.abs() < 1e-14 {
            break;
        }
        if f < 0.0 {
            a = t;
        } else {
            b = t;
        }
        let newton = t - f / df;
        t = if df > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a < 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    t
}
