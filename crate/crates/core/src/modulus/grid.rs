use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;

/// Axis-aligned lattice of `cells[i]` cells of width `h[i]` starting at `lo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub h: Vec<f64>,
    pub cells: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != cells.len() || lo.len() < 2 {
            return Err(Error::param(
                "grid",
                "lo, hi and cells must share a dimension ≥ 2",
            ));
        }
        if cells.contains(&0) || lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
            return Err(Error::param(
                "grid",
                "needs positive extents and cell counts",
            ));
        }
        let h = lo
            .iter()
            .zip(&hi)
            .zip(&cells)
            .map(|((a, b), &c)| (b - a) / c as f64)
            .collect();
        Ok(Grid { lo, h, cells })
    }

    /// The cube `[-half, half]^n` split into `per_axis^n` cells.
    pub fn cube(n: usize, half: f64, per_axis: usize) -> Result<Self> {
        Grid::new(vec![-half; n], vec![half; n], vec![per_axis; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    pub fn min_h(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_h(&self) -> f64 {
        self.h.iter().copied().fold(0.0, f64::max)
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.lo[axis] + self.h[axis] * self.cells[axis] as f64
    }

    fn linear(&self, idx: &[usize]) -> usize {
        let mut out = 0;
        for i in (0..idx.len()).rev() {
            out = out * self.cells[i] + idx[i];
        }
        out
    }

    pub fn multi_index(&self, mut cell: usize) -> Vec<usize> {
        self.cells
            .iter()
            .map(|&c| {
                let i = cell % c;
                cell /= c;
                i
            })
            .collect()
    }

    pub fn cell_lo(&self, cell: usize) -> Vector {
        let idx = self.multi_index(cell);
        Vector::from_iterator(
            self.dim(),
            (0..self.dim()).map(|i| self.lo[i] + idx[i] as f64 * self.h[i]),
        )
    }

    pub fn cell_center(&self, cell: usize) -> Vector {
        let mut c = self.cell_lo(cell);
        for i in 0..self.dim() {
            c[i] += 0.5 * self.h[i];
        }
        c
    }

    /// Cell containing `x`, or `None` outside the box.
    pub fn locate(&self, x: &Vector) -> Option<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let c = ((x[i] - self.lo[i]) / self.h[i]).floor();
            if c < 0.0 || c >= self.cells[i] as f64 {
                return None;
            }
            idx.push(c as usize);
        }
        Some(self.linear(&idx))
    }

    /// Append `(cell, length)` for every cell the segment `p → q` crosses,
    /// after clipping to the box. Lengths are exact.
    pub fn segment_cells(&self, p: &Vector, q: &Vector, out: &mut Vec<(usize, f64)>) {
        let n = self.dim();
        let d = q - p;
        let len = d.norm();
        if len == 0.0 {
            return;
        }
        // Clip the parameter range to the box (slab test).
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        for i in 0..n {
            let (a, b) = (self.lo[i], self.hi(i));
            if d[i] == 0.0 {
                if p[i] < a || p[i] > b {
                    return;
                }
            } else {
                let (mut ta, mut tb) = ((a - p[i]) / d[i], (b - p[i]) / d[i]);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
            }
        }
        if t1 <= t0 {
            return;
        }
        // Start in the cell holding the midpoint of the first step to avoid
        // ambiguity on cell faces.
        let mut idx = vec![0usize; n];
        let mut next = vec![f64::INFINITY; n];
        let mut delta = vec![f64::INFINITY; n];
        let start = p + &d * t0;
        let probe = p + &d * (t0 + 1e-12 * (t1 - t0));
        for i in 0..n {
            let c = ((probe[i] - self.lo[i]) / self.h[i]).floor();
            idx[i] = (c.max(0.0) as usize).min(self.cells[i] - 1);
            if d[i] > 0.0 {
                let face = self.lo[i] + (idx[i] + 1) as f64 * self.h[i];
                next[i] = t0 + (face - start[i]) / d[i];
                delta[i] = self.h[i] / d[i];
            } else if d[i] < 0.0 {
                let face = self.lo[i] + idx[i] as f64 * self.h[i];
                next[i] = t0 + (face - start[i]) / d[i];
                delta[i] = -self.h[i] / d[i];
            }
        }
        let mut t = t0;
        loop {
            let (axis, &t_next) = next
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("n ≥ 2");
            let stop = t_next.min(t1);
            if stop > t {
                out.push((self.linear(&idx), (stop - t) * len));
            }
            if t_next >= t1 {
                break;
            }
            t = t_next;
            if d[axis] > 0.0 {
                if idx[axis] + 1 >= self.cells[axis] {
                    break;
                }
                idx[axis] += 1;
            } else {
                if idx[axis] == 0 {
                    break;
                }
                idx[axis] -= 1;
            }
            next[axis] += delta[axis];
        }
    }
}

/// Region carrying the density. Cells straddling its boundary are weighted
/// by the fraction of their volume inside.
#[derive(Clone, Default)]
pub enum Domain {
    /// The whole grid box.
    #[default]
    Box,
    /// `inner < |x| < outer`.
    Shell {
        inner: f64,
        outer: f64,
    },
    Custom(Arc<dyn Fn(&Vector) -> bool + Send + Sync>),
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Box => write!(f, "Box"),
            Domain::Shell { inner, outer } => write!(f, "Shell({inner}, {outer})"),
            Domain::Custom(_) => write!(f, "Custom"),
        }
    }
}

const SUBSAMPLES_PER_AXIS: usize = 8;

impl Domain {
    pub fn contains(&self, x: &Vector) -> bool {
        match self {
            Domain::Box => true,
            Domain::Shell { inner, outer } => {
                let r = x.norm();
                r > *inner && r < *outer
            }
            Domain::Custom(f) => f(x),
        }
    }

    /// Fraction of `cell` inside the domain: exact 0/1 where decidable,
    /// otherwise an `8^n` midpoint subsample.
    pub fn cell_fraction(&self, grid: &Grid, cell: usize) -> f64 {
        let lo = grid.cell_lo(cell);
        let n = grid.dim();
        match self {
            Domain::Box => return 1.0,
            Domain::Shell { inner, outer } => {
                let (mut near, mut far) = (0.0, 0.0);
                for i in 0..n {
                    let (a, b) = (lo[i], lo[i] + grid.h[i]);
                    let c = if a > 0.0 {
                        a
                    } else if b < 0.0 {
                        b
                    } else {
                        0.0
                    };
                    near += c * c;
                    far += a.abs().max(b.abs()).powi(2);
                }
                let (near, far) = (near.sqrt(), far.sqrt());
                if near >= *inner && far <= *outer {
                    return 1.0;
                }
                if far <= *inner || near >= *outer {
                    return 0.0;
                }
            }
            Domain::Custom(_) => {}
        }
        let k = SUBSAMPLES_PER_AXIS;
        let total = k.pow(n as u32);
        let mut inside = 0usize;
        let mut x = Vector::zeros(n);
        for s in 0..total {
            let mut rem = s;
            for i in 0..n {
                let j = rem % k;
                rem /= k;
                x[i] = lo[i] + (j as f64 + 0.5) / k as f64 * grid.h[i];
            }
            if self.contains(&x) {
                inside += 1;
            }
        }
        inside as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_vec(c.to_vec())
    }

    #[test]
    fn segment_lengths_sum_to_clipped_length() {
        let g = Grid::cube(2, 1.0, 10).unwrap();
        let mut out = Vec::new();
        g.segment_cells(&v(&[-0.93, -0.41]), &v(&[0.77, 0.62]), &mut out);
        let total: f64 = out.iter().map(|c| c.1).sum();
        assert!((total - (1.7_f64.powi(2) + 1.03_f64.powi(2)).sqrt()).abs() < 1e-12);
        out.clear();
        // Clipped at x = 1.
        g.segment_cells(&v(&[0.0, 0.05]), &v(&[3.0, 0.05]), &mut out);
        let total: f64 = out.iter().map(|c| c.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(out.len(), 5);
    }

    #[test]
    fn three_dimensional_traversal() {
        let g = Grid::cube(3, 1.0, 7).unwrap();
        let mut out = Vec::new();
        let (p, q) = (v(&[-0.9, 0.3, -0.2]), v(&[0.8, -0.7, 0.95]));
        g.segment_cells(&p, &q, &mut out);
        let total: f64 = out.iter().map(|c| c.1).sum();
        assert!((total - (q - p).norm()).abs() < 1e-12);
        for w in out.windows(2) {
            assert_ne!(w[0].0, w[1].0);
        }
    }

    #[test]
    fn shell_fractions() {
        let g = Grid::cube(2, 2.0, 40).unwrap();
        let d = Domain::Shell {
            inner: 1.0,
            outer: 1.9,
        };
        let area: f64 = (0..g.cell_count())
            .map(|c| d.cell_fraction(&g, c))
            .sum::<f64>()
            * g.cell_volume();
        let want = std::f64::consts::PI * (1.9 * 1.9 - 1.0);
        assert!((area / want - 1.0).abs() < 2e-3);
    }
}
