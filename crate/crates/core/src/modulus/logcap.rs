use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Point counts used for the transfinite-diameter extrapolation.
pub const FEKETE_SIZES: [usize; 3] = [32, 64, 128];

const MAX_SWEEPS: usize = 4000;

/// Logarithmic capacity of a union of disjoint arcs `(start, end)` on the
/// unit circle, as the limit of the `m`-point transfinite diameters `d_m`.
/// `log d_m` is fitted on `{1, 1/m, log m / m}` over [`FEKETE_SIZES`].
pub fn log_capacity_2d(arcs: &[(f64, f64)]) -> Result<f64> {
    let arcs = normalize(arcs)?;
    let logs: Vec<f64> = FEKETE_SIZES
        .iter()
        .map(|&m| log_diameter(&arcs, m))
        .collect();
    let m: Vec<f64> = FEKETE_SIZES.iter().map(|&m| m as f64).collect();
    let rows: Vec<[f64; 3]> = m.iter().map(|&m| [1.0, 1.0 / m, m.ln() / m]).collect();
    Ok(solve3(&rows, &logs).exp())
}

/// `log d_m` at the best Fekete configuration found.
pub fn transfinite_diameter_log(arcs: &[(f64, f64)], m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::param("m", "need at least two points"));
    }
    Ok(log_diameter(&normalize(arcs)?, m))
}

fn normalize(arcs: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for &(a, b) in arcs {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::param("arcs", "endpoints must be finite"));
        }
        if b > a {
            out.push((a, b.min(a + 2.0 * PI)));
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySet);
    }
    let total: f64 = out.iter().map(|(a, b)| b - a).sum();
    if total > 2.0 * PI * (1.0 + 1e-12) {
        return Err(Error::param("arcs", "arcs overlap"));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(out)
}

fn full_circle(arcs: &[(f64, f64)]) -> bool {
    arcs.len() == 1 && arcs[0].1 - arcs[0].0 >= 2.0 * PI * (1.0 - 1e-12)
}

fn log_diameter(arcs: &[(f64, f64)], m: usize) -> f64 {
    if full_circle(arcs) {
        // Roots of unity: ∏_{i<j} |z_i − z_j| = m^{m/2}.
        return (m as f64).ln() / (m as f64 - 1.0);
    }
    let lengths: Vec<f64> = arcs.iter().map(|(a, b)| b - a).collect();
    let starts: Vec<Vec<f64>> = vec![
        lengths.clone(),
        lengths.iter().map(|l| l.sqrt()).collect(),
        vec![1.0; arcs.len()],
    ];
    let pairs = (m * (m - 1)) as f64 / 2.0;
    starts
        .iter()
        .map(|w| {
            let mut cfg = Config::new(arcs, allocate(w, m));
            cfg.optimize();
            cfg.energy() / pairs
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest-remainder split of `m` points proportional to `w`, at least one
/// per arc when possible.
fn allocate(w: &[f64], m: usize) -> Vec<usize> {
    let total: f64 = w.iter().sum();
    let mut counts: Vec<usize> = w
        .iter()
        .map(|x| ((x / total) * m as f64).floor() as usize)
        .collect();
    let mut rest: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .map(|(i, x)| (i, (x / total) * m as f64 - counts[i] as f64))
        .collect();
    rest.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut left = m - counts.iter().sum::<usize>();
    for (i, _) in rest.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[*i] += 1;
        left -= 1;
    }
    for i in 0..counts.len() {
        if counts[i] == 0 {
            if let Some(j) = (0..counts.len())
                .max_by_key(|&j| counts[j])
                .filter(|&j| counts[j] > 1)
            {
                counts[j] -= 1;
                counts[i] += 1;
            }
        }
    }
    counts
}

struct Config<'a> {
    arcs: &'a [(f64, f64)],
    /// Sorted angles per arc.
    points: Vec<Vec<f64>>,
}

fn log_chord(x: f64) -> f64 {
    (2.0 * (0.5 * x).sin().abs()).ln()
}

impl<'a> Config<'a> {
    fn new(arcs: &'a [(f64, f64)], counts: Vec<usize>) -> Self {
        let points = arcs
            .iter()
            .zip(&counts)
            .map(|(&(a, b), &k)| chebyshev_like(a, b, k))
            .collect();
        Config { arcs, points }
    }

    fn all(&self) -> Vec<f64> {
        self.points.iter().flatten().copied().collect()
    }

    fn energy(&self) -> f64 {
        let all = self.all();
        let mut e = 0.0;
        for i in 0..all.len() {
            for j in 0..i {
                e += log_chord(all[i] - all[j]);
            }
        }
        e
    }

    fn optimize(&mut self) {
        loop {
            self.ascend();
            if !self.try_transfer() {
                break;
            }
        }
    }

    /// Cyclic coordinate ascent. Each coordinate is confined to the gap
    /// between its neighbours on the same arc, where the objective is concave.
    fn ascend(&mut self) {
        let mut last = self.energy();
        for sweep in 0..MAX_SWEEPS {
            for a in 0..self.points.len() {
                for i in 0..self.points[a].len() {
                    let others = self.others(a, i);
                    let (lo, hi) = self.bracket(a, i);
                    self.points[a][i] = maximize(&others, lo, hi, self.points[a][i]);
                }
            }
            if sweep % 10 == 9 {
                let e = self.energy();
                if (e - last).abs() <= 1e-13 * e.abs().max(1.0) {
                    break;
                }
                last = e;
            }
        }
    }

    fn others(&self, a: usize, i: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for (b, pts) in self.points.iter().enumerate() {
            for (j, &p) in pts.iter().enumerate() {
                if b != a || j != i {
                    out.push(p);
                }
            }
        }
        out
    }

    fn bracket(&self, a: usize, i: usize) -> (f64, f64) {
        let (s, e) = self.arcs[a];
        let pts = &self.points[a];
        let lo = if i == 0 { s } else { pts[i - 1] };
        let hi = if i + 1 == pts.len() { e } else { pts[i + 1] };
        (lo, hi)
    }

    /// Move one point from one arc to another if that raises the energy.
    fn try_transfer(&mut self) -> bool {
        if self.points.len() < 2 {
            return false;
        }
        let base = self.energy();
        let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
        for from in 0..self.points.len() {
            if self.points[from].len() <= 1 {
                continue;
            }
            for to in 0..self.points.len() {
                if to == from {
                    continue;
                }
                let mut trial = self.points.clone();
                let k_from = trial[from].len() - 1;
                let k_to = trial[to].len() + 1;
                let (a, b) = self.arcs[from];
                trial[from] = chebyshev_like(a, b, k_from);
                let (a, b) = self.arcs[to];
                trial[to] = chebyshev_like(a, b, k_to);
                let mut cfg = Config {
                    arcs: self.arcs,
                    points: trial,
                };
                cfg.ascend();
                let e = cfg.energy();
                if e > base + 1e-12 * base.abs().max(1.0) && best.as_ref().is_none_or(|b| e > b.0) {
                    best = Some((e, cfg.points));
                }
            }
        }
        match best {
            Some((_, points)) => {
                self.points = points;
                true
            }
            None => false,
        }
    }
}

/// Points clustered toward the arc endpoints, endpoints included.
fn chebyshev_like(a: f64, b: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![0.5 * (a + b)],
        _ => (0..k)
            .map(|j| 0.5 * (a + b) - 0.5 * (b - a) * (PI * j as f64 / (k - 1) as f64).cos())
            .collect(),
    }
}

/// Maximize `Σ log|2 sin((φ − ψ)/2)|` over `φ ∈ [lo, hi]`. The derivative
/// `Σ ½ cot((φ − ψ)/2)` is decreasing there; safeguarded Newton on it.
fn maximize(others: &[f64], lo: f64, hi: f64, start: f64) -> f64 {
    let deriv = |phi: f64| {
        let (mut g, mut h) = (0.0, 0.0);
        for &psi in others {
            let half = 0.5 * (phi - psi);
            let (s, c) = half.sin_cos();
            g += 0.5 * c / s;
            h -= 0.25 / (s * s);
        }
        (g, h)
    };
    let (mut a, mut b) = (lo, hi);
    let (ga, _) = deriv(a);
    if ga.is_finite() && ga <= 0.0 {
        return a;
    }
    let (gb, _) = deriv(b);
    if gb.is_finite() && gb >= 0.0 {
        return b;
    }
    let mut x = start.clamp(a, b);
    if x <= a || x >= b {
        x = 0.5 * (a + b);
    }
    for _ in 0..100 {
        let (g, h) = deriv(x);
        if g > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - g / h;
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) || b - a <= 1e-15 * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

fn solve3(rows: &[[f64; 3]], rhs: &[f64]) -> f64 {
    let a = nalgebra::Matrix3::from_fn(|i, j| rows[i][j]);
    let b = nalgebra::Vector3::from_column_slice(rhs);
    a.lu().solve(&b).map(|x| x[0]).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_sums() {
        assert_eq!(allocate(&[1.0, 1.0, 1.0], 32).iter().sum::<usize>(), 32);
        let c = allocate(&[10.0, 0.001], 8);
        assert_eq!(c, vec![7, 1]);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(log_capacity_2d(&[]), Err(Error::EmptySet)));
        assert!(matches!(
            log_capacity_2d(&[(1.0, 1.0)]),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn circle_and_half_circle() {
        assert!((log_capacity_2d(&[(0.0, 2.0 * PI)]).unwrap() - 1.0).abs() < 1e-2);
        let half = log_capacity_2d(&[(0.0, PI)]).unwrap();
        assert!((half / (PI / 4.0).sin() - 1.0).abs() < 0.02, "{half}");
    }
}
