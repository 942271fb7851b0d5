use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{Domain, Grid};
use crate::error::{Error, Result};
use crate::geometry::{Dimension, Vector};
use crate::level_sets::sphere_directions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    RingConnecting,
    SphereArcs,
    BoundaryReaching,
    Custom,
}

/// Finite set of polylines over a grid; the input of the modulus solver.
#[derive(Clone, Debug)]
pub struct CurveFamily {
    pub grid: Grid,
    pub domain: Domain,
    pub curves: Vec<Vec<Vector>>,
    pub kind: FamilyKind,
}

/// Vertices of `p → q` spaced at most `h` apart.
pub fn straight_polyline(p: &Vector, q: &Vector, h: f64) -> Vec<Vector> {
    let pieces = ((q - p).norm() / h).ceil().max(1.0) as usize;
    (0..=pieces)
        .map(|i| p + (q - p) * (i as f64 / pieces as f64))
        .collect()
}

/// Boundary plate on the unit sphere for condenser families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plate {
    /// Spherical cap of angular radius `theta` centered at `e₁`.
    Cap { theta: f64 },
    /// Union of arcs `[start, end]` (radians, counter-clockwise) on the unit
    /// circle; n = 2 only.
    Arcs(Vec<(f64, f64)>),
}

impl Plate {
    pub fn contains(&self, x: &Vector) -> bool {
        match self {
            Plate::Cap { theta } => x[0] / x.norm() >= theta.cos() - 1e-15,
            Plate::Arcs(arcs) => {
                let phi = x[1].atan2(x[0]);
                arcs.iter().any(|&(a, b)| {
                    let t = (phi - a).rem_euclid(2.0 * PI);
                    t <= b - a
                })
            }
        }
    }

    /// `H_{n-1}` of the plate.
    pub fn measure(&self, n: Dimension) -> f64 {
        match self {
            Plate::Cap { theta } => cap_measure(n, *theta),
            Plate::Arcs(arcs) => arcs.iter().map(|(a, b)| b - a).sum(),
        }
    }
}

/// Area of the cap of angular radius `theta` on `S^{n-1}`:
/// `ω_{n-2} ∫₀^θ sin^{n-2} φ dφ`.
pub fn cap_measure(n: Dimension, theta: f64) -> f64 {
    let theta = theta.clamp(0.0, PI);
    if n.get() == 2 {
        return 2.0 * theta;
    }
    let lower = crate::geometry::sphere_area(Dimension::new(n.get() - 1).expect("n ≥ 3"));
    let (x, w) = crate::geometry::gauss_legendre(64, 0.0, theta);
    lower
        * x.iter()
            .zip(&w)
            .map(|(x, w)| w * x.sin().powi(n.get() as i32 - 2))
            .sum::<f64>()
}

/// Inverse of [`cap_measure`] by bisection.
pub fn cap_angle_for_measure(n: Dimension, measure: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cap_measure(n, mid) < measure {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl CurveFamily {
    pub fn custom(grid: Grid, domain: Domain, curves: Vec<Vec<Vector>>) -> Result<Self> {
        let fam = CurveFamily {
            grid,
            domain,
            curves,
            kind: FamilyKind::Custom,
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Every polyline has at least two vertices, spaced within `2h`.
    pub fn validate(&self) -> Result<()> {
        let h2 = 2.0 * self.grid.max_h() * (1.0 + 1e-9);
        for (i, c) in self.curves.iter().enumerate() {
            if c.len() < 2 {
                return Err(Error::param(
                    "curves",
                    format!("curve {i} has fewer than two vertices"),
                ));
            }
            if c.iter().any(|v| v.len() != self.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: c.iter().find(|v| v.len() != self.dim()).unwrap().len(),
                });
            }
            if c.windows(2).any(|w| (&w[1] - &w[0]).norm() > h2) {
                return Err(Error::param(
                    "curves",
                    format!("curve {i} has vertices more than 2h apart"),
                ));
            }
        }
        Ok(())
    }

    /// The family restricted to the given curve indices.
    pub fn subfamily(&self, indices: &[usize]) -> CurveFamily {
        CurveFamily {
            grid: self.grid.clone(),
            domain: self.domain.clone(),
            curves: indices.iter().map(|&i| self.curves[i].clone()).collect(),
            kind: self.kind,
        }
    }

    /// Radial segments crossing `inner < |x| < outer`, about
    /// `rays_per_cell` of them per grid cell on the outer sphere.
    pub fn ring(
        n: Dimension,
        inner: f64,
        outer: f64,
        cells: usize,
        rays_per_cell: f64,
    ) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::param(
                "ring",
                format!("need 0 < inner < outer, got ({inner}, {outer})"),
            ));
        }
        let grid = Grid::cube(n.get(), outer, cells)?;
        let h = grid.max_h();
        let count = match n.get() {
            2 => (rays_per_cell * 2.0 * PI * outer / h).ceil(),
            d => (rays_per_cell * crate::geometry::sphere_area(n) * (outer / h).powi(d as i32 - 1))
                .ceil(),
        } as usize;
        let dirs = sphere_directions(n, count, 0);
        let curves = dirs
            .iter()
            .map(|u| straight_polyline(&(u * inner), &(u * outer), h))
            .collect();
        Ok(CurveFamily {
            grid,
            domain: Domain::Shell { inner, outer },
            curves,
            kind: FamilyKind::RingConnecting,
        })
    }

    /// Curves joining the two sides `x = 0` and `x = length` of the
    /// rectangle `[0, length] × [0, width]` on a `cells × cells` grid: one
    /// horizontal segment per cell row plus `slants` families of slanted
    /// segments.
    pub fn rectangle(length: f64, width: f64, cells: usize, slants: usize) -> Result<Self> {
        let grid = Grid::new(vec![0.0, 0.0], vec![length, width], vec![cells, cells])?;
        let h = grid.max_h();
        let rows = cells;
        let mut curves = Vec::new();
        for j in 0..rows {
            let y = (j as f64 + 0.5) * width / rows as f64;
            curves.push(straight_polyline(
                &Vector::from_vec(vec![0.0, y]),
                &Vector::from_vec(vec![length, y]),
                h,
            ));
        }
        for s in 1..=slants {
            let rise = width * s as f64 / (slants + 1) as f64;
            for j in 0..rows {
                let y0 = (j as f64 + 0.5) * width / rows as f64;
                for sign in [-1.0, 1.0] {
                    let y1 = y0 + sign * rise;
                    if (0.0..=width).contains(&y1) {
                        curves.push(straight_polyline(
                            &Vector::from_vec(vec![0.0, y0]),
                            &Vector::from_vec(vec![length, y1]),
                            h,
                        ));
                    }
                }
            }
        }
        Ok(CurveFamily {
            grid,
            domain: Domain::Box,
            curves,
            kind: FamilyKind::Custom,
        })
    }

    /// The two half circles joining `(r, 0)` and `(-r, 0)` on circles of
    /// radius `r ∈ (inner, outer)` (n = 2), `curves_per_cell` radii per cell
    /// width.
    pub fn sphere_arcs(inner: f64, outer: f64, cells: usize, curves_per_cell: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::param("sphere_arcs", "need 0 < inner < outer"));
        }
        let grid = Grid::cube(2, outer, cells)?;
        let h = grid.max_h();
        let radii = ((outer - inner) / h * curves_per_cell).ceil() as usize;
        let mut curves = Vec::new();
        for i in 0..radii {
            let r = inner + (outer - inner) * (i as f64 + 0.5) / radii as f64;
            let pieces = (PI * r / h).ceil() as usize;
            for sign in [1.0, -1.0] {
                curves.push(
                    (0..=pieces)
                        .map(|j| {
                            let t = sign * PI * j as f64 / pieces as f64;
                            Vector::from_vec(vec![r * t.cos(), r * t.sin()])
                        })
                        .collect(),
                );
            }
        }
        Ok(CurveFamily {
            grid,
            domain: Domain::Shell { inner, outer },
            curves,
            kind: FamilyKind::SphereArcs,
        })
    }

    /// Curves in `A(r) = {r < |x| < 1/r}` from the plate to `∂A(r)`.
    ///
    /// Starting points come from one global point set on the unit sphere,
    /// so larger plates give supersets of curves. From each point: the
    /// inward and outward radial rays, plus rays along a fixed direction set
    /// with `|d·x| > 0.2`, each cut at its first hit of `∂A(r)`.
    pub fn condenser(
        n: Dimension,
        r: f64,
        plate: &Plate,
        cells: usize,
        points_per_cell: f64,
    ) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::param("r", format!("must lie in (0, 1), got {r}")));
        }
        if matches!(plate, Plate::Arcs(_)) && n.get() != 2 {
            return Err(Error::param("plate", "arc plates need n = 2"));
        }
        let outer = 1.0 / r;
        let grid = Grid::cube(n.get(), outer, cells)?;
        let h = grid.max_h();
        let count = match n.get() {
            2 => (points_per_cell * 2.0 * PI / h).ceil(),
            d => (points_per_cell * crate::geometry::sphere_area(n) / h.powi(d as i32 - 1)).ceil(),
        } as usize;
        let starts = sphere_directions(n, count, 0);
        let dir_count = match n.get() {
            2 => 24,
            3 => 48,
            _ => 96,
        };
        let dirs = sphere_directions(n, dir_count, 1);
        let mut curves = Vec::new();
        for x in starts.iter().filter(|x| plate.contains(x)) {
            curves.push(straight_polyline(x, &(x * r), h));
            curves.push(straight_polyline(x, &(x * outer), h));
            for d in &dirs {
                let b = d.dot(x);
                if b.abs() <= 0.2 {
                    continue;
                }
                let t = first_exit(b, r, outer);
                curves.push(straight_polyline(x, &(x + d * t), h));
            }
        }
        if curves.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(CurveFamily {
            grid,
            domain: Domain::Shell { inner: r, outer },
            curves,
            kind: FamilyKind::BoundaryReaching,
        })
    }
}

/// First `t > 0` with `|x + t d| ∈ {r, R}` for unit `x`, `d`, `b = d·x`.
fn first_exit(b: f64, r: f64, big: f64) -> f64 {
    let out = -b + (b * b + big * big - 1.0).sqrt();
    let disc = b * b - (1.0 - r * r);
    if b < 0.0 && disc >= 0.0 {
        (-b - disc.sqrt()).min(out)
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exits_land_on_boundary() {
        let x = Vector::from_vec(vec![1.0, 0.0]);
        for k in 0..24 {
            let a = 2.0 * PI * k as f64 / 24.0;
            let d = Vector::from_vec(vec![a.cos(), a.sin()]);
            let t = first_exit(d.dot(&x), 0.5, 2.0);
            let r = (&x + &d * t).norm();
            assert!((r - 0.5).abs() < 1e-12 || (r - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_measure_matches_closed_forms() {
        assert!((cap_measure(Dimension::THREE, PI) - 4.0 * PI).abs() < 1e-12);
        let t = 0.7;
        assert!((cap_measure(Dimension::THREE, t) - 2.0 * PI * (1.0 - t.cos())).abs() < 1e-12);
        let m = cap_measure(Dimension::THREE, 1.1);
        assert!((cap_angle_for_measure(Dimension::THREE, m) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn arc_plate_membership_wraps() {
        let p = Plate::Arcs(vec![(-0.5, 0.5), (3.0, 3.5)]);
        assert!(p.contains(&Vector::from_vec(vec![1.0, 0.1])));
        assert!(p.contains(&Vector::from_vec(vec![(3.3f64).cos(), (3.3f64).sin()])));
        assert!(!p.contains(&Vector::from_vec(vec![0.0, 1.0])));
        assert!((p.measure(Dimension::TWO) - 1.5).abs() < 1e-15);
    }
}
