use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{cap_angle_for_measure, CurveFamily, FamilyKind, Plate};
use super::grid::{Domain, Grid};
use super::solver::{discrete_modulus, ModulusResult, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Dimension, Vector};
use crate::maps::QrMap;

/// Modulus of the curves joining the boundary spheres of
/// `inner < |x| < outer`: `ω_{n-1} (log(outer/inner))^{1−n}`.
pub fn ring_modulus(n: Dimension, inner: f64, outer: f64) -> Result<f64> {
    if !(inner > 0.0 && outer > inner && outer.is_finite()) {
        return Err(Error::param(
            "ring",
            format!("need 0 < inner < outer, got ({inner}, {outer})"),
        ));
    }
    Ok(sphere_area(n) * (outer / inner).ln().powf(1.0 - n.as_f64()))
}

/// `c_n ∫_J dr/r`.
pub fn sphere_arc_lower_bound(n: Dimension, radius_set_measure: f64, c_n: f64) -> Result<f64> {
    let _ = n;
    if !(radius_set_measure >= 0.0) {
        return Err(Error::param("radius_set_measure", "must be non-negative"));
    }
    if !(c_n > 0.0) {
        return Err(Error::param("c_n", "must be positive"));
    }
    Ok(c_n * radius_set_measure)
}

/// Grid size and curve density for discretized families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Resolution {
    pub cells: usize,
    /// Rays (or start points) per boundary cell.
    pub per_cell: f64,
    pub solver: SolverOptions,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            cells: 200,
            per_cell: 4.0,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    /// `Cap(A(r), F) = Mod Γ(A(r), F)`.
    pub capacity: f64,
    /// `Mod Γ_s = Cap / 2` by the symmetry of `A(r)` in the unit sphere.
    pub symmetrized: f64,
    pub plate_measure: f64,
    pub curves: usize,
    pub modulus: ModulusResult,
}

/// Capacity of the condenser `(A(r), F)` for a plate `F` on the unit sphere.
pub fn condenser_capacity(
    n: Dimension,
    r: f64,
    plate: &Plate,
    res: &Resolution,
) -> Result<CapacityResult> {
    let family = CurveFamily::condenser(n, r, plate, res.cells, res.per_cell)?;
    let modulus = discrete_modulus(&family, n.as_f64(), &res.solver)?;
    Ok(CapacityResult {
        capacity: modulus.value,
        symmetrized: modulus.value / 2.0,
        plate_measure: plate.measure(n),
        curves: family.len(),
        modulus,
    })
}

/// `ω_{n-1} log^{1−n}(C₂ / H(F)^{1/(n−1)})`, valid for `H(F) ≤ ε`.
pub fn gehring_lower_bound(
    r: f64,
    n: Dimension,
    f_measure: f64,
    c2: f64,
    epsilon: f64,
) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", format!("must lie in (0, 1), got {r}")));
    }
    let omega = sphere_area(n);
    if !(f_measure > 0.0 && f_measure <= omega * (1.0 + 1e-12)) {
        return Err(Error::param(
            "F_measure",
            format!("must lie in (0, ω], got {f_measure}"),
        ));
    }
    let f_measure = f_measure.min(omega);
    if f_measure > epsilon {
        return Err(Error::ThresholdExceeded {
            measure: f_measure,
            threshold: epsilon,
        });
    }
    let ratio = c2 / f_measure.powf(1.0 / (n.as_f64() - 1.0));
    if !(ratio > 1.0) {
        return Err(Error::param(
            "C2",
            format!("C2 / H(F)^(1/(n-1)) = {ratio} must exceed 1"),
        ));
    }
    Ok(omega * ratio.ln().powf(1.0 - n.as_f64()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoletskyReport {
    pub map_id: String,
    /// `Mod fΓ`.
    pub lhs: f64,
    /// `K^{n−1} Mod Γ`.
    pub rhs: f64,
    pub source_modulus: f64,
    pub k: f64,
    pub pass: bool,
}

/// Image family `fΓ`: vertices mapped and segments bisected until image
/// spacing is at most the image cell width. The image grid spans the image
/// bounding box with the source's cell counts.
pub fn map_family(
    map: &dyn QrMap,
    family: &CurveFamily,
    image_domain: Option<Domain>,
) -> Result<CurveFamily> {
    if map.dim().get() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: map.dim().get(),
            got: family.dim(),
        });
    }
    let n = family.dim();
    let mapped: Vec<Vec<(Vector, Vector)>> = family
        .curves
        .par_iter()
        .map(|c| {
            c.iter()
                .map(|x| Ok((x.clone(), map.eval(x)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let bbox = |curves: &[Vec<Vector>]| {
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for y in curves.iter().flatten() {
            for i in 0..n {
                lo[i] = lo[i].min(y[i]);
                hi[i] = hi[i].max(y[i]);
            }
        }
        (lo, hi)
    };
    let first: Vec<Vec<Vector>> = mapped
        .iter()
        .map(|c| c.iter().map(|p| p.1.clone()).collect())
        .collect();
    let (lo, hi) = bbox(&first);
    let h = (0..n)
        .map(|i| (hi[i] - lo[i]) / family.grid.cells[i] as f64)
        .fold(f64::INFINITY, f64::min);
    let curves: Vec<Vec<Vector>> = mapped
        .par_iter()
        .map(|c| {
            let mut out = vec![c[0].1.clone()];
            for w in c.windows(2) {
                refine(map, &w[0], &w[1], h, 0, &mut out)?;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let (mut lo, mut hi) = bbox(&curves);
    for i in 0..n {
        let pad = 1e-9 * (hi[i] - lo[i]).max(1e-300);
        lo[i] -= pad;
        hi[i] += pad;
    }
    let grid = Grid::new(lo, hi, family.grid.cells.clone())?;
    Ok(CurveFamily {
        grid,
        domain: image_domain.unwrap_or_default(),
        curves,
        kind: FamilyKind::Custom,
    })
}

fn refine(
    map: &dyn QrMap,
    a: &(Vector, Vector),
    b: &(Vector, Vector),
    h: f64,
    depth: u32,
    out: &mut Vec<Vector>,
) -> Result<()> {
    if (&a.1 - &b.1).norm() <= h || depth >= 30 {
        out.push(b.1.clone());
        return Ok(());
    }
    let xm = (&a.0 + &b.0) * 0.5;
    let m = (xm.clone(), map.eval(&xm)?);
    refine(map, a, &m, h, depth + 1, out)?;
    refine(map, &m, b, h, depth + 1, out)
}

/// `Mod fΓ ≤ K^{n−1} Mod Γ` with a 5% slack band.
pub fn poletsky_check(
    map: &dyn QrMap,
    family: &CurveFamily,
    image_domain: Option<Domain>,
    solver: &SolverOptions,
) -> Result<PoletskyReport> {
    let n = family.dim() as f64;
    let image = map_family(map, family, image_domain)?;
    let lhs = discrete_modulus(&image, n, solver)?.value;
    let source = discrete_modulus(family, n, solver)?.value;
    let k = map.declared_k();
    let rhs = k.powf(n - 1.0) * source;
    Ok(PoletskyReport {
        map_id: map.id(),
        lhs,
        rhs,
        source_modulus: source,
        k,
        pass: lhs <= rhs * 1.05,
    })
}

/// `pieces` disjoint random arcs of total length `measure` on the circle.
pub fn random_arc_set(measure: f64, pieces: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if !(measure > 0.0 && measure < 2.0 * PI) || pieces == 0 {
        return Err(Error::param(
            "measure",
            "need 0 < measure < 2π and at least one piece",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Random lengths for arcs and gaps, normalized to the circle.
    let arcs: Vec<f64> = (0..pieces).map(|_| 0.2 + rng.random::<f64>()).collect();
    let gaps: Vec<f64> = (0..pieces).map(|_| 0.2 + rng.random::<f64>()).collect();
    let (sa, sg): (f64, f64) = (arcs.iter().sum(), gaps.iter().sum());
    let mut start = 2.0 * PI * rng.random::<f64>();
    let mut out = Vec::with_capacity(pieces);
    for i in 0..pieces {
        let len = measure * arcs[i] / sa;
        out.push((start, start + len));
        start += len + (2.0 * PI - measure) * gaps[i] / sg;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationInstance {
    pub arcs: Vec<(f64, f64)>,
    pub measure: f64,
    pub set_capacity: f64,
    pub cap_capacity: f64,
    /// `Cap(C(F)) ≤ Cap(F)·(1 + 5%)`.
    pub pass: bool,
}

/// Compare `Cap(A(r), F)` with the capacity of the cap of equal measure.
pub fn symmetrization_check(
    r: f64,
    arcs: Vec<(f64, f64)>,
    res: &Resolution,
) -> Result<SymmetrizationInstance> {
    let n = Dimension::TWO;
    let plate = Plate::Arcs(arcs.clone());
    let measure = plate.measure(n);
    let set = condenser_capacity(n, r, &plate, res)?;
    let theta = cap_angle_for_measure(n, measure);
    let cap = condenser_capacity(n, r, &Plate::Cap { theta }, res)?;
    Ok(SymmetrizationInstance {
        arcs,
        measure,
        set_capacity: set.capacity,
        cap_capacity: cap.capacity,
        pass: cap.capacity <= set.capacity * 1.05,
    })
}
