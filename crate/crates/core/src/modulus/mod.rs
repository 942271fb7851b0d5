//! Conformal modulus of curve families and condenser capacity.
//!
//! Families are finite polylines over a rectangular grid. A density is
//! piecewise constant on grid cells, so every line integral is an exact
//! weighted sum of cell intersection lengths and the discrete problem
//! `min Σ ρ_c^p |c|` subject to `∫_γ ρ ≥ 1` is a finite convex program.

mod capacity;
mod family;
mod grid;
mod logcap;
mod solver;

pub use capacity::{
    condenser_capacity, gehring_lower_bound, map_family, poletsky_check, random_arc_set,
    ring_modulus, sphere_arc_lower_bound, symmetrization_check, CapacityResult, PoletskyReport,
    Resolution, SymmetrizationInstance,
};
pub use family::{
    cap_angle_for_measure, cap_measure, straight_polyline, CurveFamily, FamilyKind, Plate,
};
pub use grid::{Domain, Grid};
pub use logcap::{log_capacity_2d, transfinite_diameter_log, FEKETE_SIZES};
pub use solver::{discrete_modulus, DensityGrid, ModulusResult, SolverOptions};
