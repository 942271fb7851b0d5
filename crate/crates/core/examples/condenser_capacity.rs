//! Capacity of spherical-cap condensers, the capacity lower bound, and
//! symmetrization of random arc plates.
use std::f64::consts::PI;

use qrlab::geometry::Dimension;
use qrlab::lab::Constants;
use qrlab::modulus::{
    cap_measure, condenser_capacity, gehring_lower_bound, random_arc_set, symmetrization_check,
    Plate, Resolution,
};

fn main() -> qrlab::Result<()> {
    let n = Dimension::TWO;
    let c = Constants::calibrated(n);
    let res = Resolution {
        cells: 80,
        ..Resolution::default()
    };
    for k in [1, 2, 4, 8] {
        let theta = PI * k as f64 / 8.0;
        let cap = condenser_capacity(n, 0.5, &Plate::Cap { theta }, &res)?;
        let bound = gehring_lower_bound(0.5, n, cap_measure(n, theta), c.c2, c.epsilon)?;
        println!(
            "theta {theta:.4}: Cap {:.4}, Cap/2 {:.4} ≥ {bound:.4}",
            cap.capacity, cap.symmetrized
        );
    }
    for seed in 0..3 {
        let inst = symmetrization_check(0.5, random_arc_set(1.5, 3, seed)?, &res)?;
        println!(
            "arcs {seed}: set {:.4} ≥ cap {:.4}",
            inst.set_capacity, inst.cap_capacity
        );
    }
    Ok(())
}
