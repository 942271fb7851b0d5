//! Discrete modulus of ring and rectangle families under refinement.
use std::f64::consts::E;

use qrlab::geometry::Dimension;
use qrlab::modulus::{discrete_modulus, ring_modulus, CurveFamily, SolverOptions};

fn main() -> qrlab::Result<()> {
    let opts = SolverOptions::default();
    let exact = ring_modulus(Dimension::TWO, 1.0, E)?;
    for cells in [25, 50, 100] {
        let ring = discrete_modulus(
            &CurveFamily::ring(Dimension::TWO, 1.0, E, cells, 4.0)?,
            2.0,
            &opts,
        )?;
        let rect = discrete_modulus(&CurveFamily::rectangle(1.5, 1.0, cells, 4)?, 2.0, &opts)?;
        println!(
            "{cells:>4} cells: ring {:.6} (exact {exact:.6}, lower {:.6}, {} sweeps)  rectangle {:.6} (exact {:.6})",
            ring.value,
            ring.lower_bound,
            ring.iterations,
            rect.value,
            1.0 / 1.5
        );
    }
    Ok(())
}
