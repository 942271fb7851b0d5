//! Logarithmic capacity of circular arcs from Fekete points.
use std::f64::consts::PI;

use qrlab::modulus::{log_capacity_2d, transfinite_diameter_log, FEKETE_SIZES};

fn main() -> qrlab::Result<()> {
    for l in [PI / 2.0, PI, 1.5 * PI] {
        let arcs = [(0.0, l)];
        let d: Vec<String> = FEKETE_SIZES
            .iter()
            .map(|&m| transfinite_diameter_log(&arcs, m).map(|v| format!("{:.5}", v.exp())))
            .collect::<qrlab::Result<_>>()?;
        println!(
            "arc {l:.4}: d_m {d:?} → {:.5} (sin(ℓ/4) = {:.5})",
            log_capacity_2d(&arcs)?,
            (l / 4.0).sin()
        );
    }
    let two = log_capacity_2d(&[(0.0, 0.5), (PI, PI + 0.5)])?;
    println!("two antipodal arcs of length 0.5: {two:.5}");
    Ok(())
}
