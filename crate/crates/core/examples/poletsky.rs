//! Modulus of a ring family and its image under radial stretches.
use qrlab::geometry::Dimension;
use qrlab::maps::parse_map;
use qrlab::modulus::{poletsky_check, CurveFamily, Domain, SolverOptions};

fn main() -> qrlab::Result<()> {
    let family = CurveFamily::ring(Dimension::TWO, 0.3, 0.9, 60, 4.0)?;
    for k in [1.0, 2.0, 3.0] {
        let map = parse_map(&format!("stretch:K={k}"))?;
        let image = Domain::Shell {
            inner: 0.3f64.powf(k),
            outer: 0.9f64.powf(k),
        };
        let rep = poletsky_check(
            map.as_ref(),
            &family,
            Some(image),
            &SolverOptions::default(),
        )?;
        println!(
            "K={k}: Mod fΓ {:.5} ≤ K Mod Γ {:.5} ({})",
            rep.lhs, rep.rhs, rep.pass
        );
    }
    Ok(())
}
