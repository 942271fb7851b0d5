//! Sub-level Jacobian mass of the inverse at the closed-form radius.
use qrlab::geometry::QuadratureSpec;
use qrlab::lab::{eggyolk_check, r0_min, Constants};
use qrlab::maps::parse_map;

fn main() -> qrlab::Result<()> {
    let spec = QuadratureSpec::default();
    for id in [
        "identity:n=2",
        "stretch:K=2",
        "bka:K=2,a=0.9",
        "mobius3d:p=1.5",
    ] {
        let map = parse_map(id)?;
        let c = Constants::calibrated(map.dim());
        let r0 = r0_min(map.dim(), map.declared_k(), c.c_n)?;
        let rep = eggyolk_check(map.as_ref(), r0.ln, 8, &spec)?;
        println!(
            "{id}: ln r0 {:.4e}, evaluated at r = {}, sup {:.4e}, pass {}",
            r0.ln, rep.r_evaluated, rep.sup, rep.pass
        );
        for ((m, l), r) in rep.m_grid.iter().zip(&rep.lhs).zip(&rep.rhs) {
            println!("    M {m:.3e}: {l:.6e} vs {r:.6e}");
        }
    }
    Ok(())
}
