//! Boundary exponential integral for zoo maps, and the sweep `a → 1` for
//! the extremal family at and above the critical exponent.
use qrlab::geometry::QuadratureSpec;
use qrlab::lab::{changmarshall_check, sharpness_sweep, TraceConfig};
use qrlab::maps::parse_map;

fn main() -> qrlab::Result<()> {
    for id in [
        "identity:n=2",
        "beurling:a=0.9",
        "stretch:K=2",
        "mobius3d:p=1.5",
    ] {
        let map = parse_map(id)?;
        let rep = changmarshall_check(
            map.as_ref(),
            &QuadratureSpec::default(),
            &TraceConfig::default(),
        )?;
        println!(
            "{id}: beta {:.4}, layer-cake {:.5}, direct {:.5}",
            rep.beta, rep.integral, rep.direct
        );
    }
    let a: Vec<f64> = (1..=12).map(|j| 1.0 - 10f64.powi(-j)).collect();
    for beta in [1.0, 1.2] {
        let v = sharpness_sweep(1.0, beta, &a, 1.0)?;
        println!(
            "beta {beta}: {:?}",
            v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
