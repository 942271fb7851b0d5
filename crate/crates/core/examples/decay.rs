//! Distribution of boundary-trace sup norms against the decay shape.
use qrlab::geometry::QuadratureSpec;
use qrlab::lab::{decay_check, sup_on_ball, TraceConfig};
use qrlab::maps::parse_map;

fn main() -> qrlab::Result<()> {
    let map = parse_map("beurling:a=0.9")?;
    let (m, _) = sup_on_ball(map.as_ref(), 0.5, 0)?;
    let s: Vec<f64> = (1..=40)
        .map(|k| 0.05 * k as f64)
        .filter(|&s| s > m)
        .collect();
    let rep = decay_check(
        map.as_ref(),
        0.5,
        &s,
        &QuadratureSpec::default(),
        &TraceConfig::default(),
    )?;
    println!("M = {m:.4}, fitted C1 = {:.4}", rep.fitted_c1);
    for (i, s) in rep.s_grid.iter().enumerate().step_by(5) {
        println!(
            "s {s:.2}: lhs {:.4e}  shape {:.4e}",
            rep.lhs[i], rep.rhs_shape[i]
        );
    }
    Ok(())
}
