//! Moser functional on the energy-one family and on the chain built from a
//! level profile.
use qrlab::geometry::{Dimension, QuadratureSpec};
use qrlab::lab::{moser_functional, psi_tilde, sup_on_ball, MoserInput};
use qrlab::level_sets::{level_profile, uniform_grid};
use qrlab::maps::parse_map;

fn main() -> qrlab::Result<()> {
    for t in [1.0, 4.0, 16.0, 64.0] {
        let out = moser_functional(&MoserInput::test_family(Dimension::TWO, t, 4000))?;
        println!("T {t:>4}: energy {:.6}, value {:.6}", out.energy, out.value);
    }
    let map = parse_map("beurling:a=0.5")?;
    let profile = level_profile(
        map.as_ref(),
        &uniform_grid(4.0, 800),
        &QuadratureSpec::default(),
    )?;
    let (m, _) = sup_on_ball(map.as_ref(), 0.5, 0)?;
    let psi = psi_tilde(&profile, m, map.dim(), map.declared_k())?;
    let out = moser_functional(&psi.moser_input())?;
    println!(
        "{}: M {m:.4}, mu {:.4}, energy {:.6}, value {:.4}",
        map.id(),
        psi.mu,
        out.energy,
        out.value
    );
    Ok(())
}
