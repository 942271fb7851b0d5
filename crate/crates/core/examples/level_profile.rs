//! Level-set area profile of a Beurling map, written as CSV to stdout.
use qrlab::geometry::QuadratureSpec;
use qrlab::level_sets::{level_profile, uniform_grid};
use qrlab::maps::parse_map;

fn main() -> qrlab::Result<()> {
    let map = parse_map("beurling:a=0.9")?;
    let profile = level_profile(
        map.as_ref(),
        &uniform_grid(3.0, 60),
        &QuadratureSpec::default(),
    )?;
    eprintln!(
        "total mass {:.6} (π = {:.6})",
        profile.total_mass,
        std::f64::consts::PI
    );
    print!("{}", profile.to_csv(&format!("map {}", map.id())));
    Ok(())
}
