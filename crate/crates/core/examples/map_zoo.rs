//! The map zoo: sampled distortion against the declared `K`.
use qrlab::maps::{distortion_report, zoo};

fn main() -> qrlab::Result<()> {
    for map in zoo() {
        let rep = distortion_report(map.as_ref(), 4000, 0)?;
        println!(
            "{:<28} n={} declared K {:.3}  sampled max {:.6}  J ≤ 0 at {} points",
            map.id(),
            map.dim().get(),
            map.declared_k(),
            rep.max_ratio,
            rep.nonpositive_jacobian
        );
    }
    Ok(())
}
