//! Ball volume and sphere area by quasi-Monte Carlo, against closed forms.
use qrlab::geometry::{
    ball_volume, integrate_ball, integrate_sphere, sphere_area, Ball, Dimension, QuadratureSpec,
    Sphere,
};

fn main() -> qrlab::Result<()> {
    let spec = QuadratureSpec::qmc(1 << 16, 1);
    for n in 2..=4 {
        let d = Dimension::new(n)?;
        let vol = integrate_ball(&Ball::unit(d), &spec, &[], |_| 1.0)?;
        let second = integrate_ball(&Ball::unit(d), &spec, &[], |x| x.norm_squared())?;
        let area = integrate_sphere(&Sphere::unit(d), &spec, &[], |_| 1.0)?;
        println!(
            "n={n}: vol {:.6} (exact {:.6}), ∫|x|² {:.6} ± {:.1e} (exact {:.6}), area {:.6} (exact {:.6})",
            vol.value,
            ball_volume(d),
            second.value,
            second.stderr,
            sphere_area(d) / (n as f64 + 2.0),
            area.value,
            sphere_area(d)
        );
    }
    Ok(())
}
