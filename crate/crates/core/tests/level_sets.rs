use std::f64::consts::{E, PI};

use proptest::prelude::*;
use qrlab::geometry::{
    integrate_ball, integrate_sphere, Ball, Dimension, QuadratureSpec, Sphere, Vector,
};
use qrlab::level_sets::{
    distribution, exp_integral_via_cavalieri, level_profile, log_grid, sphere_directions,
    trace_set, uniform_grid, TracePolicy, TraceSet, TraceStatus,
};
use qrlab::maps::{parse_map, zoo, Beurling, MobiusBall, QrMap};

fn constant_traces(n: Dimension, count: usize, c: f64) -> TraceSet {
    TraceSet {
        n,
        directions: sphere_directions(n, count, 0),
        values: vec![c; count],
        t_sequence: TracePolicy::default().t_sequence(),
        status: vec![TraceStatus::Converged; count],
    }
}

#[test]
fn identity_profile_is_sphere_area() {
    let spec = QuadratureSpec::qmc(1 << 17, 5);
    for n in [2, 3] {
        let d = Dimension::new(n).unwrap();
        let map = parse_map(&format!("identity:n={n}")).unwrap();
        let grid = uniform_grid(1.5, 30);
        let p = level_profile(map.as_ref(), &grid, &spec).unwrap();
        let omega = qrlab::geometry::sphere_area(d);
        for (i, (t, a)) in p.centers().iter().zip(&p.area).enumerate() {
            // Bin average of ω t^{n-1} over [t0, t1].
            let (t0, t1) = (grid[i], grid[i + 1]);
            let want = if t1 <= 1.0 {
                omega * (t1.powi(n as i32) - t0.powi(n as i32)) / (n as f64 * (t1 - t0))
            } else {
                0.0
            };
            assert!(
                (a - want).abs() <= (0.02 * want).max(0.005 * omega),
                "n={n} t={t}: {a} vs {want}"
            );
        }
    }
}

#[test]
fn stretch_profile_is_circumference() {
    let map = parse_map("stretch:K=2").unwrap();
    let grid = uniform_grid(1.0, 20);
    let p = level_profile(map.as_ref(), &grid, &QuadratureSpec::qmc(1 << 17, 2)).unwrap();
    for (t, a) in p.centers().iter().zip(&p.area) {
        assert!((a - 2.0 * PI * t).abs() < 0.02 * 2.0 * PI * t, "t={t}: {a}");
    }
    assert!((p.total_mass - PI).abs() < 0.01 * PI);
}

#[test]
fn total_mass_equals_jacobian_integral() {
    let spec = QuadratureSpec::qmc(1 << 16, 7);
    for map in zoo() {
        let grid = log_grid(1e-3, 4.0, 80);
        let p = level_profile(map.as_ref(), &grid, &spec).unwrap();
        let j = integrate_ball(
            &Ball::unit(map.dim()),
            &QuadratureSpec::product(1 << 17),
            &map.singular_points(),
            |x| map.jacobian(x).unwrap(),
        )
        .unwrap();
        assert!(
            (p.total_mass / j.value - 1.0).abs() < 0.02,
            "{}: {} vs {}",
            map.id(),
            p.total_mass,
            j.value
        );
    }
}

#[test]
fn beurling_total_mass_is_pi() {
    let map = parse_map("beurling:a=0.9").unwrap();
    let p = level_profile(
        map.as_ref(),
        &uniform_grid(3.0, 60),
        &QuadratureSpec::qmc(1 << 17, 1),
    )
    .unwrap();
    assert!((p.total_mass / PI - 1.0).abs() < 0.02, "{}", p.total_mass);
}

#[test]
fn stretch_traces_are_one() {
    let map = parse_map("stretch:K=3").unwrap();
    let t = trace_set(map.as_ref(), 256, &TracePolicy::default(), 1).unwrap();
    assert!(t.status.iter().all(|s| *s == TraceStatus::Converged));
    assert!(t.values.iter().all(|v| (v - 1.0).abs() < 1e-4));
}

#[test]
fn beurling_traces_match_boundary_formula() {
    let b = Beurling::new(0.9).unwrap();
    let t = trace_set(&b, 512, &TracePolicy::default(), 4).unwrap();
    assert!(t.converged_fraction() >= 0.99);
    for (d, v) in t.directions.iter().zip(&t.values) {
        let theta = d[1].atan2(d[0]);
        if theta.abs() > 0.1 {
            let want = b.boundary_modulus(theta);
            assert!(
                (v - want).abs() <= 1e-4 * want.max(1.0),
                "θ={theta}: {v} vs {want}"
            );
        }
    }
}

#[test]
fn normalized_mobius_trace_bounded_by_two() {
    let m = MobiusBall::on_axis(Dimension::THREE, 1.2, 1.0).unwrap();
    let t = trace_set(&m, 4000, &TracePolicy::default(), 0).unwrap();
    assert!(t.max_value() <= 2.0);
    assert!(t.max_value() > 1.5);
}

#[test]
fn trace_stability_under_tolerance_halving() {
    for map in zoo() {
        let p1 = TracePolicy::default();
        let p2 = TracePolicy {
            tol: p1.tol / 2.0,
            k_max: 24,
            ..p1.clone()
        };
        let a = trace_set(map.as_ref(), 400, &p1, 9).unwrap();
        let b = trace_set(map.as_ref(), 400, &p2, 9).unwrap();
        assert!(a.converged_fraction() >= 0.99, "{}", map.id());
        let stable = a
            .values
            .iter()
            .zip(&b.values)
            .filter(|(x, y)| (*x - *y).abs() < 1e-3 * x.abs().max(1.0))
            .count();
        assert!(
            stable as f64 >= 0.99 * a.values.len() as f64,
            "{}",
            map.id()
        );
    }
}

#[test]
fn constant_trace_distribution() {
    let t = constant_traces(Dimension::TWO, 100, 0.7);
    let d = distribution(&t, &[0.0, 0.5, 0.69, 0.7, 0.71, 2.0]).unwrap();
    let want = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
    for (m, w) in d.measure.iter().zip(want) {
        assert!((m - w * 2.0 * PI).abs() < 1e-12);
    }
    let empty = TraceSet {
        status: vec![TraceStatus::NoConvergence; 100],
        ..t
    };
    assert!(distribution(&empty, &[0.0]).is_err());
}

#[test]
fn cavalieri_closed_forms() {
    let s: Vec<f64> = (0..=2000).map(|i| i as f64 * 1e-3).collect();
    let zero = constant_traces(Dimension::TWO, 64, 0.0);
    let r =
        exp_integral_via_cavalieri(&distribution(&zero, &s).unwrap(), 1.0, Dimension::TWO).unwrap();
    assert!((r.value - 2.0 * PI).abs() < 1e-12);
    let one = constant_traces(Dimension::TWO, 64, 1.0);
    let r =
        exp_integral_via_cavalieri(&distribution(&one, &s).unwrap(), 1.0, Dimension::TWO).unwrap();
    assert!((r.value / (2.0 * PI * E) - 1.0).abs() < 1e-3);
    assert!(!r.truncated);
    let short: Vec<f64> = s.iter().copied().filter(|&x| x < 0.9).collect();
    let r = exp_integral_via_cavalieri(&distribution(&one, &short).unwrap(), 1.0, Dimension::TWO)
        .unwrap();
    assert!(r.truncated);
}

#[test]
fn cavalieri_matches_direct_quadrature_for_beurling() {
    for a in [0.5, 0.9] {
        let b = Beurling::new(a).unwrap();
        let t = trace_set(&b, 20_000, &TracePolicy::default(), 3).unwrap();
        let top = t.max_value() * 1.01;
        let s: Vec<f64> = (0..=4000).map(|i| top * i as f64 / 4000.0).collect();
        let cav = exp_integral_via_cavalieri(&distribution(&t, &s).unwrap(), 1.0, Dimension::TWO)
            .unwrap();
        assert!(!cav.truncated);
        let direct = integrate_sphere(
            &Sphere::unit(Dimension::TWO),
            &QuadratureSpec::product(1 << 14),
            &b.singular_points(),
            |z: &Vector| (b.boundary_modulus(z[1].atan2(z[0])).powi(2)).exp(),
        )
        .unwrap();
        assert!(
            (cav.value / direct.value - 1.0).abs() < 0.01,
            "a={a}: {} vs {}",
            cav.value,
            direct.value
        );
    }
}

proptest! {
    #[test]
    fn distribution_is_monotone_and_bounded(values in proptest::collection::vec(0.0f64..5.0, 1..200)) {
        let n = Dimension::TWO;
        let count = values.len();
        let t = TraceSet { values, ..constant_traces(n, count, 0.0) };
        let s: Vec<f64> = (0..60).map(|i| i as f64 * 0.1).collect();
        let d = distribution(&t, &s).unwrap();
        prop_assert!(d.measure[0] <= 2.0 * PI + 1e-12);
        prop_assert!(d.measure.windows(2).all(|w| w[1] <= w[0]));
    }
}
