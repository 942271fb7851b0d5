use std::f64::consts::{E, PI};

use proptest::prelude::*;
use qrlab::geometry::{sphere_area, Dimension};
use qrlab::lab::Constants;
use qrlab::maps::parse_map;
use qrlab::modulus::{
    cap_angle_for_measure, cap_measure, condenser_capacity, discrete_modulus, gehring_lower_bound,
    log_capacity_2d, poletsky_check, random_arc_set, ring_modulus, sphere_arc_lower_bound,
    symmetrization_check, transfinite_diameter_log, CurveFamily, Domain, Plate, Resolution,
    SolverOptions,
};

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn res(cells: usize) -> Resolution {
    Resolution {
        cells,
        ..Resolution::default()
    }
}

#[test]
fn ring_family_converges_to_closed_form() {
    let two = Dimension::TWO;
    let exact = 2.0 * PI;
    let mut prev = f64::NAN;
    for cells in [50, 100, 200] {
        let fam = CurveFamily::ring(two, 1.0, E, cells, 4.0).unwrap();
        let m = discrete_modulus(&fam, 2.0, &SolverOptions::default()).unwrap();
        assert!(m.converged, "{cells}: {m:?}");
        assert!(rel(m.value, exact) < 0.02, "{cells}: {}", m.value);
        assert!(m.lower_bound <= m.value * (1.0 + 1e-9));
        if prev.is_finite() {
            assert!(rel(m.value, prev) < 0.01);
        }
        prev = m.value;
    }
}

#[test]
fn ring_family_in_three_dimensions() {
    let n = Dimension::THREE;
    let fam = CurveFamily::ring(n, 0.3, 0.9, 24, 2.0).unwrap();
    let m = discrete_modulus(&fam, 3.0, &SolverOptions::default()).unwrap();
    let exact = ring_modulus(n, 0.3, 0.9).unwrap();
    assert!(rel(m.value, exact) < 0.05, "{} vs {exact}", m.value);
}

#[test]
fn rectangle_modulus_is_width_over_length() {
    for (l, w) in [(1.5, 1.0), (1.0, 2.0)] {
        let fam = CurveFamily::rectangle(l, w, 60, 3).unwrap();
        let m = discrete_modulus(&fam, 2.0, &SolverOptions::default()).unwrap();
        assert!(rel(m.value, w / l) < 0.02, "{l}x{w}: {}", m.value);
    }
}

#[test]
fn subfamily_has_smaller_modulus() {
    let fam = CurveFamily::ring(Dimension::TWO, 1.0, E, 60, 4.0).unwrap();
    let opts = SolverOptions::default();
    let full = discrete_modulus(&fam, 2.0, &opts).unwrap().value;
    let half: Vec<usize> = (0..fam.len()).step_by(2).collect();
    let sub = discrete_modulus(&fam.subfamily(&half), 2.0, &opts)
        .unwrap()
        .value;
    assert!(sub <= full * (1.0 + 1e-6), "{sub} > {full}");
}

#[test]
fn empty_family_is_rejected() {
    let fam = CurveFamily::ring(Dimension::TWO, 1.0, E, 20, 4.0)
        .unwrap()
        .subfamily(&[]);
    assert!(discrete_modulus(&fam, 2.0, &SolverOptions::default()).is_err());
}

#[test]
fn semicircle_family_matches_meridian_density() {
    // ρ = 1/(π|x|) is extremal: Mod = (2/π) log(outer/inner).
    let fam = CurveFamily::sphere_arcs(0.5, 1.0, 100, 2.0).unwrap();
    let m = discrete_modulus(&fam, 2.0, &SolverOptions::default())
        .unwrap()
        .value;
    let exact = 2.0 / PI * 2f64.ln();
    assert!(rel(m, exact) < 0.03, "{m} vs {exact}");
    let c = Constants::calibrated(Dimension::TWO);
    assert!(m >= sphere_arc_lower_bound(Dimension::TWO, 2f64.ln(), c.c_n).unwrap());
}

#[test]
fn poletsky_inequality_for_stretches() {
    let fam = CurveFamily::ring(Dimension::TWO, 0.3, 0.9, 80, 4.0).unwrap();
    for k in [1.0, 2.0, 3.0] {
        let map = parse_map(&format!("stretch:K={k}")).unwrap();
        let image = Domain::Shell {
            inner: 0.3f64.powf(k),
            outer: 0.9f64.powf(k),
        };
        let rep =
            poletsky_check(map.as_ref(), &fam, Some(image), &SolverOptions::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        let exact = 2.0 * PI / (k * 3f64.ln());
        assert!(rel(rep.lhs, exact) < 0.03, "{rep:?} vs {exact}");
        assert_eq!(rep.k, map.declared_k());
    }
}

#[test]
fn full_sphere_condenser_is_two_rings() {
    let two = Dimension::TWO;
    let cap = condenser_capacity(two, 0.5, &Plate::Cap { theta: PI }, &res(100)).unwrap();
    let exact = 2.0 * ring_modulus(two, 0.5, 1.0).unwrap();
    assert!(
        rel(cap.capacity, exact) < 0.02,
        "{} vs {exact}",
        cap.capacity
    );
    assert_eq!(cap.symmetrized, cap.capacity / 2.0);
}

#[test]
fn cap_capacity_is_monotone_and_above_gehring_bound() {
    for (n, cells) in [(Dimension::TWO, 80), (Dimension::THREE, 16)] {
        let c = Constants::calibrated(n);
        let mut prev = 0.0;
        for k in 1..=8 {
            let theta = PI * k as f64 / 8.0;
            let cap = condenser_capacity(n, 0.5, &Plate::Cap { theta }, &res(cells)).unwrap();
            assert!(cap.capacity >= prev, "n={} theta={theta}", n.get());
            prev = cap.capacity;
            let h = cap_measure(n, theta);
            if h <= c.epsilon {
                let bound = gehring_lower_bound(0.5, n, h, c.c2, c.epsilon).unwrap();
                assert!(
                    cap.symmetrized >= bound,
                    "n={} theta={theta}: {} < {bound}",
                    n.get(),
                    cap.symmetrized
                );
            }
        }
    }
}

#[test]
fn gehring_bound_above_threshold_is_an_error() {
    let n = Dimension::THREE;
    let r = gehring_lower_bound(0.5, n, 3.0, 8.5, 2.0);
    assert!(matches!(r, Err(qrlab::Error::ThresholdExceeded { .. })));
    assert!(gehring_lower_bound(0.5, n, 0.0, 8.5, 2.0).is_err());
}

#[test]
fn symmetrization_never_increases_capacity() {
    for seed in 0..10 {
        let arcs = random_arc_set(1.5, 3, seed).unwrap();
        let inst = symmetrization_check(0.5, arcs, &res(60)).unwrap();
        assert!(inst.pass, "{inst:?}");
        assert!((inst.measure - 1.5).abs() < 1e-12);
    }
}

#[test]
fn cap_angle_inverts_measure() {
    for n in [Dimension::TWO, Dimension::THREE] {
        for k in 1..20 {
            let theta = PI * k as f64 / 20.0;
            let back = cap_angle_for_measure(n, cap_measure(n, theta));
            assert!((back - theta).abs() < 1e-9);
        }
        assert!((cap_measure(n, PI) - sphere_area(n)).abs() < 1e-12);
    }
}

#[test]
fn log_capacity_of_single_arc() {
    // An arc of angular length ℓ has capacity sin(ℓ/4).
    for l in [PI / 2.0, PI, 1.5 * PI] {
        let cap = log_capacity_2d(&[(0.3, 0.3 + l)]).unwrap();
        assert!(rel(cap, (l / 4.0).sin()) < 0.02, "ℓ={l}: {cap}");
    }
}

#[test]
fn roots_of_unity_are_exact_on_the_circle() {
    for m in [8, 32] {
        let d = transfinite_diameter_log(&[(0.0, 2.0 * PI)], m).unwrap();
        assert!((d - (m as f64).ln() / (m as f64 - 1.0)).abs() < 1e-15);
    }
}

#[test]
fn two_antipodal_arcs_beat_one() {
    let w = 0.5;
    let one = log_capacity_2d(&[(0.0, w)]).unwrap();
    let two = log_capacity_2d(&[(0.0, w), (PI, PI + w)]).unwrap();
    assert!(two > one);
    // Two antipodal arcs map to one arc under z ↦ z²: cap = sqrt(sin(2w/4)).
    assert!(rel(two, (0.5 * w).sin().sqrt()) < 0.03, "{two}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ring_modulus_decreases_with_outer_radius(inner in 0.05f64..0.5, a in 1.1f64..3.0, b in 1.1f64..3.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        for n in [Dimension::TWO, Dimension::THREE] {
            prop_assert!(ring_modulus(n, inner, inner * lo).unwrap() > ring_modulus(n, inner, inner * hi).unwrap());
        }
    }

    #[test]
    fn modulus_scales_inversely_with_rectangle_aspect(l in 0.5f64..2.0) {
        let fam = CurveFamily::rectangle(l, 1.0, 24, 2).unwrap();
        let m = discrete_modulus(&fam, 2.0, &SolverOptions::default()).unwrap();
        prop_assert!(rel(m.value, 1.0 / l) < 0.03);
    }

    #[test]
    fn random_arc_sets_are_disjoint(measure in 0.1f64..6.0, pieces in 1usize..6, seed in 0u64..1000) {
        let arcs = random_arc_set(measure, pieces, seed).unwrap();
        let total: f64 = arcs.iter().map(|(a, b)| b - a).sum();
        prop_assert!((total - measure).abs() < 1e-9);
        for w in arcs.windows(2) {
            prop_assert!(w[1].0 >= w[0].1);
        }
    }

    #[test]
    fn stretch_images_respect_poletsky(k in 1.0f64..3.0) {
        let fam = CurveFamily::ring(Dimension::TWO, 0.3, 0.9, 30, 3.0).unwrap();
        let map = parse_map(&format!("stretch:K={k}")).unwrap();
        let rep = poletsky_check(map.as_ref(), &fam, None, &SolverOptions::default()).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
    }
}
