use std::f64::consts::{E, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use qrlab::geometry::{ball_volume, sphere_area, Dimension, QuadratureSpec};
use qrlab::lab::{
    beta, beurling_boundary_sq, changmarshall_check, decay_check, eggyolk_check, empirical_r0,
    finiteness_check, holder_sides, moser_functional, psi_tilde, r0_formula, r0_min,
    sharpness_sweep, stretch_boundary_angle, sup_on_ball, Constants, MoserInput, R0Case,
    TraceConfig, RADIUS_FLOOR,
};
use qrlab::level_sets::{uniform_grid, LevelProfile};
use qrlab::maps::parse_map;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Composite Simpson rule, the independent oracle for one-dimensional integrals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn beta_closed_forms() {
    for k in [1.0, 1.5, 2.0, 7.0] {
        assert!((beta(Dimension::TWO, k) - 1.0 / k).abs() < 1e-15);
    }
    assert!((beta(Dimension::THREE, 1.0) - 6f64.sqrt()).abs() < 1e-12);
    assert!((beta(Dimension::THREE, 2.0) - 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn r0_cases_are_ordered() {
    for n in [Dimension::TWO, Dimension::THREE] {
        let c = Constants::calibrated(n).c_n;
        let [a, b, d] = R0Case::ALL.map(|case| r0_formula(n, 2.0, c, case).unwrap().ln);
        assert!(a > b && b > d, "{a} {b} {d}");
        assert_eq!(r0_min(n, 2.0, c).unwrap().ln, d);
    }
}

#[test]
fn r0_log_matches_direct_evaluation_in_space() {
    // n = 3: ln r0 = −m sqrt(m·100³·3·K²·4π / c).
    let n = Dimension::THREE;
    for (case, m) in R0Case::ALL.into_iter().zip([1.0, 2.0, 4.0]) {
        let got = r0_formula(n, 1.5, 0.3, case).unwrap().ln;
        let want = -m * (m * 1e6 * 3.0 * 2.25 * 4.0 * PI / 0.3).sqrt();
        assert!(rel(got, want) < 1e-12);
    }
}

#[test]
fn r0_rejects_bad_inputs() {
    assert!(r0_formula(Dimension::TWO, 0.5, 0.6, R0Case::One).is_err());
    assert!(r0_formula(Dimension::TWO, 2.0, 0.0, R0Case::One).is_err());
}

#[test]
fn plane_r0_for_k2_is_far_below_f64() {
    let r = r0_min(
        Dimension::TWO,
        2.0,
        Constants::calibrated(Dimension::TWO).c_n,
    )
    .unwrap();
    assert!((r.ln + 6_702_064.0).abs() < 1.0, "{}", r.ln);
    assert_eq!(r.value(), 0.0);
}

#[test]
fn identity_sublevel_mass_is_exact() {
    let spec = QuadratureSpec::default();
    for n in [2, 3] {
        let map = parse_map(&format!("identity:n={n}")).unwrap();
        let rep = eggyolk_check(map.as_ref(), 0.3f64.ln(), 8, &spec).unwrap();
        assert!(rep.pass);
        assert!((rep.sup - 0.3).abs() < 1e-9);
        for (l, r) in rep.lhs.iter().zip(&rep.rhs) {
            assert!(rel(*l, *r) < 2e-3, "n={n}: {l} vs {r}");
        }
    }
}

#[test]
fn eggyolk_at_formula_radius_passes_on_zoo() {
    let spec = QuadratureSpec::default();
    for id in [
        "stretch:K=2",
        "beurling:a=0.9",
        "bka:K=2,a=0.5",
        "mobius3d:p=1.5",
    ] {
        let map = parse_map(id).unwrap();
        let c = Constants::calibrated(map.dim()).c_n;
        let ln = r0_min(map.dim(), map.declared_k(), c).unwrap().ln;
        let rep = eggyolk_check(map.as_ref(), ln, 8, &spec).unwrap();
        assert_eq!(rep.r_evaluated, RADIUS_FLOOR);
        assert!(rep.pass, "{id}: {rep:?}");
    }
}

#[test]
fn empirical_r0_for_identity_reaches_the_top() {
    let maps = vec![parse_map("identity:n=2").unwrap()];
    let e = empirical_r0(&maps, 0.05, 4, &QuadratureSpec::qmc(1 << 14, 0)).unwrap();
    assert!(e.passes_everywhere);
    assert!(e.r0 >= 0.9);
}

#[test]
fn sup_of_identity_and_stretch() {
    let (m, _) = sup_on_ball(parse_map("identity:n=2").unwrap().as_ref(), 0.4, 0).unwrap();
    assert!((m - 0.4).abs() < 1e-9);
    let (m, _) = sup_on_ball(parse_map("stretch:K=2").unwrap().as_ref(), 0.4, 0).unwrap();
    assert!((m - 0.16).abs() < 1e-6, "{m}");
}

#[test]
fn decay_constant_is_finite_and_stable() {
    let spec = QuadratureSpec::default();
    let traces = TraceConfig::default();
    for id in ["beurling:a=0.5", "beurling:a=0.9"] {
        let map = parse_map(id).unwrap();
        let (m, _) = sup_on_ball(map.as_ref(), 0.5, 0).unwrap();
        let s: Vec<f64> = (1..=40)
            .map(|k| 0.05 * k as f64)
            .filter(|&s| s > m)
            .collect();
        let rep = decay_check(map.as_ref(), 0.5, &s, &spec, &traces).unwrap();
        assert!(rep.fitted_c1.is_finite() && rep.fitted_c1 > 0.0, "{id}");
        assert!(rep.rhs_monotone(), "{id}");
        for w in rep.lhs.windows(2) {
            assert!(w[1] <= w[0]);
        }
        let mut doubled = spec.clone();
        doubled.sample_budget *= 2;
        let again = decay_check(map.as_ref(), 0.5, &s, &doubled, &traces).unwrap();
        assert!(rel(again.fitted_c1, rep.fitted_c1) < 0.1);
    }
}

#[test]
fn decay_rejects_grid_below_sup() {
    let map = parse_map("beurling:a=0.5").unwrap();
    let r = decay_check(
        map.as_ref(),
        0.5,
        &[0.01, 1.0],
        &QuadratureSpec::default(),
        &TraceConfig::default(),
    );
    assert!(matches!(r, Err(qrlab::Error::SGridBelowM { .. })));
}

#[test]
fn identity_boundary_integral_is_two_pi_e() {
    let map = parse_map("identity:n=2").unwrap();
    let rep = changmarshall_check(
        map.as_ref(),
        &QuadratureSpec::default(),
        &TraceConfig::default(),
    )
    .unwrap();
    assert!(rep.normalized);
    // Traces are read at the last radius of the trace policy, just inside the circle.
    assert!(rel(rep.direct, 2.0 * PI * E) < 1e-5, "{}", rep.direct);
    assert!(rel(rep.integral, 2.0 * PI * E) < 1e-2, "{}", rep.integral);
}

#[test]
fn identity_boundary_integral_in_space() {
    // |f*| = 1 on S²: ω₂ exp(β(3, 1)).
    let map = parse_map("identity:n=3").unwrap();
    let rep = changmarshall_check(
        map.as_ref(),
        &QuadratureSpec::default(),
        &TraceConfig::default(),
    )
    .unwrap();
    let want = sphere_area(Dimension::THREE) * beta(Dimension::THREE, 1.0).exp();
    assert!(rel(rep.direct, want) < 1e-5, "{} vs {want}", rep.direct);
    assert!(rel(rep.integral, want) < 1e-2);
}

#[test]
fn boundary_routes_agree_on_zoo() {
    for id in [
        "beurling:a=0.5",
        "beurling:a=0.9",
        "stretch:K=2",
        "mobius3d:p=1.5",
    ] {
        let map = parse_map(id).unwrap();
        let rep = changmarshall_check(
            map.as_ref(),
            &QuadratureSpec::default(),
            &TraceConfig::default(),
        )
        .unwrap();
        assert!(rep.integral.is_finite());
        assert!(rel(rep.integral, rep.direct) < 1e-2, "{id}: {rep:?}");
    }
}

#[test]
fn beurling_boundary_matches_complex_log() {
    for a in [0.1f64, 0.5, 0.9, 0.999] {
        let scale = -(1.0 - a * a).ln();
        for k in 1..40 {
            let theta = -PI + 2.0 * PI * k as f64 / 40.0;
            let z = Complex64::from_polar(1.0, theta);
            let w = -(Complex64::new(1.0, 0.0) - a * z).ln();
            let want = w.norm_sqr() / scale;
            assert!(rel(beurling_boundary_sq(a, theta), want) < 1e-10);
        }
    }
}

#[test]
fn stretch_boundary_angle_closed_form() {
    for k in 1..30 {
        let theta = -PI + 2.0 * PI * k as f64 / 30.0;
        assert!((stretch_boundary_angle(1.0, 1.0, theta) - theta).abs() < 1e-12);
        let want = 2.0 * ((0.5 * theta).tan().signum() * (0.5 * theta).tan().abs().powi(2)).atan();
        assert!((stretch_boundary_angle(2.0, 1.0, theta) - want).abs() < 1e-12);
    }
}

#[test]
fn sweep_near_zero_is_the_identity_value() {
    let v = sharpness_sweep(1.0, 1.0, &[1e-6], 1.0).unwrap()[0];
    assert!(rel(v, 2.0 * PI * E) < 1e-4, "{v}");
}

#[test]
fn sweep_matches_simpson_for_moderate_a() {
    let a = 0.5;
    let want = 2.0 * simpson(|t| beurling_boundary_sq(a, t).exp(), 0.0, PI, 20_000);
    let got = sharpness_sweep(1.0, 1.0, &[a], 1.0).unwrap()[0];
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

#[test]
fn critical_exponent_stays_bounded_and_larger_one_blows_up() {
    let grid: Vec<f64> = (1..=12).map(|j| 1.0 - 10f64.powi(-j)).collect();
    let bounded = sharpness_sweep(1.0, 1.0, &grid, 1.0).unwrap();
    assert!(bounded.iter().all(|v| *v < 18.0), "{bounded:?}");
    let big = sharpness_sweep(1.0, 1.2, &grid, 1.0).unwrap();
    for w in big.windows(2) {
        assert!(w[1] > w[0]);
    }
    assert!(*big.last().unwrap() > 1000.0);
    let k2 = sharpness_sweep(2.0, beta(Dimension::TWO, 2.0), &grid, 1.0).unwrap();
    assert!(k2.iter().all(|v| v.is_finite() && *v < 18.0), "{k2:?}");
}

#[test]
fn psi_tilde_slope_for_identity() {
    // A(t) = 2πt on [0, 1]; ∫_0^{1/2} A = π/4, so μ = (½·π/(π/4)) = 2.
    let profile = LevelProfile::from_fn(&uniform_grid(1.0, 1000), |t| 2.0 * PI * t);
    let psi = psi_tilde(&profile, 0.5, Dimension::TWO, 1.0).unwrap();
    assert!(rel(psi.mu, 2.0) < 1e-6, "{}", psi.mu);
    // ψ(1) − ψ(½) = π ∫_{1/2}^1 dt/(2πt) = ln 2 / 2.
    let last = *psi.psi.last().unwrap();
    let want = 1.0 + 0.5 * 2f64.ln();
    assert!(rel(last, want) < 1e-4, "{last} vs {want}");
}

#[test]
fn psi_tilde_without_mass_is_an_error() {
    let profile = LevelProfile::from_fn(&uniform_grid(1.0, 10), |_| 0.0);
    assert!(matches!(
        psi_tilde(&profile, 0.2, Dimension::TWO, 1.0),
        Err(qrlab::Error::ZeroMass { .. })
    ));
}

#[test]
fn identity_chain_has_unit_energy() {
    let profile = LevelProfile::from_fn(&uniform_grid(1.0, 2000), |t| 2.0 * PI * t);
    let psi = psi_tilde(&profile, 0.5, Dimension::TWO, 1.0).unwrap();
    let out = moser_functional(&psi.moser_input()).unwrap();
    assert!((out.energy - profile.total_mass / ball_volume(Dimension::TWO)).abs() < 1e-6);
}

#[test]
fn moser_family_has_unit_energy_and_matches_simpson() {
    let n = Dimension::TWO;
    for t in [1.0, 4.0, 16.0] {
        let out = moser_functional(&MoserInput::test_family(n, t, 4000)).unwrap();
        assert!((out.energy - 1.0).abs() < 1e-9);
        let want = simpson(|y| (y * y / t - y).exp(), 0.0, t, 40_000) + 1.0;
        assert!(
            rel(out.value, want) < 1e-8,
            "T={t}: {} vs {want}",
            out.value
        );
        assert!(out.value < 4.0);
    }
}

#[test]
fn moser_rejects_malformed_input() {
    let bad = MoserInput {
        y_grid: vec![0.0, 1.0, 0.5],
        phi: vec![0.0, 1.0, 2.0],
        n: Dimension::TWO,
    };
    assert!(moser_functional(&bad).is_err());
}

#[test]
fn finiteness_for_compact_profile() {
    let profile = LevelProfile::from_fn(&uniform_grid(3.0, 300), |t| {
        if t < 1.0 {
            2.0 * PI * t
        } else {
            0.0
        }
    });
    let rep = finiteness_check(&profile, 1.0, Dimension::TWO, 1.0).unwrap();
    assert!(rep.bound.is_finite() && rep.bound > 0.0);
    assert!(rep.tail_mass.powf(-1.0) > 2.0 || rep.tail_mass == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn holder_inequality_on_random_profiles(
        areas in prop::collection::vec(0.01f64..20.0, 8..40),
        m_frac in 0.0f64..0.5,
        s_frac in 0.5f64..1.0,
        n in 2usize..5,
    ) {
        let t_max = 3.0;
        let grid = uniform_grid(t_max, areas.len());
        let bins = areas.clone();
        let profile = LevelProfile::from_fn(&grid, move |t| bins[((t / t_max) * bins.len() as f64) as usize]);
        let (lhs, rhs) = holder_sides(&profile, Dimension::new(n).unwrap(), m_frac * t_max, s_frac * t_max);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{} > {}", lhs, rhs);
    }

    #[test]
    fn beta_decreases_in_k(k1 in 1.0f64..10.0, k2 in 1.0f64..10.0, n in 2usize..6) {
        prop_assume!((k1 - k2).abs() > 1e-9);
        let d = Dimension::new(n).unwrap();
        let (lo, hi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
        prop_assert!(beta(d, lo) > beta(d, hi));
    }

    #[test]
    fn r0_shrinks_as_k_grows(k in 1.0f64..5.0, dk in 0.01f64..3.0, c in 0.05f64..2.0, n in 2usize..5) {
        let d = Dimension::new(n).unwrap();
        for case in R0Case::ALL {
            prop_assert!(r0_formula(d, k + dk, c, case).unwrap().ln < r0_formula(d, k, c, case).unwrap().ln);
        }
    }

    #[test]
    fn r0_grows_with_dimension_at_fixed_constant(k in 1.0f64..5.0, c in 0.05f64..2.0, n in 2usize..6) {
        let (a, b) = (Dimension::new(n).unwrap(), Dimension::new(n + 1).unwrap());
        for case in R0Case::ALL {
            prop_assert!(r0_formula(b, k, c, case).unwrap().ln > r0_formula(a, k, c, case).unwrap().ln);
        }
    }

    #[test]
    fn moser_family_energy_is_one(t in 0.5f64..50.0, n in 2usize..5) {
        let out = moser_functional(&MoserInput::test_family(Dimension::new(n).unwrap(), t, 200)).unwrap();
        prop_assert!((out.energy - 1.0).abs() < 1e-9);
    }
}
