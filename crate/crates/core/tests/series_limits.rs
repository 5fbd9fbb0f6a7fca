use floquet_tls::algebra::q;
use floquet_tls::dynamics::{periodic_orbit, DriveParams, DEFAULT_TOL};
use floquet_tls::quasienergy::{quasienergy, Method};
use floquet_tls::series_limits::{
    adiabatic_expansion, adiabatic_quasienergy, bessel_series_coefficients, check_pendulum_vs_high_frequency,
    check_small_f_vs_elliptic, check_small_f_vs_high_frequency, four_way_consistency, ft_solution_small_f,
    high_frequency_series, omega0_large_limit, pendulum_solution, quasienergy_series_small_f,
    quasienergy_small_omega0, small_f_split_check,
};
use floquet_tls::specfun::{bessel_j, bessel_j0_zero};
use floquet_tls::{BlochVector, DriveField, Error, PeriodicOrbit};
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    q(n, d)
}

/// Rational points `(ω, ω₀)` away from the weak-drive resonances.
fn points() -> Vec<(BigRational, BigRational)> {
    vec![(rat(2, 1), rat(1, 1)), (rat(3, 7), rat(5, 4)), (rat(11, 3), rat(2, 5)), (rat(1, 5), rat(9, 2)), (rat(5, 2), rat(3, 1))]
}

#[test]
fn weak_drive_quasienergy_terms() {
    for (w, w0) in points() {
        let d = w.clone() * w.clone() - w0.clone() * w0.clone();
        let d9 = rat(9, 1) * w.clone() * w.clone() - w0.clone() * w0.clone();
        let c = quasienergy_series_small_f(2, &w, &w0).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[0], w0.clone() / rat(2, 1));
        assert_eq!(c[1], -(w0.clone() / (rat(8, 1) * d.clone())));
        let want2 = w0.clone() * (w.clone() * w.clone() + rat(3, 1) * w0.clone() * w0.clone()) / (rat(128, 1) * d.clone() * d.clone() * d.clone());
        assert_eq!(c[2], want2);
        let (w2, a2) = (w.clone() * w.clone(), w0.clone() * w0.clone());
        let poly = rat(-5, 1) * a2.clone() * a2.clone() * a2.clone()
            + rat(35, 1) * w2.clone() * a2.clone() * a2.clone()
            + rat(33, 1) * w2.clone() * w2.clone() * a2.clone()
            + w2.clone() * w2.clone() * w2.clone();
        let want3 = -(w0.clone() * poly / (rat(512, 1) * d.clone() * d.clone() * d.clone() * d.clone() * d * d9));
        assert_eq!(c[3], want3);
    }
}

#[test]
fn higher_orders_do_not_change_lower_coefficients() {
    let (w, w0) = (rat(7, 3), rat(1, 1));
    let a = quasienergy_series_small_f(2, &w, &w0).unwrap();
    let b = quasienergy_series_small_f(4, &w, &w0).unwrap();
    assert_eq!(a[..], b[..a.len()]);
}

#[test]
fn fourier_taylor_examples() {
    for (w, w0) in points() {
        let d = w.clone() * w.clone() - w0.clone() * w0.clone();
        let d9 = rat(9, 1) * w.clone() * w.clone() - w0.clone() * w0.clone();
        let ft = ft_solution_small_f(3, &w, &w0).unwrap();
        assert_eq!(ft.r[0][0], -(w0.clone() / d.clone()));
        assert_eq!(ft.coefficient(2, 2, 2), rat(1, 4) / d.clone());
        assert_eq!(ft.coefficient(0, 3, 3), -(w0.clone() / (rat(8, 1) * d9.clone() * d.clone())));
        assert_eq!(ft.coefficient(0, 3, 1), -(w0.clone() / (rat(8, 1) * d.clone() * d.clone())));
        let z42 = (rat(3, 1) * w.clone() * w.clone() - w0.clone() * w0.clone()) / (rat(8, 1) * d.clone() * d.clone() * d9.clone());
        assert_eq!(ft.coefficient(2, 4, 2), z42);
        assert_eq!(ft.coefficient(2, 4, 4), rat(3, 64) / (d * d9));
    }
}

#[test]
fn triangular_support() {
    let ft = ft_solution_small_f(5, &2.3, &1.0).unwrap();
    for (i, p) in ft.trajectory().iter().enumerate() {
        for (n, t) in p.terms.iter().enumerate() {
            assert!(t.degree() <= n, "component {i}, order {n}: degree {}", t.degree());
        }
    }
}

#[test]
fn resonant_denominator_is_named() {
    match ft_solution_small_f(3, &(1.0 / 5.0), &1.0) {
        Err(Error::SmallDenominator { harmonic, .. }) => assert_eq!(harmonic, 5),
        other => panic!("expected a small denominator, got {other:?}"),
    }
    match quasienergy_series_small_f(1, &rat(1, 3), &rat(1, 1)) {
        Err(Error::SmallDenominator { harmonic, .. }) => assert_eq!(harmonic, 3),
        other => panic!("expected a small denominator, got {other:?}"),
    }
}

#[test]
fn split_at_second_order() {
    for (w, w0) in points() {
        let d = w.clone() * w.clone() - w0.clone() * w0.clone();
        let (g, dy) = small_f_split_check(&w, &w0).unwrap();
        assert_eq!(g, w.clone() * w.clone() * w0.clone() / (rat(4, 1) * d.clone() * d.clone()));
        let want_d = w0.clone() * (w0.clone() * w0.clone() - rat(3, 1) * w.clone() * w.clone()) / (rat(8, 1) * d.clone() * d.clone());
        assert_eq!(dy, want_d);
        assert_eq!(g.clone() + dy, -(w0.clone() / (rat(8, 1) * d.clone())));
        // dε/dω at order F² equals ε_g/ω.
        let deps = w.clone() * w0.clone() / (rat(4, 1) * d.clone() * d);
        assert_eq!(deps, g / w);
    }
}

#[test]
fn scaling_covariance() {
    let (w, w0, lam) = (2.3, 0.7, 2.0);
    let a = ft_solution_small_f(4, &w, &w0).unwrap();
    let b = ft_solution_small_f(4, &(lam * w), &(lam * w0)).unwrap();
    for n in 0..=4 {
        for m in 0..=n {
            let r = a.r[n][m] * lam.powi(-(2 * n as i32) - 1);
            assert!((b.r[n][m] - r).abs() <= 1e-12 * r.abs(), "R[{n}][{m}]");
            let s = a.s[n][m] * lam.powi(-(2 * n as i32));
            assert!((b.s[n][m] - s).abs() <= 1e-12 * s.abs().max(f64::MIN_POSITIVE), "S[{n}][{m}]");
        }
    }
}

#[test]
fn weak_drive_orbit_matches_integration() {
    let (f, w0, w) = (0.05, 1.0, 2.0);
    let params = DriveParams::linear(w0, f, w).unwrap();
    let orbit = periodic_orbit(&params, 0.0, DEFAULT_TOL).unwrap();
    let ft = ft_solution_small_f(4, &w, &w0).unwrap();
    let period = params.period();
    let xs = orbit.sample(16).unwrap();
    for (k, x) in xs.iter().enumerate() {
        let t = period * k as f64 / 16.0;
        let s = ft.state(f, t);
        let s = s / s.norm();
        assert!((s - x).norm() < 1e-6, "t = {t}: {s:?} vs {x:?}");
    }
    let eps: f64 = quasienergy_series_small_f(4, &w, &w0).unwrap().iter().enumerate().map(|(k, c)| c * f.powi(2 * k as i32)).sum();
    let r = quasienergy(&params, Method::default()).unwrap();
    assert!((r.epsilon - eps).abs() < 1e-12, "{} vs {eps}", r.epsilon);
}

#[test]
fn pendulum_examples() {
    let (s, _) = pendulum_solution(1.3, 2.0, 0.0).unwrap();
    assert_eq!(s, BlochVector::new(0.0, 0.0, 1.0));
    for f in [0.5, 2.0, 3.1] {
        let n = 4096;
        let mean: f64 = (0..n).map(|k| pendulum_solution(f, 1.0, std::f64::consts::TAU * k as f64 / n as f64).unwrap().0.z).sum::<f64>() / n as f64;
        assert!((mean - bessel_j(0, f)).abs() < 1e-14);
    }
    for f in [0.0, std::f64::consts::PI, -1.0, 4.0] {
        assert!(matches!(pendulum_solution(f, 1.0, 0.0), Err(Error::Domain { .. })));
    }
}

#[test]
fn pendulum_residual() {
    let (w0, w) = (1e-4, 1.0);
    for f in [0.7, 2.0, 3.0] {
        let params = DriveParams::linear(w0, f * w, w).unwrap();
        let dt = 1e-4;
        let state = |t: f64| {
            let (s, x1) = pendulum_solution(f, w, t).unwrap();
            BlochVector::new(w0 * x1, s.y, s.z)
        };
        for k in 0..32 {
            let t = params.period() * k as f64 / 32.0;
            let deriv = (state(t + dt) - state(t - dt)) / (2.0 * dt);
            let rhs = params.field_at(t).cross(&state(t));
            // centered differences contribute O(dt²) ≈ 1e-8 of curvature error
            assert!((deriv - rhs).norm() < 1e-7, "f = {f}, t = {t}: {}", (deriv - rhs).norm());
        }
    }
}

#[test]
fn weak_static_field_coefficients() {
    let j1 = bessel_j0_zero(1).unwrap();
    let r = quasienergy_small_omega0(j1, 1.0).unwrap();
    assert!(r.epsilon.abs() < 1e-15);
    let r = quasienergy_small_omega0(1e-9, 1.0).unwrap();
    assert!((r.epsilon - 0.5).abs() < 1e-15);
    for (f, w) in [(1.0, 1.0), (2.0, 0.8), (0.3, 0.2)] {
        let r = quasienergy_small_omega0(f, w).unwrap();
        assert!((r.eps_g + r.eps_d - r.epsilon).abs() < 1e-15);
        let h = 1e-6;
        let up = quasienergy_small_omega0(f, w + h).unwrap().epsilon;
        let dn = quasienergy_small_omega0(f, w - h).unwrap().epsilon;
        assert!(((up - dn) / (2.0 * h) - r.eps_g / w).abs() < 1e-8);
    }
    assert!(matches!(quasienergy_small_omega0(4.0, 1.0), Err(Error::Domain { .. })));
}

#[test]
fn weak_static_field_matches_integration() {
    let w0 = 1e-4;
    for (f, w) in [(1.0, 1.0), (2.0, 1.0)] {
        let params = DriveParams::linear(w0, f, w).unwrap();
        let r = quasienergy(&params, Method::default()).unwrap();
        let c = quasienergy_small_omega0(f, w).unwrap();
        assert!((r.epsilon - w0 * c.epsilon).abs() < 1e-9, "{} vs {}", r.epsilon, w0 * c.epsilon);
    }
}

// Reference values from mpmath at 30 digits.
const EPS0: f64 = 0.529_919_690_093_824_1;
const EPS2: f64 = 0.027_233_410_441_284_99;
const EPS4: f64 = 0.024_906_293_900_026_646;

#[test]
fn adiabatic_quasienergy_values() {
    let [e0, e2, e4] = adiabatic_quasienergy(0.5, 1.0).unwrap();
    assert!((e0 - EPS0).abs() < 1e-14);
    assert!((e2 - EPS2).abs() < 1e-14);
    assert!((e4 - EPS4).abs() < 1e-14);
    assert!((e0 - 0.52992).abs() < 5e-6 && (e2 - 0.0272334).abs() < 5e-7 && (e4 - 0.0249063).abs() < 5e-7);
    assert!(matches!(adiabatic_quasienergy(0.5, 0.0), Err(Error::Domain { .. })));
}

#[test]
fn adiabatic_quasienergy_matches_slow_drive() {
    let params = DriveParams::linear(1.0, 0.5, 0.01).unwrap();
    let a = adiabatic_expansion(&params, 2).unwrap();
    let r = quasienergy(&params, Method::default()).unwrap();
    assert!((a.quasienergy() - 0.529922413683931).abs() < 1e-14);
    assert!((r.epsilon - a.quasienergy()).abs() < 1e-11, "{} vs {}", r.epsilon, a.quasienergy());
}

#[test]
fn adiabatic_trajectory_residual_scales() {
    let residual = |w: f64| {
        let params = DriveParams::linear(1.0, 0.5, w).unwrap();
        let a = adiabatic_expansion(&params, 2).unwrap();
        let h = 1e-3 / w;
        (0..32)
            .map(|k| {
                let t = params.period() * k as f64 / 32.0;
                let d = (a.state(t + h) - a.state(t - h)) / (2.0 * h);
                (d - params.field_at(t).cross(&a.state(t))).norm()
            })
            .fold(0.0, f64::max)
    };
    let (r1, r2) = (residual(0.02), residual(0.01));
    assert!(r1 / r2 > 6.0, "ratio {}", r1 / r2);
    let params = DriveParams::linear(1.0, 0.5, 0.01).unwrap();
    let a = adiabatic_expansion(&params, 2).unwrap();
    let orbit = periodic_orbit(&params, 0.0, DEFAULT_TOL).unwrap();
    for (k, x) in orbit.sample(8).unwrap().iter().enumerate() {
        let t = params.period() * k as f64 / 8.0;
        assert!((a.state(t) - x).norm() < 1e-5);
    }
    assert_eq!(adiabatic_expansion(&params, 0).unwrap().terms(0.3).len(), 1);
    assert!(adiabatic_expansion(&params, 3).is_err());
}

#[test]
fn fast_drive_series() {
    let (w0, f) = (rat(3, 2), rat(2, 5));
    let s = high_frequency_series(&w0, &f, 6);
    assert_eq!(s.y.terms[1].sin_coeff(1), -f.clone());
    assert_eq!(s.x.terms[2].cos_coeff(1), -(f.clone() * w0.clone()));
    assert_eq!(s.z.terms[2].cos_coeff(2), f.clone() * f.clone() / rat(4, 1));
    let e = &s.epsilon;
    assert_eq!(e[0], w0.clone() / rat(2, 1));
    assert_eq!(e[2], -(f.clone() * f.clone() * w0.clone() / rat(8, 1)));
    let f2 = f.clone() * f.clone();
    assert_eq!(e[4], f2.clone() * w0.clone() * (f2 - rat(16, 1) * w0.clone() * w0) / rat(128, 1));
    assert!(e.iter().skip(1).step_by(2).all(|c| c == &rat(0, 1)));
}

#[test]
fn fast_drive_matches_integration() {
    let params = DriveParams::linear(1.0, 0.5, 20.0).unwrap();
    let s = high_frequency_series(&1.0, &0.5, 8);
    let t: f64 = 1.0 / 20.0;
    let eps: f64 = s.epsilon.iter().enumerate().map(|(k, c)| c * t.powi(k as i32)).sum();
    let r = quasienergy(&params, Method::default()).unwrap();
    assert!((r.epsilon - eps).abs() < 1e-11, "{} vs {eps}", r.epsilon);
}

#[test]
fn strong_static_field_limit() {
    assert_eq!(omega0_large_limit(0.0, 3.0), 1.5);
    let params = DriveParams::linear(10.0, 0.1, 0.01).unwrap();
    let r = quasienergy(&params, Method::default()).unwrap();
    assert!((r.epsilon - omega0_large_limit(0.1, 10.0)).abs() < 1e-4);
    // shared F² order of the weak-drive series at ω = 0 and the elliptic series
    let c = quasienergy_series_small_f(0, &rat(0, 1), &rat(10, 1)).unwrap();
    assert_eq!(c[1], rat(1, 80));
}

#[test]
fn cross_checks_between_expansions() {
    for w0 in [rat(1, 1), rat(3, 2), rat(2, 7)] {
        let c = check_small_f_vs_elliptic(&w0, 3).unwrap();
        assert!(c.passed(), "{:?}", c.mismatches);
    }
    let c = check_small_f_vs_high_frequency(&rat(5, 4), &[rat(1, 2), rat(2, 3), rat(3, 1), rat(7, 5)], 3).unwrap();
    assert!(c.passed(), "{:?}", c.mismatches);
    let c = check_pendulum_vs_high_frequency(&rat(3, 4), 3);
    assert!(c.passed(), "{:?}", c.mismatches);
    assert_eq!(bessel_series_coefficients(2), vec![rat(1, 2), rat(-1, 8), rat(1, 128)]);
    for c in four_way_consistency(2).unwrap() {
        assert!(c.passed(), "{}: {:?}", c.name, c.mismatches);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn split_sums_to_series(w in 0.05f64..5.0, w0 in 0.05f64..5.0) {
        prop_assume!(((w * w - w0 * w0) / (w * w + w0 * w0)).abs() > 1e-3);
        let (g, d) = small_f_split_check(&w, &w0).unwrap();
        let c = quasienergy_series_small_f(0, &w, &w0).unwrap();
        prop_assert!((g + d - c[1]).abs() <= 1e-10 * c[1].abs().max(1.0));
    }
}
