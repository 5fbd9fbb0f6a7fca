use floquet_tls::algebra::{q, rational_string};
use floquet_tls::dynamics::{DriveParams, PeriodicOrbit};
use floquet_tls::fourier::{solve, Z0Choice};
use floquet_tls::quasienergy::grad_omega0;
use floquet_tls::resonance::{
    bloch_siegert_coefficients, bloch_siegert_sum, from_triangle, general_exponent, general_form_check,
    general_numerator_degree, large_f_fit, large_f_grid, resonance_curve, resonance_interpolation, resonance_point,
    sigma_closed_form, to_triangle, DEFAULT_TRUNCATION,
};
use floquet_tls::specfun::bessel_j0_zero;
use floquet_tls::Error;
use num_rational::BigRational;
use proptest::prelude::*;

fn parse(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn parse_all(v: &[&str]) -> Vec<BigRational> {
    v.iter().map(|s| parse(s)).collect()
}

const TABLE1: [&str; 8] = [
    "1/16",
    "1/1024",
    "-35/131072",
    "103/8388608",
    "1873/805306368",
    "-1577257/3710851743744",
    "67429531/17099604835172352",
    "304008125947/39397489540237099008",
];
const TABLE2: [&str; 6] =
    ["3/32", "-135/8192", "2133/1048576", "588789/536870912", "-98579025/68719476736", "19157942853/17592186044416"];
const TABLE3: [&str; 6] = [
    "5/96",
    "-2125/221184",
    "1146875/254803968",
    "-3244765625/1174136684544",
    "2045715078125/1352605460594688",
    "-558332576171875/1038800993736720384",
];
const TABLE4: [[&str; 3]; 10] = [
    ["1/16", "1/1024", "-35/131072"],
    ["3/32", "-135/8192", "2133/1048576"],
    ["5/96", "-2125/221184", "1146875/254803968"],
    ["7/192", "-12005/1769472", "120892751/40768634880"],
    ["9/320", "-43011/8192000", "235598949/104857600000"],
    ["11/480", "-118459/27648000", "10123182707/5573836800000"],
    ["13/672", "-274625/75866112", "32687521841/21412451450880"],
    ["15/896", "-563625/179830784", "23778534375/18046378835968"],
    ["17/1152", "-1056295/382205952", "2573069114971/2219118333788160"],
    ["19/1440", "-1845071/746496000", "2204002956989/2128409395200000"],
];

#[test]
fn triangle_examples() {
    let c = to_triangle(&DriveParams::linear(2.0, 2.0, 2.0).unwrap()).unwrap();
    assert!(c.x.abs() < 1e-16 && (c.y - 3f64.sqrt() / 6.0).abs() < 1e-16);
    let v = from_triangle(0.5, 0.0);
    assert!(v.is_err());
    let near = from_triangle(0.5 - 1e-9, 1e-10).unwrap();
    assert!((near.omega - 1.0).abs() < 1e-8);
    let c = to_triangle(&DriveParams::linear(3.0, 6.0, 3.0).unwrap()).unwrap();
    assert!((c.f - 0.5).abs() < 1e-16 && (c.y - 3f64.sqrt() / 4.0).abs() < 1e-16);
    assert!(matches!(from_triangle(0.0, 0.9), Err(Error::Domain { .. })));
    assert!(to_triangle(&DriveParams::linear(1.0, 0.0, 1.0).unwrap()).is_err());
}

proptest! {
    #[test]
    fn triangle_round_trip(w0 in 0.01f64..10.0, f in 0.01f64..10.0, w in 0.01f64..10.0) {
        let c = to_triangle(&DriveParams::linear(w0, f, w).unwrap()).unwrap();
        let back = from_triangle(c.x, c.y).unwrap();
        prop_assert!((back.omega0 - c.omega0).abs() < 1e-14);
        prop_assert!((back.omega - c.omega).abs() < 1e-14);
        prop_assert!((back.f - c.f).abs() < 1e-14);
        prop_assert!((back.omega0 + back.omega + back.f - 1.0).abs() < 1e-14);
    }
}

#[test]
fn weak_drive_endpoints() {
    for n in 1..=10 {
        let p = resonance_point(n, 1e-6, 1.0, DEFAULT_TRUNCATION).unwrap();
        assert!((p.omega_res - 1.0 / (2 * n - 1) as f64).abs() < 1e-5, "n={n}: {}", p.omega_res);
    }
}

#[test]
fn tables_one_to_three() {
    assert_eq!(bloch_siegert_coefficients(1, 8, None).unwrap(), parse_all(&TABLE1));
    assert_eq!(bloch_siegert_coefficients(2, 6, None).unwrap(), parse_all(&TABLE2));
    assert_eq!(bloch_siegert_coefficients(3, 6, None).unwrap(), parse_all(&TABLE3));
}

#[test]
fn table_four() {
    for (i, row) in TABLE4.iter().enumerate() {
        assert_eq!(bloch_siegert_coefficients(i + 1, 3, None).unwrap(), parse_all(row), "n = {}", i + 1);
    }
}

#[test]
fn larger_truncation_gives_same_coefficients() {
    let a = bloch_siegert_coefficients(2, 3, None).unwrap();
    let b = bloch_siegert_coefficients(2, 3, Some(40)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn closed_form_sigmas() {
    assert_eq!(sigma_closed_form(2, 1).unwrap(), q(3, 32));
    assert_eq!(sigma_closed_form(10, 1).unwrap(), q(19, 1440));
    assert_eq!(sigma_closed_form(3, 2).unwrap(), q(-2125, 221184));
    assert!(matches!(sigma_closed_form(1, 1), Err(Error::Domain { .. })));
    assert!(matches!(sigma_closed_form(2, 3), Err(Error::Domain { .. })));
    for n in 2..=10 {
        let s = bloch_siegert_coefficients(n, 3, None).unwrap();
        assert_eq!(s[0], sigma_closed_form(n, 1).unwrap(), "m=1 n={n}");
        if n <= 6 {
            assert_eq!(s[1], sigma_closed_form(n, 2).unwrap(), "m=2 n={n}");
        }
        if (3..=6).contains(&n) {
            assert_eq!(s[2], sigma_closed_form(n, 3).unwrap(), "m=3 n={n}");
        }
    }
}

#[test]
fn general_coefficient_structure() {
    assert_eq!((1..=2).map(|j| general_exponent(1, j)).collect::<Vec<_>>(), vec![1, 1]);
    assert_eq!((1..=2).map(|j| general_exponent(2, j)).collect::<Vec<_>>(), vec![3, 3]);
    assert_eq!((1..=4).map(|j| general_exponent(3, j)).collect::<Vec<_>>(), vec![1, 5, 5, 1]);
    assert_eq!(general_numerator_degree(3), 3);
    let k1 = general_form_check(1, 3).unwrap();
    assert!(k1.consistent());
    assert_eq!(k1.coefficients, vec![q(1, 4)]);
    let k2 = general_form_check(2, 3).unwrap();
    assert!(k2.consistent());
    assert_eq!(k2.coefficients, vec![q(1, 16), q(-3, 16)]);
    for k in 3..=4 {
        let c = general_form_check(k, 2).unwrap();
        assert!(c.consistent(), "k = {k}: {:?}", c.mismatches);
        assert_eq!(c.coefficients.len() as i64, general_numerator_degree(k) + 1);
    }
}

#[test]
fn series_matches_roots_for_weak_drive() {
    let sigmas = parse_all(&TABLE1);
    let grid: Vec<f64> = (1..=10).map(|k| 0.05 * k as f64).collect();
    for r in resonance_curve(1, &grid, 1.0, DEFAULT_TRUNCATION) {
        let p = r.unwrap();
        let s = bloch_siegert_sum(1, &sigmas, p.f, 1.0);
        assert!((p.omega_res - s).abs() < 1e-6, "F={}: {} vs {s}", p.f, p.omega_res);
    }
}

#[test]
fn second_resonance_at_half() {
    let p = resonance_point(2, 0.5, 1.0, DEFAULT_TRUNCATION).unwrap();
    assert!((p.omega_res - 0.355776).abs() < 1e-5);
}

#[test]
fn mean_z_vanishes_at_resonances() {
    for (n, f) in [(1, 0.5), (1, 3.0), (2, 1.0), (3, 2.0)] {
        let p = resonance_point(n, f, 1.0, DEFAULT_TRUNCATION).unwrap();
        let params = DriveParams::linear(1.0, f, p.omega_res).unwrap();
        let sol = solve(&params, DEFAULT_TRUNCATION, Z0Choice::Phi1).unwrap();
        let orbit = sol.normalized().unwrap();
        let xs = orbit.sample(1024).unwrap();
        let mean_z = xs.iter().map(|x| x.z).sum::<f64>() / 1024.0;
        assert!(mean_z.abs() < 1e-6);
        assert!(grad_omega0(&orbit).unwrap().abs() < 1e-6);
    }
}

#[test]
fn first_curve_is_monotone() {
    let grid: Vec<f64> = (1..=60).map(|k| 0.25 * k as f64).collect();
    let pts: Vec<f64> = resonance_curve(1, &grid, 1.0, DEFAULT_TRUNCATION).into_iter().map(|r| r.unwrap().omega_res).collect();
    assert!(pts.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn strong_drive_asymptotics() {
    let f: f64 = 20.0;
    let p = resonance_point(1, f, 1.0, DEFAULT_TRUNCATION).unwrap();
    let want = 0.415831 * f + 0.87256 / f + 0.404226 / f.powi(3) - 3.83313 / f.powi(5);
    assert!(((p.omega_res - want) / want).abs() < 1e-3);

    let pts: Vec<_> = resonance_curve(1, &large_f_grid(), 1.0, DEFAULT_TRUNCATION).into_iter().map(|r| r.unwrap()).collect();
    let c = large_f_fit(&pts).unwrap();
    assert!((c[0] - 0.415831).abs() < 1e-3);
    assert!((c[1] - 0.87256).abs() < 1e-3);
    assert!((c[0] - 1.0 / bessel_j0_zero(1).unwrap()).abs() < 1e-6);
}

#[test]
fn bessel_zero_limit() {
    for n in 1..=3 {
        let j = bessel_j0_zero(n).unwrap();
        let pts: Vec<_> = resonance_curve(n, &large_f_grid(), 1.0, DEFAULT_TRUNCATION).into_iter().map(|r| r.unwrap()).collect();
        let dev: Vec<f64> = pts.iter().map(|p| ((p.f / p.omega_res - j) / j).abs()).collect();
        assert!(dev.windows(2).all(|w| w[1] < w[0]));
        assert!(*dev.last().unwrap() < 1e-3);
    }
}

#[test]
fn interpolation_values() {
    assert_eq!(resonance_interpolation(3, 0.0, 1.0).unwrap(), 0.2);
    let j2 = bessel_j0_zero(2).unwrap();
    assert!((resonance_interpolation(2, 1.0, 0.0).unwrap() - 1.0 / j2).abs() < 1e-15);
    assert!((resonance_interpolation(1, 1.0, 1.0).unwrap() - 1.41583).abs() < 1e-5);
}

#[test]
fn insufficient_truncation_is_reported() {
    match resonance_point(3, 100.0, 1.0, 6) {
        Err(Error::BracketNotFound { suggested_n, .. }) => assert!(suggested_n > 6),
        other => panic!("expected a bracket failure, got {other:?}"),
    }
}

#[test]
fn rationals_format_as_fractions() {
    let s = bloch_siegert_coefficients(1, 2, None).unwrap();
    assert_eq!(s.iter().map(rational_string).collect::<Vec<_>>(), vec!["1/16", "1/1024"]);
}
