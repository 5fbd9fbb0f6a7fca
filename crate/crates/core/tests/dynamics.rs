use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use floquet_tls::dynamics::{
    evolve_classical, monodromy_so3, monodromy_su2, propagate, DriveField, DriveParams, DEFAULT_TOL,
};
use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn free_precession_monodromy() {
    let p = DriveParams::new(1.3, 0.0, 0.0, 0.7).unwrap();
    let u = monodromy_su2(&p, 0.0, DEFAULT_TOL).unwrap().matrix;
    let t = p.period();
    let want0 = Complex64::from_polar(1.0, -0.5 * p.omega0 * t);
    assert!((u[(0, 0)] - want0).norm() < 1e-10);
    assert!((u[(1, 1)] - want0.conj()).norm() < 1e-10);
    assert!(u[(0, 1)].norm() < 1e-12);
}

#[test]
fn circular_drive_quasienergy_fundamental_branch() {
    // Omega = 1/2: quasienergies 3/4 and 1/4, fundamental representative 1/4.
    let p = DriveParams::circular(1.0, 0.5, 1.0).unwrap();
    let m = monodromy_su2(&p, 0.0, DEFAULT_TOL).unwrap();
    assert!((m.quasienergy() - 0.25).abs() < 1e-10);
}

#[test]
fn circular_drive_rotation_angle() {
    let p = DriveParams::circular(1.0, 1.0, 2.0).unwrap();
    let m = monodromy_so3(&p, 0.0, DEFAULT_TOL).unwrap();
    let big_omega = 2f64.sqrt();
    let expect = (big_omega * p.period()).rem_euclid(TAU);
    let expect = if expect > PI { TAU - expect } else { expect };
    assert!((m.rotation_angle() - expect).abs() < 1e-10);
}

#[test]
fn identity_monodromy_is_degenerate() {
    // Omega = omega: the one-period rotation is the identity.
    let p = DriveParams::circular(1.0, 1.0, 1.0).unwrap();
    let m = monodromy_so3(&p, 0.0, DEFAULT_TOL).unwrap();
    assert!(m.rotation_angle() < 1e-9);
    assert!(m.periodic_axis().is_err());
    assert!(m.quasienergy() < 1e-9);
}

#[test]
fn circular_axis_matches_closed_form() {
    let p = DriveParams::circular(1.0, 0.7, 1.6).unwrap();
    let m = monodromy_so3(&p, 0.0, DEFAULT_TOL).unwrap();
    let axis = m.periodic_axis().unwrap();
    let det = p.omega0 - p.omega;
    let big_omega = (p.f * p.f + det * det).sqrt();
    let mut want = Vector3::new(p.f, 0.0, det) / big_omega;
    if want.z < 0.0 {
        want = -want;
    }
    assert!((axis - want).norm() < 1e-9, "{axis} vs {want}");
}

#[test]
fn oriented_quasienergy_matches_circular_closed_form() {
    let p = DriveParams::circular(1.0, 0.4, 0.7).unwrap();
    let m3 = monodromy_so3(&p, 0.0, DEFAULT_TOL).unwrap();
    let m2 = monodromy_su2(&p, 0.0, DEFAULT_TOL).unwrap();
    let axis = m3.periodic_axis().unwrap();
    // z = omega0 - omega > 0: the axis is the X+ orbit with epsilon = (omega + Omega)/2.
    let big_omega = (0.16f64 + 0.09).sqrt();
    let eps = (0.5 * (p.omega + big_omega)).rem_euclid(p.omega);
    assert!((m2.oriented_quasienergy(&axis) - eps).abs() < 1e-10);
    assert!((m3.oriented_quasienergy(&axis) - eps.rem_euclid(0.5 * p.omega)).abs() < 1e-10);
}

#[test]
fn dense_output_shape() {
    let p = DriveParams::linear(1.0, 0.5, 2.0).unwrap();
    let tr = evolve_classical(&p, Vector3::new(0.0, 0.0, 1.0), 0.3, 0.3 + p.period(), 1e-12, 64).unwrap();
    assert_eq!(tr.states.len(), 65);
    assert_relative_eq!(tr.times[0], 0.3);
    assert_relative_eq!(*tr.times.last().unwrap(), 0.3 + p.period());
    let end = propagate(&p, Vector3::new(0.0, 0.0, 1.0), 0.3, 0.3 + p.period(), 1e-12).unwrap();
    assert!((end - tr.states[64]).norm() < 1e-10);
}

#[test]
fn bad_tolerance_rejected() {
    let p = DriveParams::linear(1.0, 0.5, 2.0).unwrap();
    assert!(monodromy_so3(&p, 0.0, 0.0).is_err());
    assert!(evolve_classical(&p, Vector3::z(), 0.0, -1.0, 1e-10, 4).is_err());
}

fn params() -> impl Strategy<Value = DriveParams> {
    (0.3f64..2.0, 0.0f64..2.0, 0.0f64..2.0, 0.4f64..3.0)
        .prop_map(|(w0, f, g, w)| DriveParams::new(w0, f, g, w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norm_is_conserved(p in params(), theta in 0.0f64..PI) {
        let x0 = Vector3::new(theta.sin(), 0.0, theta.cos());
        let tr = evolve_classical(&p, x0, 0.0, p.period(), DEFAULT_TOL, 32).unwrap();
        for x in &tr.states {
            prop_assert!((x.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn adjoint_of_spinor_propagator_is_rotation(p in params()) {
        let m3 = monodromy_so3(&p, 0.0, DEFAULT_TOL).unwrap();
        let m2 = monodromy_su2(&p, 0.0, DEFAULT_TOL).unwrap();
        prop_assert!((m2.adjoint() - m3.matrix).norm() < 1e-7);
        prop_assert!((m3.matrix.determinant() - 1.0).abs() < 1e-10);
        prop_assert!((m2.matrix.determinant().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn periodic_axis_is_periodic(p in params()) {
        let m = monodromy_so3(&p, 0.0, DEFAULT_TOL).unwrap();
        if let Ok(axis) = m.periodic_axis() {
            prop_assume!(m.rotation_angle() > 1e-3);
            let end = propagate(&p, axis, 0.0, p.period(), DEFAULT_TOL).unwrap();
            prop_assert!((end - axis).norm() < 1e-9);
        }
    }

    #[test]
    fn quasienergy_independent_of_start_time(p in params(), t0 in 0.0f64..6.0) {
        let a = monodromy_su2(&p, 0.0, DEFAULT_TOL).unwrap().quasienergy();
        let b = monodromy_su2(&p, t0, DEFAULT_TOL).unwrap().quasienergy();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn homogeneous_of_degree_one(p in params()) {
        let a = monodromy_su2(&p, 0.0, DEFAULT_TOL).unwrap().quasienergy();
        let b = monodromy_su2(&p.scaled(2.0), 0.0, DEFAULT_TOL).unwrap().quasienergy();
        prop_assert!((2.0 * a - b).abs() < 1e-9);
    }
}
