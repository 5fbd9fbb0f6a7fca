//! The cross-check suite behind `validate`.

use std::collections::BTreeSet;

use floquet_tls::dynamics::{monodromy_su2, periodic_orbit, DEFAULT_TOL};
use floquet_tls::exact_models::{rpc_quasienergies, rpc_trajectory, toy_example};
use floquet_tls::fourier::{build_system, solve_from_system, Z0Choice};
use floquet_tls::quasienergy::{
    chi_series, euler_residual, quasienergy, quasienergy_classical, reduce, split_geometric_dynamic, Method,
};
use floquet_tls::resonance::{bloch_siegert_coefficients, resonance_point, sigma_closed_form};
use floquet_tls::series_limits::{adiabatic_quasienergy, four_way_consistency};
use floquet_tls::specfun::bessel_j;
use floquet_tls::{DriveParams, Error, PeriodicOrbit};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{envelope, json_bytes, write};
use crate::{CliError, Fault, Group, ValidateArgs};

/// Outcome of one comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub group: Group,
    pub name: String,
    pub passed: bool,
    /// Measured discrepancy (`null` when the computation failed).
    pub error: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

fn measure(group: Group, name: impl Into<String>, tolerance: f64, f: impl FnOnce() -> Result<f64, Error>) -> Check {
    let name = name.into();
    match f() {
        Ok(error) => Check { group, name, passed: error <= tolerance, error, tolerance, detail: None },
        Err(e) => Check { group, name, passed: false, error: f64::NAN, tolerance, detail: Some(e.to_string()) },
    }
}

/// Distance between `a` and `b` modulo `p`.
fn dist_mod(a: f64, b: f64, p: f64) -> f64 {
    let d = reduce(a - b, p);
    d.min(p - d)
}

fn linear_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<DriveParams> {
    (0..n)
        .map(|_| DriveParams::linear(1.0, rng.gen_range(0.1..0.8), rng.gen_range(1.8..3.0)).expect("valid range"))
        .collect()
}

fn eps(p: &DriveParams) -> Result<f64, Error> {
    Ok(quasienergy(p, Method::default())?.epsilon)
}

fn label(p: &DriveParams) -> String {
    format!("omega0={} F={} G={} omega={}", p.omega0, p.f, p.g, p.omega)
}

fn oracles() -> Vec<Check> {
    let g = Group::Oracles;
    let mut out = Vec::new();
    for (f, w) in [(0.5, 1.7), (1.2, 0.6), (2.0, 2.3), (0.3, 0.9)] {
        out.push(measure(g, format!("circular closed form F={f} omega={w}"), 1e-8, || {
            let p = DriveParams::circular(1.0, f, w)?;
            let q = rpc_quasienergies(&p)?;
            let e = eps(&p)?;
            Ok(dist_mod(e, q.plus, w).min(dist_mod(e, q.minus, w)))
        }));
    }
    for f in [0.5, 1.0, 2.0] {
        out.push(measure(g, format!("constructed orbit chi coefficients f={f}"), 1e-9, || {
            let toy = toy_example(f, 1.0)?;
            let s = chi_series(&toy, &toy, 12)?;
            Ok((0..=10).fold(0.0f64, |m, n| {
                let (c, sn) = s.coeff(n);
                m.max((c - toy.b(n)).abs()).max(sn.abs())
            }))
        }));
        out.push(measure(g, format!("constructed orbit dynamical part f={f}"), 1e-10, || {
            let toy = toy_example(f, 1.0)?;
            Ok(split_geometric_dynamic(&toy, &toy)?.1.abs())
        }));
    }
    let want = [(0.52992, 5e-6), (0.0272334, 5e-7), (0.0249063, 5e-7)];
    for (k, (v, tol)) in want.into_iter().enumerate() {
        out.push(measure(g, format!("slow-drive coefficient eps{}", 2 * k), tol, || {
            Ok((adiabatic_quasienergy(0.5, 1.0)?[k] - v).abs())
        }));
    }
    out.push(measure(g, "Bloch-Siegert coefficients n=1 m<=3", 0.0, || {
        let want = [(1, 16), (1, 1024), (-35, 131072)].map(|(a, b)| BigRational::new(a.into(), b.into()));
        let got = bloch_siegert_coefficients(1, 3, None)?;
        Ok(got.iter().zip(&want).filter(|(a, b)| a != b).count() as f64)
    }));
    for f in [0.5, 1.0, 2.0, 3.0] {
        out.push(measure(g, format!("weak static field f={f}"), 1e-9, || {
            let w0 = 1e-4;
            let p = DriveParams::linear(w0, f, 1.0)?;
            let m = monodromy_su2(&p, 0.0, DEFAULT_TOL)?;
            Ok((m.quasienergy() - (0.5 * w0 * bessel_j(0, f)).abs()).abs())
        }));
    }
    out
}

fn gradients(seed: u64, points: usize) -> Vec<Check> {
    let g = Group::Gradients;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1e-4;
    let mut out = Vec::new();
    for p in linear_points(&mut rng, points) {
        let at = label(&p);
        let r = quasienergy(&p, Method::default());
        let fd = |dp: [f64; 3]| -> Result<f64, Error> {
            let up = DriveParams::linear(p.omega0 + dp[0], p.f + dp[1], p.omega + dp[2])?;
            let dn = DriveParams::linear(p.omega0 - dp[0], p.f - dp[1], p.omega - dp[2])?;
            Ok((eps(&up)? - eps(&dn)?) / (2.0 * d))
        };
        let r = match r {
            Ok(r) => r,
            Err(e) => {
                out.push(measure(g, format!("quasienergy {at}"), 0.0, || Err(e)));
                continue;
            }
        };
        let gr = r.gradients();
        out.push(measure(g, format!("d/d omega0 = mean(Z)/2 at {at}"), 1e-5, || {
            Ok((gr.d_omega0 - fd([d, 0.0, 0.0])?).abs())
        }));
        out.push(measure(g, format!("d/dF = x_c/4 at {at}"), 1e-5, || Ok((gr.d_f - fd([0.0, d, 0.0])?).abs())));
        out.push(measure(g, format!("d/d omega = eps_g/omega at {at}"), 1e-5, || {
            Ok((gr.d_omega - fd([0.0, 0.0, d])?).abs())
        }));
        out.push(measure(g, format!("Euler residual at {at}"), 1e-5, || Ok(euler_residual(&p, &gr, r.epsilon))));
    }
    out
}

fn homogeneity(seed: u64, points: usize) -> Vec<Check> {
    let g = Group::Homogeneity;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    (0..points)
        .map(|_| {
            let p = DriveParams::new(1.0, rng.gen_range(0.1..0.8), rng.gen_range(0.0..0.4), rng.gen_range(1.8..3.0))
                .expect("valid range");
            measure(g, format!("eps(2p) = 2 eps(p) at {}", label(&p)), 1e-8, || {
                let q = p.scaled(2.0);
                Ok(dist_mod(eps(&q)?, 2.0 * eps(&p)?, q.omega))
            })
        })
        .collect()
}

fn split(seed: u64, points: usize) -> Vec<Check> {
    let g = Group::Split;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut out: Vec<Check> = linear_points(&mut rng, points)
        .into_iter()
        .map(|p| {
            measure(g, format!("eps = eps_g + eps_d at {}", label(&p)), 1e-8, || {
                let r = quasienergy(&p, Method::default())?;
                Ok((r.epsilon - r.eps_g - r.eps_d).abs())
            })
        })
        .collect();
    for (f, w) in [(0.5, 1.7), (1.2, 0.6)] {
        out.push(measure(g, format!("circular dynamical part F={f} omega={w}"), 1e-8, || {
            let p = DriveParams::circular(1.0, f, w)?;
            let (_, dy) = split_geometric_dynamic(&rpc_trajectory(&p, true)?, &p)?;
            Ok((dy - rpc_quasienergies(&p)?.eps_d).abs())
        }));
    }
    out
}

fn routes(fault: Option<Fault>) -> Vec<Check> {
    let g = Group::Routes;
    let mut out = Vec::new();
    for f in [0.1, 0.5, 1.0, 2.0] {
        let prepared = (|| -> Result<_, Error> {
            let w = resonance_point(1, f, 1.0, floquet_tls::resonance::DEFAULT_TRUNCATION)?.omega_res;
            let p = DriveParams::linear(1.0, f, w)?;
            let mut sys = build_system(&p, 20)?;
            if fault == Some(Fault::CouplingSign) {
                sys.lower.iter_mut().for_each(|v| *v = -*v);
            }
            let fourier = solve_from_system(&p, &sys, Z0Choice::Phi1)?.normalized()?;
            let ode = periodic_orbit(&p, 0.0, DEFAULT_TOL)?;
            Ok((p, fourier, ode))
        })();
        let at = format!("F={f} at the first resonance");
        let (p, fourier, ode) = match prepared {
            Ok(v) => v,
            Err(e) => {
                out.push(measure(g, format!("Fourier vs integrated orbit {at}"), 1e-6, || Err(e)));
                continue;
            }
        };
        out.push(measure(g, format!("Fourier vs integrated orbit {at}"), 1e-6, || {
            let (a, b) = (fourier.sample(256)?, ode.sample(256)?);
            let sign = if a[0].dot(&b[0]) >= 0.0 { 1.0 } else { -1.0 };
            Ok(a.iter().zip(&b).map(|(u, v)| (u * sign - v).norm()).fold(0.0, f64::max))
        }));
        out.push(measure(g, format!("Fourier vs integrated quasienergy {at}"), 1e-8, || {
            let a = quasienergy_classical(&fourier, &p)?.epsilon;
            let b = quasienergy_classical(&ode, &p)?.epsilon;
            Ok(dist_mod(a, b, p.omega).min(dist_mod(a, -b, p.omega)))
        }));
    }
    out
}

fn series() -> Vec<Check> {
    let g = Group::Series;
    let mut out = match four_way_consistency(2) {
        Ok(checks) => checks
            .into_iter()
            .map(|c| Check {
                group: g,
                name: c.name.to_string(),
                passed: c.passed(),
                error: c.mismatches.len() as f64,
                tolerance: 0.0,
                detail: c.mismatches.first().cloned(),
            })
            .collect(),
        Err(e) => vec![measure(g, "expansion cross-checks", 0.0, || Err(e))],
    };
    for (m, ns) in [(1, 2..=6), (2, 2..=4)] {
        for n in ns {
            out.push(measure(g, format!("sigma closed form n={n} m={m}"), 0.0, || {
                let exact = bloch_siegert_coefficients(n, m, None)?;
                Ok(if exact[m - 1] == sigma_closed_form(n, m)? { 0.0 } else { 1.0 })
            }));
        }
    }
    out
}

/// Runs the selected groups in a fixed order.
pub fn run_checks(args: &ValidateArgs) -> Vec<Check> {
    let only: BTreeSet<Group> = args.only.iter().copied().collect();
    let selected = |g: Group| only.is_empty() || only.contains(&g);
    let mut checks = Vec::new();
    if selected(Group::Oracles) {
        checks.extend(oracles());
    }
    if selected(Group::Gradients) {
        checks.extend(gradients(args.seed, args.points));
    }
    if selected(Group::Homogeneity) {
        checks.extend(homogeneity(args.seed, args.points));
    }
    if selected(Group::Split) {
        checks.extend(split(args.seed, args.points));
    }
    if selected(Group::Routes) {
        checks.extend(routes(args.inject_fault));
    }
    if selected(Group::Series) {
        checks.extend(series());
    }
    checks
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let checks = run_checks(args);
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL [{:?}] {}: error {:e} > {:e}", c.group, c.name, c.error, c.tolerance);
    }
    let report = envelope(
        "validate",
        args,
        json!({
            "passed": failed == 0,
            "total": checks.len(),
            "failed": failed,
            "checks": checks,
        }),
    )?;
    write(args.output.as_deref(), &json_bytes(&report)?)?;
    if failed > 0 {
        return Err(CliError::Validation { failed, total: checks.len() });
    }
    Ok(())
}
