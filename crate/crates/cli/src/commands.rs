//! The `solve`, `quasienergy`, `resonance` and `bloch-siegert` commands.

use floquet_tls::dynamics::{orient, periodic_orbit, IntegratedOrbit};
use floquet_tls::exact_models::rpc_trajectory;
use floquet_tls::fourier::{self, Z0Choice};
use floquet_tls::quasienergy::{sweep_branches, Method, TrigSeries};
use floquet_tls::resonance::{bloch_siegert_coefficients, bloch_siegert_truncation, resonance_curve, to_triangle};
use floquet_tls::{BlochVector, DriveField, DriveParams, Error, PeriodicOrbit};
use serde_json::{json, Value};

use crate::output::{emit, envelope, float, Table};
use crate::{BlochSiegertArgs, CliError, Format, MethodArg, QuasienergyArgs, ResonanceArgs, SolveArgs};

/// Fourier tails above this are reported on stderr.
const TAIL_WARNING: f64 = 1e-8;

/// Minimum fraction of sweep points that must succeed.
const SWEEP_SUCCESS: f64 = 0.95;

/// The periodic orbit by integration. When the monodromy is the identity
/// (every orbit is periodic) a circular drive falls back to the closed-form
/// orbit's initial state.
pub fn ode_orbit(p: &DriveParams, tol: f64) -> Result<(IntegratedOrbit<DriveParams>, bool), Error> {
    match periodic_orbit(p, 0.0, tol) {
        Err(Error::DegenerateMonodromy { rho }) if p.is_circular() => {
            let x0 = rpc_trajectory(p, true)?.state(0.0);
            if !(x0.norm() > 0.0) {
                return Err(Error::DegenerateMonodromy { rho });
            }
            Ok((IntegratedOrbit { field: *p, x0: orient(x0.normalize()), t0: 0.0, tol }, true))
        }
        other => other.map(|o| (o, false)),
    }
}

struct SampledOrbit {
    states: Vec<BlochVector>,
    info: Value,
}

fn sample_orbit(p: &DriveParams, method: MethodArg, a: &SolveArgs) -> Result<SampledOrbit, CliError> {
    match method {
        MethodArg::Ode => {
            let (orbit, fallback) = ode_orbit(p, a.tol)?;
            Ok(SampledOrbit {
                states: orbit.sample(a.samples)?,
                info: json!({ "method": "ode", "degenerate_monodromy": fallback }),
            })
        }
        MethodArg::Fourier => {
            let sol = fourier::solve(p, a.n_trunc, Z0Choice::Phi1)?;
            let tail = sol.tail_ratio();
            if tail > TAIL_WARNING {
                eprintln!("warning: Fourier tail ratio {tail:e} at N = {}; increase --n-trunc", a.n_trunc);
            }
            let orbit = sol.normalized()?;
            Ok(SampledOrbit {
                states: orbit.sample(a.samples)?,
                info: json!({ "method": "fourier", "tail_ratio": tail, "radius_spread": orbit.spread }),
            })
        }
    }
}

fn harmonics(states: &[BlochVector], omega: f64, n: usize) -> Value {
    let series = |i: usize| {
        let v: Vec<f64> = states.iter().map(|x| x[i]).collect();
        TrigSeries::from_samples(omega, 0.0, &v, n)
    };
    json!({ "x": series(0), "y": series(1), "z": series(2) })
}

pub fn solve(a: &SolveArgs) -> Result<(), CliError> {
    if a.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let p = DriveParams::new(a.omega0, a.f, a.g, a.omega)?;
    let main = sample_orbit(&p, a.method, a)?;
    let other = if a.compare {
        let m = match a.method {
            MethodArg::Ode => MethodArg::Fourier,
            MethodArg::Fourier => MethodArg::Ode,
        };
        Some(sample_orbit(&p, m, a)?)
    } else {
        None
    };
    let deviation: Option<Vec<f64>> = other.as_ref().map(|o| {
        let sign = if main.states[0].dot(&o.states[0]) >= 0.0 { 1.0 } else { -1.0 };
        main.states.iter().zip(&o.states).map(|(u, v)| (u - v * sign).norm()).collect()
    });
    let period = p.period();
    let times: Vec<f64> = (0..a.samples).map(|k| period * k as f64 / a.samples as f64).collect();
    let norms: Vec<f64> = main.states.iter().map(|x| x.norm()).collect();
    let max_norm_dev = norms.iter().fold(0.0f64, |m, r| m.max((r - 1.0).abs()));

    let mut header = vec!["t", "X", "Y", "Z", "norm"];
    if deviation.is_some() {
        header.push("deviation");
    }
    let mut table = Table::new(&header);
    for (k, x) in main.states.iter().enumerate() {
        let mut row = vec![float(times[k]), float(x.x), float(x.y), float(x.z), float(norms[k])];
        if let Some(d) = &deviation {
            row.push(float(d[k]));
        }
        table.push(row);
    }
    let max_dev = deviation.as_ref().map(|d| d.iter().fold(0.0f64, |m, v| m.max(*v)));
    if let Some(d) = max_dev {
        eprintln!("max deviation between methods: {d:e}");
    }
    let format = a.out.format.unwrap_or(Format::Csv);
    emit(format, a.out.output.as_deref(), &table, || {
        let col = |i: usize| main.states.iter().map(|x| x[i]).collect::<Vec<_>>();
        let compare = other.as_ref().map(|o| json!({ "orbit": o.info, "max_deviation": max_dev }));
        envelope(
            "solve",
            a,
            json!({
                "period": period,
                "orbit": main.info,
                "max_norm_deviation": max_norm_dev,
                "samples": { "t": times, "x": col(0), "y": col(1), "z": col(2), "norm": norms, "deviation": deviation },
                "harmonics": harmonics(&main.states, p.omega, a.n_trunc),
                "compare": compare,
            }),
        )
    })
}

pub fn quasienergy(a: &QuasienergyArgs) -> Result<(), CliError> {
    let omegas = a.omega.values();
    if let Some(w) = omegas.iter().find(|w| !(**w > 0.0)) {
        return Err(CliError::Usage(format!("drive frequencies must be positive, got {w}")));
    }
    let base = DriveParams::new(a.omega0, a.f, a.g, omegas[0])?;
    if a.method == MethodArg::Fourier && !base.is_linear() {
        return Err(CliError::Usage("the Fourier method needs G = 0".into()));
    }
    let method = match a.method {
        MethodArg::Ode => Method::Ode { tol: a.tol },
        MethodArg::Fourier => Method::Fourier { n: a.n_trunc },
    };
    let sweep = sweep_branches(&base, &omegas, method);
    for &i in &sweep.warnings {
        eprintln!("warning: branch jump larger than omega/4 at omega = {}", omegas[i]);
    }
    let mut table = Table::new(&["omega", "epsilon", "epsilon_mod", "eps_g", "eps_d", "branch"]);
    let mut rows = Vec::with_capacity(omegas.len());
    let mut failed = 0;
    for (w, point) in omegas.iter().zip(&sweep.points) {
        match point {
            Ok(r) => {
                table.push(vec![
                    float(*w),
                    float(r.epsilon),
                    float(r.epsilon_mod),
                    float(r.eps_g),
                    float(r.eps_d),
                    r.branch.to_string(),
                ]);
                rows.push(serde_json::to_value(r)?);
            }
            Err(e) => {
                failed += 1;
                eprintln!("warning: omega = {w}: {e}");
                let mut row = vec![float(*w)];
                row.extend(std::iter::repeat_n("NaN".to_string(), 5));
                table.push(row);
                rows.push(json!({ "omega": w, "error": e.to_string() }));
            }
        }
    }
    let format = a.out.format.unwrap_or(Format::Csv);
    emit(format, a.out.output.as_deref(), &table, || {
        envelope(
            "quasienergy",
            a,
            json!({ "points": rows, "failed": failed, "jump_warnings": sweep.warnings }),
        )
    })?;
    let ok = omegas.len() - failed;
    if (ok as f64) < SWEEP_SUCCESS * omegas.len() as f64 {
        return Err(CliError::Domain(format!("only {ok} of {} sweep points succeeded", omegas.len())));
    }
    Ok(())
}

pub fn resonance(a: &ResonanceArgs) -> Result<(), CliError> {
    if a.n.contains(&0) {
        return Err(CliError::Usage("resonance indices start at 1".into()));
    }
    let fs = a.f.values();
    let mut table = Table::new(&["n", "F", "omega_res", "residual", "tri_x", "tri_y", "status"]);
    let mut rows = Vec::new();
    let mut ok = 0;
    for &n in &a.n {
        for (f, point) in fs.iter().zip(resonance_curve(n, &fs, a.omega0, a.n_trunc)) {
            let located = point.and_then(|r| {
                let tri = to_triangle(&DriveParams::linear(a.omega0, r.f, r.omega_res)?)?;
                Ok((r, tri))
            });
            match located {
                Ok((r, tri)) => {
                    ok += 1;
                    table.push(vec![
                        n.to_string(),
                        float(*f),
                        float(r.omega_res),
                        float(r.residual),
                        float(tri.x),
                        float(tri.y),
                        "ok".into(),
                    ]);
                    rows.push(json!({
                        "n": n, "f": f, "omega_res": r.omega_res, "residual": r.residual,
                        "truncation": r.truncation, "tri_x": tri.x, "tri_y": tri.y, "status": "ok",
                    }));
                }
                Err(e) => {
                    eprintln!("warning: n = {n}, F = {f}: {e}");
                    let nan = "NaN".to_string();
                    table.push(vec![n.to_string(), float(*f), nan.clone(), nan.clone(), nan.clone(), nan, e.to_string()]);
                    rows.push(json!({ "n": n, "f": f, "status": e.to_string() }));
                }
            }
        }
    }
    let format = a.out.format.unwrap_or(Format::Csv);
    emit(format, a.out.output.as_deref(), &table, || envelope("resonance", a, json!({ "points": rows })))?;
    if ok == 0 {
        return Err(CliError::Domain("no resonance was located".into()));
    }
    Ok(())
}

pub fn bloch_siegert(a: &BlochSiegertArgs) -> Result<(), CliError> {
    if a.n == 0 || a.max_m == 0 {
        return Err(CliError::Usage("--n and --max-m must be at least 1".into()));
    }
    let sigmas = bloch_siegert_coefficients(a.n, a.max_m, a.n_trunc)?;
    let truncation = a.n_trunc.unwrap_or(0).max(bloch_siegert_truncation(a.n, a.max_m));
    let mut table = Table::new(&["m", "numerator", "denominator", "value"]);
    let mut coefficients = Vec::with_capacity(sigmas.len());
    for (i, s) in sigmas.iter().enumerate() {
        let value = floquet_tls::algebra::rational_to_f64(s);
        let (num, den) = (s.numer().to_string(), s.denom().to_string());
        table.push(vec![(i + 1).to_string(), num.clone(), den.clone(), float(value)]);
        coefficients.push(json!({ "m": i + 1, "numerator": num, "denominator": den, "value": value }));
    }
    let format = a.out.format.unwrap_or(Format::Json);
    emit(format, a.out.output.as_deref(), &table, || {
        envelope("bloch-siegert", a, json!({ "truncation": truncation, "coefficients": coefficients }))
    })
}
