//! Quasienergies, Floquet states and gradients from classical periodic orbits.
//!
//! A unit periodic orbit `X(t)` of `dX/dt = h × X` determines a Floquet
//! solution of the spin-½ problem through the spinor
//! `φ = (R + Z, X + iY) / sqrt(2R(R + Z))` and the phase function
//! `χ = ½(h₃ + (h₁X + h₂Y)/(R + Z))`. The quasienergy is the time average of
//! `χ`. Near the south pole `Z = -R` the antipodal orbit is used instead.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::dynamics::{periodic_orbit, BlochVector, DriveField, DriveParams, PeriodicOrbit, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::fourier::{self, Z0Choice};
use crate::par;

/// Initial number of quadrature nodes.
pub const INITIAL_SAMPLES: usize = 1 << 10;
/// Largest number of quadrature nodes tried.
pub const MAX_SAMPLES: usize = 1 << 18;
/// Convergence threshold for the averages under grid doubling.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// The formula for `χ` is rejected when `min(1 + Z/R)` falls to this value.
pub const SOUTH_POLE_GAP: f64 = 1e-6;
/// Below this gap the better conditioned of `±X` is used.
pub const SWITCH_GAP: f64 = 1e-2;
/// Relative trimming threshold for trigonometric coefficients.
pub const TRIM: f64 = 1e-14;

/// Real trigonometric polynomial
/// `a0 + Σ_k (cos_k cos kωt + sin_k sin kωt)` in absolute time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigSeries {
    pub omega: f64,
    pub a0: f64,
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
}

impl TrigSeries {
    /// Interpolates `m` uniform samples taken at `t0 + kT/m`, keeping
    /// `harmonics` harmonics (at most `(m - 1) / 2`).
    pub fn from_samples(omega: f64, t0: f64, samples: &[f64], harmonics: usize) -> Self {
        let m = samples.len();
        let spec = dft(samples);
        let h = harmonics.min((m.max(1) - 1) / 2);
        let mut cos_coeffs = Vec::with_capacity(h);
        let mut sin_coeffs = Vec::with_capacity(h);
        for k in 1..=h {
            let c = spec[k] * Complex64::from_polar(1.0, -(k as f64) * omega * t0);
            cos_coeffs.push(2.0 * c.re);
            sin_coeffs.push(-2.0 * c.im);
        }
        let mut s = TrigSeries { omega, a0: spec.first().map_or(0.0, |c| c.re), cos_coeffs, sin_coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let max = self
            .cos_coeffs
            .iter()
            .chain(&self.sin_coeffs)
            .fold(self.a0.abs(), |m, v| m.max(v.abs()));
        let cut = TRIM * max;
        for v in self.cos_coeffs.iter_mut().chain(self.sin_coeffs.iter_mut()) {
            if v.abs() < cut {
                *v = 0.0;
            }
        }
        while self.cos_coeffs.last() == Some(&0.0) && self.sin_coeffs.last() == Some(&0.0) {
            self.cos_coeffs.pop();
            self.sin_coeffs.pop();
        }
    }

    pub fn harmonics(&self) -> usize {
        self.cos_coeffs.len()
    }

    /// `(cos_k, sin_k)`, zero beyond the stored range; `k = 0` gives `(a0, 0)`.
    pub fn coeff(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            return (self.a0, 0.0);
        }
        match (self.cos_coeffs.get(k - 1), self.sin_coeffs.get(k - 1)) {
            (Some(&c), Some(&s)) => (c, s),
            _ => (0.0, 0.0),
        }
    }

    /// Largest `|cos_k|, |sin_k|` over `k >= 1`.
    pub fn max_harmonic(&self) -> f64 {
        self.cos_coeffs.iter().chain(&self.sin_coeffs).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.a0;
        for (i, (&c, &s)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let (sn, cs) = ((i + 1) as f64 * self.omega * t).sin_cos();
            v += c * cs + s * sn;
        }
        v
    }

    /// The zero-mean antiderivative of the oscillating part.
    pub fn antiderivative(&self, t: f64) -> f64 {
        let mut v = 0.0;
        for (i, (&c, &s)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let w = (i + 1) as f64 * self.omega;
            let (sn, cs) = (w * t).sin_cos();
            v += (c * sn - s * cs) / w;
        }
        v
    }
}

fn dft(samples: &[f64]) -> Vec<Complex64> {
    let m = samples.len();
    if m == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Spectral time derivative of uniformly sampled periodic complex data.
fn spectral_derivative(values: &[Complex64], omega: f64) -> Vec<Complex64> {
    let m = values.len();
    let mut planner = FftPlanner::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(m).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let n = if k < m / 2 {
            k as f64
        } else if k > m / 2 {
            k as f64 - m as f64
        } else {
            0.0
        };
        *c *= Complex64::new(0.0, n * omega / m as f64);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    buf
}

fn chi(x: &BlochVector, h: &BlochVector) -> f64 {
    let r = x.norm();
    0.5 * (h.z + (h.x * x.x + h.y * x.y) / (r + x.z))
}

fn chi_dynamical(x: &BlochVector, h: &BlochVector) -> f64 {
    0.5 * h.dot(x) / x.norm()
}

fn chi_geometric(x: &BlochVector, h: &BlochVector) -> f64 {
    let v = h.cross(x);
    let r = x.norm();
    (x.x * v.y - x.y * v.x) / (2.0 * r * (r + x.z))
}

/// `min(1 + Z/R)` and `min(1 - Z/R)` over the samples.
fn pole_gaps(xs: &[BlochVector]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::INFINITY), |(n, s), x| {
        let c = x.z / x.norm();
        (n.min(1.0 + c), s.min(1.0 - c))
    })
}

fn sample_times(start: f64, omega: f64, m: usize) -> Vec<f64> {
    let period = TAU / omega;
    (0..m).map(|k| start + period * k as f64 / m as f64).collect()
}

/// The Fourier series of `χ` along `orbit`.
pub fn chi_series<O, F>(orbit: &O, field: &F, harmonics: usize) -> Result<TrigSeries>
where
    O: PeriodicOrbit + ?Sized,
    F: DriveField + ?Sized,
{
    let m = (2 * harmonics + 2).max(INITIAL_SAMPLES).next_power_of_two();
    let xs = orbit.sample(m)?;
    let (gap, _) = pole_gaps(&xs);
    if gap <= SOUTH_POLE_GAP {
        return Err(Error::SouthPole { gap });
    }
    let times = sample_times(orbit.start(), orbit.omega(), m);
    let values: Vec<f64> = xs.iter().zip(&times).map(|(x, &t)| chi(x, &field.field_at(t))).collect();
    Ok(TrigSeries::from_samples(orbit.omega(), orbit.start(), &values, harmonics))
}

/// Which solver produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Ode,
    Fourier,
    ClosedForm,
}

/// Quasienergy with its geometric/dynamical split and the orbit moments that
/// give the parameter gradients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasienergyResult {
    pub omega: f64,
    pub epsilon: f64,
    pub epsilon_mod: f64,
    pub branch: i64,
    pub eps_g: f64,
    pub eps_d: f64,
    /// Time average of `Z/R`.
    pub mean_z: f64,
    /// `cos ωt` coefficient of `X/R`.
    pub x_cos: f64,
    /// `sin ωt` coefficient of `Y/R`.
    pub y_sin: f64,
    /// Whether the antipodal orbit was used for `χ`.
    pub antipodal: bool,
    pub samples: usize,
    pub method: MethodTag,
}

impl QuasienergyResult {
    /// Moves `epsilon` to another representative, keeping the split
    /// consistent by shifting the geometric part.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.eps_g += epsilon - self.epsilon;
        self.epsilon = epsilon;
        self.branch = (epsilon / self.omega).floor() as i64;
        self.epsilon_mod = reduce(epsilon, self.omega);
        self
    }

    pub fn gradients(&self) -> Gradients {
        Gradients {
            d_omega0: 0.5 * self.mean_z,
            d_f: 0.25 * self.x_cos,
            d_g: 0.25 * self.y_sin,
            d_omega: self.eps_g / self.omega,
        }
    }
}

/// `x mod p` in `[0, p)`.
pub fn reduce(x: f64, p: f64) -> f64 {
    let r = x.rem_euclid(p);
    if r >= p {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Averages {
    chi: f64,
    eps_d: f64,
    eps_g: f64,
    mean_z: f64,
    x_cos: f64,
    y_sin: f64,
}

fn averages<F: DriveField + ?Sized>(xs: &[BlochVector], times: &[f64], field: &F, antipodal: bool) -> Averages {
    let m = xs.len() as f64;
    let w = field.omega();
    let mut a = Averages::default();
    for (x, &t) in xs.iter().zip(times) {
        let h = field.field_at(t);
        let u = x / x.norm();
        let y = if antipodal { -u } else { u };
        a.chi += chi(&y, &h);
        a.eps_g += chi_geometric(&y, &h);
        a.eps_d += chi_dynamical(&u, &h);
        a.mean_z += u.z;
        let (s, c) = (w * t).sin_cos();
        a.x_cos += 2.0 * u.x * c;
        a.y_sin += 2.0 * u.y * s;
    }
    a.chi /= m;
    a.eps_g /= m;
    a.eps_d /= m;
    a.mean_z /= m;
    a.x_cos /= m;
    a.y_sin /= m;
    a
}

/// Quasienergy of the Floquet solution attached to a periodic orbit.
///
/// The reported `epsilon` is the raw average of `χ` (negated for the
/// antipodal orbit), which depends continuously and homogeneously on the
/// parameters.
pub fn quasienergy_classical<O, F>(orbit: &O, field: &F) -> Result<QuasienergyResult>
where
    O: PeriodicOrbit + ?Sized,
    F: DriveField + ?Sized,
{
    let omega = orbit.omega();
    let mut m = INITIAL_SAMPLES;
    let xs = orbit.sample(m)?;
    let (north, south) = pole_gaps(&xs);
    let antipodal = north <= SOUTH_POLE_GAP || (north < SWITCH_GAP && south > north);
    if antipodal && south <= SOUTH_POLE_GAP {
        return Err(Error::SouthPole { gap: north.min(south) });
    }
    let mut prev = averages(&xs, &sample_times(orbit.start(), omega, m), field, antipodal);
    loop {
        m *= 2;
        if m > MAX_SAMPLES {
            return Err(Error::Quadrature { change: f64::NAN });
        }
        let xs = orbit.sample(m)?;
        let cur = averages(&xs, &sample_times(orbit.start(), omega, m), field, antipodal);
        let change = (cur.chi - prev.chi).abs().max((cur.eps_d - prev.eps_d).abs());
        prev = cur;
        if change < QUADRATURE_TOL {
            break;
        }
        if m == MAX_SAMPLES {
            return Err(Error::Quadrature { change });
        }
    }
    let a = prev;
    let (epsilon, eps_g) = if antipodal { (-a.chi, -a.eps_g) } else { (a.chi, a.eps_g) };
    Ok(QuasienergyResult {
        omega,
        epsilon,
        epsilon_mod: reduce(epsilon, omega),
        branch: (epsilon / omega).floor() as i64,
        eps_g,
        eps_d: a.eps_d,
        mean_z: a.mean_z,
        x_cos: a.x_cos,
        y_sin: a.y_sin,
        antipodal,
        samples: m,
        method: MethodTag::Ode,
    })
}

/// `(ε_g, ε_d)` for the orbit.
pub fn split_geometric_dynamic<O, F>(orbit: &O, field: &F) -> Result<(f64, f64)>
where
    O: PeriodicOrbit + ?Sized,
    F: DriveField + ?Sized,
{
    let r = quasienergy_classical(orbit, field)?;
    Ok((r.eps_g, r.eps_d))
}

/// Partial derivatives of the quasienergy with respect to `(ω₀, F, G, ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gradients {
    pub d_omega0: f64,
    pub d_f: f64,
    pub d_g: f64,
    pub d_omega: f64,
}

/// `∂ε/∂ω₀ = mean(Z)/2` for a unit orbit.
pub fn grad_omega0<O: PeriodicOrbit + ?Sized>(orbit: &O) -> Result<f64> {
    let xs = orbit.sample(INITIAL_SAMPLES)?;
    Ok(0.5 * xs.iter().map(|x| x.z / x.norm()).sum::<f64>() / xs.len() as f64)
}

/// `(∂ε/∂F, ∂ε/∂G) = (x_c/4, y_s/4)` for a unit orbit.
pub fn grad_fg<O: PeriodicOrbit + ?Sized>(orbit: &O) -> Result<(f64, f64)> {
    let m = INITIAL_SAMPLES;
    let xs = orbit.sample(m)?;
    let times = sample_times(orbit.start(), orbit.omega(), m);
    let (mut xc, mut ys) = (0.0, 0.0);
    for (x, &t) in xs.iter().zip(&times) {
        let (s, c) = (orbit.omega() * t).sin_cos();
        xc += x.x / x.norm() * c;
        ys += x.y / x.norm() * s;
    }
    Ok((0.5 * xc / m as f64, 0.5 * ys / m as f64))
}

/// `∂ε/∂ω = ε_g/ω`.
pub fn grad_omega(result: &QuasienergyResult) -> f64 {
    result.eps_g / result.omega
}

/// Time-averaged transition probability `½(1 - 4d²)` for `d = ∂ε/∂ω₀`.
pub fn shirley_probability(d: f64) -> Result<f64> {
    if !(d.abs() <= 0.5 + 1e-12) {
        return Err(Error::Domain { function: "shirley_probability", detail: format!("|d| = {} exceeds 1/2", d.abs()) });
    }
    Ok((0.5 * (1.0 - 4.0 * d * d)).max(0.0))
}

/// `|ε - (ω₀∂ε/∂ω₀ + F∂ε/∂F + G∂ε/∂G + ω∂ε/∂ω)|`.
pub fn euler_residual(params: &DriveParams, g: &Gradients, epsilon: f64) -> f64 {
    (epsilon - (params.omega0 * g.d_omega0 + params.f * g.d_f + params.g * g.d_g + params.omega * g.d_omega)).abs()
}

/// Floquet function `u(t)` sampled over one period.
#[derive(Debug, Clone, Serialize)]
pub struct FloquetState {
    pub omega: f64,
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// Components `(u₁, u₂)` at each time.
    pub u: Vec<[Complex64; 2]>,
    /// Largest pointwise `|H u - i du/dt - ε u|`.
    pub residual: f64,
}

impl FloquetState {
    /// `ψ(t) = e^{-iεt} u(t)` at the `k`-th sample.
    pub fn psi(&self, k: usize) -> [Complex64; 2] {
        let ph = Complex64::from_polar(1.0, -self.epsilon * self.times[k]);
        [ph * self.u[k][0], ph * self.u[k][1]]
    }
}

fn hamiltonian_apply(h: &BlochVector, v: &[Complex64; 2]) -> [Complex64; 2] {
    let a = Complex64::new(h.z, 0.0);
    let b = Complex64::new(h.x, -h.y);
    [0.5 * (a * v[0] + b * v[1]), 0.5 * (b.conj() * v[0] - a * v[1])]
}

/// Builds `u(t)` on `m` uniform samples (a power of two) and measures the
/// Schrödinger residual by spectral differentiation.
pub fn floquet_state<O, F>(orbit: &O, field: &F, m: usize) -> Result<FloquetState>
where
    O: PeriodicOrbit + ?Sized,
    F: DriveField + ?Sized,
{
    let omega = orbit.omega();
    let m = m.max(64).next_power_of_two();
    let xs = orbit.sample(m)?;
    let (north, south) = pole_gaps(&xs);
    let antipodal = north <= SOUTH_POLE_GAP || (north < SWITCH_GAP && south > north);
    if antipodal && south <= SOUTH_POLE_GAP {
        return Err(Error::SouthPole { gap: north.min(south) });
    }
    let sgn = if antipodal { -1.0 } else { 1.0 };
    let start = orbit.start();
    let times = sample_times(start, omega, m);
    let ys: Vec<BlochVector> = xs.iter().map(|x| sgn * x / x.norm()).collect();
    let chis: Vec<f64> = ys.iter().zip(&times).map(|(y, &t)| chi(y, &field.field_at(t))).collect();
    let series = TrigSeries::from_samples(omega, start, &chis, m / 2 - 1);
    let a0 = series.a0;
    let base = series.antiderivative(start);
    let mut u: Vec<[Complex64; 2]> = ys
        .iter()
        .zip(&times)
        .map(|(y, &t)| {
            let norm = (2.0 * (1.0 + y.z)).sqrt();
            let phi = [Complex64::new(1.0 + y.z, 0.0) / norm, Complex64::new(y.x, y.y) / norm];
            let ph = Complex64::from_polar(1.0, -(series.antiderivative(t) - base));
            [ph * phi[0], ph * phi[1]]
        })
        .collect();
    let epsilon = if antipodal {
        // J v = (-v₂*, v₁*) maps solutions to solutions with negated Bloch
        // vector and conjugated Floquet phase.
        for v in u.iter_mut() {
            *v = [-v[1].conj(), v[0].conj()];
        }
        -a0
    } else {
        a0
    };
    let d0: Vec<Complex64> = u.iter().map(|v| v[0]).collect();
    let d1: Vec<Complex64> = u.iter().map(|v| v[1]).collect();
    let (du0, du1) = (spectral_derivative(&d0, omega), spectral_derivative(&d1, omega));
    let i = Complex64::i();
    let residual = (0..m)
        .map(|k| {
            let hu = hamiltonian_apply(&field.field_at(times[k]), &u[k]);
            let r0 = hu[0] - i * du0[k] - epsilon * u[k][0];
            let r1 = hu[1] - i * du1[k] - epsilon * u[k][1];
            (r0.norm_sqr() + r1.norm_sqr()).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(FloquetState { omega, epsilon, times, u, residual })
}

/// How to obtain the periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Monodromy axis and integration with the given tolerance.
    Ode { tol: f64 },
    /// Tridiagonal Fourier solution starting at truncation `n` (linear drive only).
    Fourier { n: usize },
}

impl Default for Method {
    fn default() -> Self {
        Method::Ode { tol: DEFAULT_TOL }
    }
}

/// Quasienergy at one parameter point.
pub fn quasienergy(params: &DriveParams, method: Method) -> Result<QuasienergyResult> {
    match method {
        Method::Ode { tol } => {
            let orbit = periodic_orbit(params, 0.0, tol)?;
            quasienergy_classical(&orbit, params)
        }
        Method::Fourier { n } => {
            let orbit = fourier::solve_auto(params, n, Z0Choice::Phi1)?.normalized()?;
            let mut r = quasienergy_classical(&orbit, params)?;
            r.method = MethodTag::Fourier;
            Ok(r)
        }
    }
}

/// A continued sweep over `ω`.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub omegas: Vec<f64>,
    pub points: Vec<Result<QuasienergyResult>>,
    /// Indices where the smallest available jump exceeded `ω/4`.
    pub warnings: Vec<usize>,
}

/// Computes the quasienergy at every `ω` (in parallel) and then picks
/// representatives forming a continuous branch.
pub fn sweep_branches(base: &DriveParams, omegas: &[f64], method: Method) -> Sweep {
    let points = par::map(omegas, |&w| {
        let p = DriveParams::new(base.omega0, base.f, base.g, w)?;
        quasienergy(&p, method)
    });
    continue_branch(omegas, points)
}

/// Continuation pass: each point takes the representative in
/// `{±ε_mod + kω}` nearest to the previous accepted value.
pub fn continue_branch(omegas: &[f64], points: Vec<Result<QuasienergyResult>>) -> Sweep {
    let mut prev: Option<f64> = None;
    let mut warnings = Vec::new();
    let points: Vec<_> = points
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let r = p?;
            let Some(v) = prev else {
                prev = Some(r.epsilon);
                return Ok(r);
            };
            let (best, jump) = nearest_representative(v, r.epsilon_mod, r.omega);
            if jump > 0.25 * r.omega {
                warnings.push(i);
            }
            prev = Some(best);
            Ok(r.with_epsilon(best))
        })
        .collect();
    Sweep { omegas: omegas.to_vec(), points, warnings }
}

/// The element of `{±e + kω}` closest to `target`, with the distance.
pub fn nearest_representative(target: f64, e: f64, omega: f64) -> (f64, f64) {
    let k0 = (target / omega).floor();
    let mut best = (f64::NAN, f64::INFINITY);
    for s in [1.0, -1.0] {
        for j in -2..=2 {
            let c = s * e + (k0 + j as f64) * omega;
            let d = (c - target).abs();
            if d < best.1 {
                best = (c, d);
            }
        }
    }
    best
}
