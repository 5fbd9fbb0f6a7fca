//! Resonance curves of the linearly driven system.
//!
//! A resonance is a zero of `det A^{(N)}(ω)` at fixed `F`, where the mean of
//! `Z` over the periodic orbit vanishes. This module locates them numerically,
//! expands them in exact rationals for small `F`, fits their large-`F`
//! asymptotics and maps parameters to the triangle of scaled variables.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::{pow, q, Ring};
use crate::dynamics::DriveParams;
use crate::error::{Error, Result};
use crate::fourier::{build_system, minors, solve, TridiagonalSystem, Z0Choice};
use crate::par;
use crate::scaled::Scaled;
use crate::series::RationalSeries;
use crate::specfun::bessel_j0_zero;

/// Default truncation for resonance searches.
pub const DEFAULT_TRUNCATION: usize = 50;
/// Absolute root tolerance in `ω`.
pub const ROOT_TOL: f64 = 1e-10;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Scaled variables `(ω̃₀, ω̃, F̃)` summing to one and their Cartesian
/// coordinates in the equilateral triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleCoords {
    pub x: f64,
    pub y: f64,
    pub omega0: f64,
    pub omega: f64,
    pub f: f64,
}

/// Maps a linear drive to the triangle.
pub fn to_triangle(params: &DriveParams) -> Result<TriangleCoords> {
    if !params.is_linear() {
        return Err(Error::InvalidParameter("triangle coordinates need G = 0".into()));
    }
    if !(params.omega0 > 0.0 && params.f > 0.0 && params.omega > 0.0) {
        return Err(Error::Domain { function: "to_triangle", detail: "parameters must be strictly positive".into() });
    }
    let s = params.omega0 + params.omega + params.f;
    let (w0, w, f) = (params.omega0 / s, params.omega / s, params.f / s);
    Ok(TriangleCoords { x: 0.5 * (w - w0), y: 0.5 * SQRT3 * f, omega0: w0, omega: w, f })
}

/// Reconstructs the scaled variables of an interior point.
pub fn from_triangle(x: f64, y: f64) -> Result<TriangleCoords> {
    let w0 = 0.5 - x - y / SQRT3;
    let w = 0.5 + x - y / SQRT3;
    let f = 2.0 * y / SQRT3;
    if !(w0 > 0.0 && w > 0.0 && f > 0.0) {
        return Err(Error::Domain { function: "from_triangle", detail: format!("({x}, {y}) is not inside the triangle") });
    }
    Ok(TriangleCoords { x, y, omega0: w0, omega: w, f })
}

impl TriangleCoords {
    /// Parameters with `ω̃₀ + ω̃ + F̃ = 1`.
    pub fn params(&self) -> Result<DriveParams> {
        DriveParams::linear(self.omega0, self.f, self.omega)
    }
}

/// A located zero of `det A^{(N)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonancePoint {
    pub n: usize,
    pub f: f64,
    pub omega_res: f64,
    pub truncation: usize,
    /// `|φ₁| / max(|A₁₁ φ₂|, |A₁₂ A₂₁ φ₃|)` at the root.
    pub residual: f64,
}

/// `F/j₀,ₙ + ω₀/(2n - 1)`, exact at both ends `ω₀ = 0` and `F = 0`.
pub fn resonance_interpolation(n: usize, f: f64, omega0: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("resonance index starts at 1".into()));
    }
    Ok(f / bessel_j0_zero(n)? + omega0 / (2 * n - 1) as f64)
}

struct DetEval {
    value: Scaled,
    residual: f64,
}

fn det_eval(omega0: f64, f: f64, omega: f64, n_trunc: usize) -> Result<DetEval> {
    let sys = build_system(&DriveParams::linear(omega0, f, omega)?, n_trunc)?.map(|&v| Scaled::new(v));
    let phi = minors(&sys);
    let a = sys.diag[0] * phi[1];
    let b = if sys.size() > 1 { sys.upper[0] * sys.lower[0] * phi[2] } else { Scaled::zero() };
    let size = if a.cmp_abs(b).is_ge() { a.abs() } else { b.abs() };
    let residual = if size.is_zero() { 0.0 } else { phi[0].abs().ratio(size) };
    Ok(DetEval { value: phi[0], residual })
}

/// The `n`-th resonance at every `F` in `f_grid`.
///
/// Each `F` is handled independently: the sign changes of `det A^{(N)}` are
/// counted while `ω` descends geometrically from above the first resonance,
/// and the `n`-th one is refined by a safeguarded secant iteration.
pub fn resonance_curve(n: usize, f_grid: &[f64], omega0: f64, n_trunc: usize) -> Vec<Result<ResonancePoint>> {
    par::map(f_grid, |&f| resonance_point(n, f, omega0, n_trunc))
}

/// The `n`-th resonance at a single `F`.
pub fn resonance_point(n: usize, f: f64, omega0: f64, n_trunc: usize) -> Result<ResonancePoint> {
    if n == 0 {
        return Err(Error::InvalidParameter("resonance index starts at 1".into()));
    }
    if !(f >= 0.0 && f.is_finite() && omega0 > 0.0 && omega0.is_finite()) {
        return Err(Error::InvalidParameter(format!("need F >= 0 and ω₀ > 0, got F = {f}, ω₀ = {omega0}")));
    }
    if n_trunc < 2 * n {
        return Err(Error::BracketNotFound { n, f, suggested_n: (4 * n).max(2 * n_trunc) });
    }
    let upper = 2.0 * (resonance_interpolation(1, f, omega0)?) + 0.5 * omega0;
    let lower = 0.5 * resonance_interpolation(n + 1, f, omega0)?;
    let step = 1.0 - 1.0 / (20.0 * (2 * n + 1) as f64);
    let not_found = || Error::BracketNotFound { n, f, suggested_n: 2 * n_trunc };

    let mut hi = upper;
    let mut f_hi = det_eval(omega0, f, hi, n_trunc)?.value;
    let mut count = 0;
    let (a, fa, b, fb) = loop {
        let lo = hi * step;
        if lo < lower {
            return Err(not_found());
        }
        let f_lo = det_eval(omega0, f, lo, n_trunc)?.value;
        if f_lo.is_zero() || f_lo.signum() != f_hi.signum() {
            count += 1;
            if count == n {
                break (lo, f_lo, hi, f_hi);
            }
        }
        hi = lo;
        f_hi = f_lo;
    };
    let root = refine(a, fa, b, fb, |w| det_eval(omega0, f, w, n_trunc).map(|d| d.value))?;
    let eval = det_eval(omega0, f, root, n_trunc)?;
    let sol = solve(&DriveParams::linear(omega0, f, root)?, n_trunc, Z0Choice::Phi1)?;
    if sol.tail_ratio() > 1e-8 {
        return Err(not_found());
    }
    Ok(ResonancePoint { n, f, omega_res: root, truncation: n_trunc, residual: eval.residual })
}

/// Illinois-modified regula falsi with a bisection fallback. Iterates until
/// the bracket is at the resolution of `f64` (at most [`ROOT_TOL`] wide).
fn refine(mut a: f64, mut fa: Scaled, mut b: f64, mut fb: Scaled, f: impl Fn(f64) -> Result<Scaled>) -> Result<f64> {
    if fa.is_zero() {
        return Ok(a);
    }
    if fb.is_zero() {
        return Ok(b);
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let width = (b - a).abs();
        if width <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        let t = fa.ratio(fa - fb);
        let mut c = a + t * (b - a);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(c > lo && c < hi) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc.is_zero() {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa = fa.shifted(-1);
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb = fb.shifted(-1);
            }
            side = 1;
        }
    }
    if (b - a).abs() > ROOT_TOL {
        return Err(Error::Unstable(format!("root bracket stalled at width {:e}", (b - a).abs())));
    }
    Ok(if fa.cmp_abs(fb).is_le() { a } else { b })
}

/// Coefficients `[c₁, c₋₁, c₋₃, c₋₅]` of the least-squares fit
/// `ω_res ≈ c₁F + c₋₁/F + c₋₃/F³ + c₋₅/F⁵` over the given curve.
pub fn large_f_fit(points: &[ResonancePoint]) -> Result<[f64; 4]> {
    if points.len() < 4 {
        return Err(Error::InvalidParameter("the fit needs at least four points".into()));
    }
    let fmax = points.iter().fold(0f64, |m, p| m.max(p.f));
    let fmin = points.iter().fold(f64::INFINITY, |m, p| m.min(p.f));
    // Columns scaled to unit size on the grid.
    let scales = [fmax, 1.0 / fmin, fmin.powi(-3), fmin.powi(-5)];
    let a = DMatrix::from_fn(points.len(), 4, |i, j| {
        let f = points[i].f;
        let v = match j {
            0 => f,
            1 => 1.0 / f,
            2 => f.powi(-3),
            _ => f.powi(-5),
        };
        v / scales[j] / points[i].omega_res
    });
    let rhs = DVector::from_element(points.len(), 1.0);
    let sol = a.svd(true, true).solve(&rhs, 1e-15).map_err(|e| Error::Unstable(e.to_string()))?;
    Ok([sol[0] / scales[0], sol[1] / scales[1], sol[2] / scales[2], sol[3] / scales[3]])
}

/// Default large-`F` grid: `F = 10, 12, …, 100`.
pub fn large_f_grid() -> Vec<f64> {
    (0..=45).map(|k| 10.0 + 2.0 * k as f64).collect()
}

// Bloch–Siegert coefficients in exact arithmetic, at ω₀ = 1 and u = F².

fn rational_det_coefficient(n: usize, sigmas: &[BigRational], trial: &BigRational, n_trunc: usize) -> BigRational {
    let m = sigmas.len() + 1;
    let prec = m as i32 + 1;
    let mut coeffs = vec![q(1, (2 * n - 1) as i64)];
    coeffs.extend(sigmas.iter().cloned());
    coeffs.push(trial.clone());
    let omega = RationalSeries::new(0, coeffs, Some(prec));
    let u = RationalSeries::var(prec);
    let quarter = RationalSeries::constant(q(1, 4));
    let diag = (1..=n_trunc)
        .map(|k| {
            let kk = RationalSeries::from_int(k as i64);
            if k % 2 == 1 {
                kk.clone() * kk * omega.clone() * omega.clone() - RationalSeries::one()
            } else {
                -(kk * omega.clone())
            }
        })
        .collect();
    // A_{k,k+1} A_{k+1,k} = -c F² ω / 4 with c the odd one of k, k + 1.
    let upper = (1..n_trunc)
        .map(|k| {
            let c = if k % 2 == 1 { k } else { k + 1 };
            -(RationalSeries::from_int(c as i64) * u.clone() * omega.clone() * quarter.clone())
        })
        .collect();
    let lower = vec![RationalSeries::one(); n_trunc - 1];
    let sys = TridiagonalSystem { diag, upper, lower };
    minors(&sys)[0].coeff(m as i32).expect("coefficient within precision")
}

fn bloch_siegert_at(n: usize, max_m: usize, n_trunc: usize) -> Result<Vec<BigRational>> {
    let mut sigmas: Vec<BigRational> = Vec::with_capacity(max_m);
    for _ in 0..max_m {
        let d0 = rational_det_coefficient(n, &sigmas, &BigRational::zero(), n_trunc);
        let d1 = rational_det_coefficient(n, &sigmas, &BigRational::one(), n_trunc);
        let slope = d1 - d0.clone();
        if slope.is_zero() {
            return Err(Error::Unstable(format!("order {} of the resonance series is degenerate", sigmas.len() + 1)));
        }
        sigmas.push(-d0 / slope);
    }
    Ok(sigmas)
}

/// Smallest truncation used for the exact series.
pub fn bloch_siegert_truncation(n: usize, max_m: usize) -> usize {
    2 * max_m + 2 * n + 4
}

/// Exact `σ₂, σ₄, …, σ_{2·max_m}` of
/// `ω_res^{(n)} = ω₀/(2n-1) + Σ_m σ_{2m} ω₀^{1-2m} F^{2m}`.
///
/// The result at truncation `n_trunc` (raised to the minimum if smaller) is
/// confirmed at `n_trunc + 4`.
pub fn bloch_siegert_coefficients(n: usize, max_m: usize, n_trunc: Option<usize>) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Err(Error::InvalidParameter("resonance index starts at 1".into()));
    }
    let base = n_trunc.unwrap_or(0).max(bloch_siegert_truncation(n, max_m));
    let a = bloch_siegert_at(n, max_m, base)?;
    let b = bloch_siegert_at(n, max_m, base + 4)?;
    if a != b {
        return Err(Error::Unstable(format!("coefficients differ between N = {base} and N = {}; use a larger truncation", base + 4)));
    }
    Ok(a)
}

/// `ω₀/(2n-1) + Σ σ_{2m} ω₀^{1-2m} F^{2m}` in floating point.
pub fn bloch_siegert_sum(n: usize, sigmas: &[BigRational], f: f64, omega0: f64) -> f64 {
    let mut w = omega0 / (2 * n - 1) as f64;
    for (i, s) in sigmas.iter().enumerate() {
        let m = (i + 1) as i32;
        w += crate::algebra::rational_to_f64(s) * omega0.powi(1 - 2 * m) * f.powi(2 * m);
    }
    w
}

/// The closed forms of `σ₂⁽ⁿ⁾` (n > 1), `σ₄⁽ⁿ⁾` (n > 1) and `σ₆⁽ⁿ⁾` (n > 2).
pub fn sigma_closed_form(n: usize, m: usize) -> Result<BigRational> {
    let min = match m {
        1 | 2 => 2,
        3 => 3,
        _ => return Err(Error::InvalidParameter(format!("no closed form for m = {m}"))),
    };
    if n < min {
        return Err(Error::Domain { function: "sigma_closed_form", detail: format!("needs n >= {min} for m = {m}") });
    }
    let big = |v: i64| BigRational::from_integer(BigInt::from(v));
    let ni = n as i64;
    let (a, nm1, n1) = (big(2 * ni - 1), big(ni - 1), big(ni));
    let two = big(2);
    Ok(match m {
        1 => a / (pow(&two, 4) * nm1 * n1),
        2 => {
            let num = pow(&a, 3) * (big(3) * a.clone() * a - big(7));
            -num / (pow(&two, 12) * pow(&nm1, 3) * pow(&n1, 3))
        }
        _ => {
            let a2 = a.clone() * a.clone();
            let poly = big(5) * pow(&a2, 3) - big(57) * pow(&a2, 2) + big(187) * a2 - big(199);
            pow(&a, 5) * poly / (pow(&two, 20) * big(ni - 2) * pow(&nm1, 5) * pow(&n1, 5) * big(ni + 1))
        }
    })
}

fn ceil_half(k: i64) -> i64 {
    (k + 1) / 2
}

/// Exponent of the `j`-th factor of the general denominator,
/// `2⌊k / |2j - 2⌈k/2⌉ - 1|⌋ - 1`.
pub fn general_exponent(k: usize, j: usize) -> i64 {
    let (k, j) = (k as i64, j as i64);
    let d = (2 * j - 2 * ceil_half(k) - 1).abs();
    2 * (k / d) - 1
}

/// `N(k, n) = ∏_{j=1}^{2⌈k/2⌉} (2n - 2⌈k/2⌉ + 2(j-1))^{n(k,j)}`.
pub fn general_denominator(k: usize, n: usize) -> BigRational {
    let c = ceil_half(k as i64);
    let mut acc = BigRational::one();
    for j in 1..=(2 * c) as usize {
        let base = BigRational::from_integer(BigInt::from(2 * n as i64 - 2 * c + 2 * (j as i64 - 1)));
        let e = general_exponent(k, j);
        let p = pow(&base, e.unsigned_abs() as u32);
        acc = if e >= 0 { acc * p } else { acc / p };
    }
    acc
}

/// Degree `z(k) = ½ Σ_j n(k, j) - k` of the numerator polynomial in `n(n-1)`.
pub fn general_numerator_degree(k: usize) -> i64 {
    let c = ceil_half(k as i64) as usize;
    let s: i64 = (1..=2 * c).map(|j| general_exponent(k, j)).sum();
    s / 2 - k as i64
}

/// Outcome of testing the general structure of `σ_{2k}⁽ⁿ⁾` against the
/// exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralFormCheck {
    pub k: usize,
    /// `(n, Z(k, n))` with `Z = σ N / (2n-1)^{2k-1}`.
    pub samples: Vec<(usize, BigRational)>,
    /// Coefficients `A_μ` of `Z` as a polynomial in `n(n-1)`, fitted to the
    /// first `z(k) + 1` samples.
    pub coefficients: Vec<BigRational>,
    /// Samples beyond the fit that the polynomial does not reproduce.
    pub mismatches: Vec<usize>,
}

impl GeneralFormCheck {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Computes `σ_{2k}⁽ⁿ⁾` exactly for `z(k) + 1 + extra` admissible `n` and
/// checks that `σ N(k,n) / (2n-1)^{2k-1}` is a polynomial of degree `z(k)`
/// in `n(n-1)`.
pub fn general_form_check(k: usize, extra: usize) -> Result<GeneralFormCheck> {
    if k == 0 {
        return Err(Error::InvalidParameter("k starts at 1".into()));
    }
    let z = general_numerator_degree(k);
    if z < 0 {
        return Err(Error::Unstable(format!("negative numerator degree for k = {k}")));
    }
    let first = ceil_half(k as i64) as usize + 1;
    let ns: Vec<usize> = (first..first + z as usize + 1 + extra).collect();
    let sigmas = par::map(&ns, |&n| bloch_siegert_coefficients(n, k, None).map(|s| s[k - 1].clone()));
    let mut samples = Vec::with_capacity(ns.len());
    for (&n, s) in ns.iter().zip(sigmas) {
        let s = s?;
        let odd = BigRational::from_integer(BigInt::from(2 * n as i64 - 1));
        samples.push((n, s * general_denominator(k, n) / pow(&odd, (2 * k - 1) as u32)));
    }
    let fit = z as usize + 1;
    let xs: Vec<BigRational> = samples.iter().map(|(n, _)| q((n * (n - 1)) as i64, 1)).collect();
    let coefficients = newton_to_monomial(&xs[..fit], &samples[..fit].iter().map(|s| s.1.clone()).collect::<Vec<_>>());
    let mismatches = (fit..samples.len())
        .filter(|&i| eval_poly(&coefficients, &xs[i]) != samples[i].1)
        .map(|i| samples[i].0)
        .collect();
    Ok(GeneralFormCheck { k, samples, coefficients, mismatches })
}

fn eval_poly(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter().rev().fold(BigRational::zero(), |acc, a| acc * x.clone() + a.clone())
}

/// Interpolating polynomial through `(x_i, y_i)` in monomial form.
fn newton_to_monomial(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    let mut poly = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // poly = poly * (x - x_i) + dd[i]
        let mut next = vec![BigRational::zero(); n];
        for (d, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if d + 1 < n {
                next[d + 1] = next[d + 1].clone() + c.clone();
            }
            next[d] = next[d].clone() - c.clone() * xs[i].clone();
        }
        next[0] = next[0].clone() + dd[i].clone();
        poly = next;
    }
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    poly
}
