//! Asymptotic expansions of the periodic orbit and the quasienergy for the
//! linearly polarized drive: weak drive (small `F`), weak static field
//! (small `ω₀`, the pendulum solution), slow drive (small `ω`), fast drive
//! (large `ω`) and strong static field (large `ω₀`).
//!
//! The weak-drive and fast-drive series are generic over the coefficient
//! field, so the same code yields floating-point values, exact rationals at
//! rational parameters, and Laurent series in `1/ω` used to cross-check the
//! two expansions against each other.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{pow, q, Field, Ring};
use crate::dynamics::{BlochVector, DriveParams};
use crate::error::{Error, Result};
use crate::poisson::{Poisson, Trig};
use crate::series::Series;
use crate::specfun::{bessel_j, elliptic_e, elliptic_k};

/// Coefficient types usable in the weak-drive recursion.
pub trait Coefficient: Field {
    /// Whether a denominator is numerically zero relative to `scale`.
    fn negligible(&self, scale: &Self) -> bool;
    /// Best-effort conversion for error messages.
    fn approx(&self) -> f64;
}

impl Coefficient for f64 {
    fn negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-13 * scale.abs()
    }
    fn approx(&self) -> f64 {
        *self
    }
}

impl Coefficient for BigRational {
    fn negligible(&self, _: &Self) -> bool {
        self.is_zero()
    }
    fn approx(&self) -> f64 {
        crate::algebra::rational_to_f64(self)
    }
}

impl Coefficient for Series<BigRational> {
    fn negligible(&self, _: &Self) -> bool {
        Ring::is_zero(self)
    }
    fn approx(&self) -> f64 {
        0.0
    }
}

/// Fourier–Taylor coefficients of the weak-drive orbit
///
/// `X = Σ_n F^{2n+1} Σ_{m≤n} R[n][m] cos(2m+1)τ`,
/// `Y = (ω/ω₀) Σ_n F^{2n+1} Σ_{m≤n} (2m+1) R[n][m] sin(2m+1)τ`,
/// `Z = Σ_n F^{2n} Σ_{m≤n} S[n][m] cos 2mτ`, with `τ = ωt` and `S[0][0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTaylor<T> {
    pub omega: T,
    pub omega0: T,
    pub r: Vec<Vec<T>>,
    pub s: Vec<Vec<T>>,
}

/// Recursion for the weak-drive orbit up to `F^{2 max_order + 1}`.
pub fn ft_solution_small_f<T: Coefficient>(max_order: usize, omega: &T, omega0: &T) -> Result<FourierTaylor<T>> {
    if omega0.is_zero() {
        return Err(Error::Domain { function: "ft_solution_small_f", detail: "omega0 must be nonzero".into() });
    }
    let w2 = omega.clone() * omega.clone();
    let w02 = omega0.clone() * omega0.clone();
    let dens: Vec<T> = (0..=max_order)
        .map(|m| {
            let k = T::from_int((2 * m + 1) as i64);
            let den = k.clone() * k.clone() * w2.clone() - w02.clone();
            let scale = k.clone() * k * w2.clone() + w02.clone();
            if den.negligible(&scale) {
                Err(Error::SmallDenominator { harmonic: 2 * m + 1, value: den.approx() })
            } else {
                Ok(den)
            }
        })
        .collect::<Result<_>>()?;

    let mut r: Vec<Vec<T>> = vec![vec![-(omega0.clone() / dens[0].clone())]];
    let mut s: Vec<Vec<T>> = vec![vec![T::one()]];
    for n in 1..=max_order {
        let prev = &r[n - 1];
        let rp = |m: usize| prev.get(m).cloned().unwrap_or_else(T::zero);
        let mut sn = vec![T::zero()];
        for m in 1..=n {
            let num = T::from_int((2 * m + 1) as i64) * rp(m) + T::from_int((2 * m - 1) as i64) * rp(m - 1);
            sn.push(-(num / (T::from_int(4 * m as i64) * omega0.clone())));
        }
        let rn = (0..=n)
            .map(|m| {
                let sum = sn[m].clone() + sn.get(m + 1).cloned().unwrap_or_else(T::zero);
                -(omega0.clone() * sum / (T::from_int(2) * dens[m].clone()))
            })
            .collect();
        s.push(sn);
        r.push(rn);
    }
    Ok(FourierTaylor { omega: omega.clone(), omega0: omega0.clone(), r, s })
}

impl<T: Coefficient> FourierTaylor<T> {
    pub fn max_order(&self) -> usize {
        self.r.len() - 1
    }

    /// The orbit as Poisson series in `F`, exact through `F^{2 max_order + 1}`.
    pub fn trajectory(&self) -> [Poisson<T>; 3] {
        let order = 2 * self.max_order() + 1;
        let mut x = Poisson::zero(order);
        let mut y = Poisson::zero(order);
        let mut z = Poisson::zero(order);
        for (n, (rn, sn)) in self.r.iter().zip(&self.s).enumerate() {
            for (m, rnm) in rn.iter().enumerate() {
                let k = 2 * m + 1;
                x.terms[2 * n + 1] = x.terms[2 * n + 1].add(&Trig::cos_term(k, rnm.clone()));
                let ycoef = T::from_int(k as i64) * self.omega.clone() * rnm.clone() / self.omega0.clone();
                y.terms[2 * n + 1] = y.terms[2 * n + 1].add(&Trig::sin_term(k, ycoef));
            }
            for (m, snm) in sn.iter().enumerate() {
                z.terms[2 * n] = z.terms[2 * n].add(&Trig::cos_term(2 * m, snm.clone()));
            }
        }
        [x, y, z]
    }

    /// Coefficient of `F^p cos kτ` (or `sin kτ` for `Y`) in component `i`.
    pub fn coefficient(&self, component: usize, power: usize, harmonic: usize) -> T {
        let traj = self.trajectory();
        let t = traj[component].term(power);
        if component == 1 {
            t.sin_coeff(harmonic)
        } else {
            t.cos_coeff(harmonic)
        }
    }
}

impl FourierTaylor<f64> {
    /// The unnormalized orbit at amplitude `f` and time `t`.
    pub fn state(&self, f: f64, t: f64) -> BlochVector {
        let tau = self.omega * t;
        let [x, y, z] = self.trajectory();
        BlochVector::new(x.eval(f, tau), y.eval(f, tau), z.eval(f, tau))
    }
}

/// Mean of `χ = ½(ω₀ + h₁X/(R+Z))` as a Poisson series, where `h₁` has
/// valuation at least `out_order - order(X)`.
fn chi_mean<T: Field>(x: &Poisson<T>, y: &Poisson<T>, z: &Poisson<T>, h1: &Poisson<T>, omega0: &T, out_order: usize) -> Vec<T> {
    let r = x.mul(x).add(&y.mul(y)).add(&z.mul(z)).sqrt_with(T::one());
    let ratio = x.mul(&r.add(z).inverse()).truncate(out_order);
    let half = T::ratio(1, 2);
    let mut out: Vec<T> = h1.truncate(out_order).mul(&ratio).mean().into_iter().map(|v| half.clone() * v).collect();
    out[0] = out[0].clone() + half * omega0.clone();
    out
}

/// Coefficients of `F^{2k}`, `k = 0..=max_order + 1`, of the weak-drive
/// quasienergy.
pub fn quasienergy_series_small_f<T: Coefficient>(max_order: usize, omega: &T, omega0: &T) -> Result<Vec<T>> {
    let ft = ft_solution_small_f(max_order, omega, omega0)?;
    let [x, y, z] = ft.trajectory();
    let out_order = 2 * max_order + 2;
    let h1 = Poisson::monomial(1, Trig::cos_term(1, T::one()), out_order);
    let all = chi_mean(&x, &y, &z, &h1, omega0, out_order);
    Ok(all.into_iter().step_by(2).collect())
}

/// `F²` coefficients `(ε_g, ε_d)` of the geometric and dynamical parts.
pub fn small_f_split_check<T: Coefficient>(omega: &T, omega0: &T) -> Result<(T, T)> {
    let ft = ft_solution_small_f(1, omega, omega0)?;
    let [x, y, z] = ft.trajectory().map(|p| p.truncate(2));
    let r = x.mul(&x).add(&y.mul(&y)).add(&z.mul(&z)).sqrt_with(T::one());
    let h1 = Poisson::monomial(1, Trig::cos_term(1, T::one()), 2);
    let half = T::ratio(1, 2);

    let dyn_num = h1.mul(&x).add(&z.scale(omega0));
    let eps_d = dyn_num.mul(&r.inverse()).mean()[2].clone() * half.clone();

    let wedge = x.mul(&y.derivative()).sub(&y.mul(&x.derivative()));
    let den = r.mul(&r.add(&z)).inverse();
    let eps_g = wedge.mul(&den).mean()[2].clone() * half * omega.clone();
    Ok((eps_g, eps_d))
}

/// Fast-drive expansion in `𝒯 = 1/ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct HighFrequencySeries<T> {
    /// Orbit components as Poisson series in `𝒯`, with mean `Z = 1`.
    pub x: Poisson<T>,
    pub y: Poisson<T>,
    pub z: Poisson<T>,
    /// Coefficients of `𝒯^k`, `k = 0..=max_order`.
    pub epsilon: Vec<T>,
}

/// Order-by-order solution of `dX/dτ = 𝒯 h × X` for `h = (F cos τ, 0, ω₀)`.
pub fn high_frequency_series<T: Field>(omega0: &T, f: &T, max_order: usize) -> HighFrequencySeries<T> {
    let fcos = Trig::cos_term(1, f.clone());
    let mut xs = vec![Trig::zero()];
    let mut ys = vec![Trig::zero()];
    let mut zs = vec![Trig::constant(T::one())];
    for n in 1..=max_order {
        let (xp, yp, zp) = (&xs[n - 1], &ys[n - 1], &zs[n - 1]);
        let dx = yp.scale(&-omega0.clone());
        let dy = xp.scale(omega0).sub(&fcos.mul(zp));
        let dz = fcos.mul(yp);
        xs.push(dx.antiderivative());
        ys.push(dy.antiderivative());
        zs.push(dz.antiderivative());
    }
    let (x, y, z) = (Poisson { terms: xs }, Poisson { terms: ys }, Poisson { terms: zs });
    let h1 = Poisson::monomial(0, fcos, max_order);
    let epsilon = chi_mean(&x, &y, &z, &h1, omega0, max_order);
    HighFrequencySeries { x, y, z, epsilon }
}

/// `ε ≈ ω₀/2 + F²/(8ω₀)`, valid up to `O(F³, ω²)`.
pub fn omega0_large_limit(f: f64, omega0: f64) -> f64 {
    omega0 / 2.0 + f * f / (8.0 * omega0)
}

fn check_pendulum_amplitude(function: &'static str, f: f64) -> Result<()> {
    if !(f > 0.0 && f < PI) {
        return Err(Error::Domain { function, detail: format!("F/omega = {f} must lie in (0, pi)") });
    }
    Ok(())
}

/// Orbit for `ω₀ → 0`: `(0, -sin(f sin ωt), cos(f sin ωt))` and the first
/// correction `X₁(t)` (so that `X ≈ ω₀ X₁`).
pub fn pendulum_solution(f: f64, omega: f64, t: f64) -> Result<(BlochVector, f64)> {
    check_pendulum_amplitude("pendulum_solution", f)?;
    if omega <= 0.0 {
        return Err(Error::InvalidParameter(format!("omega = {omega} must be positive")));
    }
    let phase = f * (omega * t).sin();
    let state = BlochVector::new(0.0, -phase.sin(), phase.cos());
    let mut x1 = 0.0;
    for n in (1..80).step_by(2) {
        let j = bessel_j(n, f);
        x1 -= 2.0 / omega * j * (n as f64 * omega * t).cos() / n as f64;
        if j.abs() < 1e-18 {
            break;
        }
    }
    Ok((state, x1))
}

/// Linear-in-`ω₀` coefficients of `ε`, `ε_g` and `ε_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallOmega0 {
    pub epsilon: f64,
    pub eps_g: f64,
    pub eps_d: f64,
}

pub fn quasienergy_small_omega0(f: f64, omega: f64) -> Result<SmallOmega0> {
    let x = f / omega;
    check_pendulum_amplitude("quasienergy_small_omega0", x)?;
    let (j0, j1) = (bessel_j(0, x), bessel_j(1, x));
    Ok(SmallOmega0 { epsilon: j0 / 2.0, eps_g: x * j1 / 2.0, eps_d: (j0 - x * j1) / 2.0 })
}

/// Slow-drive expansion `X ≈ X₀ + ωX₁ + ω²X₂`, `ε ≈ ε₀ + ε₂ω² + ε₄ω⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticExpansion {
    pub params: DriveParams,
    pub order: usize,
    pub eps0: f64,
    pub eps2: f64,
    pub eps4: f64,
}

pub fn adiabatic_expansion(params: &DriveParams, order: usize) -> Result<AdiabaticExpansion> {
    if order > 2 {
        return Err(Error::InvalidParameter(format!("adiabatic order {order} must be 0, 1 or 2")));
    }
    if !params.is_linear() {
        return Err(Error::InvalidParameter("the adiabatic expansion needs G = 0".into()));
    }
    let [eps0, eps2, eps4] = adiabatic_quasienergy(params.f, params.omega0)?;
    Ok(AdiabaticExpansion { params: *params, order, eps0, eps2, eps4 })
}

/// `[ε₀, ε₂, ε₄]` in terms of complete elliptic integrals.
pub fn adiabatic_quasienergy(f: f64, omega0: f64) -> Result<[f64; 3]> {
    if omega0 <= 0.0 || !omega0.is_finite() {
        return Err(Error::Domain {
            function: "adiabatic_quasienergy",
            detail: format!("omega0 = {omega0} must be positive"),
        });
    }
    let (f2, w2) = (f * f, omega0 * omega0);
    let eps0 = omega0 / PI * elliptic_e(-f2 / w2)?;
    let m = f2 / (f2 + w2);
    let (e, k) = (elliptic_e(m)?, elliptic_k(m)?);
    let root = (f2 + w2).sqrt();
    let eps2 = ((2.0 * f2 + w2) * e - w2 * k) / (6.0 * PI * w2 * root);
    let (f4, f6, f8) = (f2 * f2, f2 * f2 * f2, f2 * f2 * f2 * f2);
    let (w4, w6, w8) = (w2 * w2, w2 * w2 * w2, w2 * w2 * w2 * w2);
    let pe = 64.0 * f8 + 200.0 * f6 * w2 + 231.0 * f4 * w4 + 137.0 * f2 * w6 - 14.0 * w8;
    let pk = 16.0 * f6 + 36.0 * f4 * w2 + 27.0 * f2 * w4 - 7.0 * w6;
    let eps4 = (pe * e / 6.0 - w2 * pk * k / 3.0) / (60.0 * PI * w6 * root.powi(5));
    Ok([eps0, eps2, eps4])
}

impl AdiabaticExpansion {
    /// `[X₀, X₁, X₂]` at time `t`, truncated to `order + 1` terms.
    pub fn terms(&self, t: f64) -> Vec<BlochVector> {
        let p = &self.params;
        let (s, c) = (p.omega * t).sin_cos();
        let fc = p.f * c;
        let q = fc * fc + p.omega0 * p.omega0;
        let sq = q.sqrt();
        let h = BlochVector::new(fc, 0.0, p.omega0);
        let y1 = p.f * p.omega0 * s / (q * sq);
        let dy1 = p.f * p.omega0 * c * (q + 3.0 * p.f * p.f * s * s) / (q * q * sq);
        let lambda2 = -y1 * y1 / (2.0 * sq);
        let x2 = BlochVector::new(p.omega0, 0.0, -fc) * (dy1 / q) + h * lambda2;
        let all = [h / sq, BlochVector::new(0.0, y1, 0.0), x2];
        all[..=self.order].to_vec()
    }

    /// `Σ ω^k X_k(t)`.
    pub fn state(&self, t: f64) -> BlochVector {
        self.terms(t).iter().rev().fold(BlochVector::zeros(), |acc, x| acc * self.params.omega + x)
    }

    /// `ε₀ + ε₂ω² + ε₄ω⁴`, truncated to the requested order.
    pub fn quasienergy(&self) -> f64 {
        let w2 = self.params.omega * self.params.omega;
        [self.eps0, self.eps2, self.eps4][..=self.order].iter().rev().fold(0.0, |acc, e| acc * w2 + e)
    }
}

/// Outcome of comparing two expansions at their shared orders.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyCheck {
    pub name: &'static str,
    pub comparisons: usize,
    pub mismatches: Vec<String>,
}

impl ConsistencyCheck {
    pub fn passed(&self) -> bool {
        self.comparisons > 0 && self.mismatches.is_empty()
    }
}

fn binomial_central(k: u32) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, j| acc * BigInt::from(k + j) / BigInt::from(j))
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, j| acc * BigInt::from(j))
}

/// Coefficients of `F^{2k}` in `(ω₀/π) E(-F²/ω₀²)`.
pub fn elliptic_series_coefficients(omega0: &BigRational, k_max: u32) -> Vec<BigRational> {
    (0..=k_max)
        .map(|k| {
            let c = BigRational::new(binomial_central(k), BigInt::from(4).pow(k));
            let ck = c.clone() * c / BigRational::from_integer(BigInt::from(1 - 2 * k as i64));
            let sign = if k % 2 == 0 { q(1, 1) } else { q(-1, 1) };
            omega0.clone() * q(1, 2) * sign * ck / pow(omega0, 2 * k)
        })
        .collect()
}

/// Coefficients of `F^{2k}/ω^{2k}` in `½ J₀(F/ω)`.
pub fn bessel_series_coefficients(k_max: u32) -> Vec<BigRational> {
    (0..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let f = factorial(k);
            BigRational::new(BigInt::from(sign), BigInt::from(2) * BigInt::from(4).pow(k) * f.clone() * f)
        })
        .collect()
}

/// Weak-drive series at `ω = 0` against the slow-drive elliptic quasienergy.
pub fn check_small_f_vs_elliptic(omega0: &BigRational, max_order: usize) -> Result<ConsistencyCheck> {
    let small = quasienergy_series_small_f(max_order, &q(0, 1), omega0)?;
    let ell = elliptic_series_coefficients(omega0, small.len() as u32 - 1);
    let mut check = ConsistencyCheck { name: "small-F vs slow-drive elliptic", comparisons: 0, mismatches: Vec::new() };
    for (k, (a, b)) in small.iter().zip(&ell).enumerate() {
        check.comparisons += 1;
        if a != b {
            check.mismatches.push(format!("omega0 = {omega0}, F^{}: {a} vs {b}", 2 * k));
        }
    }
    Ok(check)
}

/// Weak-drive series expanded in `1/ω` against the fast-drive series,
/// compared at rational amplitudes through `𝒯^{2 max_order}`.
pub fn check_small_f_vs_high_frequency(omega0: &BigRational, amplitudes: &[BigRational], max_order: usize) -> Result<ConsistencyCheck> {
    let prec = 2 * max_order as i32 + 3;
    let omega = Series::new(-1, vec![q(1, 1)], Some(prec));
    let w0 = Series::constant(omega0.clone());
    let small = quasienergy_series_small_f(max_order, &omega, &w0)?;
    let mut check = ConsistencyCheck { name: "small-F vs fast-drive", comparisons: 0, mismatches: Vec::new() };
    for f in amplitudes {
        let fast = high_frequency_series(omega0, f, 2 * max_order);
        for (j, w) in fast.epsilon.iter().enumerate() {
            let mut total = q(0, 1);
            for (k, qk) in small.iter().enumerate() {
                let Some(c) = qk.coeff(j as i32) else {
                    check.mismatches.push(format!("T^{j} beyond the precision of the F^{} term", 2 * k));
                    continue;
                };
                total += c * pow(f, 2 * k as u32);
            }
            check.comparisons += 1;
            if &total != w {
                check.mismatches.push(format!("omega0 = {omega0}, F = {f}, T^{j}: {total} vs {w}"));
            }
        }
    }
    Ok(check)
}

/// Linear-in-`ω₀` part of the fast-drive coefficients against `(ω₀/2)J₀(F/ω)`.
pub fn check_pendulum_vs_high_frequency(f: &BigRational, max_order: usize) -> ConsistencyCheck {
    let orders = 2 * max_order;
    let nodes: Vec<BigRational> = (1..=(orders + 3) as i64).map(|k| q(k, 3)).collect();
    let values: Vec<Vec<BigRational>> = nodes.iter().map(|w0| high_frequency_series(w0, f, orders).epsilon).collect();
    let bessel = bessel_series_coefficients(max_order as u32);
    let mut check = ConsistencyCheck { name: "weak static field vs fast-drive", comparisons: 0, mismatches: Vec::new() };
    for j in 0..=orders {
        let ys: Vec<BigRational> = values.iter().map(|v| v[j].clone()).collect();
        let coeffs = interpolate(&nodes, &ys);
        let want = if j % 2 == 0 { bessel[j / 2].clone() * pow(f, j as u32) } else { q(0, 1) };
        check.comparisons += 1;
        if coeffs[1] != want {
            check.mismatches.push(format!("F = {f}, T^{j}: omega0-linear part {} vs {want}", coeffs[1]));
        }
        if coeffs.last().is_some_and(|c| !c.is_zero()) {
            check.mismatches.push(format!("T^{j}: interpolation degree bound exceeded"));
        }
    }
    check
}

/// Monomial coefficients of the interpolating polynomial through `(xs, ys)`.
fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut out = vec![q(0, 1); n];
    for i in 0..n {
        let mut basis = vec![q(1, 1)];
        let mut denom = q(1, 1);
        for (j, xj) in xs.iter().enumerate().filter(|(j, _)| *j != i) {
            let mut next = vec![q(0, 1); basis.len() + 1];
            for (d, b) in basis.iter().enumerate() {
                next[d + 1] += b.clone();
                next[d] -= b.clone() * xj.clone();
            }
            basis = next;
            denom *= xs[i].clone() - xs[j].clone();
        }
        let w = ys[i].clone() / denom;
        for (d, b) in basis.into_iter().enumerate() {
            out[d] += w.clone() * b;
        }
    }
    out
}

/// Evaluation points used by [`four_way_consistency`].
pub fn consistency_points() -> Vec<(BigRational, BigRational)> {
    vec![(q(1, 1), q(1, 2)), (q(3, 2), q(2, 3)), (q(2, 3), q(5, 4)), (q(5, 4), q(1, 3)), (q(7, 3), q(3, 5))]
}

/// Runs all cross-checks between the expansions at the fixed rational points.
pub fn four_way_consistency(max_order: usize) -> Result<Vec<ConsistencyCheck>> {
    let pts = consistency_points();
    let merge = |mut a: ConsistencyCheck, b: ConsistencyCheck| {
        a.comparisons += b.comparisons;
        a.mismatches.extend(b.mismatches);
        a
    };
    let mut elliptic = ConsistencyCheck { name: "small-F vs slow-drive elliptic", comparisons: 0, mismatches: Vec::new() };
    let mut fast = ConsistencyCheck { name: "small-F vs fast-drive", comparisons: 0, mismatches: Vec::new() };
    let mut pend = ConsistencyCheck { name: "weak static field vs fast-drive", comparisons: 0, mismatches: Vec::new() };
    let amplitudes: Vec<BigRational> = pts.iter().map(|p| p.1.clone()).collect();
    for (w0, f) in &pts {
        elliptic = merge(elliptic, check_small_f_vs_elliptic(w0, max_order)?);
        fast = merge(fast, check_small_f_vs_high_frequency(w0, &amplitudes[..2], max_order)?);
        pend = merge(pend, check_pendulum_vs_high_frequency(f, max_order));
    }
    Ok(vec![elliptic, fast, pend])
}
