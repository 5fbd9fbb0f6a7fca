//! Truncated Fourier solution of the linearly polarized Bloch equation.
//!
//! The ansatz
//! `X = Σ ω₀ x_n cos nωt`, `Y = Σ x_n nω sin nωt` (odd `n`) and
//! `Z = z₀ + Σ x_n cos nωt` (even `n`) reduces the equation of motion to a
//! tridiagonal linear system `A x = (-F z₀, 0, …, 0)` which is solved through
//! its co-leading minors `φ_n = det A[n..N, n..N]`.

use std::f64::consts::TAU;

use nalgebra::Vector3;

use crate::algebra::{Field, Ring};
use crate::dynamics::{orient, BlochVector, DriveField, DriveParams, PeriodicOrbit};
use crate::error::{Error, Result};
use crate::scaled::Scaled;

/// Default truncation order.
pub const DEFAULT_N: usize = 20;
/// Truncation grows in steps of this size until the tail is negligible.
pub const N_STEP: usize = 8;
/// Tail criterion `|x_N| / max |x_n|`.
pub const TAIL_TOL: f64 = 1e-10;
const MAX_N: usize = 2000;
const RESONANCE_TOL: f64 = 1e-13;

/// Tridiagonal matrix stored by diagonals (all indices 0-based):
/// `diag[k] = A_{k,k}`, `upper[k] = A_{k,k+1}`, `lower[k] = A_{k+1,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem<T> {
    pub diag: Vec<T>,
    pub upper: Vec<T>,
    pub lower: Vec<T>,
}

impl<T: Ring> TridiagonalSystem<T> {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Entry `A_{n,m}` with 1-based indices.
    pub fn entry(&self, n: usize, m: usize) -> T {
        match (n, m) {
            _ if n == m => self.diag[n - 1].clone(),
            _ if m == n + 1 => self.upper[n - 1].clone(),
            _ if n == m + 1 => self.lower[m - 1].clone(),
            _ => T::zero(),
        }
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> TridiagonalSystem<U> {
        TridiagonalSystem {
            diag: self.diag.iter().map(&f).collect(),
            upper: self.upper.iter().map(&f).collect(),
            lower: self.lower.iter().map(&f).collect(),
        }
    }
}

/// The `N×N` system for the Fourier coefficients over any field.
pub fn build_system_generic<T: Field>(omega0: &T, f: &T, omega: &T, n: usize) -> TridiagonalSystem<T> {
    let half_f = f.clone() * T::ratio(1, 2);
    let row = |k: usize| -> T {
        let kk = T::from_int(k as i64);
        if k % 2 == 1 {
            kk.clone() * kk * omega.clone() * omega.clone() - omega0.clone() * omega0.clone()
        } else {
            -(kk * omega.clone())
        }
    };
    // Row k odd couples with F/2; row k even couples to column m with -m F ω / 2.
    let off = |r: usize, c: usize| -> T {
        if r % 2 == 1 {
            half_f.clone()
        } else {
            -(T::from_int(c as i64) * half_f.clone() * omega.clone())
        }
    };
    TridiagonalSystem {
        diag: (1..=n).map(row).collect(),
        upper: (1..n).map(|k| off(k, k + 1)).collect(),
        lower: (1..n).map(|k| off(k + 1, k)).collect(),
    }
}

/// Floating-point system for a linearly polarized drive.
pub fn build_system(params: &DriveParams, n: usize) -> Result<TridiagonalSystem<f64>> {
    require_linear(params)?;
    if n == 0 {
        return Err(Error::InvalidParameter("truncation order must be positive".into()));
    }
    Ok(build_system_generic(&params.omega0, &params.f, &params.omega, n))
}

fn require_linear(params: &DriveParams) -> Result<()> {
    if !params.is_linear() {
        return Err(Error::InvalidParameter("the Fourier route needs G = 0".into()));
    }
    Ok(())
}

/// Co-leading minors `[φ_1, …, φ_N, φ_{N+1} = 1]`.
pub fn minors<T: Ring>(sys: &TridiagonalSystem<T>) -> Vec<T> {
    let n = sys.size();
    let mut phi = vec![T::zero(); n + 1];
    phi[n] = T::one();
    if n == 0 {
        return phi;
    }
    phi[n - 1] = sys.diag[n - 1].clone();
    for k in (0..n - 1).rev() {
        let coupling = sys.upper[k].clone() * sys.lower[k].clone();
        phi[k] = sys.diag[k].clone() * phi[k + 1].clone() - coupling * phi[k + 2].clone();
    }
    phi
}

/// How the free overall scale of the solution is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Z0Choice {
    /// `z₀ = 1`; undefined at a resonance (`φ₁ = 0`).
    Unit,
    /// `z₀ = φ₁`; every coefficient is then a polynomial in the parameters.
    Phi1,
}

/// `z₀` and `x_1, …, x_N` over some field.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients<T> {
    pub z0: T,
    pub x: Vec<T>,
}

/// Solves `A x = (-F z₀, 0, …)` for an arbitrary tridiagonal system through
/// `x_n = -F z₀ (∏_{k<n} -A_{k+1,k}) φ_{n+1} / φ₁`.
pub fn solve_system<T: Field>(sys: &TridiagonalSystem<T>, f: &T, choice: Z0Choice) -> Result<FourierCoefficients<T>> {
    let phi = minors(sys);
    let (z0, scale) = match choice {
        Z0Choice::Unit => {
            if phi[0].is_zero() {
                return Err(Error::Resonant { phi1: 0.0 });
            }
            (T::one(), T::one() / phi[0].clone())
        }
        Z0Choice::Phi1 => (phi[0].clone(), T::one()),
    };
    let mut x = Vec::with_capacity(sys.size());
    let mut prod = -f.clone() * scale;
    for n in 1..=sys.size() {
        if n > 1 {
            prod = prod * -sys.lower[n - 2].clone();
        }
        x.push(prod.clone() * phi[n].clone());
    }
    Ok(FourierCoefficients { z0, x })
}

/// The coefficients from their closed form: `x₁ = -F z₀ φ₂/φ₁` and for
/// `n >= 2`, `x_n = z₀ (-1)^n 2 (F/2)^n (-ω)^{⌊n/2⌋} k!! φ_{n+1}/φ₁` with
/// `k = n - 1` for even and `k = n - 2` for odd `n`.
pub fn closed_form_coefficients<T: Field>(
    omega0: &T,
    f: &T,
    omega: &T,
    n: usize,
    choice: Z0Choice,
) -> Result<FourierCoefficients<T>> {
    let sys = build_system_generic(omega0, f, omega, n);
    let phi = minors(&sys);
    let (z0, ratio) = match choice {
        Z0Choice::Unit => {
            if phi[0].is_zero() {
                return Err(Error::Resonant { phi1: 0.0 });
            }
            (T::one(), T::one() / phi[0].clone())
        }
        Z0Choice::Phi1 => (phi[0].clone(), T::one()),
    };
    let mut x = Vec::with_capacity(n);
    x.push(-(f.clone() * ratio.clone() * phi[1].clone()));
    let half_f = f.clone() * T::ratio(1, 2);
    for k in 2..=n {
        let mut c = T::from_int(2) * crate::algebra::pow(&half_f, k as u32) * crate::algebra::pow(&-omega.clone(), (k / 2) as u32);
        let top = if k % 2 == 0 { k - 1 } else { k - 2 };
        c = c * T::from_int(double_factorial(top));
        if k % 2 == 1 {
            c = -c;
        }
        x.push(c * ratio.clone() * phi[k].clone());
    }
    Ok(FourierCoefficients { z0, x })
}

fn double_factorial(k: usize) -> i64 {
    (1..=k as i64).rev().step_by(2).product::<i64>().max(1)
}

/// `det A` of the order-`N` system (zero exactly at the resonances).
pub fn det_a(params: &DriveParams, n: usize) -> Result<Scaled> {
    let sys = build_system(params, n)?.map(|&v| Scaled::new(v));
    Ok(minors(&sys)[0])
}

/// A floating-point Fourier solution.
///
/// The stored values equal the true coefficients divided by `2^log2_scale`;
/// the scale only matters for the polynomial (`Phi1`) normalization.
#[derive(Debug, Clone)]
pub struct RplFourierSolution {
    pub params: DriveParams,
    pub z0: f64,
    pub x: Vec<f64>,
    pub log2_scale: i64,
    pub choice: Z0Choice,
    pub phi1: Scaled,
}

/// Solves at fixed truncation `n`.
pub fn solve(params: &DriveParams, n: usize, choice: Z0Choice) -> Result<RplFourierSolution> {
    let sys_f = build_system(params, n)?;
    solve_from_system(params, &sys_f, choice)
}

/// Solves a (possibly modified) floating-point system.
pub fn solve_from_system(
    params: &DriveParams,
    sys_f: &TridiagonalSystem<f64>,
    choice: Z0Choice,
) -> Result<RplFourierSolution> {
    let sys = sys_f.map(|&v| Scaled::new(v));
    let phi = minors(&sys);
    if choice == Z0Choice::Unit {
        let terms = sys.diag[0] * phi[1];
        let other = if sys.size() > 1 { sys.upper[0] * sys.lower[0] * phi[2] } else { Scaled::zero() };
        let size = if terms.cmp_abs(other).is_ge() { terms.abs() } else { other.abs() };
        if phi[0].is_zero() || phi[0].abs().ratio(size) < RESONANCE_TOL {
            return Err(Error::Resonant { phi1: phi[0].to_f64() });
        }
    }
    let coeffs = solve_system(&sys, &Scaled::new(params.f), choice)?;
    let top = std::iter::once(coeffs.z0)
        .chain(coeffs.x.iter().copied())
        .filter(|v| !v.is_zero())
        .map(|v| v.exponent())
        .max()
        .unwrap_or(0);
    let shift = if top.abs() > 500 { top } else { 0 };
    Ok(RplFourierSolution {
        params: *params,
        z0: coeffs.z0.shifted(-shift).to_f64(),
        x: coeffs.x.iter().map(|v| v.shifted(-shift).to_f64()).collect(),
        log2_scale: shift,
        choice,
        phi1: phi[0],
    })
}

/// Solves with truncation growing from `n_start` by 8 until the tail
/// `|x_N| / max |x_n|` drops below `1e-10`.
pub fn solve_auto(params: &DriveParams, n_start: usize, choice: Z0Choice) -> Result<RplFourierSolution> {
    let mut n = n_start.max(2);
    loop {
        let sol = solve(params, n, choice)?;
        if sol.tail_ratio() < TAIL_TOL {
            return Ok(sol);
        }
        n += N_STEP;
        if n > MAX_N {
            return Err(Error::Unstable(format!("no convergence up to N = {MAX_N}")));
        }
    }
}

impl RplFourierSolution {
    pub fn n_trunc(&self) -> usize {
        self.x.len()
    }

    /// `max(|x_N|, |x_{N-1}|) / max |x_n|`.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.x.iter().fold(self.z0.abs(), |m, v| m.max(v.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let n = self.x.len();
        let tail = self.x[n - 1].abs().max(if n > 1 { self.x[n - 2].abs() } else { 0.0 });
        tail / max
    }

    /// Unnormalized `(X, Y, Z)` at time `t`.
    pub fn state(&self, t: f64) -> BlochVector {
        let p = &self.params;
        let mut v = Vector3::new(0.0, 0.0, self.z0);
        for (i, &c) in self.x.iter().enumerate() {
            let n = (i + 1) as f64;
            let (s, co) = (n * p.omega * t).sin_cos();
            if (i + 1) % 2 == 1 {
                v.x += p.omega0 * c * co;
                v.y += c * n * p.omega * s;
            } else {
                v.z += c * co;
            }
        }
        v
    }

    /// Time derivative of [`Self::state`].
    pub fn velocity(&self, t: f64) -> BlochVector {
        let p = &self.params;
        let mut v = Vector3::zeros();
        for (i, &c) in self.x.iter().enumerate() {
            let n = (i + 1) as f64;
            let w = n * p.omega;
            let (s, co) = (w * t).sin_cos();
            if (i + 1) % 2 == 1 {
                v.x -= p.omega0 * c * w * s;
                v.y += c * w * w * co;
            } else {
                v.z -= c * w * s;
            }
        }
        v
    }

    /// Mean of `|X(t)|` over 256 samples and the relative spread
    /// `(max - min) / mean`.
    pub fn radius(&self) -> (f64, f64) {
        let m = 256;
        let period = TAU / self.params.omega;
        let r: Vec<f64> = (0..m).map(|k| self.state(period * k as f64 / m as f64).norm()).collect();
        let mean = r.iter().sum::<f64>() / m as f64;
        let (lo, hi) = r.iter().fold((f64::INFINITY, 0f64), |(a, b), &v| (a.min(v), b.max(v)));
        (mean, if mean > 0.0 { (hi - lo) / mean } else { f64::INFINITY })
    }

    /// `max_t |dX/dt - h × X| / max_t |X|` over `samples` points of a period.
    pub fn ode_residual(&self, samples: usize) -> f64 {
        let period = TAU / self.params.omega;
        let mut res: f64 = 0.0;
        let mut size: f64 = 0.0;
        for k in 0..samples {
            let t = period * k as f64 / samples as f64;
            let x = self.state(t);
            let r = self.velocity(t) - self.params.field_at(t).cross(&x);
            res = res.max(r.norm());
            size = size.max(x.norm());
        }
        res / size
    }

    /// The orbit divided by its mean radius, with the overall sign fixed so
    /// that the state at `t = 0` obeys [`orient`].
    pub fn normalized(&self) -> Result<FourierOrbit> {
        let (radius, spread) = self.radius();
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Unstable("Fourier orbit has zero radius".into()));
        }
        let x0 = self.state(0.0);
        let scale = if orient(x0) == x0 { radius } else { -radius };
        Ok(FourierOrbit { solution: self.clone(), radius: scale, spread })
    }
}

/// Normalized Fourier orbit; `radius` carries the sign of the orientation.
#[derive(Debug, Clone)]
pub struct FourierOrbit {
    pub solution: RplFourierSolution,
    pub radius: f64,
    pub spread: f64,
}

impl FourierOrbit {
    pub fn state(&self, t: f64) -> BlochVector {
        self.solution.state(t) / self.radius
    }
}

impl PeriodicOrbit for FourierOrbit {
    fn omega(&self) -> f64 {
        self.solution.params.omega
    }

    fn sample(&self, m: usize) -> Result<Vec<BlochVector>> {
        let period = TAU / self.omega();
        Ok((0..m).map(|k| self.state(period * k as f64 / m as f64)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(0), 1);
        assert_eq!(double_factorial(1), 1);
        assert_eq!(double_factorial(5), 15);
        assert_eq!(double_factorial(6), 48);
    }

    #[test]
    fn six_by_six_layout() {
        let sys = build_system_generic(&1.0, &0.5, &2.0, 6);
        let (f, w, w0) = (0.5, 2.0, 1.0);
        assert_eq!(sys.entry(1, 1), w * w - w0 * w0);
        assert_eq!(sys.entry(1, 2), f / 2.0);
        assert_eq!(sys.entry(2, 1), -f * w / 2.0);
        assert_eq!(sys.entry(2, 2), -2.0 * w);
        assert_eq!(sys.entry(2, 3), -3.0 * f * w / 2.0);
        assert_eq!(sys.entry(3, 2), f / 2.0);
        assert_eq!(sys.entry(3, 3), 9.0 * w * w - w0 * w0);
        assert_eq!(sys.entry(4, 3), -3.0 * f * w / 2.0);
        assert_eq!(sys.entry(4, 5), -5.0 * f * w / 2.0);
        assert_eq!(sys.entry(5, 5), 25.0 * w * w - w0 * w0);
        assert_eq!(sys.entry(6, 5), -5.0 * f * w / 2.0);
        assert_eq!(sys.entry(6, 6), -6.0 * w);
        assert_eq!(sys.entry(1, 3), 0.0);
    }
}
