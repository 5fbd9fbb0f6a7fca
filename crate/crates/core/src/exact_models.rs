//! Exactly solvable cases: the circularly polarized drive, a drive
//! constructed from a prescribed orbit, and the spin-`s` lift of the
//! two-level quasienergies.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dynamics::{BlochVector, DriveField, DriveParams, PeriodicOrbit};
use crate::error::{Error, Result};
use crate::quasienergy::reduce;
use crate::specfun::bessel_j;

fn require_circular(params: &DriveParams) -> Result<()> {
    if !params.is_circular() {
        return Err(Error::InvalidParameter(format!(
            "closed forms need a circular drive (G = F), got F = {}, G = {}",
            params.f, params.g
        )));
    }
    Ok(())
}

/// Rabi frequency `Ω = √(F² + (ω₀ - ω)²)`.
pub fn rabi_frequency(params: &DriveParams) -> f64 {
    params.f.hypot(params.omega0 - params.omega)
}

/// One of the two periodic orbits `±(F cos ωt, F sin ωt, ω₀ - ω)` (norm `Ω`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpcOrbit {
    pub params: DriveParams,
    pub sign: f64,
}

pub fn rpc_trajectory(params: &DriveParams, positive: bool) -> Result<RpcOrbit> {
    require_circular(params)?;
    Ok(RpcOrbit { params: *params, sign: if positive { 1.0 } else { -1.0 } })
}

impl RpcOrbit {
    pub fn state(&self, t: f64) -> BlochVector {
        let p = &self.params;
        let (s, c) = (p.omega * t).sin_cos();
        BlochVector::new(p.f * c, p.f * s, p.omega0 - p.omega) * self.sign
    }
}

impl PeriodicOrbit for RpcOrbit {
    fn omega(&self) -> f64 {
        self.params.omega
    }

    fn sample(&self, m: usize) -> Result<Vec<BlochVector>> {
        let period = TAU / self.params.omega;
        Ok((0..m).map(|k| self.state(period * k as f64 / m as f64)).collect())
    }
}

/// Quasienergies `ε± = ½(ω ± Ω)` and the split of `ε₊` on the orbit `X₊`.
///
/// The geometric part uses the solid angle on the side of the circle away
/// from the south pole, so for `ω > ω₀` the sum is `½(Ω - ω)`, which equals
/// `ε₊` modulo `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpcQuasienergies {
    pub rabi: f64,
    pub plus: f64,
    pub minus: f64,
    pub eps_d: f64,
    pub eps_g: f64,
}

pub fn rpc_quasienergies(params: &DriveParams) -> Result<RpcQuasienergies> {
    require_circular(params)?;
    let (w0, f, w) = (params.omega0, params.f, params.omega);
    let rabi = rabi_frequency(params);
    if rabi == 0.0 {
        return Err(Error::Domain { function: "rpc_quasienergies", detail: "Rabi frequency vanishes".into() });
    }
    let z = w0 - w;
    let eps_d = (f * f + w0 * z) / (2.0 * rabi);
    let mut eps_g = w * (rabi - z) / (2.0 * rabi);
    if z < 0.0 {
        eps_g -= w;
    }
    Ok(RpcQuasienergies { rabi, plus: 0.5 * (w + rabi), minus: 0.5 * (w - rabi), eps_d, eps_g })
}

/// The Floquet solutions `ψ₊(t)`, `ψ₋(t)` with quasienergies `ε±`.
pub fn rpc_floquet_states(params: &DriveParams, t: f64) -> Result<[[Complex64; 2]; 2]> {
    require_circular(params)?;
    if params.f <= 0.0 {
        return Err(Error::Domain {
            function: "rpc_floquet_states",
            detail: "F = 0 leaves the Floquet states undetermined by the closed form".into(),
        });
    }
    let (w0, f, w) = (params.omega0, params.f, params.omega);
    let rabi = rabi_frequency(params);
    let a = rabi + w0 - w;
    let b = rabi - w0 + w;
    let norm = (2.0 * rabi).sqrt();
    let phase = |x: f64| Complex64::from_polar(1.0, x);
    let plus = [
        phase(-0.5 * t * (w + rabi)) * (a.sqrt() / norm),
        phase(0.5 * t * (w - rabi)) * (f / (norm * a.sqrt())),
    ];
    let minus = [
        phase(-0.5 * t * (w - rabi)) * (b.sqrt() / norm),
        phase(0.5 * t * (w + rabi)) * (-f / (norm * b.sqrt())),
    ];
    Ok([plus, minus])
}

/// Orbit `X(t) = (cos τ sin φ, sin τ sin φ, cos φ)` with `φ = f sin²(τ/2)`,
/// driven by the field `h = X × Ẋ`, for which `h·X = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyExample {
    pub f: f64,
    pub omega: f64,
}

pub fn toy_example(f: f64, omega: f64) -> Result<ToyExample> {
    if !f.is_finite() || !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("need finite f and omega > 0, got f = {f}, omega = {omega}")));
    }
    Ok(ToyExample { f, omega })
}

impl ToyExample {
    fn angles(&self, t: f64) -> (f64, f64, f64) {
        let tau = self.omega * t;
        let phi = self.f * (0.5 * tau).sin().powi(2);
        let dphi = 0.5 * self.f * self.omega * tau.sin();
        (tau, phi, dphi)
    }

    pub fn state(&self, t: f64) -> BlochVector {
        let (tau, phi, _) = self.angles(t);
        let (st, ct) = tau.sin_cos();
        let (sp, cp) = phi.sin_cos();
        BlochVector::new(ct * sp, st * sp, cp)
    }

    pub fn velocity(&self, t: f64) -> BlochVector {
        let (tau, phi, dphi) = self.angles(t);
        let (st, ct) = tau.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let w = self.omega;
        BlochVector::new(-w * st * sp + ct * cp * dphi, w * ct * sp + st * cp * dphi, -sp * dphi)
    }

    /// `h(t) = X × Ẋ`.
    pub fn field(&self, t: f64) -> BlochVector {
        self.state(t).cross(&self.velocity(t))
    }

    /// `χ(t) = ω sin²(½ f sin²(ωt/2))`.
    pub fn chi(&self, t: f64) -> f64 {
        let (_, phi, _) = self.angles(t);
        self.omega * (0.5 * phi).sin().powi(2)
    }

    /// `ε = (ω/2)(1 - cos(f/2) J₀(f/2))`.
    pub fn quasienergy(&self) -> f64 {
        let h = 0.5 * self.f;
        0.5 * self.omega * (1.0 - h.cos() * bessel_j(0, h))
    }

    /// Coefficient of `cos nωt` in `χ`; `b(0)` is the quasienergy.
    pub fn b(&self, n: usize) -> f64 {
        if n == 0 {
            return self.quasienergy();
        }
        let h = 0.5 * self.f;
        let j = self.omega * bessel_j(n as i32, h);
        if n % 2 == 1 {
            let sign = if n.div_ceil(2).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * j * h.sin()
        } else {
            let sign = if ((n + 2) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * j * h.cos()
        }
    }

    /// Dynamical part of the quasienergy (identically zero).
    pub fn eps_d(&self) -> f64 {
        0.0
    }
}

impl DriveField for ToyExample {
    fn omega(&self) -> f64 {
        self.omega
    }

    fn field_at(&self, t: f64) -> BlochVector {
        self.field(t)
    }
}

impl PeriodicOrbit for ToyExample {
    fn omega(&self) -> f64 {
        self.omega
    }

    fn sample(&self, m: usize) -> Result<Vec<BlochVector>> {
        let period = TAU / self.omega;
        Ok((0..m).map(|k| self.state(period * k as f64 / m as f64)).collect())
    }
}

/// Quasienergies `2εm mod ω`, `m = -s..=s`, of the spin-`s` lift, sorted.
pub fn lift_spectrum(s: f64, epsilon: f64, omega: f64) -> Result<Vec<f64>> {
    let two_s = 2.0 * s;
    if !(two_s >= 0.0 && two_s.fract() == 0.0 && two_s.is_finite()) {
        return Err(Error::InvalidParameter(format!("spin s = {s} must be a non-negative half-integer")));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega = {omega} must be positive")));
    }
    let n = two_s as i64;
    let mut out: Vec<f64> = (0..=n).map(|k| reduce(epsilon * (2 * k - n) as f64, omega)).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}
