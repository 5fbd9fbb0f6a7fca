//! Drive parameters, the classical Bloch equation `dX/dt = h(t) × X`, the
//! Schrödinger equation `i dψ/dt = (h·σ/2) ψ`, and their one-period
//! monodromies.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Matrix3, SVector, Vector3};
use num_complex::Complex64;
use ode_solvers::{Dop853, OutputType, System};
use serde::Serialize;

use crate::error::{Error, Result};

/// A point on (or near) the Bloch sphere.
pub type BlochVector = Vector3<f64>;

/// Default relative and absolute integration tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Rotation angles below this are treated as the identity.
pub const DEGENERATE_ANGLE: f64 = 1e-7;

/// Any periodic driving field.
pub trait DriveField: Sync {
    fn omega(&self) -> f64;
    fn field_at(&self, t: f64) -> BlochVector;

    fn period(&self) -> f64 {
        TAU / self.omega()
    }
}

/// Elliptically polarized drive `h(t) = (F cos ωt, G sin ωt, ω₀)`.
///
/// `G = 0` is linear polarization, `G = F` circular polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveParams {
    pub omega0: f64,
    pub f: f64,
    pub g: f64,
    pub omega: f64,
}

impl DriveParams {
    pub fn new(omega0: f64, f: f64, g: f64, omega: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite();
        if !(ok(omega0) && ok(f) && ok(g) && ok(omega)) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if omega0 <= 0.0 || omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega0 = {omega0} and omega = {omega} must be positive"
            )));
        }
        if f < 0.0 || g < 0.0 {
            return Err(Error::InvalidParameter(format!("amplitudes F = {f}, G = {g} must be non-negative")));
        }
        Ok(Self { omega0, f, g, omega })
    }

    /// Linear polarization (`G = 0`).
    pub fn linear(omega0: f64, f: f64, omega: f64) -> Result<Self> {
        Self::new(omega0, f, 0.0, omega)
    }

    /// Circular polarization (`G = F`).
    pub fn circular(omega0: f64, f: f64, omega: f64) -> Result<Self> {
        Self::new(omega0, f, f, omega)
    }

    pub fn is_linear(&self) -> bool {
        self.g == 0.0
    }

    pub fn is_circular(&self) -> bool {
        self.g == self.f
    }

    /// All four parameters multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            omega0: self.omega0 * lambda,
            f: self.f * lambda,
            g: self.g * lambda,
            omega: self.omega * lambda,
        }
    }
}

impl DriveField for DriveParams {
    fn omega(&self) -> f64 {
        self.omega
    }

    fn field_at(&self, t: f64) -> BlochVector {
        let (s, c) = (self.omega * t).sin_cos();
        Vector3::new(self.f * c, self.g * s, self.omega0)
    }
}

/// Uniformly spaced samples of a solution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochVector>,
}

// The systems are autonomized: the last state component carries the time,
// so the solver never evaluates the field at its own stage abscissae.
// Dense output runs half a sample past the last requested time so that every
// sample is interpolated inside an accepted step.
// The Bloch equation is never stiff; the solver's stiffness heuristic misfires on it.
const NO_STIFFNESS_CHECK: u32 = u32::MAX;

struct Classical<'a, F: ?Sized> {
    field: &'a F,
}

impl<F: DriveField + ?Sized> System<f64, SVector<f64, 4>> for Classical<'_, F> {
    fn system(&self, _s: f64, y: &SVector<f64, 4>, dy: &mut SVector<f64, 4>) {
        let x = Vector3::new(y[0], y[1], y[2]);
        let d = self.field.field_at(y[3]).cross(&x);
        dy[0] = d.x;
        dy[1] = d.y;
        dy[2] = d.z;
        dy[3] = 1.0;
    }
}

struct Rotation<'a, F: ?Sized> {
    field: &'a F,
}

impl<F: DriveField + ?Sized> System<f64, SVector<f64, 10>> for Rotation<'_, F> {
    fn system(&self, _s: f64, y: &SVector<f64, 10>, dy: &mut SVector<f64, 10>) {
        let h = self.field.field_at(y[9]);
        for col in 0..3 {
            let v = Vector3::new(y[3 * col], y[3 * col + 1], y[3 * col + 2]);
            let d = h.cross(&v);
            dy[3 * col] = d.x;
            dy[3 * col + 1] = d.y;
            dy[3 * col + 2] = d.z;
        }
        dy[9] = 1.0;
    }
}

struct Spinor<'a, F: ?Sized> {
    field: &'a F,
}

fn hamiltonian(h: &BlochVector) -> Matrix2<Complex64> {
    let half = 0.5;
    Matrix2::new(
        Complex64::new(half * h.z, 0.0),
        Complex64::new(half * h.x, -half * h.y),
        Complex64::new(half * h.x, half * h.y),
        Complex64::new(-half * h.z, 0.0),
    )
}

fn unpack2(y: &SVector<f64, 9>) -> Matrix2<Complex64> {
    Matrix2::new(
        Complex64::new(y[0], y[1]),
        Complex64::new(y[2], y[3]),
        Complex64::new(y[4], y[5]),
        Complex64::new(y[6], y[7]),
    )
}

fn pack2(m: &Matrix2<Complex64>, t: f64) -> SVector<f64, 9> {
    SVector::<f64, 9>::from_column_slice(&[
        m[(0, 0)].re,
        m[(0, 0)].im,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(1, 0)].re,
        m[(1, 0)].im,
        m[(1, 1)].re,
        m[(1, 1)].im,
        t,
    ])
}

impl<F: DriveField + ?Sized> System<f64, SVector<f64, 9>> for Spinor<'_, F> {
    fn system(&self, _s: f64, y: &SVector<f64, 9>, dy: &mut SVector<f64, 9>) {
        let u = unpack2(y);
        let d = hamiltonian(&self.field.field_at(y[8])) * u * Complex64::new(0.0, -1.0);
        *dy = pack2(&d, 1.0);
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} out of range (0, 1e-2)")));
    }
    Ok(())
}

fn integration_error(e: impl std::fmt::Display) -> Error {
    Error::Integration(e.to_string())
}

/// Integrates `dX/dt = h × X` from `t0` to `t1` and returns `samples + 1`
/// equally spaced states (both endpoints included).
pub fn evolve_classical<F: DriveField + ?Sized>(
    field: &F,
    x0: BlochVector,
    t0: f64,
    t1: f64,
    tol: f64,
    samples: usize,
) -> Result<Trajectory> {
    check_tol(tol)?;
    if !(t1 > t0) || samples == 0 {
        return Err(Error::InvalidParameter("need t1 > t0 and at least one sample".into()));
    }
    let span = t1 - t0;
    let dx = span / samples as f64;
    let system = Classical { field };
    let y0 = SVector::<f64, 4>::new(x0.x, x0.y, x0.z, t0);
    let mut solver = Dop853::from_param(
        system,
        0.0,
        span + 0.5 * dx,
        dx,
        y0,
        tol,
        tol,
        0.9,
        0.0,
        0.333,
        6.0,
        span + 0.5 * dx,
        0.0,
        10_000_000,
        NO_STIFFNESS_CHECK,
        OutputType::Dense,
    );
    solver.integrate().map_err(integration_error)?;
    let ys = solver.y_out();
    if ys.len() < samples + 1 {
        return Err(Error::Integration(format!(
            "dense output produced {} of {} samples",
            ys.len(),
            samples + 1
        )));
    }
    let states = ys[..=samples].iter().map(|y| Vector3::new(y[0], y[1], y[2])).collect();
    let times = (0..=samples).map(|k| t0 + span * k as f64 / samples as f64).collect();
    Ok(Trajectory { times, states })
}

/// Final state of `dX/dt = h × X` over `[t0, t1]`.
pub fn propagate<F: DriveField + ?Sized>(field: &F, x0: BlochVector, t0: f64, t1: f64, tol: f64) -> Result<BlochVector> {
    check_tol(tol)?;
    if !(t1 > t0) {
        return Err(Error::InvalidParameter("need t1 > t0".into()));
    }
    let y0 = SVector::<f64, 4>::new(x0.x, x0.y, x0.z, t0);
    let y = integrate_sparse(Classical { field }, y0, t1 - t0, tol)?;
    Ok(Vector3::new(y[0], y[1], y[2]))
}

fn integrate_sparse<S, const D: usize>(system: S, y0: SVector<f64, D>, span: f64, tol: f64) -> Result<SVector<f64, D>>
where
    S: System<f64, SVector<f64, D>>,
{
    let mut solver = Dop853::from_param(
        system,
        0.0,
        span,
        span,
        y0,
        tol,
        tol,
        0.9,
        0.0,
        0.333,
        6.0,
        span,
        0.0,
        10_000_000,
        NO_STIFFNESS_CHECK,
        OutputType::Sparse,
    );
    solver.integrate().map_err(integration_error)?;
    solver
        .y_out()
        .last()
        .copied()
        .ok_or_else(|| Error::Integration("no output".into()))
}

/// One-period rotation `M` with `X(t0 + T) = M X(t0)`.
#[derive(Debug, Clone, Copy)]
pub struct Monodromy3 {
    pub matrix: Matrix3<f64>,
    pub omega: f64,
}

/// One-period propagator `U` with `ψ(t0 + T) = U ψ(t0)`.
#[derive(Debug, Clone, Copy)]
pub struct Monodromy2 {
    pub matrix: Matrix2<Complex64>,
    pub omega: f64,
}

pub fn monodromy_so3<F: DriveField + ?Sized>(field: &F, t0: f64, tol: f64) -> Result<Monodromy3> {
    check_tol(tol)?;
    let mut y0 = SVector::<f64, 10>::zeros();
    y0[0] = 1.0;
    y0[4] = 1.0;
    y0[8] = 1.0;
    y0[9] = t0;
    let y = integrate_sparse(Rotation { field }, y0, field.period(), tol)?;
    Ok(Monodromy3 { matrix: Matrix3::from_column_slice(&y.as_slice()[..9]), omega: field.omega() })
}

pub fn monodromy_su2<F: DriveField + ?Sized>(field: &F, t0: f64, tol: f64) -> Result<Monodromy2> {
    check_tol(tol)?;
    let y0 = pack2(&Matrix2::identity(), t0);
    let y = integrate_sparse(Spinor { field }, y0, field.period(), tol)?;
    Ok(Monodromy2 { matrix: unpack2(&y), omega: field.omega() })
}

fn reduce(x: f64, modulus: f64) -> f64 {
    let r = x.rem_euclid(modulus);
    if r >= modulus {
        0.0
    } else {
        r
    }
}

impl Monodromy3 {
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    fn antisymmetric(&self) -> Vector3<f64> {
        let m = &self.matrix;
        0.5 * Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)])
    }

    /// Rotation angle `ρ ∈ [0, π]`, from both the trace and the antisymmetric
    /// part so that small angles keep full relative accuracy.
    pub fn rotation_angle(&self) -> f64 {
        let c = 0.5 * (self.matrix.trace() - 1.0);
        self.antisymmetric().norm().atan2(c)
    }

    /// Rotation angle in `(-π, π]` measured right-handedly about `axis`.
    pub fn signed_angle(&self, axis: &BlochVector) -> f64 {
        let c = 0.5 * (self.matrix.trace() - 1.0);
        self.antisymmetric().dot(&axis.normalize()).atan2(c)
    }

    /// Unit fixed axis of the rotation, with sign chosen so that `z >= 0`
    /// (then `x >= 0`, then `y >= 0`).
    pub fn periodic_axis(&self) -> Result<BlochVector> {
        let rho = self.rotation_angle();
        if rho < DEGENERATE_ANGLE {
            return Err(Error::DegenerateMonodromy { rho });
        }
        let a = self.matrix - Matrix3::identity();
        let rows = [a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose()];
        let mut best = Vector3::zeros();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let c = rows[i].cross(&rows[j]);
            if c.norm() > best.norm() {
                best = c;
            }
        }
        Ok(orient(best.normalize()))
    }

    /// `ρ / (2T)`: the quasienergy modulo `ω/2` up to sign.
    pub fn quasienergy(&self) -> f64 {
        self.rotation_angle() / (2.0 * self.period())
    }

    /// Quasienergy of the Floquet state whose Bloch vector is `axis`,
    /// determined by the rotation only modulo `ω/2`; reduced to `[0, ω/2)`.
    pub fn oriented_quasienergy(&self, axis: &BlochVector) -> f64 {
        reduce(self.signed_angle(axis) / (2.0 * self.period()), 0.5 * self.omega)
    }
}

/// A closed curve with period `2π/ω`, known through uniform samples.
pub trait PeriodicOrbit: Sync {
    fn omega(&self) -> f64;

    /// Time of the first sample.
    fn start(&self) -> f64 {
        0.0
    }

    /// The states at `start + k T / m` for `k = 0, …, m - 1`.
    fn sample(&self, m: usize) -> Result<Vec<BlochVector>>;
}

/// The solution through `x0` at `t0`, sampled by integration.
#[derive(Debug, Clone)]
pub struct IntegratedOrbit<F> {
    pub field: F,
    pub x0: BlochVector,
    pub t0: f64,
    pub tol: f64,
}

impl<F: DriveField> PeriodicOrbit for IntegratedOrbit<F> {
    fn omega(&self) -> f64 {
        self.field.omega()
    }

    fn start(&self) -> f64 {
        self.t0
    }

    fn sample(&self, m: usize) -> Result<Vec<BlochVector>> {
        let tr = evolve_classical(&self.field, self.x0, self.t0, self.t0 + self.field.period(), self.tol, m)?;
        let mut states = tr.states;
        states.truncate(m);
        Ok(states)
    }
}

/// Unit initial state at `t0` of the periodic solution (sign fixed by [`orient`]).
pub fn periodic_initial_state<F: DriveField + ?Sized>(field: &F, t0: f64, tol: f64) -> Result<BlochVector> {
    monodromy_so3(field, t0, tol)?.periodic_axis()
}

/// The periodic solution starting at `t0`.
pub fn periodic_orbit<F: DriveField + Clone>(field: &F, t0: f64, tol: f64) -> Result<IntegratedOrbit<F>> {
    let x0 = periodic_initial_state(field, t0, tol)?;
    Ok(IntegratedOrbit { field: field.clone(), x0, t0, tol })
}

/// Canonical sign for an axis: `z >= 0`, then `x >= 0`, then `y >= 0`.
pub fn orient(n: BlochVector) -> BlochVector {
    const EPS: f64 = 1e-14;
    let flip = if n.z.abs() > EPS {
        n.z < 0.0
    } else if n.x.abs() > EPS {
        n.x < 0.0
    } else {
        n.y < 0.0
    };
    if flip {
        -n
    } else {
        n
    }
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [Matrix2::new(o, one, one, o), Matrix2::new(o, -i, i, o), Matrix2::new(one, o, o, -one)]
}

/// Bloch vector `⟨ψ|σ|ψ⟩` of a spinor.
pub fn bloch_vector(psi: &nalgebra::Vector2<Complex64>) -> BlochVector {
    let s = pauli();
    let v: Vec<f64> = s.iter().map(|m| (psi.adjoint() * m * psi)[(0, 0)].re).collect();
    Vector3::new(v[0], v[1], v[2])
}

impl Monodromy2 {
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// Eigenphase `θ ∈ [0, π]` with eigenvalues `e^{±iθ}` (for unit determinant).
    pub fn eigenphase(&self) -> f64 {
        let u = &self.matrix;
        // Remove the global phase so the matrix is in SU(2).
        let det = u.determinant();
        let g = det.sqrt();
        let a = u[(0, 0)] / g;
        let d = u[(1, 1)] / g;
        let b = u[(1, 0)] / g;
        let c = u[(0, 1)] / g;
        let cos = 0.5 * (a + d).re;
        let imag = 0.5 * (a - d).im;
        let off = 0.5 * (b - c.conj()).norm();
        (imag.hypot(off)).atan2(cos)
    }

    /// Quasienergy `θ / T` reduced to the fundamental range `[0, ω/2]`.
    pub fn quasienergy(&self) -> f64 {
        self.eigenphase() / self.period()
    }

    /// Quasienergy in `[0, ω)` of the Floquet state whose Bloch vector is
    /// aligned with `axis`.
    pub fn oriented_quasienergy(&self, axis: &BlochVector) -> f64 {
        // U = exp(-iεT n·σ) up to the global phase; the σ-part is -i sin(εT) n.
        let u = &self.matrix;
        let g = u.determinant().sqrt();
        let v = self.su2_vector(g);
        let sin = v.dot(&axis.normalize());
        let cos = (0.5 * (u.trace() / g)).re;
        let theta = sin.atan2(cos);
        reduce(theta / self.period(), self.omega)
    }

    // Coefficients (n_x, n_y, n_z) sin θ of the anti-Hermitian part of U/g,
    // where U/g = cos θ - i sin θ n·σ.
    fn su2_vector(&self, g: Complex64) -> Vector3<f64> {
        let s = pauli();
        let u = self.matrix / g;
        let mut v = Vector3::zeros();
        for k in 0..3 {
            // tr(σ_k U)/2 = -i sin θ n_k
            let t = (s[k] * u).trace() * 0.5;
            v[k] = -t.im;
        }
        v
    }

    /// Image under the adjoint map, `M_ij = tr(σ_i U σ_j U†)/2`.
    pub fn adjoint(&self) -> Matrix3<f64> {
        let s = pauli();
        let u = self.matrix;
        let ud = u.adjoint();
        Matrix3::from_fn(|i, j| 0.5 * (s[i] * u * s[j] * ud).trace().re)
    }
}
