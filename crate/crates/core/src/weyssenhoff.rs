//! Weyssenhoff spinning fluid: element state, momentum split, stress and spin
//! tensors, flow-field derivatives and a worldline integrator for a single
//! element.
//!
//! `g` is a covector (`g_mu`), `u` a vector, and `s[(mu, nu)] = s^mu_nu`, so the
//! Frenkel constraint reads `s u = 0`.

use std::io::Write;
use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lorentz::{dot, eta, lower, max_abs, FourVector, LorentzError};

#[derive(Debug, Error)]
pub enum WeyssenhoffError {
    #[error("u.u - c^2 = {residual:e}")]
    NotNormalized { residual: f64 },
    #[error("Frenkel constraint violated: |s u| = {residual:e}")]
    Frenkel { residual: f64 },
    #[error("lowered spin is not antisymmetric (defect {residual:e})")]
    SpinNotAntisymmetric { residual: f64 },
    #[error("acceleration is not orthogonal to u (u.a = {residual:e})")]
    NotOrthogonal { residual: f64 },
    #[error("transverse momentum is outside the range of the spin (residual {residual:e}) at step {step}")]
    ClosureUnsolvable { step: usize, residual: f64 },
    #[error("constraint drift {drift:e} exceeds {limit:e} at step {step}")]
    ConstraintDrift { step: usize, drift: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Default tolerance for the pointwise element invariants.
pub const ELEMENT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeyssenhoffElement {
    pub x: FourVector,
    pub u: FourVector,
    /// `g_mu`
    pub g: Vector4<f64>,
    /// `s^mu_nu`
    pub s: Matrix4<f64>,
    pub tau: f64,
}

/// `s_{mu nu}` from `s^mu_nu`.
pub fn lower_spin(s: &Matrix4<f64>) -> Matrix4<f64> {
    eta() * s
}

/// `s^mu_nu` from the six components `[s_01, s_02, s_03, s_12, s_13, s_23]`.
pub fn spin_from_lower(c: [f64; 6]) -> Matrix4<f64> {
    let mut low = Matrix4::zeros();
    for (k, (m, n)) in SPIN_PAIRS.iter().enumerate() {
        low[(*m, *n)] = c[k];
        low[(*n, *m)] = -c[k];
    }
    eta() * low
}

pub const SPIN_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn spin_components(s: &Matrix4<f64>) -> [f64; 6] {
    let low = lower_spin(s);
    SPIN_PAIRS.map(|(m, n)| low[(m, n)])
}

impl WeyssenhoffElement {
    /// Checks `u.u = c^2`, `s u = 0` and antisymmetry of `s_{mu nu}` to `tol`
    /// (relative to the size of the data).
    pub fn validate(&self, c: f64, tol: f64) -> Result<(), WeyssenhoffError> {
        let residual = self.u.interval() - c * c;
        if residual.abs() > tol * c * c {
            return Err(WeyssenhoffError::NotNormalized { residual });
        }
        let scale = max_abs(&self.s).max(1.0) * self.u.amax().max(1.0);
        let residual = (self.s * self.u.as_vector()).amax();
        if residual > tol * scale {
            return Err(WeyssenhoffError::Frenkel { residual });
        }
        let low = lower_spin(&self.s);
        let residual = max_abs(&(low + low.transpose()));
        if residual > tol * max_abs(&self.s).max(1.0) {
            return Err(WeyssenhoffError::SpinNotAntisymmetric { residual });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RestMass {
    /// `g.g >= 0`
    Real(f64),
    /// `g.g < 0`; holds `sqrt(-g.g)/c`.
    Imaginary(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentumSplit {
    pub rho0: f64,
    /// `pi_mu`
    pub pi: Vector4<f64>,
    pub mass: RestMass,
}

/// `rho0 c^2 = g_mu u^mu`, `pi = g - rho0 u`, `mu0^2 c^2 = g.g`.
pub fn split_momentum(g: &Vector4<f64>, u: &FourVector, c: f64) -> MomentumSplit {
    let c2 = c * c;
    let rho0 = g.dot(u.as_vector()) / c2;
    let pi = g - u.lower() * rho0;
    // g_mu g^mu with g^mu = eta g
    let gg = dot(g, g);
    let mass = if gg >= 0.0 { RestMass::Real(gg.sqrt() / c) } else { RestMass::Imaginary((-gg).sqrt() / c) };
    MomentumSplit { rho0, pi, mass }
}

/// `pi^mu = -(1/c^2) s^mu_nu a^nu`; requires `u.a = 0`.
pub fn transverse_momentum(u: &FourVector, s: &Matrix4<f64>, a: &Vector4<f64>, c: f64) -> Result<Vector4<f64>, WeyssenhoffError> {
    let residual = dot(u.as_vector(), a);
    if residual.abs() > ELEMENT_TOL * (c * a.amax()).max(1.0) {
        return Err(WeyssenhoffError::NotOrthogonal { residual });
    }
    Ok(-(s * a) / (c * c))
}

/// `g_nu = rho0 u_nu - (1/c^2) s_{nu mu} a^mu`.
pub fn momentum_from_state(u: &FourVector, s: &Matrix4<f64>, rho0: f64, a: &Vector4<f64>, c: f64) -> Result<Vector4<f64>, WeyssenhoffError> {
    let pi = transverse_momentum(u, s, a, c)?;
    Ok(u.lower() * rho0 + lower(&pi))
}

/// Energy-momentum and spin tensors of an element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StressTensors {
    /// `t[(nu, mu)] = T^nu_mu = u^nu g_mu`
    pub t: Matrix4<f64>,
    /// `spin[lam][(nu, mu)] = S^{nu lam}_mu = s^nu_mu u^lam`
    pub spin: [Matrix4<f64>; 4],
    /// Symmetric part of `T_{mu nu} = g_mu u_nu`.
    pub symmetric: Matrix4<f64>,
    /// Antisymmetric part of `T_{mu nu} = g_mu u_nu`, equal to `(pi_mu u_nu - pi_nu u_mu) / 2`.
    pub antisymmetric: Matrix4<f64>,
    pub trace: f64,
}

pub fn stress_tensors(e: &WeyssenhoffElement) -> StressTensors {
    let u = e.u.as_vector();
    let t = u * e.g.transpose();
    let low = e.g * e.u.lower().transpose();
    StressTensors {
        t,
        spin: std::array::from_fn(|l| e.s * u[l]),
        symmetric: (low + low.transpose()) * 0.5,
        antisymmetric: (low - low.transpose()) * 0.5,
        trace: t.trace(),
    }
}

type VecField = Box<dyn Fn(&Vector4<f64>) -> Vector4<f64> + Send + Sync>;
type MatField = Box<dyn Fn(&Vector4<f64>) -> Matrix4<f64> + Send + Sync>;

/// Finite-difference step for flow-field derivatives.
pub const FD_STEP: f64 = 1e-3;

/// Flow described by closures `u(x)`, `g_mu(x)`, `s^mu_nu(x)`.
pub struct FlowField {
    pub u: VecField,
    pub g: VecField,
    pub s: MatField,
    pub c: f64,
    pub step: f64,
}

/// Fourth-order central difference of `f` along axis `mu`.
fn diff<T>(f: &dyn Fn(&Vector4<f64>) -> T, x: &Vector4<f64>, mu: usize, h: f64) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let at = |k: f64| {
        let mut y = *x;
        y[mu] += k * h;
        f(&y)
    };
    (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) * (1.0 / (12.0 * h))
}

/// `j[(i, mu)] = d_mu f^i`
fn jacobian(f: &dyn Fn(&Vector4<f64>) -> Vector4<f64>, x: &Vector4<f64>, h: f64) -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    for mu in 0..4 {
        j.set_column(mu, &diff(f, x, mu, h));
    }
    j
}

/// With `jl[(nu, mu)] = d_mu v_nu`, returns `(d_mu v_nu - d_nu v_mu) / 2` at `(nu, mu)`.
fn curl(jl: &Matrix4<f64>) -> Matrix4<f64> {
    (jl - jl.transpose()) * 0.5
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowKinematics {
    /// `-(d_mu u_nu - d_nu u_mu) / 2`, indexed `(mu, nu)`.
    pub vorticity: Matrix4<f64>,
    /// `d_mu u^mu`
    pub compressibility: f64,
    /// `-(d_mu g_nu - d_nu g_mu) / 2`
    pub momentum_vorticity: Matrix4<f64>,
    /// `d_mu g^mu`
    pub momentum_divergence: f64,
    /// `u(rho0) + rho0 chi_k + d_mu pi^mu`
    pub momentum_divergence_expanded: f64,
}

impl FlowField {
    pub fn new(u: VecField, g: VecField, s: MatField, c: f64) -> Self {
        FlowField { u, g, s, c, step: FD_STEP }
    }

    pub fn element(&self, x: &Vector4<f64>) -> Result<WeyssenhoffElement, WeyssenhoffError> {
        Ok(WeyssenhoffElement {
            x: FourVector::try_from_vector(*x)?,
            u: FourVector::try_from_vector((self.u)(x))?,
            g: (self.g)(x),
            s: (self.s)(x),
            tau: 0.0,
        })
    }

    fn split_at(&self, x: &Vector4<f64>) -> (f64, Vector4<f64>) {
        let u = FourVector::from_vector_unchecked((self.u)(x));
        let sp = split_momentum(&(self.g)(x), &u, self.c);
        (sp.rho0, sp.pi)
    }

    pub fn kinematics(&self, x: &Vector4<f64>) -> FlowKinematics {
        let h = self.step;
        let ju = jacobian(&self.u, x, h);
        let jg = jacobian(&self.g, x, h);
        let compressibility = ju.trace();
        let momentum_divergence = (eta() * jg).trace();
        let u = (self.u)(x);
        let drho = Vector4::from_fn(|mu, _| diff(&|y: &Vector4<f64>| self.split_at(y).0, x, mu, h));
        let jpi = jacobian(&|y: &Vector4<f64>| eta() * self.split_at(y).1, x, h);
        let rho0 = self.split_at(x).0;
        FlowKinematics {
            vorticity: -curl(&(eta() * ju)).transpose(),
            compressibility,
            momentum_vorticity: -curl(&jg).transpose(),
            momentum_divergence,
            momentum_divergence_expanded: u.dot(&drho) + rho0 * compressibility + jpi.trace(),
        }
    }

    /// `d_tau f` two ways: `d_nu (f u^nu)` and `u^nu d_nu f + chi_k f`.
    pub fn density_derivative(&self, f: &dyn Fn(&Vector4<f64>) -> f64, x: &Vector4<f64>) -> (f64, f64) {
        let h = self.step;
        let flux = |y: &Vector4<f64>| (self.u)(y) * f(y);
        let divergence = jacobian(&flux, x, h).trace();
        let df = Vector4::from_fn(|mu, _| diff(f, x, mu, h));
        let comoving = (self.u)(x).dot(&df) + jacobian(&self.u, x, h).trace() * f(x);
        (divergence, comoving)
    }

    /// `d_lam L^{mu lam}_nu` for `L^{mu lam}_nu = x_nu T^{lam mu} - x^mu T^lam_nu`,
    /// with `T^lam_nu = u^lam g_nu`, together with `pi^mu u_nu - pi_nu u^mu`.
    pub fn orbital_divergence(&self, x: &Vector4<f64>) -> (Matrix4<f64>, Matrix4<f64>) {
        let h = self.step;
        let eta = eta();
        // Column lam of L^{. lam}_. as a matrix in (mu, nu)
        let slice = |lam: usize| {
            move |y: &Vector4<f64>| {
                let u = (self.u)(y);
                let g = (self.g)(y);
                let g_up = eta * g;
                let yl = lower(y);
                Matrix4::from_fn(|mu, nu| yl[nu] * u[lam] * g_up[mu] - y[mu] * u[lam] * g[nu])
            }
        };
        let mut div = Matrix4::zeros();
        for lam in 0..4 {
            div += diff(&slice(lam), x, lam, h);
        }
        let u = (self.u)(x);
        let (_, pi) = self.split_at(x);
        let expected = (eta * pi) * lower(&u).transpose() - u * pi.transpose();
        (div, expected)
    }
}

/// Integrator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dtau: f64,
    pub steps: usize,
    /// Re-normalize `u` and re-project `s` after each step.
    pub project: bool,
    /// Largest tolerated `|u.u - c^2|` or `|s u|`.
    pub max_drift: f64,
    /// Largest tolerated residual of the acceleration solve, relative to `|pi|`.
    pub closure_tol: f64,
    /// Keep every n-th step in the trajectory.
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dtau: 0.01, steps: 1000, project: false, max_drift: 1e-6, closure_tol: 1e-6, record_every: 1 }
    }
}

/// Initial data. The momentum is given directly as `g`, or built from `rho0`
/// and an acceleration orthogonal to `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    #[serde(default)]
    pub x: [f64; 4],
    pub u: [f64; 4],
    /// `[s_01, s_02, s_03, s_12, s_13, s_23]`
    #[serde(default)]
    pub spin: [f64; 6],
    pub g: Option<[f64; 4]>,
    pub rho0: Option<f64>,
    pub acceleration: Option<[f64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldlineConfig {
    #[serde(default = "unit")]
    pub c: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub initial: InitialCondition,
}

fn unit() -> f64 {
    1.0
}

impl WorldlineConfig {
    pub fn from_toml(text: &str) -> Result<Self, WeyssenhoffError> {
        toml::from_str(text).map_err(|e| WeyssenhoffError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, WeyssenhoffError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn initial_element(&self) -> Result<WeyssenhoffElement, WeyssenhoffError> {
        let init = &self.initial;
        let u = FourVector::try_from_vector(Vector4::from(init.u))?;
        let s = spin_from_lower(init.spin);
        let g = match (init.g, init.rho0) {
            (Some(g), None) => Vector4::from(g),
            (None, Some(rho0)) => {
                let a = Vector4::from(init.acceleration.unwrap_or_default());
                momentum_from_state(&u, &s, rho0, &a, self.c)?
            }
            _ => return Err(WeyssenhoffError::Config("give exactly one of `g` and `rho0`".into())),
        };
        if init.g.is_some() && init.acceleration.is_some() {
            return Err(WeyssenhoffError::Config("`acceleration` only applies with `rho0`".into()));
        }
        let e = WeyssenhoffElement { x: FourVector::try_from_vector(Vector4::from(init.x))?, u, g, s, tau: 0.0 };
        e.validate(self.c, ELEMENT_TOL)?;
        Ok(e)
    }
}

/// One trajectory sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub tau: f64,
    pub x: [f64; 4],
    pub u: [f64; 4],
    pub spin: [f64; 6],
    /// `u.u - c^2`
    pub mass_shell: f64,
    /// `max |s u|`
    pub frenkel: f64,
    /// `s_{mu nu} s^{mu nu}` minus its initial value
    pub spin_norm_drift: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_mass_shell: f64,
    pub max_frenkel: f64,
    pub max_spin_norm_drift: f64,
    /// `g` is held fixed, so this is zero unless something overwrote it.
    pub momentum_drift: f64,
    pub max_closure_residual: f64,
}

impl Diagnostics {
    /// Larger of the two constraint drifts.
    pub fn constraint_drift(&self) -> f64 {
        self.max_mass_shell.max(self.max_frenkel)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub diagnostics: Diagnostics,
}

fn spin_square(s: &Matrix4<f64>) -> f64 {
    // s_{mu nu} s^{mu nu} = tr(s^T-ish) in mixed form: s^mu_nu s^nu_mu
    (s * s).trace()
}

struct Rhs<'a> {
    g: &'a Vector4<f64>,
    c: f64,
    closure_tol: f64,
    /// Size of the initial spin; singular values far below it are rounding noise.
    spin_scale: f64,
}

impl Rhs<'_> {
    /// Acceleration from `-(1/c^2) s a = pi`, `u.a = 0`. Solved in the rest
    /// frame of `u`, where the spatial spin block has rank two; the solution
    /// is the one lying in the spin plane. Returns it with the relative closure
    /// residual.
    fn acceleration(&self, u: &Vector4<f64>, s: &Matrix4<f64>) -> (Vector4<f64>, Vector4<f64>, f64) {
        let c2 = self.c * self.c;
        let rho0 = self.g.dot(u) / c2;
        let pi = eta() * self.g - u * rho0;
        let a = match rest_frame_boost(u, self.c) {
            Some((l, li)) if self.spin_scale > 0.0 => {
                let sr = li * s * l;
                let pr = li * pi;
                let block = sr.fixed_view::<3, 3>(1, 1).into_owned();
                let rhs = -pr.fixed_rows::<3>(1).into_owned() * c2;
                let sol = rank_two_solve(&block, &rhs, 1e-12 * self.spin_scale);
                l * Vector4::new(0.0, sol[0], sol[1], sol[2])
            }
            _ => Vector4::zeros(),
        };
        let residual = (-(s * a) / c2 - pi).amax() / pi.amax().max(1.0);
        (a, pi, residual)
    }

    /// Right-hand side; the closure is enforced only at accepted states
    /// (`strict`), since intermediate stages sit slightly off the constraints.
    fn eval(&self, y: &State, strict: bool) -> Result<(State, f64), f64> {
        let (a, pi, residual) = self.acceleration(&y.u, &y.s);
        if strict && residual > self.closure_tol {
            return Err(residual);
        }
        let sd = pi * lower(&y.u).transpose() - y.u * lower(&pi).transpose();
        Ok((State { x: y.u, u: a, s: sd }, residual))
    }
}

/// Boost taking the rest frame to the frame where the velocity is `u`, and its inverse.
fn rest_frame_boost(u: &Vector4<f64>, c: f64) -> Option<(Matrix4<f64>, Matrix4<f64>)> {
    let mut l = Matrix4::identity();
    l[(0, 0)] = u[0] / c;
    for i in 1..4 {
        l[(0, i)] = u[i] / c;
        l[(i, 0)] = u[i] / c;
        for j in 1..4 {
            l[(i, j)] += u[i] * u[j] / (c * (u[0] + c));
        }
    }
    l.try_inverse().map(|li| (l, li))
}

/// Least-squares solve keeping only the two largest singular values; an
/// antisymmetric 3x3 block has rank two, the third is drift. Singular values
/// at or below `floor` are dropped as well.
fn rank_two_solve(m: &Matrix3<f64>, rhs: &Vector3<f64>, floor: f64) -> Vector3<f64> {
    let svd = m.svd(true, true);
    let (Some(uu), Some(vt)) = (svd.u, svd.v_t) else {
        return Vector3::zeros();
    };
    let sv = svd.singular_values;
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let floor = floor.max(1e-12 * sv[order[0]]);
    let mut x = Vector3::zeros();
    for &k in &order[..2] {
        if sv[k] > floor {
            x += vt.row(k).transpose() * (uu.column(k).dot(rhs) / sv[k]);
        }
    }
    x
}

#[derive(Clone, Copy)]
struct State {
    x: Vector4<f64>,
    u: Vector4<f64>,
    s: Matrix4<f64>,
}

impl State {
    fn axpy(&self, h: f64, d: &State) -> State {
        State { x: self.x + d.x * h, u: self.u + d.u * h, s: self.s + d.s * h }
    }
}

fn record(step: usize, tau: f64, y: &State, c: f64, s0: f64) -> TrajectoryRecord {
    TrajectoryRecord {
        step,
        tau,
        x: y.x.into(),
        u: y.u.into(),
        spin: spin_components(&y.s),
        mass_shell: dot(&y.u, &y.u) - c * c,
        frenkel: (y.s * y.u).amax(),
        spin_norm_drift: spin_square(&y.s) - s0,
    }
}

/// Integrates `x' = u`, `u' = a`, `s' = pi u_ - u pi_` with classical RK4
/// holding `g` fixed.
pub fn integrate_worldline(initial: &WeyssenhoffElement, c: f64, cfg: &IntegratorConfig) -> Result<Trajectory, WeyssenhoffError> {
    if !(cfg.dtau > 0.0 && cfg.dtau.is_finite()) || cfg.record_every == 0 {
        return Err(WeyssenhoffError::Config("dtau must be positive and record_every at least 1".into()));
    }
    initial.validate(c, ELEMENT_TOL)?;
    let g = initial.g;
    let rhs = Rhs { g: &g, c, closure_tol: cfg.closure_tol, spin_scale: max_abs(&initial.s) };
    let mut y = State { x: *initial.x.as_vector(), u: *initial.u.as_vector(), s: initial.s };
    let s0 = spin_square(&y.s);
    let mut diag = Diagnostics::default();
    let mut records = vec![record(0, initial.tau, &y, c, s0)];
    let h = cfg.dtau;
    for step in 1..=cfg.steps {
        let fail = |residual| WeyssenhoffError::ClosureUnsolvable { step, residual };
        let (k1, r1) = rhs.eval(&y, true).map_err(fail)?;
        let (k2, r2) = rhs.eval(&y.axpy(h / 2.0, &k1), false).map_err(fail)?;
        let (k3, r3) = rhs.eval(&y.axpy(h / 2.0, &k2), false).map_err(fail)?;
        let (k4, r4) = rhs.eval(&y.axpy(h, &k3), false).map_err(fail)?;
        diag.max_closure_residual = diag.max_closure_residual.max(r1.max(r2).max(r3).max(r4));
        y = State {
            x: y.x + (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * (h / 6.0),
            u: y.u + (k1.u + k2.u * 2.0 + k3.u * 2.0 + k4.u) * (h / 6.0),
            s: y.s + (k1.s + k2.s * 2.0 + k3.s * 2.0 + k4.s) * (h / 6.0),
        };
        if cfg.project {
            y.u *= c / dot(&y.u, &y.u).sqrt();
            let p = Matrix4::identity() - y.u * lower(&y.u).transpose() / (c * c);
            y.s = p * y.s * p;
        }
        let tau = initial.tau + step as f64 * h;
        let rec = record(step, tau, &y, c, s0);
        diag.max_mass_shell = diag.max_mass_shell.max(rec.mass_shell.abs());
        diag.max_frenkel = diag.max_frenkel.max(rec.frenkel);
        diag.max_spin_norm_drift = diag.max_spin_norm_drift.max(rec.spin_norm_drift.abs());
        let drift = rec.mass_shell.abs().max(rec.frenkel);
        if drift > cfg.max_drift {
            return Err(WeyssenhoffError::ConstraintDrift { step, drift, limit: cfg.max_drift });
        }
        if step % cfg.record_every == 0 || step == cfg.steps {
            records.push(rec);
        }
    }
    diag.momentum_drift = (g - initial.g).amax();
    Ok(Trajectory { records, diagnostics: diag })
}

const CSV_HEADER: [&str; 19] = [
    "step", "tau", "x0", "x1", "x2", "x3", "u0", "u1", "u2", "u3", "s01", "s02", "s03", "s12", "s13", "s23", "mass_shell",
    "frenkel", "spin_norm_drift",
];

impl Trajectory {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), WeyssenhoffError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            let mut row = vec![r.step.to_string(), r.tau.to_string()];
            row.extend(r.x.iter().chain(&r.u).chain(&r.spin).map(|v| v.to_string()));
            row.extend([r.mass_shell, r.frenkel, r.spin_norm_drift].map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), WeyssenhoffError> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::LorentzMatrix;

    fn rest_element(sigma: f64, alpha: f64, rho0: f64) -> WeyssenhoffElement {
        let u = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let s = spin_from_lower([0.0, 0.0, 0.0, sigma, 0.0, 0.0]);
        let g = momentum_from_state(&u, &s, rho0, &Vector4::new(0.0, alpha, 0.0, 0.0), 1.0).unwrap();
        WeyssenhoffElement { x: FourVector::zero(), u, g, s, tau: 0.0 }
    }

    #[test]
    fn rest_frame_transverse_momentum() {
        let e = rest_element(0.5, 0.3, 1.0);
        let pi = transverse_momentum(&e.u, &e.s, &Vector4::new(0.0, 0.3, 0.0, 0.0), 1.0).unwrap();
        assert!((pi - Vector4::new(0.0, 0.0, -0.15, 0.0)).amax() < 1e-15);
        // lowered: g = (rho0 c, 0, +0.15, 0)
        assert!((e.g - Vector4::new(1.0, 0.0, 0.15, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn non_orthogonal_acceleration_is_rejected() {
        let e = rest_element(0.5, 0.0, 1.0);
        assert!(matches!(
            transverse_momentum(&e.u, &e.s, &Vector4::new(0.1, 0.0, 0.0, 0.0), 1.0),
            Err(WeyssenhoffError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn rest_frame_stress_layout() {
        let e = rest_element(0.5, 0.3, 2.0);
        let t = stress_tensors(&e);
        assert!((t.trace - 2.0).abs() < 1e-15);
        assert_eq!(t.t.row(0).transpose(), e.g);
        assert!(t.t.fixed_rows::<3>(1).amax() == 0.0);
        let sp = split_momentum(&e.g, &e.u, 1.0);
        let expect = (sp.pi * e.u.lower().transpose() - e.u.lower() * sp.pi.transpose()) * 0.5;
        assert!((t.antisymmetric - expect).amax() < 1e-15);
    }

    #[test]
    fn spacelike_momentum_gives_imaginary_mass() {
        let u = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let sp = split_momentum(&Vector4::new(0.5, 1.0, 0.0, 0.0), &u, 1.0);
        assert!(matches!(sp.mass, RestMass::Imaginary(m) if (m - 0.75_f64.sqrt()).abs() < 1e-15));
    }

    #[test]
    fn uniform_flow_has_no_vorticity_or_compression() {
        let f = FlowField::new(
            Box::new(|_| Vector4::new(1.25, 0.75, 0.0, 0.0)),
            Box::new(|_| Vector4::new(1.25, -0.75, 0.0, 0.0)),
            Box::new(|_| Matrix4::zeros()),
            1.0,
        );
        let k = f.kinematics(&Vector4::new(0.1, 0.2, 0.3, 0.4));
        assert!(k.vorticity.amax() < 1e-12 && k.compressibility.abs() < 1e-12);
    }

    #[test]
    fn rotating_flow_vorticity_matches_curl() {
        // u = gamma (1, -w y, w x, 0), lowered spatial parts flip sign
        let w = 0.2;
        let u = move |x: &Vector4<f64>| {
            let v = Vector4::new(1.0, -w * x[2], w * x[1], 0.0);
            v / (1.0 - w * w * (x[1] * x[1] + x[2] * x[2])).sqrt()
        };
        let f = FlowField::new(Box::new(u), Box::new(u), Box::new(|_| Matrix4::zeros()), 1.0);
        let x = Vector4::new(0.0, 0.0, 0.0, 0.0);
        let k = f.kinematics(&x);
        // at the axis gamma = 1 with vanishing gradient; d_1 u_2 = -w, d_2 u_1 = w
        assert!((k.vorticity[(1, 2)] - w).abs() < 1e-9, "{}", k.vorticity);
        assert!((k.vorticity[(2, 1)] + w).abs() < 1e-9);
        assert!(k.compressibility.abs() < 1e-9);
    }

    #[test]
    fn spinless_dust_moves_in_a_straight_line() {
        let u = FourVector::new(1.25, 0.75, 0.0, 0.0);
        let e = WeyssenhoffElement { x: FourVector::zero(), u, g: u.lower() * 2.0, s: Matrix4::zeros(), tau: 0.0 };
        let tr = integrate_worldline(&e, 1.0, &IntegratorConfig { steps: 100, dtau: 0.1, ..Default::default() }).unwrap();
        let last = tr.records.last().unwrap();
        assert!((Vector4::from(last.x) - u.as_vector() * 10.0).amax() < 1e-12);
        assert!((Vector4::from(last.u) - u.as_vector()).amax() < 1e-15);
    }

    #[test]
    fn boosted_generic_element_conserves_constraints() {
        let e = rest_element(0.5, 0.3, 1.0);
        let l = LorentzMatrix::boost(1, 0.3).compose(&LorentzMatrix::boost(2, 0.2));
        let li = l.inverse();
        let e = WeyssenhoffElement {
            x: FourVector::zero(),
            u: l.apply(&e.u),
            g: li.matrix().transpose() * e.g,
            s: l.matrix() * e.s * li.matrix(),
            tau: 0.0,
        };
        let tr = integrate_worldline(&e, 1.0, &IntegratorConfig { steps: 500, dtau: 0.02, ..Default::default() }).unwrap();
        assert!(tr.diagnostics.constraint_drift() < 1e-8, "{:?}", tr.diagnostics);
        assert!(tr.diagnostics.max_closure_residual < 1e-4);
    }

    #[test]
    fn boosted_spinless_element_ignores_rounding_in_pi() {
        let e = rest_element(0.0, 0.0, 1.0);
        let l = LorentzMatrix::boost(3, -0.48);
        let li = l.inverse();
        let e = WeyssenhoffElement { x: FourVector::zero(), u: l.apply(&e.u), g: li.matrix().transpose() * e.g, s: Matrix4::zeros(), tau: 0.0 };
        let tr = integrate_worldline(&e, 1.0, &IntegratorConfig { steps: 200, dtau: 0.02, ..Default::default() }).unwrap();
        let last = tr.records.last().unwrap();
        assert!((Vector4::from(last.u) - e.u.as_vector()).amax() < 1e-12);
    }

    #[test]
    fn config_needs_a_single_momentum_source() {
        let bad = WorldlineConfig::from_toml("[initial]\nu = [1.0, 0.0, 0.0, 0.0]\n").unwrap();
        assert!(bad.initial_element().is_err());
        let ok = WorldlineConfig::from_toml("c = 1.0\n[integrator]\nsteps = 3\n[initial]\nu = [1.0, 0.0, 0.0, 0.0]\nrho0 = 1.0\n").unwrap();
        assert_eq!(ok.integrator.steps, 3);
        assert!((ok.initial_element().unwrap().g[0] - 1.0).abs() < 1e-15);
    }
}
