//! Dynamical states (force, couple, stress, couple-stress), virtual work and
//! the Cosserat balance residuals.
//!
//! Component conventions, with `s` the kinematical state:
//! - `force[mu]` is `F_mu`, paired with `dx^mu`;
//! - `couple[(mu, nu)]` is `M^nu_mu`, paired with `de^mu_nu` (stored `e[(mu, nu)]`);
//! - `stress[a][mu]` is `sigma^a_mu`, paired with `dx^mu_a`;
//! - `couple_stress[a][(mu, nu)]` is `mu^{nu a}_mu`, paired with `de^mu_{nu a}`.
//!
//! So the Lagrangian virtual-work density is an elementwise pairing. The
//! Eulerian density pairs the barred moments with `dI^{mu nu}` summed over all
//! index pairs, without a factor 1/2; `A_[mu nu] = (A_mu nu - A_nu mu) / 2`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::lower_first;
use crate::forms::{FormsError, Lattice};
use crate::kinematics::{is_integrable, JetPoint, KinematicalState};
use crate::lorentz::{eta, lower, max_abs};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("fields live on different lattices")]
    LatticeMismatch,
    #[error("point has {found} stress slots, lattice dimension is {expected}")]
    SlotCount { expected: usize, found: usize },
    #[error("virtual displacement is given in the {given:?} picture, {wanted:?} was requested")]
    PictureMismatch { given: Picture, wanted: Picture },
    #[error("kinematical state is not integrable (residual {residual:e} > {tol:e})")]
    NotIntegrable { residual: f64, tol: f64 },
    #[error("spatial form needs a 4-dimensional body, got {0}")]
    NotSpacetimeFilling(usize),
    #[error("embedding Jacobian is singular at point {point} (condition {condition:e})")]
    SingularJacobian { point: usize, condition: f64 },
    #[error("frame is singular at point {0}")]
    SingularFrame(usize),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalPoint {
    pub force: Vector4<f64>,
    pub couple: Matrix4<f64>,
    pub stress: Vec<Vector4<f64>>,
    pub couple_stress: Vec<Matrix4<f64>>,
}

impl DynamicalPoint {
    pub fn zero(p: usize) -> Self {
        DynamicalPoint {
            force: Vector4::zeros(),
            couple: Matrix4::zeros(),
            stress: vec![Vector4::zeros(); p],
            couple_stress: vec![Matrix4::zeros(); p],
        }
    }
}

/// The fundamental 1-form sampled on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalState {
    lattice: Lattice,
    points: Vec<DynamicalPoint>,
}

fn antisym(m: &Matrix4<f64>) -> Matrix4<f64> {
    (m - m.transpose()) * 0.5
}

fn outer_lowered(a: &Vector4<f64>, b: &Vector4<f64>) -> Matrix4<f64> {
    a * lower(b).transpose()
}

/// `sum_a A^a_mu ... (eta B_a)^T`, the right contraction used by every moment.
fn contract_frame(m: &Matrix4<f64>, e: &Matrix4<f64>) -> Matrix4<f64> {
    m * lower_first(e).transpose()
}

/// Part of `P_{mu nu}` that does not involve the couple `M`.
fn moment_sources(phi: &DynamicalPoint, s: &JetPoint) -> Matrix4<f64> {
    let mut p = outer_lowered(&phi.force, &s.x);
    for a in 0..phi.stress.len() {
        p += outer_lowered(&phi.stress[a], &s.x_d[a]);
        p += contract_frame(&phi.couple_stress[a], &s.e_d[a]);
    }
    p
}

/// `M_bar_{mu nu} = (F_mu x_nu + M^k_mu e_{nu k} + sigma^a_mu x_{nu a} + mu^{k a}_mu e_{nu k a})_[mu nu]`.
pub fn barred_couple(phi: &DynamicalPoint, s: &JetPoint) -> Matrix4<f64> {
    antisym(&(contract_frame(&phi.couple, &s.e) + moment_sources(phi, s)))
}

/// `mu_bar^a_{mu nu} = (mu^{k a}_mu e_{nu k} + sigma^a_mu x_nu)_[mu nu]`.
pub fn barred_couple_stress(phi: &DynamicalPoint, s: &JetPoint) -> Vec<Matrix4<f64>> {
    (0..phi.stress.len())
        .map(|a| antisym(&(contract_frame(&phi.couple_stress[a], &s.e) + outer_lowered(&phi.stress[a], &s.x))))
        .collect()
}

/// Couple-stress carried by the frame alone, `mu^{k a}_[mu e_nu] k`.
pub fn frame_couple_stress(phi: &DynamicalPoint, s: &JetPoint) -> Vec<Matrix4<f64>> {
    phi.couple_stress.iter().map(|m| antisym(&contract_frame(m, &s.e))).collect()
}

/// The couple `M` for which the barred couple equals `target` (antisymmetric).
pub fn couple_for_barred(
    target: &Matrix4<f64>,
    force: &Vector4<f64>,
    stress: &[Vector4<f64>],
    couple_stress: &[Matrix4<f64>],
    s: &JetPoint,
) -> Option<Matrix4<f64>> {
    let probe = DynamicalPoint { force: *force, couple: Matrix4::zeros(), stress: stress.to_vec(), couple_stress: couple_stress.to_vec() };
    let n = target - moment_sources(&probe, s);
    // couple * (eta e)^T = n
    let frame_t = lower_first(&s.e).transpose();
    frame_t.try_inverse().map(|inv| n * inv)
}

impl DynamicalState {
    pub fn new(lattice: &Lattice, points: Vec<DynamicalPoint>) -> Result<Self, DynamicsError> {
        if points.len() != lattice.len() {
            return Err(FormsError::Length { expected: lattice.len(), found: points.len() }.into());
        }
        if let Some(pt) = points.iter().find(|p| p.stress.len() != lattice.dim() || p.couple_stress.len() != lattice.dim()) {
            return Err(DynamicsError::SlotCount { expected: lattice.dim(), found: pt.stress.len().min(pt.couple_stress.len()) });
        }
        Ok(DynamicalState { lattice: lattice.clone(), points })
    }

    pub fn from_fn(lattice: &Lattice, f: impl Fn(&[f64]) -> DynamicalPoint) -> Result<Self, DynamicsError> {
        Self::new(lattice, (0..lattice.len()).map(|i| f(&lattice.coords(i))).collect())
    }

    /// Poincare-invariant form: zero force and the couple that makes the barred
    /// couple vanish, leaving stress and couple-stress free.
    pub fn poincare_invariant(
        s: &KinematicalState,
        stress: impl Fn(&[f64]) -> Vec<Vector4<f64>>,
        couple_stress: impl Fn(&[f64]) -> Vec<Matrix4<f64>>,
    ) -> Result<Self, DynamicsError> {
        let lattice = s.lattice();
        let mut points = Vec::with_capacity(lattice.len());
        for (i, sp) in s.points().iter().enumerate() {
            let r = lattice.coords(i);
            let (st, cs) = (stress(&r), couple_stress(&r));
            let force = Vector4::zeros();
            let couple = couple_for_barred(&Matrix4::zeros(), &force, &st, &cs, sp).ok_or(DynamicsError::SingularFrame(i))?;
            points.push(DynamicalPoint { force, couple, stress: st, couple_stress: cs });
        }
        Self::new(lattice, points)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[DynamicalPoint] {
        &self.points
    }

    fn check(&self, s: &KinematicalState) -> Result<(), DynamicsError> {
        if &self.lattice != s.lattice() {
            return Err(DynamicsError::LatticeMismatch);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Picture {
    Lagrangian,
    Eulerian,
}

/// Variation of a jet point in its own coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianVariation {
    pub dx: Vector4<f64>,
    pub de: Matrix4<f64>,
    pub dx_d: Vec<Vector4<f64>>,
    pub de_d: Vec<Matrix4<f64>>,
}

/// Variation by an infinitesimal Poincare displacement `(dxi, dI)` and its jets.
/// `di[(mu, nu)]` is `dI^mu_nu`, an element of so(1,3).
#[derive(Clone, Debug, PartialEq)]
pub struct EulerianVariation {
    pub dxi: Vector4<f64>,
    pub di: Matrix4<f64>,
    pub dxi_d: Vec<Vector4<f64>>,
    pub di_d: Vec<Matrix4<f64>>,
}

impl EulerianVariation {
    /// `dx = dxi + dI x`, `de = dI e`, `dx_a = dxi_a + dI_a x + dI x_a`, `de_a = dI_a e + dI e_a`.
    pub fn to_lagrangian(&self, s: &JetPoint) -> LagrangianVariation {
        let p = self.dxi_d.len();
        LagrangianVariation {
            dx: self.dxi + self.di * s.x,
            de: self.di * s.e,
            dx_d: (0..p).map(|a| self.dxi_d[a] + self.di_d[a] * s.x + self.di * s.x_d[a]).collect(),
            de_d: (0..p).map(|a| self.di_d[a] * s.e + self.di * s.e_d[a]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VirtualDisplacement {
    Lagrangian(Vec<LagrangianVariation>),
    Eulerian(Vec<EulerianVariation>),
}

impl VirtualDisplacement {
    pub fn picture(&self) -> Picture {
        match self {
            VirtualDisplacement::Lagrangian(_) => Picture::Lagrangian,
            VirtualDisplacement::Eulerian(_) => Picture::Eulerian,
        }
    }

    fn len(&self) -> usize {
        match self {
            VirtualDisplacement::Lagrangian(v) => v.len(),
            VirtualDisplacement::Eulerian(v) => v.len(),
        }
    }

    /// Converts an Eulerian variation to Lagrangian components over `s`.
    pub fn to_lagrangian(&self, s: &KinematicalState) -> VirtualDisplacement {
        match self {
            VirtualDisplacement::Lagrangian(_) => self.clone(),
            VirtualDisplacement::Eulerian(v) => {
                VirtualDisplacement::Lagrangian(v.iter().zip(s.points()).map(|(d, sp)| d.to_lagrangian(sp)).collect())
            }
        }
    }
}

fn frobenius(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    a.component_mul(b).sum()
}

fn raise_second(m: &Matrix4<f64>) -> Matrix4<f64> {
    m * eta()
}

pub fn lagrangian_density(phi: &DynamicalPoint, d: &LagrangianVariation) -> f64 {
    let mut w = phi.force.dot(&d.dx) + frobenius(&phi.couple, &d.de);
    for a in 0..phi.stress.len() {
        w += phi.stress[a].dot(&d.dx_d[a]) + frobenius(&phi.couple_stress[a], &d.de_d[a]);
    }
    w
}

pub fn eulerian_density(phi: &DynamicalPoint, s: &JetPoint, d: &EulerianVariation) -> f64 {
    let mbar = barred_couple(phi, s);
    let mubar = barred_couple_stress(phi, s);
    let mut w = phi.force.dot(&d.dxi) + frobenius(&mbar, &raise_second(&d.di));
    for a in 0..phi.stress.len() {
        w += phi.stress[a].dot(&d.dxi_d[a]) + frobenius(&mubar[a], &raise_second(&d.di_d[a]));
    }
    w
}

/// Pointwise virtual-work density; the displacement must be given in `picture`.
pub fn virtual_work_density(
    phi: &DynamicalState,
    s: &KinematicalState,
    ds: &VirtualDisplacement,
    picture: Picture,
) -> Result<Vec<f64>, DynamicsError> {
    phi.check(s)?;
    if ds.picture() != picture {
        return Err(DynamicsError::PictureMismatch { given: ds.picture(), wanted: picture });
    }
    if ds.len() != s.lattice().len() {
        return Err(FormsError::Length { expected: s.lattice().len(), found: ds.len() }.into());
    }
    Ok(match ds {
        VirtualDisplacement::Lagrangian(v) => phi.points.iter().zip(v).map(|(f, d)| lagrangian_density(f, d)).collect(),
        VirtualDisplacement::Eulerian(v) => phi
            .points
            .iter()
            .zip(s.points())
            .zip(v)
            .map(|((f, sp), d)| eulerian_density(f, sp, d))
            .collect(),
    })
}

/// Integrated virtual work of a 0-jet Eulerian variation `(dxi, dI)`, with
/// jets taken by lattice derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VirtualWork {
    /// `int (F - d_a sigma^a) dxi + (M_bar - d_a mu_bar^a) : dI`.
    pub bulk: f64,
    /// Flux `sigma^a dxi + mu_bar^a : dI` through the lattice boundary.
    pub boundary: f64,
    /// Integral of the density itself.
    pub direct: f64,
}

pub fn total_virtual_work(
    phi: &DynamicalState,
    s: &KinematicalState,
    dxi: &[Vector4<f64>],
    di: &[Matrix4<f64>],
) -> Result<VirtualWork, DynamicsError> {
    phi.check(s)?;
    let lattice = s.lattice();
    let n = lattice.len();
    if dxi.len() != n || di.len() != n {
        return Err(FormsError::Length { expected: n, found: dxi.len().min(di.len()) }.into());
    }
    let p = lattice.dim();
    let mbar: Vec<Matrix4<f64>> = phi.points.iter().zip(s.points()).map(|(f, sp)| barred_couple(f, sp)).collect();
    let mubar: Vec<Vec<Matrix4<f64>>> =
        phi.points.iter().zip(s.points()).map(|(f, sp)| barred_couple_stress(f, sp)).collect();
    let mut div_sigma = vec![Vector4::zeros(); n];
    let mut div_mubar = vec![Matrix4::zeros(); n];
    let mut dxi_d = Vec::with_capacity(p);
    let mut di_d = Vec::with_capacity(p);
    for a in 0..p {
        let sig: Vec<Vector4<f64>> = phi.points.iter().map(|f| f.stress[a]).collect();
        let mu: Vec<Matrix4<f64>> = mubar.iter().map(|m| m[a]).collect();
        for (acc, d) in div_sigma.iter_mut().zip(lattice.partial(&sig, a)) {
            *acc += d;
        }
        for (acc, d) in div_mubar.iter_mut().zip(lattice.partial(&mu, a)) {
            *acc += d;
        }
        dxi_d.push(lattice.partial(dxi, a));
        di_d.push(lattice.partial(di, a));
    }
    let weights = lattice.quadrature_weights();
    let (mut bulk, mut direct) = (0.0, 0.0);
    let mut flux = Vec::with_capacity(n);
    for i in 0..n {
        let f = &phi.points[i];
        let di_up = raise_second(&di[i]);
        bulk += weights[i] * ((f.force - div_sigma[i]).dot(&dxi[i]) + frobenius(&(mbar[i] - div_mubar[i]), &di_up));
        let mut dens = f.force.dot(&dxi[i]) + frobenius(&mbar[i], &di_up);
        for a in 0..p {
            dens += f.stress[a].dot(&dxi_d[a][i]) + frobenius(&mubar[i][a], &raise_second(&di_d[a][i]));
        }
        direct += weights[i] * dens;
        flux.push((0..p).map(|a| f.stress[a].dot(&dxi[i]) + frobenius(&mubar[i][a], &di_up)).collect());
    }
    Ok(VirtualWork { bulk, boundary: lattice.boundary_flux(&flux), direct })
}

/// Max-norms of the force and of the barred couple; both vanish for a
/// Poincare-invariant form.
pub fn poincare_invariance_residual(phi: &DynamicalState, s: &KinematicalState) -> Result<(f64, f64), DynamicsError> {
    phi.check(s)?;
    let f = phi.points.iter().fold(0.0_f64, |m, p| m.max(p.force.amax()));
    let mb = phi.points.iter().zip(s.points()).fold(0.0_f64, |m, (p, sp)| m.max(max_abs(&barred_couple(p, sp))));
    Ok((f, mb))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualVariant {
    /// `r1 = F - d_a sigma^a`, `r2 = M_bar - d_a mu_bar^a`.
    General,
    /// Force and barred couple set to zero, spin source made explicit:
    /// `r1 = -d_a sigma^a`, `r2 = -(d_a mu^a_[mu nu] + sigma^a_[mu x_nu] a)` with the
    /// frame couple-stress of [`frame_couple_stress`].
    PoincareInvariant,
}

/// Balance residual fields on the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct CosseratResidual {
    lattice: Lattice,
    pub force: Vec<Vector4<f64>>,
    pub moment: Vec<Matrix4<f64>>,
}

/// Machine-readable residual summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub field: String,
    pub norm: f64,
    pub grid: Vec<usize>,
    pub order_estimate: Option<f64>,
}

impl CosseratResidual {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Interior max-norms of the force and moment residuals.
    pub fn interior_norms(&self) -> (f64, f64) {
        let mut r = (0.0_f64, 0.0_f64);
        for i in self.lattice.interior_indices() {
            r.0 = r.0.max(self.force[i].amax());
            r.1 = r.1.max(max_abs(&self.moment[i]));
        }
        r
    }

    pub fn reports(&self, order: Option<(f64, f64)>) -> Vec<ResidualReport> {
        let (f, m) = self.interior_norms();
        let grid = self.lattice.shape().to_vec();
        vec![
            ResidualReport { field: "force".into(), norm: f, grid: grid.clone(), order_estimate: order.map(|o| o.0) },
            ResidualReport { field: "moment".into(), norm: m, grid, order_estimate: order.map(|o| o.1) },
        ]
    }
}

/// Observed order from norms on two grids whose spacing differs by `refinement`.
pub fn convergence_order(coarse: f64, fine: f64, refinement: f64) -> f64 {
    (coarse / fine).ln() / refinement.ln()
}

fn divergence_vec(lattice: &Lattice, fields: &[Vec<Vector4<f64>>]) -> Vec<Vector4<f64>> {
    let mut out = vec![Vector4::zeros(); lattice.len()];
    for (a, f) in fields.iter().enumerate() {
        for (acc, d) in out.iter_mut().zip(lattice.partial(f, a)) {
            *acc += d;
        }
    }
    out
}

fn divergence_mat(lattice: &Lattice, fields: &[Vec<Matrix4<f64>>]) -> Vec<Matrix4<f64>> {
    let mut out = vec![Matrix4::zeros(); lattice.len()];
    for (a, f) in fields.iter().enumerate() {
        for (acc, d) in out.iter_mut().zip(lattice.partial(f, a)) {
            *acc += d;
        }
    }
    out
}

/// Balance residuals. The state must be integrable to `integrability_tol`.
pub fn cosserat_residual(
    phi: &DynamicalState,
    s: &KinematicalState,
    variant: ResidualVariant,
    integrability_tol: f64,
) -> Result<CosseratResidual, DynamicsError> {
    phi.check(s)?;
    let rep = is_integrable(s, integrability_tol);
    if !rep.integrable {
        return Err(DynamicsError::NotIntegrable { residual: rep.residual, tol: integrability_tol });
    }
    let lattice = s.lattice();
    let p = lattice.dim();
    let stress: Vec<Vec<Vector4<f64>>> = (0..p).map(|a| phi.points.iter().map(|f| f.stress[a]).collect()).collect();
    let div_sigma = divergence_vec(lattice, &stress);
    let (force, moment) = match variant {
        ResidualVariant::General => {
            let mubar: Vec<Vec<Matrix4<f64>>> =
                phi.points.iter().zip(s.points()).map(|(f, sp)| barred_couple_stress(f, sp)).collect();
            let per_axis: Vec<Vec<Matrix4<f64>>> = (0..p).map(|a| mubar.iter().map(|m| m[a]).collect()).collect();
            let div_mu = divergence_mat(lattice, &per_axis);
            let force = phi.points.iter().zip(&div_sigma).map(|(f, d)| f.force - d).collect();
            let moment = phi
                .points
                .iter()
                .zip(s.points())
                .zip(&div_mu)
                .map(|((f, sp), d)| barred_couple(f, sp) - d)
                .collect();
            (force, moment)
        }
        ResidualVariant::PoincareInvariant => {
            let m: Vec<Vec<Matrix4<f64>>> =
                phi.points.iter().zip(s.points()).map(|(f, sp)| frame_couple_stress(f, sp)).collect();
            let per_axis: Vec<Vec<Matrix4<f64>>> = (0..p).map(|a| m.iter().map(|x| x[a]).collect()).collect();
            let div_m = divergence_mat(lattice, &per_axis);
            let force = div_sigma.iter().map(|d| -d).collect();
            let moment = phi
                .points
                .iter()
                .zip(s.points())
                .zip(&div_m)
                .map(|((f, sp), d)| {
                    let mut src = Matrix4::zeros();
                    for a in 0..p {
                        src += antisym(&outer_lowered(&f.stress[a], &sp.x_d[a]));
                    }
                    -(d + src)
                })
                .collect();
            (force, moment)
        }
    };
    Ok(CosseratResidual { lattice: lattice.clone(), force, moment })
}

/// Largest condition number accepted for the embedding Jacobian.
pub const MAX_JACOBIAN_CONDITION: f64 = 1e12;

/// Poincare-invariant balance written in spacetime coordinates of a
/// 4-dimensional body, via the chain rule through the embedding `x(rho)`:
/// `r1 = -d_nu sigma^nu_mu`, `r2 = -(d_k mu^k_[mu nu] + sigma_[mu nu])`, with the
/// spatial stresses the Piola transforms `sigma^nu = x^nu_a sigma^a / det(x_a)`.
pub fn spatialize(phi: &DynamicalState, s: &KinematicalState) -> Result<CosseratResidual, DynamicsError> {
    phi.check(s)?;
    let lattice = s.lattice();
    if lattice.dim() != 4 {
        return Err(DynamicsError::NotSpacetimeFilling(lattice.dim()));
    }
    let n = lattice.len();
    let mut jinv = Vec::with_capacity(n);
    // Spatial stress and couple-stress, indexed by the divergence index.
    let mut sig_sp: Vec<Vec<Vector4<f64>>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    let mut mu_sp: Vec<Vec<Matrix4<f64>>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    for (i, (f, sp)) in phi.points.iter().zip(s.points()).enumerate() {
        let j = Matrix4::from_columns(&[sp.x_d[0], sp.x_d[1], sp.x_d[2], sp.x_d[3]]);
        let sv = j.singular_values();
        let condition = sv.max() / sv.min();
        if !(condition <= MAX_JACOBIAN_CONDITION) {
            return Err(DynamicsError::SingularJacobian { point: i, condition });
        }
        let det = j.determinant();
        let m = frame_couple_stress(f, sp);
        for nu in 0..4 {
            let mut sv = Vector4::zeros();
            let mut mv = Matrix4::zeros();
            for a in 0..4 {
                sv += f.stress[a] * j[(nu, a)];
                mv += m[a] * j[(nu, a)];
            }
            sig_sp[nu].push(sv / det);
            mu_sp[nu].push(mv / det);
        }
        jinv.push(j.try_inverse().ok_or(DynamicsError::SingularJacobian { point: i, condition })?);
    }
    // d_nu T^nu = sum_a x~^a_nu d_a T^nu
    let mut div_sig = vec![Vector4::zeros(); n];
    let mut div_mu = vec![Matrix4::zeros(); n];
    for nu in 0..4 {
        for a in 0..4 {
            let ds = lattice.partial(&sig_sp[nu], a);
            let dm = lattice.partial(&mu_sp[nu], a);
            for i in 0..n {
                let c = jinv[i][(a, nu)];
                div_sig[i] += ds[i] * c;
                div_mu[i] += dm[i] * c;
            }
        }
    }
    let eta = eta();
    let force = div_sig.iter().map(|d| -d).collect();
    let moment = (0..n)
        .map(|i| {
            // sigma_{mu nu} = sigma^k_mu eta_{k nu}
            let s_low = Matrix4::from_fn(|mu, k| sig_sp[k][i][mu]) * eta;
            -(div_mu[i] + antisym(&s_low))
        })
        .collect();
    Ok(CosseratResidual { lattice: lattice.clone(), force, moment })
}

/// Derives the dynamical state `phi = dL/d(jet)` of a Lagrangian density by
/// central differences with relative step `rel_step`.
pub fn phi_from_lagrangian(
    lagrangian: impl Fn(&JetPoint) -> f64,
    s: &KinematicalState,
    rel_step: f64,
) -> Result<DynamicalState, DynamicsError> {
    let p = s.lattice().dim();
    let points = s
        .points()
        .iter()
        .map(|sp| {
            let base = sp.to_flat();
            let grad: Vec<f64> = (0..base.len())
                .map(|k| {
                    let h = rel_step * base[k].abs().max(1.0);
                    let mut plus = base.clone();
                    plus[k] += h;
                    let mut minus = base.clone();
                    minus[k] -= h;
                    (lagrangian(&JetPoint::from_flat(&plus, p)) - lagrangian(&JetPoint::from_flat(&minus, p))) / (2.0 * h)
                })
                .collect();
            let g = JetPoint::from_flat(&grad, p);
            DynamicalPoint { force: g.x, couple: g.e, stress: g.x_d, couple_stress: g.e_d }
        })
        .collect();
    DynamicalState::new(s.lattice(), points)
}
