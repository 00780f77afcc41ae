//! Dirac spinor fields built from finitely many plane waves, with their
//! bilinear currents: probability current, energy-momentum, spin, and the
//! Takabayasi decomposition.
//!
//! Plane waves are `psi = w exp(-i s p_mu x^mu)` with `s = +1` (positive energy)
//! or `s = -1`, and `p` measured in the units of `kappa = mc/hbar`. Every
//! derivative is analytic.
//!
//! Bilinears carry an explicit factor of `i` so that they come out real:
//! `T^mu_nu = (i hbar c / 2)(psibar g^mu d_nu psi - d_nu psibar g^mu psi)` and
//! `S^{lam mu}_nu = -(i hbar c / 8) psibar (g^mu g^lam g_nu - g_nu g^lam g^mu) psi`.

use nalgebra::{Complex, Matrix2, Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

use crate::expm::expm;
use crate::lorentz::{dot, eta, lower, FourVector, Units, ETA_DIAG};

pub type C64 = Complex<f64>;
pub type Spinor = Vector4<C64>;
pub type CMatrix4 = Matrix4<C64>;

/// Largest imaginary residue accepted in a bilinear that should be real,
/// relative to its scale.
pub const IMAGINARY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DiracError {
    #[error("momentum is off shell: p.p - kappa^2 = {residual:e}")]
    OffShell { residual: f64 },
    #[error("plane waves need p^0 > 0, got {0}")]
    NegativeFrequency(f64),
    #[error("kappa must be finite and non-negative, got {0}")]
    InvalidMass(f64),
    #[error("bilinear has imaginary part {value:e}; gamma basis is inconsistent")]
    ImaginaryPart { value: f64 },
    #[error("current is not timelike (j.j = {0:e})")]
    NotTimelike(f64),
    #[error("density vanishes, Takabayasi angle undefined")]
    ZeroDensity,
    #[error("superposition mixes different mass parameters")]
    MixedMass,
    #[error("superposition is empty")]
    Empty,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn block(a: Matrix2<C64>, b: Matrix2<C64>, cm: Matrix2<C64>, d: Matrix2<C64>) -> CMatrix4 {
    let mut m = CMatrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&cm);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

pub fn pauli(i: usize) -> Matrix2<C64> {
    let (o, z) = (c(1.0), c(0.0));
    match i {
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -I, I, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("pauli index {i} out of range 1..=3"),
    }
}

/// Gamma matrices in the Dirac representation.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaBasis {
    /// `gamma^mu`
    pub upper: [CMatrix4; 4],
    /// `gamma_mu = eta_{mu nu} gamma^nu`
    pub lower: [CMatrix4; 4],
    /// `gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3`
    pub five: CMatrix4,
}

impl Default for GammaBasis {
    fn default() -> Self {
        Self::dirac()
    }
}

impl GammaBasis {
    pub fn dirac() -> Self {
        let id = Matrix2::identity();
        let z = Matrix2::zeros();
        let g0 = block(id, z, z, -id);
        let gi = |i| block(z, pauli(i), -pauli(i), z);
        let upper = [g0, gi(1), gi(2), gi(3)];
        let lower = std::array::from_fn(|m| upper[m] * c(ETA_DIAG[m]));
        let five = upper[0] * upper[1] * upper[2] * upper[3] * I;
        GammaBasis { upper, lower, five }
    }

    /// Max deviation of `g_mu g_nu + g_nu g_mu` from `2 eta_{mu nu}` over all 16 pairs.
    pub fn clifford_residual(&self) -> f64 {
        let mut r = 0.0_f64;
        for m in 0..4 {
            for n in 0..4 {
                let anti = self.lower[m] * self.lower[n] + self.lower[n] * self.lower[m];
                let target = CMatrix4::identity() * c(2.0 * eta()[(m, n)]);
                r = r.max(cmax(&(anti - target)));
            }
        }
        r
    }

    /// Max deviation from `gamma^0` Hermitian and `gamma^i` anti-Hermitian.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r = cmax(&(self.upper[0] - self.upper[0].adjoint()));
        for g in &self.upper[1..] {
            r = r.max(cmax(&(g + g.adjoint())));
        }
        r
    }

    /// `psibar m chi = a^dagger gamma^0 m chi`.
    pub fn bilinear(&self, a: &Spinor, m: &CMatrix4, b: &Spinor) -> C64 {
        (a.adjoint() * self.upper[0] * m * b)[(0, 0)]
    }

    /// Spinor image of the Lorentz generator `omega` (`omega[(mu, nu)] = omega^mu_nu`):
    /// `exp((1/8) omega_{mu nu} [g^mu, g^nu])`.
    pub fn spinor_transform(&self, omega: &Matrix4<f64>) -> CMatrix4 {
        let low = eta() * omega;
        let mut gen = CMatrix4::zeros();
        for m in 0..4 {
            for n in 0..4 {
                let comm = self.upper[m] * self.upper[n] - self.upper[n] * self.upper[m];
                gen += comm * c(low[(m, n)] / 8.0);
            }
        }
        expm(&gen)
    }
}

fn cmax(m: &CMatrix4) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    fn value(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }
}

/// Any spinor field with analytic first and second derivatives.
pub trait SpinorField {
    fn kappa(&self) -> f64;
    fn units(&self) -> Units;
    fn value(&self, x: &Vector4<f64>) -> Spinor;
    /// `d_mu psi` for mu = 0..3.
    fn gradient(&self, x: &Vector4<f64>) -> [Spinor; 4];
    /// `d_mu d_nu psi`.
    fn hessian(&self, x: &Vector4<f64>) -> [[Spinor; 4]; 4];
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveState {
    p: FourVector,
    amplitude: Spinor,
    sign: EnergySign,
    kappa: f64,
    units: Units,
}

/// Relative tolerance on the mass shell.
pub const SHELL_TOL: f64 = 1e-9;

impl PlaneWaveState {
    /// Normalized solution of `(g^mu p_mu -/+ kappa) w = 0` with spin index 0 or 1
    /// along the third axis in the rest frame.
    pub fn new(p: FourVector, kappa: f64, spin: usize, sign: EnergySign, units: Units) -> Result<Self, DiracError> {
        Self::check_shell(&p, kappa)?;
        let e = p[0];
        let sp = pauli(1) * c(p[1]) + pauli(2) * c(p[2]) + pauli(3) * c(p[3]);
        let chi = if spin == 0 { nalgebra::Vector2::new(c(1.0), c(0.0)) } else { nalgebra::Vector2::new(c(0.0), c(1.0)) };
        let other = sp * chi / c(e + kappa);
        let w = match sign {
            EnergySign::Positive => Spinor::new(chi[0], chi[1], other[0], other[1]),
            EnergySign::Negative => Spinor::new(other[0], other[1], chi[0], chi[1]),
        };
        Ok(PlaneWaveState { p, amplitude: w.normalize(), sign, kappa, units })
    }

    /// Plane wave with a caller-supplied amplitude, not projected onto the
    /// solution space; used to probe how residuals respond.
    pub fn with_amplitude(p: FourVector, kappa: f64, amplitude: Spinor, sign: EnergySign, units: Units) -> Result<Self, DiracError> {
        Self::check_shell(&p, kappa)?;
        Ok(PlaneWaveState { p, amplitude, sign, kappa, units })
    }

    fn check_shell(p: &FourVector, kappa: f64) -> Result<(), DiracError> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(DiracError::InvalidMass(kappa));
        }
        if !(p[0] > 0.0) {
            return Err(DiracError::NegativeFrequency(p[0]));
        }
        let residual = p.interval() - kappa * kappa;
        if residual.abs() > SHELL_TOL * p[0] * p[0] {
            return Err(DiracError::OffShell { residual });
        }
        Ok(())
    }

    pub fn momentum(&self) -> &FourVector {
        &self.p
    }

    pub fn amplitude(&self) -> &Spinor {
        &self.amplitude
    }

    pub fn sign(&self) -> EnergySign {
        self.sign
    }

    /// Same wave with amplitude `m w`.
    pub fn transformed(&self, m: &CMatrix4, p: FourVector) -> Result<Self, DiracError> {
        Self::with_amplitude(p, self.kappa, m * self.amplitude, self.sign, self.units)
    }

    /// `-i s p_mu`, the factor each derivative brings down.
    fn factor(&self, mu: usize) -> C64 {
        -I * c(self.sign.value() * lower(&self.p)[mu])
    }
}

impl SpinorField for PlaneWaveState {
    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn units(&self) -> Units {
        self.units
    }

    fn value(&self, x: &Vector4<f64>) -> Spinor {
        let phase = -self.sign.value() * dot(&self.p, x);
        self.amplitude * C64::from_polar(1.0, phase)
    }

    fn gradient(&self, x: &Vector4<f64>) -> [Spinor; 4] {
        let v = self.value(x);
        std::array::from_fn(|m| v * self.factor(m))
    }

    fn hessian(&self, x: &Vector4<f64>) -> [[Spinor; 4]; 4] {
        let v = self.value(x);
        std::array::from_fn(|m| std::array::from_fn(|n| v * (self.factor(m) * self.factor(n))))
    }
}

/// Finite complex combination of plane waves sharing one mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition {
    terms: Vec<(C64, PlaneWaveState)>,
}

impl Superposition {
    pub fn new(terms: Vec<(C64, PlaneWaveState)>) -> Result<Self, DiracError> {
        let first = terms.first().ok_or(DiracError::Empty)?;
        if terms.iter().any(|(_, w)| w.kappa != first.1.kappa || w.units != first.1.units) {
            return Err(DiracError::MixedMass);
        }
        Ok(Superposition { terms })
    }

    pub fn terms(&self) -> &[(C64, PlaneWaveState)] {
        &self.terms
    }
}

impl SpinorField for Superposition {
    fn kappa(&self) -> f64 {
        self.terms[0].1.kappa
    }

    fn units(&self) -> Units {
        self.terms[0].1.units
    }

    fn value(&self, x: &Vector4<f64>) -> Spinor {
        self.terms.iter().map(|(a, w)| w.value(x) * *a).sum()
    }

    fn gradient(&self, x: &Vector4<f64>) -> [Spinor; 4] {
        let mut out = [Spinor::zeros(); 4];
        for (a, w) in &self.terms {
            for (o, g) in out.iter_mut().zip(w.gradient(x)) {
                *o += g * *a;
            }
        }
        out
    }

    fn hessian(&self, x: &Vector4<f64>) -> [[Spinor; 4]; 4] {
        let mut out = [[Spinor::zeros(); 4]; 4];
        for (a, w) in &self.terms {
            let h = w.hessian(x);
            for m in 0..4 {
                for n in 0..4 {
                    out[m][n] += h[m][n] * *a;
                }
            }
        }
        out
    }
}

/// Max of `|i g^mu d_mu psi - kappa psi|` and of the conjugate equation
/// `|i d_mu psibar g^mu + kappa psibar|`.
pub fn dirac_residual(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> f64 {
    let psi = f.value(x);
    let d = f.gradient(x);
    let mut lhs = -psi * c(f.kappa());
    let mut conj = (psi.adjoint() * g.upper[0]) * c(f.kappa());
    for m in 0..4 {
        lhs += g.upper[m] * d[m] * I;
        conj += d[m].adjoint() * g.upper[0] * g.upper[m] * I;
    }
    lhs.iter().chain(conj.iter()).fold(0.0_f64, |a, z| a.max(z.norm()))
}

fn real_checked(z: C64, scale: f64) -> Result<f64, DiracError> {
    if z.im.abs() > IMAGINARY_TOL * scale.max(1.0) {
        return Err(DiracError::ImaginaryPart { value: z.im });
    }
    Ok(z.re)
}

/// `S^mu = psibar g^mu psi`, the current without its `hbar c` factor.
fn current_raw(g: &GammaBasis, psi: &Spinor) -> Result<Vector4<f64>, DiracError> {
    let scale = psi.norm_squared();
    let mut s = Vector4::zeros();
    for m in 0..4 {
        s[m] = real_checked(g.bilinear(psi, &g.upper[m], psi), scale)?;
    }
    Ok(s)
}

/// `j^mu = hbar c psibar g^mu psi`.
pub fn current_j(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Result<FourVector, DiracError> {
    let u = f.units();
    Ok(FourVector::from_vector_unchecked(current_raw(g, &f.value(x))? * (u.hbar * u.c)))
}

/// `rho = |j| / (hbar c)` and `u = j / (hbar rho)`, so that `u.u = c^2`.
pub fn density_velocity(j: &FourVector, units: Units) -> Result<(f64, FourVector), DiracError> {
    let jj = j.interval();
    if !(jj > 0.0) || !(j[0] > 0.0) {
        return Err(DiracError::NotTimelike(jj));
    }
    let rho = jj.sqrt() / (units.hbar * units.c);
    Ok((rho, FourVector::from_vector_unchecked(j.as_vector() / (units.hbar * rho))))
}

/// `T[(mu, nu)] = T^mu_nu`.
pub fn energy_momentum(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Result<Matrix4<f64>, DiracError> {
    let psi = f.value(x);
    let d = f.gradient(x);
    let u = f.units();
    let scale = psi.norm() * d.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut t = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let z = (g.bilinear(&psi, &g.upper[m], &d[n]) - g.bilinear(&d[n], &g.upper[m], &psi)) * I * c(0.5);
            t[(m, n)] = real_checked(z, scale)? * u.hbar * u.c;
        }
    }
    Ok(t)
}

/// `T_[mu nu]` from its own formula,
/// `(i hbar c / 2)(psibar g_[mu d_nu] psi - d_[nu psibar g_mu] psi)`.
pub fn antisymmetric_energy_momentum(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Matrix4<f64> {
    let psi = f.value(x);
    let d = f.gradient(x);
    let u = f.units();
    let term = |m: usize, n: usize| (g.bilinear(&psi, &g.lower[m], &d[n]) - g.bilinear(&d[n], &g.lower[m], &psi)) * I * c(0.5);
    Matrix4::from_fn(|m, n| ((term(m, n) - term(n, m)) * c(0.5)).re * u.hbar * u.c)
}

/// Rank-3 tensor `S^{lam mu}_nu`, stored as `self.0[lam][(mu, nu)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinTensor(pub [Matrix4<f64>; 4]);

impl SpinTensor {
    pub fn get(&self, lam: usize, mu: usize, nu: usize) -> f64 {
        self.0[lam][(mu, nu)]
    }

    /// All indices lowered, `S_{lam mu nu}`.
    pub fn lowered(&self) -> SpinTensor {
        SpinTensor(std::array::from_fn(|l| Matrix4::from_fn(|m, n| ETA_DIAG[l] * ETA_DIAG[m] * self.0[l][(m, n)])))
    }

    /// Largest deviation of the lowered tensor from total antisymmetry.
    pub fn antisymmetry_defect(&self) -> f64 {
        let s = self.lowered();
        let mut r = 0.0_f64;
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    r = r.max((s.get(l, m, n) + s.get(m, l, n)).abs()).max((s.get(l, m, n) + s.get(n, m, l)).abs());
                }
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(crate::lorentz::max_abs).fold(0.0, f64::max)
    }

    fn sub(&self, o: &SpinTensor) -> SpinTensor {
        SpinTensor(std::array::from_fn(|l| self.0[l] - o.0[l]))
    }
}

fn spin_from(g: &GammaBasis, a: &Spinor, b: &Spinor, reduced: bool) -> [[[C64; 4]; 4]; 4] {
    std::array::from_fn(|l| {
        std::array::from_fn(|m| {
            std::array::from_fn(|n| {
                let fwd = g.upper[m] * g.upper[l] * g.lower[n];
                if reduced {
                    g.bilinear(a, &fwd, b) * (-I * c(0.25))
                } else {
                    let back = g.lower[n] * g.upper[l] * g.upper[m];
                    g.bilinear(a, &(fwd - back), b) * (-I * c(0.125))
                }
            })
        })
    })
}

/// Antisymmetrized spin tensor `-(i hbar c/8) psibar (g^mu g^lam g_nu - g_nu g^lam g^mu) psi`.
pub fn spin_tensor_antisymmetrized(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Result<SpinTensor, DiracError> {
    let psi = f.value(x);
    let u = f.units();
    let raw = spin_from(g, &psi, &psi, false);
    let mut out = [Matrix4::zeros(); 4];
    for l in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                out[l][(m, n)] = real_checked(raw[l][m][n], psi.norm_squared())? * u.hbar * u.c;
            }
        }
    }
    Ok(SpinTensor(out))
}

/// Reduced spin tensor, the real part of `-(i hbar c/4) psibar g^mu g^lam g_nu psi`.
pub fn spin_tensor_reduced(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> SpinTensor {
    let psi = f.value(x);
    let u = f.units();
    let raw = spin_from(g, &psi, &psi, true);
    SpinTensor(std::array::from_fn(|l| Matrix4::from_fn(|m, n| raw[l][m][n].re * u.hbar * u.c)))
}

/// Frenkel spin `S^mu_nu = u_lam S^{lam mu}_nu`.
pub fn frenkel_spin(s: &SpinTensor, u: &FourVector) -> Matrix4<f64> {
    let ul = u.lower();
    (0..4).map(|l| s.0[l] * ul[l]).sum()
}

/// Spin tensors at a point with the defect between the two forms.
pub fn spin_tensor(
    g: &GammaBasis,
    f: &impl SpinorField,
    x: &Vector4<f64>,
    u: &FourVector,
) -> Result<(SpinTensor, Matrix4<f64>, f64), DiracError> {
    let full = spin_tensor_antisymmetrized(g, f, x)?;
    let defect = full.sub(&spin_tensor_reduced(g, f, x)).max_abs();
    let frenkel = frenkel_spin(&full, u);
    Ok((full, frenkel, defect))
}

/// Pointwise residuals of `d_mu(rho u^mu) = 0`, `d_mu T^mu_nu = 0` and
/// `d_mu S^{lam mu}_nu (lowered lam) = T_[lam nu]`, plus the size of `T_[lam nu]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConservationReport {
    pub current: f64,
    pub energy_momentum: f64,
    pub angular_momentum: f64,
    pub antisymmetric_stress: f64,
}

impl ConservationReport {
    fn merge(self, o: ConservationReport) -> ConservationReport {
        ConservationReport {
            current: self.current.max(o.current),
            energy_momentum: self.energy_momentum.max(o.energy_momentum),
            angular_momentum: self.angular_momentum.max(o.angular_momentum),
            antisymmetric_stress: self.antisymmetric_stress.max(o.antisymmetric_stress),
        }
    }
}

fn conservation_at(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Result<ConservationReport, DiracError> {
    let psi = f.value(x);
    let d = f.gradient(x);
    let h = f.hessian(x);
    let u = f.units();
    let hc = u.hbar * u.c;

    // rho u = c psibar g psi
    let mut div_j = C64::new(0.0, 0.0);
    for m in 0..4 {
        div_j += g.bilinear(&d[m], &g.upper[m], &psi) + g.bilinear(&psi, &g.upper[m], &d[m]);
    }
    let current = div_j.norm() * u.c;

    let mut div_t = Vector4::<f64>::zeros();
    for n in 0..4 {
        let mut z = C64::new(0.0, 0.0);
        for m in 0..4 {
            z += g.bilinear(&d[m], &g.upper[m], &d[n]) + g.bilinear(&psi, &g.upper[m], &h[m][n])
                - g.bilinear(&h[m][n], &g.upper[m], &psi)
                - g.bilinear(&d[n], &g.upper[m], &d[m]);
        }
        div_t[n] = (z * I * c(0.5)).norm() * hc;
    }

    let t = energy_momentum(g, f, x)?;
    let t_low = eta() * t;
    let t_anti = (t_low - t_low.transpose()) * 0.5;
    let mut div_s = Matrix4::<f64>::zeros();
    for m in 0..4 {
        let a = spin_from(g, &d[m], &psi, false);
        let b = spin_from(g, &psi, &d[m], false);
        for l in 0..4 {
            for n in 0..4 {
                div_s[(l, n)] += ETA_DIAG[l] * (a[l][m][n] + b[l][m][n]).re * hc;
            }
        }
    }
    Ok(ConservationReport {
        current,
        energy_momentum: div_t.amax(),
        angular_momentum: crate::lorentz::max_abs(&(div_s - t_anti)),
        antisymmetric_stress: crate::lorentz::max_abs(&t_anti),
    })
}

/// Max of the conservation residuals over the sample points.
pub fn conservation_report(g: &GammaBasis, f: &impl SpinorField, points: &[Vector4<f64>]) -> Result<ConservationReport, DiracError> {
    points.iter().try_fold(ConservationReport::default(), |acc, x| Ok(acc.merge(conservation_at(g, f, x)?)))
}

/// `epsilon_{mu nu kappa lam}` with `epsilon_{0123} = +1`.
pub fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut v = idx;
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i] == v[j] {
                return 0.0;
            }
            if v[i] > v[j] {
                v.swap(i, j);
                sign = -sign;
            }
        }
    }
    sign
}

/// `S_{mu nu} = (1/2) eps_{mu nu k l} u^k Shat^l`.
pub fn dual_spin(u: &FourVector, s_hat: &Vector4<f64>) -> Matrix4<f64> {
    Matrix4::from_fn(|m, n| {
        let mut acc = 0.0;
        for k in 0..4 {
            for l in 0..4 {
                acc += levi_civita([m, n, k, l]) * u[k] * s_hat[l];
            }
        }
        0.5 * acc
    })
}

/// Inverse of [`dual_spin`] for `S_{mu nu} u^nu = 0`:
/// `Shat^b = -(1/c^2) eps^{mu nu a b} u_a S_{mu nu}`, where `eps^{0123} = -1`.
pub fn spin_vector(u: &FourVector, s_low: &Matrix4<f64>, c2: f64) -> Vector4<f64> {
    let ul = u.lower();
    Vector4::from_fn(|b, _| {
        let mut acc = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                for a in 0..4 {
                    acc -= levi_civita([m, n, a, b]) * ul[a] * s_low[(m, n)];
                }
            }
        }
        -acc / c2
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Takabayasi {
    /// `psibar psi`
    pub omega: f64,
    /// `i psibar g5 psi`
    pub omega_hat: f64,
    pub angle: f64,
    pub spin_vector: Vector4<f64>,
    /// `S_{mu nu}`, the lowered Frenkel spin.
    pub spin_form: Matrix4<f64>,
    pub heat_current: Vector4<f64>,
    /// `theta[(mu, nu)] = theta^mu_nu`
    pub theta: Matrix4<f64>,
    pub pressure: f64,
    pub rest_mass_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurrentBundle {
    pub j: FourVector,
    pub rho: f64,
    pub u: FourVector,
    pub energy_momentum: Matrix4<f64>,
    pub spin: SpinTensor,
    pub frenkel_spin: Matrix4<f64>,
    pub takabayasi: Takabayasi,
}

/// Takabayasi quantities with analytic derivatives of the angle and velocity.
/// `theta^mu_nu = X^mu_nu + (1/c^2) X^mu_k u^k u_nu` with
/// `X^mu_nu = (hbar c/2) d_nu A Shat^mu + S^mu_l d_nu u^l`, `-c^2 q^mu = X^mu_nu u^nu`,
/// pressure `theta^mu_mu / 3` and `mu_0 = m_0 rho cos A + pressure / c^2`.
pub fn takabayasi(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Result<Takabayasi, DiracError> {
    let units = f.units();
    let c2 = units.c * units.c;
    let psi = f.value(x);
    let d = f.gradient(x);
    let id = CMatrix4::identity();
    let omega = g.bilinear(&psi, &id, &psi).re;
    let omega_hat = (g.bilinear(&psi, &g.five, &psi) * I).re;
    let rho2 = omega * omega + omega_hat * omega_hat;
    if rho2 <= f64::MIN_POSITIVE {
        return Err(DiracError::ZeroDensity);
    }
    let angle = omega_hat.atan2(omega);
    let mut d_angle = Vector4::zeros();
    for n in 0..4 {
        let d_om = (g.bilinear(&d[n], &id, &psi) + g.bilinear(&psi, &id, &d[n])).re;
        let d_oh = ((g.bilinear(&d[n], &g.five, &psi) + g.bilinear(&psi, &g.five, &d[n])) * I).re;
        d_angle[n] = (omega * d_oh - omega_hat * d_om) / rho2;
    }

    let s = current_raw(g, &psi)?;
    let rho = dot(&s, &s).sqrt();
    if !(rho > 0.0) {
        return Err(DiracError::ZeroDensity);
    }
    let u = FourVector::from_vector_unchecked(s * (units.c / rho));
    // du[(l, n)] = d_n u^l
    let mut du = Matrix4::zeros();
    for n in 0..4 {
        let ds = Vector4::from_fn(|m, _| (g.bilinear(&d[n], &g.upper[m], &psi) + g.bilinear(&psi, &g.upper[m], &d[n])).re);
        let drho = dot(&s, &ds) / rho;
        du.set_column(n, &((ds / rho - s * (drho / (rho * rho))) * units.c));
    }

    let full = spin_tensor_antisymmetrized(g, f, x)?;
    let frenkel = frenkel_spin(&full, &u);
    let spin_form = eta() * frenkel;
    let s_hat = spin_vector(&u, &spin_form, c2);

    let hc2 = 0.5 * units.hbar * units.c;
    let xmat = s_hat * d_angle.transpose() * hc2 + frenkel * du;
    let xu = xmat * u.as_vector();
    let heat_current = -xu / c2;
    let theta = xmat + xu * u.lower().transpose() / c2;
    let pressure = theta.trace() / 3.0;
    let m0 = f.kappa() * units.hbar / units.c;
    Ok(Takabayasi {
        omega,
        omega_hat,
        angle,
        spin_vector: s_hat,
        spin_form,
        heat_current,
        theta,
        pressure,
        rest_mass_density: m0 * rho * angle.cos() + pressure / c2,
    })
}

pub fn currents(g: &GammaBasis, f: &impl SpinorField, x: &Vector4<f64>) -> Result<CurrentBundle, DiracError> {
    let j = current_j(g, f, x)?;
    let (rho, u) = density_velocity(&j, f.units())?;
    let spin = spin_tensor_antisymmetrized(g, f, x)?;
    Ok(CurrentBundle {
        energy_momentum: energy_momentum(g, f, x)?,
        frenkel_spin: frenkel_spin(&spin, &u),
        takabayasi: takabayasi(g, f, x)?,
        spin,
        j,
        rho,
        u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::LorentzMatrix;

    fn on_shell(kappa: f64, k: [f64; 3]) -> FourVector {
        let e = (kappa * kappa + k.iter().map(|v| v * v).sum::<f64>()).sqrt();
        FourVector::new(e, k[0], k[1], k[2])
    }

    fn rest(sign: EnergySign, spin: usize) -> PlaneWaveState {
        PlaneWaveState::new(on_shell(1.0, [0.0; 3]), 1.0, spin, sign, Units::default()).unwrap()
    }

    #[test]
    fn dirac_representation_satisfies_clifford_and_hermiticity() {
        let g = GammaBasis::dirac();
        assert!(g.clifford_residual() <= 1e-14);
        assert!(g.hermiticity_residual() <= 1e-14);
    }

    #[test]
    fn rest_frame_amplitudes() {
        let w = rest(EnergySign::Positive, 0);
        assert!((w.amplitude() - Spinor::new(c(1.0), c(0.0), c(0.0), c(0.0))).norm() < 1e-15);
        let v = rest(EnergySign::Negative, 1);
        assert!(v.amplitude()[0].norm() + v.amplitude()[1].norm() < 1e-15);
    }

    #[test]
    fn off_shell_momentum_is_rejected() {
        let p = FourVector::new(1.0, 0.5, 0.0, 0.0);
        assert!(matches!(
            PlaneWaveState::new(p, 1.0, 0, EnergySign::Positive, Units::default()),
            Err(DiracError::OffShell { .. })
        ));
    }

    #[test]
    fn massless_wave_solves_the_equation() {
        let g = GammaBasis::dirac();
        let w = PlaneWaveState::new(on_shell(0.0, [0.0, 0.0, 2.0]), 0.0, 0, EnergySign::Positive, Units::default()).unwrap();
        assert!(dirac_residual(&g, &w, &Vector4::new(0.3, 1.0, -2.0, 0.5)) < 1e-12);
    }

    #[test]
    fn perturbed_amplitude_shows_proportional_residual() {
        let g = GammaBasis::dirac();
        let w = PlaneWaveState::new(on_shell(1.0, [0.4, -0.2, 0.7]), 1.0, 1, EnergySign::Positive, Units::default()).unwrap();
        let delta = Spinor::new(c(0.0), c(0.0), c(1e-3), c(0.0));
        let bad = PlaneWaveState::with_amplitude(*w.momentum(), 1.0, w.amplitude() + delta, EnergySign::Positive, Units::default()).unwrap();
        let r = dirac_residual(&g, &bad, &Vector4::zeros());
        assert!(r > 1e-4 && r < 1e-2, "{r}");
    }

    #[test]
    fn rest_frame_current_and_stress() {
        let g = GammaBasis::dirac();
        let units = Units::new(2.0, 0.5).unwrap();
        let w = PlaneWaveState::new(FourVector::new(1.5, 0.0, 0.0, 0.0), 1.5, 0, EnergySign::Positive, units).unwrap();
        let x = Vector4::new(0.1, 0.2, 0.3, 0.4);
        let j = current_j(&g, &w, &x).unwrap();
        assert!((j.as_vector() - Vector4::new(1.0, 0.0, 0.0, 0.0)).amax() < 1e-14);
        let (rho, u) = density_velocity(&j, units).unwrap();
        assert!((rho - 1.0).abs() < 1e-14 && (u[0] - 2.0).abs() < 1e-14);
        let t = energy_momentum(&g, &w, &x).unwrap();
        let mut expect = Matrix4::zeros();
        expect[(0, 0)] = 1.5;
        assert!((t - expect).amax() < 1e-14);
    }

    #[test]
    fn boosted_wave_moves_with_its_momentum() {
        let g = GammaBasis::dirac();
        let w = PlaneWaveState::new(on_shell(2.0, [0.3, 1.1, -0.4]), 2.0, 1, EnergySign::Positive, Units::default()).unwrap();
        let j = current_j(&g, &w, &Vector4::zeros()).unwrap();
        let (_, u) = density_velocity(&j, Units::default()).unwrap();
        assert!((u.as_vector() - w.momentum().as_vector() / 2.0).amax() < 1e-12);
    }

    #[test]
    fn spinor_transform_rotates_and_boosts_the_current() {
        let g = GammaBasis::dirac();
        let w = PlaneWaveState::new(on_shell(1.0, [0.2, 0.1, 0.5]), 1.0, 0, EnergySign::Positive, Units::default()).unwrap();
        let j = current_j(&g, &w, &Vector4::zeros()).unwrap();
        let omega = crate::algebra::Generator::Rotation(3).element().w * 0.7 + crate::algebra::Generator::Boost(1).element().w * 0.4;
        let l = LorentzMatrix::try_new(crate::expm::expm(&omega), 1e-12).unwrap();
        let moved = w.transformed(&g.spinor_transform(&omega), l.apply(w.momentum())).unwrap();
        let j2 = current_j(&g, &moved, &Vector4::zeros()).unwrap();
        assert!((j2.as_vector() - l.matrix() * j.as_vector()).amax() < 1e-12);
        assert!(dirac_residual(&g, &moved, &Vector4::new(1.0, 0.0, 2.0, 0.0)) < 1e-12);
    }

    #[test]
    fn rest_frame_spin_up_has_a_single_spatial_block() {
        let g = GammaBasis::dirac();
        let w = rest(EnergySign::Positive, 0);
        let x = Vector4::zeros();
        let j = current_j(&g, &w, &x).unwrap();
        let (_, u) = density_velocity(&j, Units::default()).unwrap();
        let (full, frenkel, defect) = spin_tensor(&g, &w, &x, &u).unwrap();
        assert!(defect < 1e-12);
        assert!(full.antisymmetry_defect() < 1e-14);
        for m in 0..4 {
            for n in 0..4 {
                let expected = match (m, n) {
                    (1, 2) => -0.25,
                    (2, 1) => 0.25,
                    _ => 0.0,
                };
                assert!((frenkel[(m, n)] - expected).abs() < 1e-14, "{m}{n}: {}", frenkel[(m, n)]);
            }
        }
    }

    #[test]
    fn spin_form_roundtrips_through_its_dual() {
        let g = GammaBasis::dirac();
        let w = PlaneWaveState::new(on_shell(1.0, [0.5, -0.3, 0.8]), 1.0, 1, EnergySign::Positive, Units::default()).unwrap();
        let t = takabayasi(&g, &w, &Vector4::zeros()).unwrap();
        let j = current_j(&g, &w, &Vector4::zeros()).unwrap();
        let (_, u) = density_velocity(&j, Units::default()).unwrap();
        assert!((dual_spin(&u, &t.spin_vector) - t.spin_form).amax() < 1e-12);
    }

    #[test]
    fn rest_frame_takabayasi_record() {
        let g = GammaBasis::dirac();
        let t = takabayasi(&g, &rest(EnergySign::Positive, 0), &Vector4::new(0.3, 0.0, 1.0, 0.0)).unwrap();
        assert!(t.omega_hat.abs() < 1e-15 && t.angle.abs() < 1e-15);
        assert!(t.pressure.abs() < 1e-14);
        assert!((t.rest_mass_density - 1.0).abs() < 1e-14);
    }

    #[test]
    fn off_kernel_amplitude_only_breaks_angular_balance() {
        let g = GammaBasis::dirac();
        let p = on_shell(1.0, [0.6, 0.0, 0.2]);
        let amp = Spinor::new(c(0.8), c(0.1), c(0.3), C64::new(0.0, 0.2));
        let bad = PlaneWaveState::with_amplitude(p, 1.0, amp, EnergySign::Positive, Units::default()).unwrap();
        let r = conservation_report(&g, &bad, &[Vector4::zeros()]).unwrap();
        assert!(r.current < 1e-12 && r.energy_momentum < 1e-12);
        assert!(r.angular_momentum > 1e-3);
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita([0, 1, 2, 3]), 1.0);
        assert_eq!(levi_civita([1, 0, 2, 3]), -1.0);
        assert_eq!(levi_civita([3, 2, 1, 0]), 1.0);
        assert_eq!(levi_civita([0, 0, 2, 3]), 0.0);
    }
}
