//! Analytic fields and seeded random data shared by the suites and tests.

use cosserat::algebra::{from_coordinates, AlgebraElement, Generator};
use cosserat::dirac::{EnergySign, PlaneWaveState, Superposition, C64};
use cosserat::dynamics::{
    barred_couple_stress, couple_for_barred, frame_couple_stress, DynamicalPoint, DynamicalState, DynamicsError,
};
use cosserat::expm::expm;
use cosserat::forms::{FormField, Lattice};
use cosserat::kinematics::{prolong, JetPoint, KinematicalState};
use cosserat::lorentz::{lower, FourVector, LorentzMatrix, Units};
use cosserat::poincare::PoincareElement;
use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coord(r: &[f64], i: usize) -> f64 {
    r.get(i).copied().unwrap_or(0.0)
}

fn lorentz_exp(w: &Matrix4<f64>) -> LorentzMatrix {
    LorentzMatrix::try_new(expm(w), 1e-9).expect("exp of so(1,3) is Lorentz")
}

fn gen(g: Generator) -> Matrix4<f64> {
    g.element().w
}

/// Number of analytic displacement fields available from [`displacement`].
pub const DISPLACEMENT_FIELDS: usize = 3;

/// Smooth displacement fields `g(rho) = (a(rho), L(rho))` on the unit cube.
pub fn displacement(k: usize, r: &[f64]) -> PoincareElement {
    let (x, y, z) = (coord(r, 0), coord(r, 1), coord(r, 2));
    let (a, w) = match k {
        0 => (
            Vector4::new(x.sin(), x * y, y.cos() + z, 0.3 * x * x),
            gen(Generator::Rotation(3)) * (0.8 * x) + gen(Generator::Boost(1)) * (0.5 * y) + gen(Generator::Rotation(1)) * (0.4 * z),
        ),
        1 => (
            Vector4::new(0.5 * (x + y).exp(), -z * y, 0.2 * x, (x * y * z).sin()),
            gen(Generator::Boost(2)) * (x + y).sin() + gen(Generator::Rotation(2)) * (0.6 * x * y) + gen(Generator::Boost(3)) * (0.3 * z * x),
        ),
        _ => (
            Vector4::new(1.0, x * x - y, (2.0 * y).sin(), z * z),
            gen(Generator::Rotation(3)) * (0.7 * (x - y)) + gen(Generator::Boost(3)) * (0.4 * (x + z).cos()) + gen(Generator::Boost(1)) * (0.2 * x * y),
        ),
    };
    PoincareElement::new(FourVector::new(a[0], a[1], a[2], a[3]), lorentz_exp(&w))
}

/// A generic analytic algebra-valued 1-form, not the deformation of any
/// displacement, so its dislocation does not vanish.
pub fn generic_deformation(lattice: &Lattice) -> FormField<AlgebraElement> {
    FormField::from_fn(lattice, 1, |r, idx| {
        let a = idx[0] as f64 + 1.0;
        let (x, y, z) = (coord(r, 0), coord(r, 1), coord(r, 2));
        let v = Vector4::new((a * x).sin(), y * z + a, (x + a * y).cos(), a * x * y * z);
        let w = gen(Generator::Rotation(1)) * (a * y).sin()
            + gen(Generator::Rotation(3)) * (x * z + 0.5 * a)
            + gen(Generator::Boost(2)) * (a * x - y).cos()
            + gen(Generator::Boost(1)) * (0.3 * a * z * y);
        AlgebraElement::new(v, w)
    })
    .expect("1-forms exist on every lattice")
}

/// Fourth-order central difference of a closure along axis `a`; used as the
/// derivative oracle for manufactured solutions.
pub fn oracle_partial<T>(f: &dyn Fn(&[f64]) -> T, r: &[f64], a: usize) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let h = 1e-3;
    let at = |k: f64| {
        let mut y = r.to_vec();
        y[a] += k * h;
        f(&y)
    };
    (at(-2.0) - at(2.0) + (at(1.0) - at(-1.0)) * 8.0) * (1.0 / (12.0 * h))
}

/// Manufactured two-dimensional Cosserat problem: placement, stresses and
/// couple-stresses given by closures.
pub struct Manufactured;

impl Manufactured {
    pub fn placement(r: &[f64]) -> (Vector4<f64>, Matrix4<f64>) {
        let (x, y) = (r[0], r[1]);
        let pos = Vector4::new(x + 0.3 * y.sin(), y, 0.5 * x * y, 0.2 * x.cos());
        let e = expm(&(gen(Generator::Rotation(3)) * (0.4 * x))) * expm(&(gen(Generator::Boost(1)) * (0.3 * y)));
        (pos, e)
    }

    pub fn stress(r: &[f64]) -> Vec<Vector4<f64>> {
        let (x, y) = (r[0], r[1]);
        vec![
            Vector4::new(x.sin(), y * y, (x * y).cos(), 1.0 + x),
            Vector4::new(x * y, y.sin(), x - y, 0.5 * (x + y).exp()),
        ]
    }

    pub fn couple_stress(r: &[f64]) -> Vec<Matrix4<f64>> {
        let (x, y) = (r[0], r[1]);
        vec![
            Matrix4::from_fn(|i, j| ((i + 1) as f64 * x + (j as f64) * y).sin() * 0.5),
            Matrix4::from_fn(|i, j| ((i * j) as f64 * 0.1 + x * y).cos() * (i as f64 - j as f64 + 0.5) * 0.3),
        ]
    }

    /// Exact jet point of the placement.
    pub fn jet(r: &[f64]) -> JetPoint {
        let (x, e) = Self::placement(r);
        let px = |r: &[f64]| Self::placement(r).0;
        let pe = |r: &[f64]| Self::placement(r).1;
        JetPoint {
            x,
            e,
            x_d: (0..2).map(|a| oracle_partial(&px, r, a)).collect(),
            e_d: (0..2).map(|a| oracle_partial(&pe, r, a)).collect(),
        }
    }

    pub fn state(n: usize) -> KinematicalState {
        prolong(&Lattice::unit_cube(2, n).expect("n >= 3"), Self::placement).expect("Lorentz frames")
    }

    fn exact_point(r: &[f64]) -> DynamicalPoint {
        DynamicalPoint {
            force: Vector4::zeros(),
            couple: Matrix4::zeros(),
            stress: Self::stress(r),
            couple_stress: Self::couple_stress(r),
        }
    }

    /// Exact `d_a sigma^a`.
    pub fn stress_divergence(r: &[f64]) -> Vector4<f64> {
        (0..2).map(|a| oracle_partial(&|y: &[f64]| Self::stress(y)[a], r, a)).sum()
    }

    /// Exact `d_a mu_bar^a`.
    pub fn barred_divergence(r: &[f64]) -> Matrix4<f64> {
        (0..2)
            .map(|a| oracle_partial(&|y: &[f64]| barred_couple_stress(&Self::exact_point(y), &Self::jet(y))[a], r, a))
            .sum()
    }

    /// Exact residuals of the Poincare-invariant balance.
    pub fn invariant_residual(r: &[f64]) -> (Vector4<f64>, Matrix4<f64>) {
        let div_m: Matrix4<f64> =
            (0..2).map(|a| oracle_partial(&|y: &[f64]| frame_couple_stress(&Self::exact_point(y), &Self::jet(y))[a], r, a)).sum();
        let jet = Self::jet(r);
        let st = Self::stress(r);
        let src: Matrix4<f64> = (0..2)
            .map(|a| {
                let m = st[a] * lower(&jet.x_d[a]).transpose();
                (m - m.transpose()) * 0.5
            })
            .sum();
        (-Self::stress_divergence(r), -(div_m + src))
    }

    /// Dynamical state solving the general balance exactly: `F = d_a sigma^a`
    /// and the couple chosen so that `M_bar = d_a mu_bar^a`.
    pub fn balanced(s: &KinematicalState) -> Result<DynamicalState, DynamicsError> {
        let lattice = s.lattice();
        let points = s
            .points()
            .iter()
            .enumerate()
            .map(|(i, sp)| {
                let r = lattice.coords(i);
                let force = Self::stress_divergence(&r);
                let (st, cs) = (Self::stress(&r), Self::couple_stress(&r));
                let couple = couple_for_barred(&Self::barred_divergence(&r), &force, &st, &cs, sp)
                    .ok_or(DynamicsError::SingularFrame(i))?;
                Ok(DynamicalPoint { force, couple, stress: st, couple_stress: cs })
            })
            .collect::<Result<Vec<_>, DynamicsError>>()?;
        DynamicalState::new(lattice, points)
    }

    /// Poincare-invariant state with the manufactured stresses.
    pub fn invariant(s: &KinematicalState) -> Result<DynamicalState, DynamicsError> {
        DynamicalState::poincare_invariant(s, Self::stress, Self::couple_stress)
    }
}

pub fn uniform(rng: &mut impl Rng, scale: f64) -> f64 {
    rng.random_range(-scale..=scale)
}

pub fn random_vector(rng: &mut impl Rng, scale: f64) -> Vector4<f64> {
    Vector4::from_fn(|_, _| uniform(rng, scale))
}

pub fn random_matrix(rng: &mut impl Rng, scale: f64) -> Matrix4<f64> {
    Matrix4::from_fn(|_, _| uniform(rng, scale))
}

pub fn random_element(rng: &mut impl Rng, scale: f64) -> AlgebraElement {
    let mut c = [0.0; 10];
    for v in &mut c {
        *v = uniform(rng, scale);
    }
    from_coordinates(&c)
}

/// Random element of so(1,3) as a matrix `w^mu_nu`.
pub fn random_generator(rng: &mut impl Rng, scale: f64) -> Matrix4<f64> {
    random_element(rng, scale).w
}

pub fn random_lorentz(rng: &mut impl Rng, scale: f64) -> LorentzMatrix {
    lorentz_exp(&random_generator(rng, scale))
}

/// Jet point with Lorentz frame and Lorentz-valued frame derivatives.
pub fn random_jet(rng: &mut impl Rng, p: usize) -> JetPoint {
    let e = *random_lorentz(rng, 0.6).matrix();
    JetPoint {
        x: random_vector(rng, 1.0),
        e,
        x_d: (0..p).map(|_| random_vector(rng, 1.0)).collect(),
        e_d: (0..p).map(|_| random_generator(rng, 0.5) * e).collect(),
    }
}

pub fn random_dynamical_point(rng: &mut impl Rng, p: usize) -> DynamicalPoint {
    DynamicalPoint {
        force: random_vector(rng, 1.0),
        couple: random_matrix(rng, 1.0),
        stress: (0..p).map(|_| random_vector(rng, 1.0)).collect(),
        couple_stress: (0..p).map(|_| random_matrix(rng, 1.0)).collect(),
    }
}

pub fn on_shell(kappa: f64, k: Vector4<f64>) -> FourVector {
    let e = (kappa * kappa + k[1] * k[1] + k[2] * k[2] + k[3] * k[3]).sqrt();
    FourVector::new(e, k[1], k[2], k[3])
}

pub fn random_plane_wave(rng: &mut impl Rng, kappa: f64, units: Units) -> PlaneWaveState {
    let p = on_shell(kappa, random_vector(rng, 1.5));
    let sign = if rng.random_bool(0.5) { EnergySign::Positive } else { EnergySign::Negative };
    PlaneWaveState::new(p, kappa, rng.random_range(0..2), sign, units).expect("momentum is on shell")
}

pub fn random_superposition(rng: &mut impl Rng, kappa: f64, waves: usize, units: Units) -> Superposition {
    let terms = (0..waves)
        .map(|_| (C64::new(uniform(rng, 1.0), uniform(rng, 1.0)), random_plane_wave(rng, kappa, units)))
        .collect();
    Superposition::new(terms).expect("waves share kappa")
}
