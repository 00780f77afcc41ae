//! The Lie algebra iso(1,3): pairs `(v, w)` of a translation velocity and an
//! infinitesimal Lorentz matrix.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, Matrix5, Vector4};
use serde::{Deserialize, Serialize};

use crate::expm::expm;
use crate::lorentz::{lorentz_adjoint, max_abs, FourVector, LorentzMatrix, ETA_DIAG};
use crate::poincare::{AffineFrame, PoincareElement};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    pub v: Vector4<f64>,
    pub w: Matrix4<f64>,
}

impl AlgebraElement {
    pub fn new(v: Vector4<f64>, w: Matrix4<f64>) -> Self {
        AlgebraElement { v, w }
    }

    pub fn zero() -> Self {
        AlgebraElement { v: Vector4::zeros(), w: Matrix4::zeros() }
    }

    /// Max deviation of `eta w` from antisymmetry.
    pub fn lorentz_defect(&self) -> f64 {
        let lowered = lower_first(&self.w);
        max_abs(&(lowered + lowered.transpose()))
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.lorentz_defect() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.v.amax().max(max_abs(&self.w))
    }

    /// `[[0, 0], [v, w]]`.
    pub fn to_homogeneous(&self) -> Matrix5<f64> {
        let mut h = Matrix5::zeros();
        for i in 0..4 {
            h[(i + 1, 0)] = self.v[i];
            for j in 0..4 {
                h[(i + 1, j + 1)] = self.w[(i, j)];
            }
        }
        h
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, o: AlgebraElement) -> AlgebraElement {
        AlgebraElement { v: self.v + o.v, w: self.w + o.w }
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, o: AlgebraElement) -> AlgebraElement {
        AlgebraElement { v: self.v - o.v, w: self.w - o.w }
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { v: -self.v, w: -self.w }
    }
}

impl Mul<f64> for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, s: f64) -> AlgebraElement {
        AlgebraElement { v: self.v * s, w: self.w * s }
    }
}

/// `eta m`: lowers the first index.
pub(crate) fn lower_first(m: &Matrix4<f64>) -> Matrix4<f64> {
    let mut out = *m;
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] *= ETA_DIAG[i];
        }
    }
    out
}

/// `[(v, w), (v', w')] = (w v' - w' v, w w' - w' w)`.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    AlgebraElement { v: x.w * y.v - y.w * x.v, w: x.w * y.w - y.w * x.w }
}

/// Splits `w` into its rotation part (antisymmetric, no time row or column)
/// and its boost part (symmetric, only time row and column).
pub fn polarize(w: &Matrix4<f64>) -> (Matrix4<f64>, Matrix4<f64>) {
    let t = w.transpose();
    ((w - t) * 0.5, (w + t) * 0.5)
}

/// The split `w = (w - w*)/2 + (w + w*)/2` with respect to the Lorentz adjoint.
///
/// For elements of so(1,3) the second part vanishes; it measures how far a
/// general matrix is from being infinitesimally Lorentz.
pub fn lorentz_polarize(w: &Matrix4<f64>) -> (Matrix4<f64>, Matrix4<f64>) {
    let adj = lorentz_adjoint(w);
    ((w - adj) * 0.5, (w + adj) * 0.5)
}

/// Group exponential via the 5x5 homogeneous embedding.
pub fn exp(x: &AlgebraElement) -> PoincareElement {
    let h = expm(&x.to_homogeneous());
    let a = Vector4::new(h[(1, 0)], h[(2, 0)], h[(3, 0)], h[(4, 0)]);
    let l = h.fixed_view::<4, 4>(1, 1).into_owned();
    PoincareElement::new(
        FourVector::try_from_vector(a).expect("exponential of a finite element is finite"),
        LorentzMatrix::new_unchecked(l),
    )
}

/// Velocity of a frame moved by the one-parameter subgroup `exp(t x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameTangent {
    pub origin_velocity: Vector4<f64>,
    pub axes_velocity: Matrix4<f64>,
}

/// `d/dt act_on_frame(exp(t x), f)` at `t = 0`, that is `(E v, E w)`.
///
/// At the canonical frame this is `(v, w)` itself.
pub fn fundamental_vector(x: &AlgebraElement, frame: &AffineFrame) -> FrameTangent {
    let e = frame.axes.matrix();
    FrameTangent { origin_velocity: e * x.v, axes_velocity: e * x.w }
}

/// Labels of the ten basis generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    /// `delta_mu`, mu in 0..4.
    Translation(usize),
    /// `J_i`, i in 1..=3.
    Rotation(usize),
    /// `K_i`, i in 1..=3.
    Boost(usize),
}

/// Basis order used for coordinates: delta_0..delta_3, J_1..J_3, K_1..K_3.
pub const BASIS: [Generator; 10] = [
    Generator::Translation(0),
    Generator::Translation(1),
    Generator::Translation(2),
    Generator::Translation(3),
    Generator::Rotation(1),
    Generator::Rotation(2),
    Generator::Rotation(3),
    Generator::Boost(1),
    Generator::Boost(2),
    Generator::Boost(3),
];

impl Generator {
    pub fn name(&self) -> String {
        match self {
            Generator::Translation(mu) => format!("d{mu}"),
            Generator::Rotation(i) => format!("J{i}"),
            Generator::Boost(i) => format!("K{i}"),
        }
    }

    pub fn integer(&self) -> IntegerElement {
        let mut e = IntegerElement::zero();
        match *self {
            Generator::Translation(mu) => e.v[mu] = 1,
            Generator::Rotation(i) => {
                // J1: [2][3] = -1, [3][2] = 1 and cyclic.
                let (j, k) = match i {
                    1 => (2, 3),
                    2 => (3, 1),
                    3 => (1, 2),
                    _ => panic!("rotation index must be 1..=3"),
                };
                e.w[j][k] = -1;
                e.w[k][j] = 1;
            }
            Generator::Boost(i) => {
                assert!((1..=3).contains(&i), "boost index must be 1..=3");
                e.w[0][i] = 1;
                e.w[i][0] = 1;
            }
        }
        e
    }

    pub fn element(&self) -> AlgebraElement {
        self.integer().to_element()
    }
}

/// Algebra element with small integer entries, for exact bracket tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntegerElement {
    pub v: [i64; 4],
    pub w: [[i64; 4]; 4],
}

impl IntegerElement {
    pub fn zero() -> Self {
        IntegerElement { v: [0; 4], w: [[0; 4]; 4] }
    }

    pub fn bracket(&self, other: &IntegerElement) -> IntegerElement {
        let mut out = IntegerElement::zero();
        for i in 0..4 {
            for k in 0..4 {
                out.v[i] += self.w[i][k] * other.v[k] - other.w[i][k] * self.v[k];
                for j in 0..4 {
                    out.w[i][j] += self.w[i][k] * other.w[k][j] - other.w[i][k] * self.w[k][j];
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &IntegerElement, s: i64) {
        for i in 0..4 {
            self.v[i] += s * other.v[i];
            for j in 0..4 {
                self.w[i][j] += s * other.w[i][j];
            }
        }
    }

    /// Coordinates in [`BASIS`], or `None` if the element is not in iso(1,3).
    pub fn coordinates(&self) -> Option<[i64; 10]> {
        let mut c = [0i64; 10];
        c[..4].copy_from_slice(&self.v);
        c[4] = self.w[3][2];
        c[5] = self.w[1][3];
        c[6] = self.w[2][1];
        c[7] = self.w[0][1];
        c[8] = self.w[0][2];
        c[9] = self.w[0][3];
        let mut rebuilt = IntegerElement::zero();
        for (k, g) in BASIS.iter().enumerate() {
            rebuilt.add_scaled(&g.integer(), c[k]);
        }
        (rebuilt == *self).then_some(c)
    }

    pub fn to_element(&self) -> AlgebraElement {
        AlgebraElement {
            v: Vector4::from_fn(|i, _| self.v[i] as f64),
            w: Matrix4::from_fn(|i, j| self.w[i][j] as f64),
        }
    }
}

/// Coordinates of a real element in [`BASIS`].
pub fn coordinates(x: &AlgebraElement) -> [f64; 10] {
    [
        x.v[0],
        x.v[1],
        x.v[2],
        x.v[3],
        0.5 * (x.w[(3, 2)] - x.w[(2, 3)]),
        0.5 * (x.w[(1, 3)] - x.w[(3, 1)]),
        0.5 * (x.w[(2, 1)] - x.w[(1, 2)]),
        0.5 * (x.w[(0, 1)] + x.w[(1, 0)]),
        0.5 * (x.w[(0, 2)] + x.w[(2, 0)]),
        0.5 * (x.w[(0, 3)] + x.w[(3, 0)]),
    ]
}

pub fn from_coordinates(c: &[f64; 10]) -> AlgebraElement {
    BASIS.iter().zip(c.iter()).fold(AlgebraElement::zero(), |acc, (g, s)| acc + g.element() * *s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::lorentz_residual;
    use crate::poincare::act_on_frame;

    fn j(i: usize) -> AlgebraElement {
        Generator::Rotation(i).element()
    }

    fn k(i: usize) -> AlgebraElement {
        Generator::Boost(i).element()
    }

    #[test]
    fn rotation_commutator_closes_cyclically() {
        let b = Generator::Rotation(1).integer().bracket(&Generator::Rotation(2).integer());
        assert_eq!(b, Generator::Rotation(3).integer());
    }

    #[test]
    fn boosts_close_onto_negative_rotation() {
        let b = Generator::Boost(1).integer().bracket(&Generator::Boost(2).integer());
        let mut expected = IntegerElement::zero();
        expected.add_scaled(&Generator::Rotation(3).integer(), -1);
        assert_eq!(b, expected);
    }

    #[test]
    fn every_generator_is_lorentz_and_has_unique_coordinates() {
        for (idx, g) in BASIS.iter().enumerate() {
            let c = g.integer().coordinates().unwrap();
            for (m, ci) in c.iter().enumerate() {
                assert_eq!(*ci, i64::from(m == idx));
            }
            assert!(g.element().is_valid(0.0));
        }
    }

    #[test]
    fn polarize_separates_rotations_from_boosts() {
        let (r, b) = polarize(&j(1).w);
        assert_eq!(r, j(1).w);
        assert_eq!(b, Matrix4::zeros());
        let (r, b) = polarize(&k(1).w);
        assert_eq!(r, Matrix4::zeros());
        assert_eq!(b, k(1).w);
        let mixed = j(2).w + k(3).w * 3.0;
        let (r, b) = polarize(&mixed);
        assert_eq!(r, j(2).w);
        assert_eq!(b, k(3).w * 3.0);
        let (r2, b2) = polarize(&r);
        assert_eq!((r2, b2), (r, Matrix4::zeros()));
    }

    #[test]
    fn lorentz_adjoint_split_keeps_all_of_so13_in_first_part() {
        let x = j(2).w + k(1).w * 0.5;
        let (anti, sym) = lorentz_polarize(&x);
        assert_eq!(anti, x);
        assert_eq!(sym, Matrix4::zeros());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let g = exp(&AlgebraElement::zero());
        assert_eq!(g, PoincareElement::identity());
    }

    #[test]
    fn exp_of_pure_translation_is_translation() {
        let x = AlgebraElement::new(Vector4::new(1.0, -2.0, 0.5, 3.0), Matrix4::zeros());
        let g = exp(&x);
        assert_eq!(*g.a.as_vector(), x.v);
        assert_eq!(*g.l.matrix(), Matrix4::identity());
    }

    #[test]
    fn exp_of_rotation_matches_closed_form() {
        let theta = 0.9;
        let g = exp(&(j(3) * theta));
        let r = LorentzMatrix::rotation(3, theta);
        assert!(max_abs(&(g.l.matrix() - r.matrix())) < 1e-14);
        let g = exp(&(k(2) * 1.7));
        let b = LorentzMatrix::boost(2, 1.7);
        assert!(max_abs(&(g.l.matrix() - b.matrix())) < 1e-13);
        assert!(lorentz_residual(g.l.matrix()) < 1e-12);
    }

    #[test]
    fn fundamental_vector_matches_finite_difference_of_action() {
        let x = from_coordinates(&[0.3, -0.1, 0.7, 0.2, 0.5, -0.4, 0.1, 0.9, -0.3, 0.2]);
        let frame = AffineFrame {
            origin: FourVector::new(1.0, 2.0, -1.0, 0.0),
            axes: LorentzMatrix::boost(1, 0.4).compose(&LorentzMatrix::rotation(2, 0.3)),
        };
        let h = 1e-5;
        let plus = act_on_frame(&exp(&(x * h)), &frame);
        let minus = act_on_frame(&exp(&(x * -h)), &frame);
        let fd_origin = (plus.origin - minus.origin).into_inner() / (2.0 * h);
        let fd_axes = (plus.axes.matrix() - minus.axes.matrix()) / (2.0 * h);
        let t = fundamental_vector(&x, &frame);
        assert!((fd_origin - t.origin_velocity).amax() < 1e-8);
        assert!(max_abs(&(fd_axes - t.axes_velocity)) < 1e-8);
    }

    #[test]
    fn fundamental_vector_of_translation_at_canonical_frame() {
        let x = AlgebraElement::new(Vector4::new(0.0, 1.0, 2.0, 3.0), Matrix4::zeros());
        let t = fundamental_vector(&x, &AffineFrame::canonical());
        assert_eq!(t.origin_velocity, x.v);
        assert_eq!(t.axes_velocity, Matrix4::zeros());
    }
}
