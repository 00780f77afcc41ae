//! Minkowski metric, four-vectors and Lorentz matrices.
//!
//! Signature is (+,-,-,-). Matrices carry the upper index first, so
//! `m[(mu, nu)]` is `m^mu_nu`.

use std::fmt;
use std::ops::{Add, AddAssign, Deref, Index, Mul, Neg, Sub};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance for Lorentz validation, in the matrix max-norm.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Diagonal of the metric.
pub const ETA_DIAG: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not Lorentz: max |L^T eta L - eta| = {residual:e}")]
    NotLorentz { residual: f64 },
    #[error("the zero vector has no causal class")]
    ZeroVector,
    #[error("invalid physical constant {name} = {value}")]
    InvalidUnit { name: &'static str, value: f64 },
}

pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(ETA_DIAG))
}

/// `eta v`, lowering the index of a contravariant vector.
pub fn lower(v: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(v[0], -v[1], -v[2], -v[3])
}

/// `eta(v, w)` on raw components.
pub fn dot(v: &Vector4<f64>, w: &Vector4<f64>) -> f64 {
    v[0] * w[0] - v[1] * w[1] - v[2] * w[2] - v[3] * w[3]
}

/// Max-norm of a matrix.
pub fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Speed of light and reduced Planck constant. Both default to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub c: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Units { c: 1.0, hbar: 1.0 }
    }
}

impl Units {
    pub fn new(c: f64, hbar: f64) -> Result<Self, LorentzError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(LorentzError::InvalidUnit { name: "c", value: c });
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(LorentzError::InvalidUnit { name: "hbar", value: hbar });
        }
        Ok(Units { c, hbar })
    }
}

/// A contravariant four-vector with finite components.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct FourVector(Vector4<f64>);

impl FourVector {
    /// Panics on non-finite input; use [`FourVector::try_new`] for fallible construction.
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self::try_new(t, x, y, z).expect("four-vector components must be finite")
    }

    pub fn try_new(t: f64, x: f64, y: f64, z: f64) -> Result<Self, LorentzError> {
        Self::try_from_vector(Vector4::new(t, x, y, z))
    }

    pub fn try_from_vector(v: Vector4<f64>) -> Result<Self, LorentzError> {
        if v.iter().all(|c| c.is_finite()) {
            Ok(FourVector(v))
        } else {
            Err(LorentzError::NonFinite("four-vector"))
        }
    }

    /// Wraps a vector produced by arithmetic on finite data.
    pub(crate) fn from_vector_unchecked(v: Vector4<f64>) -> Self {
        FourVector(v)
    }

    pub fn zero() -> Self {
        FourVector(Vector4::zeros())
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Vector4<f64> {
        self.0
    }

    pub fn lower(&self) -> Vector4<f64> {
        lower(&self.0)
    }

    pub fn inner(&self, other: &FourVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn interval(&self) -> f64 {
        self.inner(self)
    }
}

impl Deref for FourVector {
    type Target = Vector4<f64>;
    fn deref(&self) -> &Vector4<f64> {
        &self.0
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<[f64; 4]> for FourVector {
    type Error = LorentzError;
    fn try_from(a: [f64; 4]) -> Result<Self, LorentzError> {
        Self::try_from_vector(Vector4::from(a))
    }
}

impl From<FourVector> for [f64; 4] {
    fn from(v: FourVector) -> [f64; 4] {
        v.0.into()
    }
}

impl From<FourVector> for Vector4<f64> {
    fn from(v: FourVector) -> Vector4<f64> {
        v.0
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 + rhs.0)
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: FourVector) {
        self.0 += rhs.0;
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 - rhs.0)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(-self.0)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0 * s)
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

pub fn minkowski_inner(v: &FourVector, w: &FourVector) -> f64 {
    v.inner(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
}

/// Classifies a nonzero vector; `|eta(v,v)| <= tol * |v|^2` counts as null.
pub fn classify(v: &FourVector, tol: f64) -> Result<CausalClass, LorentzError> {
    if v.iter().all(|c| *c == 0.0) {
        return Err(LorentzError::ZeroVector);
    }
    let q = v.interval();
    let scale = v.norm_squared();
    Ok(if q.abs() <= tol * scale {
        CausalClass::Null
    } else if q > 0.0 {
        CausalClass::Timelike
    } else {
        CausalClass::Spacelike
    })
}

/// `L* = eta L^T eta`.
pub fn lorentz_adjoint(m: &Matrix4<f64>) -> Matrix4<f64> {
    let mut out = m.transpose();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] *= ETA_DIAG[i] * ETA_DIAG[j];
        }
    }
    out
}

/// Max-norm of `L^T eta L - eta`.
pub fn lorentz_residual(m: &Matrix4<f64>) -> f64 {
    max_abs(&(m.transpose() * eta() * m - eta()))
}

pub fn is_proper_isochronous(m: &Matrix4<f64>, tol: f64) -> Result<bool, LorentzError> {
    let lm = LorentzMatrix::try_new(*m, tol)?;
    Ok(lm.is_proper_isochronous())
}

/// A 4x4 matrix satisfying `L^T eta L = eta` within the tolerance it was validated at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 16]", into = "[f64; 16]")]
pub struct LorentzMatrix(Matrix4<f64>);

impl LorentzMatrix {
    pub fn try_new(m: Matrix4<f64>, tol: f64) -> Result<Self, LorentzError> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(LorentzError::NonFinite("Lorentz matrix"));
        }
        let residual = lorentz_residual(&m);
        if residual > tol {
            return Err(LorentzError::NotLorentz { residual });
        }
        Ok(LorentzMatrix(m))
    }

    /// Caller guarantees the Lorentz property, e.g. for products of validated matrices.
    pub fn new_unchecked(m: Matrix4<f64>) -> Self {
        LorentzMatrix(m)
    }

    pub fn identity() -> Self {
        LorentzMatrix(Matrix4::identity())
    }

    /// Boost along spatial axis `axis` (1..=3) with the given rapidity.
    pub fn boost(axis: usize, rapidity: f64) -> Self {
        assert!((1..=3).contains(&axis), "spatial axis must be 1, 2 or 3");
        let mut m = Matrix4::identity();
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        m[(0, 0)] = ch;
        m[(axis, axis)] = ch;
        m[(0, axis)] = sh;
        m[(axis, 0)] = sh;
        LorentzMatrix(m)
    }

    /// Rotation by `angle` about spatial axis `axis` (1..=3), right-handed.
    pub fn rotation(axis: usize, angle: f64) -> Self {
        assert!((1..=3).contains(&axis), "spatial axis must be 1, 2 or 3");
        let (i, j) = match axis {
            1 => (2, 3),
            2 => (3, 1),
            _ => (1, 2),
        };
        let mut m = Matrix4::identity();
        let (c, s) = (angle.cos(), angle.sin());
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        LorentzMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn adjoint(&self) -> LorentzMatrix {
        LorentzMatrix(lorentz_adjoint(&self.0))
    }

    /// Equal to the adjoint for a Lorentz matrix.
    pub fn inverse(&self) -> LorentzMatrix {
        self.adjoint()
    }

    pub fn compose(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * other.0)
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        FourVector(self.0 * v.0)
    }

    pub fn residual(&self) -> f64 {
        lorentz_residual(&self.0)
    }

    /// `det L = +1` and `L^0_0 >= 1`.
    pub fn is_proper_isochronous(&self) -> bool {
        self.0.determinant() > 0.0 && self.0[(0, 0)] > 0.0
    }
}

impl Deref for LorentzMatrix {
    type Target = Matrix4<f64>;
    fn deref(&self) -> &Matrix4<f64> {
        &self.0
    }
}

impl TryFrom<[f64; 16]> for LorentzMatrix {
    type Error = LorentzError;
    fn try_from(a: [f64; 16]) -> Result<Self, LorentzError> {
        LorentzMatrix::try_new(Matrix4::from_row_slice(&a), DEFAULT_TOL)
    }
}

impl From<LorentzMatrix> for [f64; 16] {
    fn from(m: LorentzMatrix) -> [f64; 16] {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = m.0[(i, j)];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_of_time_and_space_axes() {
        let t = FourVector::new(1.0, 0.0, 0.0, 0.0);
        let x = FourVector::new(0.0, 1.0, 0.0, 0.0);
        assert_eq!(minkowski_inner(&t, &t), 1.0);
        assert_eq!(minkowski_inner(&x, &x), -1.0);
        assert_eq!(minkowski_inner(&t, &x), 0.0);
        assert_eq!(classify(&FourVector::new(1.0, 1.0, 0.0, 0.0), DEFAULT_TOL).unwrap(), CausalClass::Null);
        assert_eq!(classify(&t, DEFAULT_TOL).unwrap(), CausalClass::Timelike);
        assert_eq!(classify(&x, DEFAULT_TOL).unwrap(), CausalClass::Spacelike);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert_eq!(classify(&FourVector::zero(), DEFAULT_TOL), Err(LorentzError::ZeroVector));
    }

    #[test]
    fn non_finite_components_are_rejected() {
        assert!(FourVector::try_new(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(FourVector::try_new(0.0, f64::INFINITY, 0.0, 0.0).is_err());
    }

    #[test]
    fn boost_adjoint_is_inverse_boost() {
        let b = LorentzMatrix::boost(1, 0.5);
        let expected = LorentzMatrix::boost(1, -0.5);
        assert!(max_abs(&(b.adjoint().matrix() - expected.matrix())) < 1e-15);
        assert!(max_abs(&(b.matrix() * b.adjoint().matrix() - Matrix4::identity())) < 1e-14);
    }

    #[test]
    fn spatial_reflection_of_z_is_proper_isochronous() {
        let m = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, 1.0));
        assert!(is_proper_isochronous(&m, DEFAULT_TOL).unwrap());
        let parity = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0));
        assert!(!is_proper_isochronous(&parity, DEFAULT_TOL).unwrap());
        let time_flip = Matrix4::from_diagonal(&Vector4::new(-1.0, -1.0, 1.0, 1.0));
        assert!(!is_proper_isochronous(&time_flip, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn non_lorentz_matrix_is_an_error() {
        let m = Matrix4::identity() * 2.0;
        assert!(matches!(is_proper_isochronous(&m, DEFAULT_TOL), Err(LorentzError::NotLorentz { .. })));
    }

    #[test]
    fn rotation_about_z_turns_x_into_y() {
        let r = LorentzMatrix::rotation(3, std::f64::consts::FRAC_PI_2);
        let v = r.apply(&FourVector::new(0.0, 1.0, 0.0, 0.0));
        assert!((v[2] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
    }

    #[test]
    fn serde_rejects_non_lorentz_payload() {
        let bad = serde_json::to_string(&[2.0; 16]).unwrap();
        assert!(serde_json::from_str::<LorentzMatrix>(&bad).is_err());
        let good = LorentzMatrix::boost(2, 0.3);
        let s = serde_json::to_string(&good).unwrap();
        assert_eq!(serde_json::from_str::<LorentzMatrix>(&s).unwrap(), good);
    }

    #[test]
    fn units_must_be_positive() {
        assert!(Units::new(0.0, 1.0).is_err());
        assert!(Units::new(2.0, f64::NAN).is_err());
        assert!(Units::new(3.0, 0.5).is_ok());
    }
}
