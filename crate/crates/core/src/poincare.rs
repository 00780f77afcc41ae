//! Poincare group elements `(a, L)` and their right action on affine frames.

use nalgebra::{Matrix5, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lorentz::{FourVector, LorentzError, LorentzMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoincareError {
    #[error("homogeneous matrix is not affine: first row deviates from e0 by {deviation:e}")]
    NotAffine { deviation: f64 },
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

/// A translation `a` together with a Lorentz matrix `L`.
///
/// Group law `(a, L)(b, M) = (a + L b, L M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareElement {
    pub a: FourVector,
    #[serde(rename = "L")]
    pub l: LorentzMatrix,
}

impl PoincareElement {
    pub fn new(a: FourVector, l: LorentzMatrix) -> Self {
        PoincareElement { a, l }
    }

    pub fn identity() -> Self {
        PoincareElement { a: FourVector::zero(), l: LorentzMatrix::identity() }
    }

    pub fn translation(a: FourVector) -> Self {
        PoincareElement { a, l: LorentzMatrix::identity() }
    }

    pub fn lorentz(l: LorentzMatrix) -> Self {
        PoincareElement { a: FourVector::zero(), l }
    }

    pub fn compose(&self, other: &PoincareElement) -> PoincareElement {
        PoincareElement { a: self.a + self.l.apply(&other.a), l: self.l.compose(&other.l) }
    }

    /// `(a, L)^-1 = (-L~ a, L~)` with `L~` the Lorentz adjoint.
    pub fn inverse(&self) -> PoincareElement {
        let inv = self.l.adjoint();
        PoincareElement { a: -inv.apply(&self.a), l: inv }
    }

    /// Applies the element to a point: `x -> a + L x`.
    pub fn apply(&self, x: &FourVector) -> FourVector {
        self.a + self.l.apply(x)
    }

    /// `[[1, 0], [a, L]]`, acting on `(1, x)`.
    pub fn to_homogeneous(&self) -> Matrix5<f64> {
        let mut h = Matrix5::zeros();
        h[(0, 0)] = 1.0;
        for i in 0..4 {
            h[(i + 1, 0)] = self.a[i];
            for j in 0..4 {
                h[(i + 1, j + 1)] = self.l[(i, j)];
            }
        }
        h
    }

    pub fn from_homogeneous(h: &Matrix5<f64>, tol: f64) -> Result<Self, PoincareError> {
        let mut deviation = (h[(0, 0)] - 1.0).abs();
        for j in 1..5 {
            deviation = deviation.max(h[(0, j)].abs());
        }
        if deviation > tol || deviation.is_nan() {
            return Err(PoincareError::NotAffine { deviation });
        }
        let a = FourVector::try_from_vector(Vector4::new(h[(1, 0)], h[(2, 0)], h[(3, 0)], h[(4, 0)]))?;
        let l = LorentzMatrix::try_new(h.fixed_view::<4, 4>(1, 1).into_owned(), tol)?;
        Ok(PoincareElement { a, l })
    }

    pub fn is_isochronous(&self) -> bool {
        self.l.is_proper_isochronous()
    }
}

/// A point of the frame bundle: an origin and four axes stored as matrix columns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineFrame {
    pub origin: FourVector,
    pub axes: LorentzMatrix,
}

impl AffineFrame {
    pub fn canonical() -> Self {
        AffineFrame { origin: FourVector::zero(), axes: LorentzMatrix::identity() }
    }

    pub fn axis(&self, mu: usize) -> Vector4<f64> {
        self.axes.column(mu).into_owned()
    }
}

/// Right action: the new origin is `O + a^mu e_mu`, the new axes are `E L`.
///
/// `act_on_frame(h, act_on_frame(g, f)) == act_on_frame(g.compose(h), f)`.
pub fn act_on_frame(g: &PoincareElement, f: &AffineFrame) -> AffineFrame {
    let shift = f.axes.apply(&g.a);
    AffineFrame { origin: f.origin + shift, axes: f.axes.compose(&g.l) }
}

/// Orthonormality defect `max |E^T eta E - eta|` of a frame.
pub fn frame_defect(f: &AffineFrame) -> f64 {
    f.axes.residual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{max_abs, DEFAULT_TOL};
    use nalgebra::Matrix4;

    fn sample() -> PoincareElement {
        PoincareElement::new(
            FourVector::new(0.3, -1.0, 2.0, 0.5),
            LorentzMatrix::boost(2, 0.7).compose(&LorentzMatrix::rotation(1, 0.4)),
        )
    }

    #[test]
    fn inverse_composes_to_identity() {
        let g = sample();
        let e = g.compose(&g.inverse());
        assert!(e.a.norm() < 1e-14);
        assert!(max_abs(&(e.l.matrix() - Matrix4::identity())) < 1e-14);
    }

    #[test]
    fn pure_translations_add() {
        let a = PoincareElement::translation(FourVector::new(1.0, 2.0, 3.0, 4.0));
        let b = PoincareElement::translation(FourVector::new(-1.0, 0.5, 0.0, 2.0));
        assert_eq!(a.compose(&b).a, FourVector::new(0.0, 2.5, 3.0, 6.0));
    }

    #[test]
    fn homogeneous_product_matches_group_law() {
        let g = sample();
        let h = PoincareElement::new(FourVector::new(-0.2, 0.1, 0.0, 1.0), LorentzMatrix::rotation(3, 1.1));
        let lhs = g.to_homogeneous() * h.to_homogeneous();
        let rhs = g.compose(&h).to_homogeneous();
        assert!((lhs - rhs).amax() < 1e-14);
        let back = PoincareElement::from_homogeneous(&rhs, DEFAULT_TOL).unwrap();
        assert!((back.a - g.compose(&h).a).norm() < 1e-15);
    }

    #[test]
    fn non_affine_homogeneous_matrix_is_rejected() {
        let mut h = sample().to_homogeneous();
        h[(0, 3)] = 0.1;
        assert!(matches!(PoincareElement::from_homogeneous(&h, DEFAULT_TOL), Err(PoincareError::NotAffine { .. })));
    }

    #[test]
    fn right_action_is_compatible_with_composition() {
        let f = AffineFrame { origin: FourVector::new(1.0, 0.0, -2.0, 0.5), axes: LorentzMatrix::boost(3, -0.3) };
        let g = sample();
        let h = PoincareElement::new(FourVector::new(0.0, 1.0, 1.0, 0.0), LorentzMatrix::boost(1, 0.2));
        let lhs = act_on_frame(&h, &act_on_frame(&g, &f));
        let rhs = act_on_frame(&g.compose(&h), &f);
        assert!((lhs.origin - rhs.origin).norm() < 1e-14);
        assert!(max_abs(&(lhs.axes.matrix() - rhs.axes.matrix())) < 1e-14);
        assert!(frame_defect(&lhs) < 1e-12);
    }

    #[test]
    fn translation_moves_origin_along_frame_axes() {
        let f = AffineFrame { origin: FourVector::zero(), axes: LorentzMatrix::rotation(3, std::f64::consts::FRAC_PI_2) };
        let g = PoincareElement::translation(FourVector::new(0.0, 1.0, 0.0, 0.0));
        let moved = act_on_frame(&g, &f);
        assert!((moved.origin[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn serializes_translation_and_row_major_matrix() {
        let g = PoincareElement::translation(FourVector::new(1.0, 2.0, 3.0, 4.0));
        let v: serde_json::Value = serde_json::to_value(g).unwrap();
        assert_eq!(v["a"], serde_json::json!([1.0, 2.0, 3.0, 4.0]));
        assert_eq!(v["L"].as_array().unwrap().len(), 16);
        let back: PoincareElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, g);
    }
}
