mod common;

use common::{element, generator, lorentz, vec4};
use cosserat::algebra::{bracket, exp, fundamental_vector, polarize};
use cosserat::lorentz::{eta, lorentz_residual, FourVector};
use cosserat::poincare::{act_on_frame, AffineFrame, PoincareElement};
use nalgebra::{Matrix5, Vector4};
use proptest::prelude::*;

fn four(v: Vector4<f64>) -> FourVector {
    FourVector::try_from_vector(v).unwrap_or_else(|_| FourVector::new(1.0, 0.0, 0.0, 0.0))
}

/// Truncated power series, independent of the library's matrix exponential.
fn taylor_exp(m: &Matrix5<f64>) -> Matrix5<f64> {
    let mut term = Matrix5::identity();
    let mut sum = Matrix5::identity();
    for k in 1..60 {
        term = term * m / k as f64;
        sum += term;
    }
    sum
}

proptest! {
    #[test]
    fn interval_is_preserved(l in lorentz(1.0), v in vec4(2.0)) {
        let x = four(v);
        let y = l.apply(&x);
        prop_assert!((y.interval() - x.interval()).abs() <= 1e-9 * (1.0 + x.as_vector().norm_squared()));
    }

    #[test]
    fn products_and_inverses_stay_lorentz(a in lorentz(1.0), b in lorentz(1.0)) {
        prop_assert!(a.compose(&b).residual() < 1e-9);
        let id = a.compose(&a.inverse());
        prop_assert!((id.matrix() - nalgebra::Matrix4::identity()).amax() < 1e-9);
    }

    #[test]
    fn poincare_composition_is_associative(
        a in vec4(1.0), b in vec4(1.0), c in vec4(1.0),
        la in lorentz(0.8), lb in lorentz(0.8), lc in lorentz(0.8),
    ) {
        let (g, h, k) = (
            PoincareElement::new(four(a), la),
            PoincareElement::new(four(b), lb),
            PoincareElement::new(four(c), lc),
        );
        let lhs = g.compose(&h).compose(&k).to_homogeneous();
        let rhs = g.compose(&h.compose(&k)).to_homogeneous();
        prop_assert!((lhs - rhs).amax() < 1e-9);
    }

    #[test]
    fn right_action_respects_the_group_law(a in vec4(1.0), b in vec4(1.0), la in lorentz(0.8), lb in lorentz(0.8), l0 in lorentz(0.8)) {
        let (g, h) = (PoincareElement::new(four(a), la), PoincareElement::new(four(b), lb));
        let f = AffineFrame { origin: FourVector::new(0.3, 0.1, -0.2, 0.5), axes: l0 };
        let two = act_on_frame(&h, &act_on_frame(&g, &f));
        let one = act_on_frame(&g.compose(&h), &f);
        prop_assert!((two.origin.as_vector() - one.origin.as_vector()).amax() < 1e-9);
        prop_assert!((two.axes.matrix() - one.axes.matrix()).amax() < 1e-9);
    }

    #[test]
    fn bracket_is_antisymmetric_and_closes(x in element(1.0), y in element(1.0)) {
        let xy = bracket(&x, &y);
        prop_assert!((xy + bracket(&y, &x)).max_abs() < 1e-14);
        prop_assert!(xy.lorentz_defect() < 1e-13);
    }

    #[test]
    fn jacobi_identity(x in element(1.0), y in element(1.0), z in element(1.0)) {
        let j = bracket(&x, &bracket(&y, &z)) + bracket(&y, &bracket(&z, &x)) + bracket(&z, &bracket(&x, &y));
        prop_assert!(j.max_abs() < 1e-12);
    }

    #[test]
    fn exp_matches_power_series(x in element(1.0)) {
        let g = exp(&x);
        prop_assert!(lorentz_residual(g.l.matrix()) < 1e-10);
        prop_assert!((g.l.matrix().determinant() - 1.0).abs() < 1e-9);
        prop_assert!((g.to_homogeneous() - taylor_exp(&x.to_homogeneous())).amax() < 1e-10);
    }

    #[test]
    fn exp_of_negative_is_inverse(x in element(1.0)) {
        let id = exp(&x).compose(&exp(&(-x))).to_homogeneous();
        prop_assert!((id - Matrix5::identity()).amax() < 1e-10);
    }

    #[test]
    fn polarize_reassembles_the_generator(w in generator(1.0)) {
        let (rot, boost) = polarize(&w);
        prop_assert!((rot + boost - w).amax() < 1e-14);
        prop_assert!((rot + rot.transpose()).amax() < 1e-14);
        prop_assert!((boost - boost.transpose()).amax() < 1e-14);
        prop_assert!((eta() * w + (eta() * w).transpose()).amax() < 1e-14);
    }

    #[test]
    fn fundamental_vector_is_frame_velocity(x in element(0.5), l0 in lorentz(0.8)) {
        let f = AffineFrame { origin: FourVector::new(1.0, 2.0, 0.0, -1.0), axes: l0 };
        let t = fundamental_vector(&x, &f);
        let h = 1e-4;
        let at = |s: f64| act_on_frame(&exp(&(x * s)), &f);
        let (p, m) = (at(h), at(-h));
        let dv = (p.origin.as_vector() - m.origin.as_vector()) / (2.0 * h);
        let dw = (p.axes.matrix() - m.axes.matrix()) / (2.0 * h);
        prop_assert!((dv - t.origin_velocity).amax() < 1e-6);
        prop_assert!((dw - t.axes_velocity).amax() < 1e-6);
    }
}
