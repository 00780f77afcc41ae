mod common;

use common::{generator, vec4};
use cosserat::expm::expm;
use cosserat::forms::{closedness_residual, ext_d, nabla_group, wedge, FormField, GroupField, Lattice};
use cosserat::kinematics::{deform, eulerian_deform, is_integrable, jet_distance, prolong, DisplacementField};
use cosserat::lorentz::{FourVector, LorentzMatrix};
use cosserat::poincare::PoincareElement;
use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;

fn lattice(p: usize, n: usize) -> Lattice {
    Lattice::unit_cube(p, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Difference operators along different axes commute, so d d vanishes
    // exactly even on arbitrary grid data.
    #[test]
    fn dd_vanishes_on_arbitrary_data(p in 2usize..=3, seed in prop::collection::vec(-1.0f64..1.0, 5 * 5 * 5 * 3)) {
        let l = lattice(p, 5);
        let mut k = 0;
        let alpha = FormField::from_fn(&l, p - 2, |_, _| { k += 1; seed[k % seed.len()] }).unwrap();
        let dd = ext_d(&ext_d(&alpha).unwrap()).unwrap();
        prop_assert!(dd.max_norm() < 1e-10);
    }

    // Products of linear fields are quadratic, which every stencil differentiates exactly.
    #[test]
    fn leibniz_rule_on_linear_fields(a in vec4(1.0), b in prop::array::uniform3(vec4(1.0))) {
        let l = lattice(3, 6);
        let f = FormField::from_fn(&l, 0, |r, _| a[0] + a[1] * r[0] + a[2] * r[1] + a[3] * r[2]).unwrap();
        let beta = FormField::from_fn(&l, 1, |r, idx| {
            let c = b[idx[0]];
            c[0] + c[1] * r[0] + c[2] * r[1] + c[3] * r[2]
        }).unwrap();
        let lhs = ext_d(&wedge(&f, &beta).unwrap()).unwrap();
        let rhs = wedge(&ext_d(&f).unwrap(), &beta).unwrap().combine(1.0, &wedge(&f, &ext_d(&beta).unwrap()).unwrap(), 1.0).unwrap();
        prop_assert!(lhs.combine(1.0, &rhs, -1.0).unwrap().max_norm() < 1e-11);
    }

    #[test]
    fn constant_displacement_has_vanishing_deformation(a in vec4(2.0), w in generator(1.0)) {
        let l = lattice(2, 5);
        let g = PoincareElement::new(FourVector::new(a[0], a[1], a[2], a[3]), LorentzMatrix::try_new(expm(&w), 1e-9).unwrap());
        let e = nabla_group(&GroupField::from_fn(&l, |_| g));
        prop_assert!(e.max_norm() < 1e-12);
        prop_assert!(closedness_residual(&e).unwrap().max() < 1e-12);
    }

    // Deforming in the material and in the Eulerian picture gives the same jets.
    #[test]
    fn lagrangian_and_eulerian_deformations_agree(w in generator(0.6), v in generator(0.6), t in vec4(1.0)) {
        let l = lattice(2, 6);
        let s0 = prolong(&l, |r| (Vector4::new(r[0], r[1], r[0] * r[1], 0.0), expm(&(v * r[1])))).unwrap();
        let chi = DisplacementField::prolong(&l, |r| {
            PoincareElement::new(
                FourVector::new(t[0] * r[0], t[1] * r[1], t[2], t[3] * r[0] * r[1]),
                LorentzMatrix::new_unchecked(expm(&(w * (r[0] + 0.5 * r[1])))),
            )
        });
        let a = deform(&chi, &s0).unwrap();
        let b = eulerian_deform(&chi, &s0).unwrap();
        prop_assert!(jet_distance(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn prolonged_states_are_integrable(w in generator(0.6), c in vec4(1.0)) {
        let l = lattice(2, 9);
        let s = prolong(&l, |r| {
            let x = Vector4::new(r[0] * c[0], r[1] + c[1] * r[0] * r[0], c[2], c[3] * r[1]);
            (x, expm(&(w * r[0] * r[1])) * Matrix4::identity())
        }).unwrap();
        prop_assert!(is_integrable(&s, 1e-9).integrable);
    }
}
