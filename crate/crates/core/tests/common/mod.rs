#![allow(dead_code)]

use cosserat::algebra::{from_coordinates, AlgebraElement};
use cosserat::expm::expm;
use cosserat::lorentz::{FourVector, LorentzMatrix};
use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;

pub fn vec4(scale: f64) -> impl Strategy<Value = Vector4<f64>> {
    prop::array::uniform4(-scale..scale).prop_map(Vector4::from)
}

/// so(1,3) matrix `w^mu_nu` from three rotation and three boost parameters.
pub fn so13(rot: [f64; 3], boost: [f64; 3]) -> Matrix4<f64> {
    let mut w = Matrix4::zeros();
    let [a, b, c] = rot;
    w[(2, 3)] = -a;
    w[(3, 2)] = a;
    w[(3, 1)] = -b;
    w[(1, 3)] = b;
    w[(1, 2)] = -c;
    w[(2, 1)] = c;
    for i in 0..3 {
        w[(0, i + 1)] = boost[i];
        w[(i + 1, 0)] = boost[i];
    }
    w
}

pub fn generator(scale: f64) -> impl Strategy<Value = Matrix4<f64>> {
    (prop::array::uniform3(-scale..scale), prop::array::uniform3(-scale..scale)).prop_map(|(r, b)| so13(r, b))
}

pub fn lorentz(scale: f64) -> impl Strategy<Value = LorentzMatrix> {
    generator(scale).prop_map(|w| LorentzMatrix::try_new(expm(&w), 1e-9).unwrap())
}

pub fn element(scale: f64) -> impl Strategy<Value = AlgebraElement> {
    prop::array::uniform::<_, 10>(-scale..scale).prop_map(|c| from_coordinates(&c))
}

/// Future-directed four-velocity with `u.u = c^2`.
pub fn velocity(c: f64) -> impl Strategy<Value = FourVector> {
    prop::array::uniform3(-1.5f64..1.5).prop_map(move |p| {
        let g = (1.0 + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        FourVector::new(g * c, p[0] * c, p[1] * c, p[2] * c)
    })
}

pub fn max_abs<const R: usize, const C: usize>(m: &nalgebra::SMatrix<f64, R, C>) -> f64 {
    m.amax()
}
