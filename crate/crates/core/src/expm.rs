//! Matrix exponential by scaling and squaring with a fixed Taylor order.

use nalgebra::{ComplexField, SMatrix};

const TAYLOR_ORDER: usize = 18;

/// `exp(m)` for small square matrices, real or complex.
///
/// The matrix is scaled by `2^-s` until its max-row-sum norm is at most 1/2,
/// summed to a fixed order, then squared `s` times. Fixed order keeps the
/// result bitwise reproducible.
pub fn expm<T, const D: usize>(m: &SMatrix<T, D, D>) -> SMatrix<T, D, D>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let norm = (0..D)
        .map(|i| (0..D).map(|j| m[(i, j)].modulus()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m.map(|z| z * T::from_real(scale));
    let mut result = SMatrix::<T, D, D>::identity();
    let mut term = SMatrix::<T, D, D>::identity();
    for k in 1..=TAYLOR_ORDER {
        term *= a;
        term = term.map(|z| z * T::from_real(1.0 / k as f64));
        result += term;
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, Matrix2, Matrix3};

    #[test]
    fn rotation_generator_exponentiates_to_cos_sin() {
        let t = 2.7_f64;
        let m = Matrix2::new(0.0, -t, t, 0.0);
        let e = expm(&m);
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_matrix_gives_finite_series() {
        let m = Matrix3::new(0.0, 3.0, 5.0, 0.0, 0.0, 7.0, 0.0, 0.0, 0.0);
        let e = expm(&m);
        let expected = Matrix3::new(1.0, 3.0, 5.0 + 10.5, 0.0, 1.0, 7.0, 0.0, 0.0, 1.0);
        assert!((e - expected).amax() < 1e-13);
    }

    #[test]
    fn complex_phase() {
        let m = Matrix2::new(Complex::new(0.0, 1.3), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, -1.3));
        let e = expm(&m);
        assert!((e[(0, 0)] - Complex::new(1.3_f64.cos(), 1.3_f64.sin())).norm() < 1e-14);
    }
}
