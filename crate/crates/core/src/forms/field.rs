use std::collections::HashMap;
use std::fmt::Debug;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::lattice::{multi_indices, Lattice};
use super::FormsError;
use crate::algebra::AlgebraElement;
use crate::lorentz::max_abs;
use crate::poincare::PoincareElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Scalar,
    Vector,
    Matrix,
    Algebra,
}

impl ValueKind {
    pub fn width(&self) -> usize {
        match self {
            ValueKind::Scalar => 1,
            ValueKind::Vector => 4,
            ValueKind::Matrix => 16,
            ValueKind::Algebra => 20,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ValueKind::Scalar => "scalar",
            ValueKind::Vector => "vector",
            ValueKind::Matrix => "matrix",
            ValueKind::Algebra => "algebra",
        }
    }

    pub fn parse(s: &str) -> Option<ValueKind> {
        Some(match s {
            "scalar" => ValueKind::Scalar,
            "vector" => ValueKind::Vector,
            "matrix" => ValueKind::Matrix,
            "algebra" => ValueKind::Algebra,
            _ => return None,
        })
    }
}

/// Values a form may carry: a real vector space with a flat serialization.
pub trait FormValue: Clone + Debug + PartialEq {
    const KIND: ValueKind;
    fn zero() -> Self;
    /// `self += s * other`.
    fn add_scaled(&mut self, other: &Self, s: f64);
    fn max_abs(&self) -> f64;
    fn write_flat(&self, out: &mut Vec<f64>);
    fn read_flat(flat: &[f64]) -> Self;
}

impl FormValue for f64 {
    const KIND: ValueKind = ValueKind::Scalar;
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += s * other;
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
    fn write_flat(&self, out: &mut Vec<f64>) {
        out.push(*self);
    }
    fn read_flat(flat: &[f64]) -> Self {
        flat[0]
    }
}

impl FormValue for Vector4<f64> {
    const KIND: ValueKind = ValueKind::Vector;
    fn zero() -> Self {
        Vector4::zeros()
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        self.axpy(s, other, 1.0);
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
    fn write_flat(&self, out: &mut Vec<f64>) {
        out.extend(self.iter());
    }
    fn read_flat(flat: &[f64]) -> Self {
        Vector4::from_column_slice(&flat[..4])
    }
}

impl FormValue for Matrix4<f64> {
    const KIND: ValueKind = ValueKind::Matrix;
    fn zero() -> Self {
        Matrix4::zeros()
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += other * s;
    }
    fn max_abs(&self) -> f64 {
        max_abs(self)
    }
    fn write_flat(&self, out: &mut Vec<f64>) {
        for i in 0..4 {
            for j in 0..4 {
                out.push(self[(i, j)]);
            }
        }
    }
    fn read_flat(flat: &[f64]) -> Self {
        Matrix4::from_row_slice(&flat[..16])
    }
}

impl FormValue for AlgebraElement {
    const KIND: ValueKind = ValueKind::Algebra;
    fn zero() -> Self {
        AlgebraElement::zero()
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        self.v.axpy(s, &other.v, 1.0);
        self.w += other.w * s;
    }
    fn max_abs(&self) -> f64 {
        AlgebraElement::max_abs(self)
    }
    fn write_flat(&self, out: &mut Vec<f64>) {
        self.v.write_flat(out);
        self.w.write_flat(out);
    }
    fn read_flat(flat: &[f64]) -> Self {
        AlgebraElement::new(Vector4::read_flat(&flat[..4]), Matrix4::read_flat(&flat[4..20]))
    }
}

/// A k-form on a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct FormField<V> {
    lattice: Lattice,
    degree: usize,
    components: Vec<Vec<usize>>,
    data: Vec<V>,
}

impl<V: FormValue> FormField<V> {
    pub fn zeros(lattice: &Lattice, degree: usize) -> Result<Self, FormsError> {
        Self::from_fn(lattice, degree, |_, _| V::zero())
    }

    /// Samples `f(coords, multi_index)` for every point and component.
    pub fn from_fn(
        lattice: &Lattice,
        degree: usize,
        mut f: impl FnMut(&[f64], &[usize]) -> V,
    ) -> Result<Self, FormsError> {
        if degree > lattice.dim() {
            return Err(FormsError::DegreeTooHigh { degree, dim: lattice.dim() });
        }
        let components = multi_indices(lattice.dim(), degree);
        let mut data = Vec::with_capacity(lattice.len() * components.len());
        for idx in 0..lattice.len() {
            let x = lattice.coords(idx);
            for c in &components {
                data.push(f(&x, c));
            }
        }
        Ok(FormField { lattice: lattice.clone(), degree, components, data })
    }

    /// Wraps point-major data: all components of point 0, then point 1, ...
    pub fn from_data(lattice: &Lattice, degree: usize, data: Vec<V>) -> Result<Self, FormsError> {
        if degree > lattice.dim() {
            return Err(FormsError::DegreeTooHigh { degree, dim: lattice.dim() });
        }
        let components = multi_indices(lattice.dim(), degree);
        let expected = lattice.len() * components.len();
        if data.len() != expected {
            return Err(FormsError::Length { expected, found: data.len() });
        }
        Ok(FormField { lattice: lattice.clone(), degree, components, data })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn data(&self) -> &[V] {
        &self.data
    }

    pub fn get(&self, point: usize, comp: usize) -> &V {
        &self.data[point * self.components.len() + comp]
    }

    pub fn get_mut(&mut self, point: usize, comp: usize) -> &mut V {
        let n = self.components.len();
        &mut self.data[point * n + comp]
    }

    /// Value of the component with the given increasing multi-index.
    pub fn component(&self, point: usize, idx: &[usize]) -> Option<&V> {
        let c = self.components.iter().position(|c| c == idx)?;
        Some(self.get(point, c))
    }

    /// One component sampled at every point.
    pub fn component_values(&self, comp: usize) -> Vec<V> {
        (0..self.lattice.len()).map(|p| self.get(p, comp).clone()).collect()
    }

    pub fn map<W: FormValue>(&self, f: impl Fn(&V) -> W) -> FormField<W> {
        FormField {
            lattice: self.lattice.clone(),
            degree: self.degree,
            components: self.components.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &FormField<V>, b: f64) -> Result<FormField<V>, FormsError> {
        if self.lattice != other.lattice {
            return Err(FormsError::LatticeMismatch);
        }
        if self.degree != other.degree {
            return Err(FormsError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| {
                let mut out = V::zero();
                out.add_scaled(x, a);
                out.add_scaled(y, b);
                out
            })
            .collect();
        Ok(FormField { data, ..self.clone() })
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.max_abs()))
    }

    /// Max-norm over points away from the lattice boundary.
    pub fn interior_max_norm(&self) -> f64 {
        let n = self.components.len();
        self.lattice
            .interior_indices()
            .flat_map(|p| self.data[p * n..(p + 1) * n].iter())
            .fold(0.0, |m, v| m.max(v.max_abs()))
    }

    fn component_position(&self, idx: &[usize]) -> usize {
        self.components.iter().position(|c| c == idx).expect("multi-index belongs to this degree")
    }
}

/// Exterior derivative, `(d a)_{i_0..i_k} = sum_j (-1)^j d_{i_j} a_{i_0..^i_j..i_k}`.
pub fn ext_d<V: FormValue>(alpha: &FormField<V>) -> Result<FormField<V>, FormsError> {
    let lattice = &alpha.lattice;
    let degree = alpha.degree + 1;
    if degree > lattice.dim() {
        return Err(FormsError::DegreeTooHigh { degree, dim: lattice.dim() });
    }
    let targets = multi_indices(lattice.dim(), degree);
    let mut partials: HashMap<(usize, usize), Vec<V>> = HashMap::new();
    let mut stencil = Vec::with_capacity(targets.len());
    for t in &targets {
        let mut terms = Vec::with_capacity(degree);
        for j in 0..degree {
            let mut rest = t.clone();
            let axis = rest.remove(j);
            let src = alpha.component_position(&rest);
            partials
                .entry((axis, src))
                .or_insert_with(|| lattice.partial(&alpha.component_values(src), axis));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            terms.push((sign, axis, src));
        }
        stencil.push(terms);
    }
    let mut data = Vec::with_capacity(lattice.len() * targets.len());
    for p in 0..lattice.len() {
        for terms in &stencil {
            let mut v = V::zero();
            for &(sign, axis, src) in terms {
                v.add_scaled(&partials[&(axis, src)][p], sign);
            }
            data.push(v);
        }
    }
    Ok(FormField { lattice: lattice.clone(), degree, components: targets, data })
}

/// Bilinear pairing of form values used by the wedge product.
pub trait Pairing<Rhs> {
    type Output: FormValue;
    fn pair(&self, rhs: &Rhs) -> Self::Output;
}

impl Pairing<f64> for f64 {
    type Output = f64;
    fn pair(&self, rhs: &f64) -> f64 {
        self * rhs
    }
}

impl Pairing<Vector4<f64>> for f64 {
    type Output = Vector4<f64>;
    fn pair(&self, rhs: &Vector4<f64>) -> Vector4<f64> {
        rhs * *self
    }
}

impl Pairing<Matrix4<f64>> for f64 {
    type Output = Matrix4<f64>;
    fn pair(&self, rhs: &Matrix4<f64>) -> Matrix4<f64> {
        rhs * *self
    }
}

impl Pairing<f64> for Vector4<f64> {
    type Output = Vector4<f64>;
    fn pair(&self, rhs: &f64) -> Vector4<f64> {
        self * *rhs
    }
}

impl Pairing<f64> for Matrix4<f64> {
    type Output = Matrix4<f64>;
    fn pair(&self, rhs: &f64) -> Matrix4<f64> {
        self * *rhs
    }
}

impl Pairing<Vector4<f64>> for Matrix4<f64> {
    type Output = Vector4<f64>;
    fn pair(&self, rhs: &Vector4<f64>) -> Vector4<f64> {
        self * rhs
    }
}

impl Pairing<Matrix4<f64>> for Matrix4<f64> {
    type Output = Matrix4<f64>;
    fn pair(&self, rhs: &Matrix4<f64>) -> Matrix4<f64> {
        self * rhs
    }
}

/// Wedge product with values combined by their natural product.
pub fn wedge<A, B>(alpha: &FormField<A>, beta: &FormField<B>) -> Result<FormField<A::Output>, FormsError>
where
    A: FormValue + Pairing<B>,
    B: FormValue,
{
    wedge_with(alpha, beta, |a, b| a.pair(b))
}

/// Wedge product with an explicit value pairing.
pub fn wedge_with<A, B, C>(
    alpha: &FormField<A>,
    beta: &FormField<B>,
    pair: impl Fn(&A, &B) -> C,
) -> Result<FormField<C>, FormsError>
where
    A: FormValue,
    B: FormValue,
    C: FormValue,
{
    if alpha.lattice != beta.lattice {
        return Err(FormsError::LatticeMismatch);
    }
    let lattice = &alpha.lattice;
    let (k, l) = (alpha.degree, beta.degree);
    let degree = k + l;
    if degree > lattice.dim() {
        return Err(FormsError::DegreeTooHigh { degree, dim: lattice.dim() });
    }
    let targets = multi_indices(lattice.dim(), degree);
    // For each target, the (sign, left component, right component) shuffles.
    let table: Vec<Vec<(f64, usize, usize)>> = targets
        .iter()
        .map(|t| {
            multi_indices(degree, k)
                .into_iter()
                .map(|pos| {
                    let left: Vec<usize> = pos.iter().map(|&i| t[i]).collect();
                    let right: Vec<usize> = (0..degree).filter(|i| !pos.contains(i)).map(|i| t[i]).collect();
                    let inversions = left.iter().map(|a| right.iter().filter(|b| *b < a).count()).sum::<usize>();
                    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                    (sign, alpha.component_position(&left), beta.component_position(&right))
                })
                .collect()
        })
        .collect();
    let mut data = Vec::with_capacity(lattice.len() * targets.len());
    for p in 0..lattice.len() {
        for shuffles in &table {
            let mut v = C::zero();
            for &(sign, i, j) in shuffles {
                v.add_scaled(&pair(alpha.get(p, i), beta.get(p, j)), sign);
            }
            data.push(v);
        }
    }
    Ok(FormField { lattice: lattice.clone(), degree, components: targets, data })
}

/// Translation and Lorentz parts of an algebra-valued form.
pub fn split(e: &FormField<AlgebraElement>) -> (FormField<Vector4<f64>>, FormField<Matrix4<f64>>) {
    (e.map(|x| x.v), e.map(|x| x.w))
}

pub fn join(v: &FormField<Vector4<f64>>, w: &FormField<Matrix4<f64>>) -> Result<FormField<AlgebraElement>, FormsError> {
    if v.lattice != w.lattice {
        return Err(FormsError::LatticeMismatch);
    }
    if v.degree != w.degree {
        return Err(FormsError::DegreeMismatch { left: v.degree, right: w.degree });
    }
    let data = v.data.iter().zip(&w.data).map(|(a, b)| AlgebraElement::new(*a, *b)).collect();
    FormField::from_data(&v.lattice, v.degree, data)
}

/// A Poincare-group-valued function on the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupField {
    lattice: Lattice,
    points: Vec<PoincareElement>,
}

impl GroupField {
    pub fn from_fn(lattice: &Lattice, f: impl Fn(&[f64]) -> PoincareElement) -> Self {
        let points = (0..lattice.len()).map(|i| f(&lattice.coords(i))).collect();
        GroupField { lattice: lattice.clone(), points }
    }

    pub fn from_points(lattice: &Lattice, points: Vec<PoincareElement>) -> Result<Self, FormsError> {
        if points.len() != lattice.len() {
            return Err(FormsError::Length { expected: lattice.len(), found: points.len() });
        }
        Ok(GroupField { lattice: lattice.clone(), points })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[PoincareElement] {
        &self.points
    }
}

/// `E = nabla g`: `w_a = (d_a L) L~`, `xi_a = d_a a - w_a a`.
pub fn nabla_group(g: &GroupField) -> FormField<AlgebraElement> {
    let lattice = &g.lattice;
    let a: Vec<Vector4<f64>> = g.points.iter().map(|x| *x.a.as_vector()).collect();
    let l: Vec<Matrix4<f64>> = g.points.iter().map(|x| *x.l.matrix()).collect();
    let p = lattice.dim();
    let da: Vec<Vec<Vector4<f64>>> = (0..p).map(|ax| lattice.partial(&a, ax)).collect();
    let dl: Vec<Vec<Matrix4<f64>>> = (0..p).map(|ax| lattice.partial(&l, ax)).collect();
    let mut data = Vec::with_capacity(lattice.len() * p);
    for i in 0..lattice.len() {
        let inv = g.points[i].l.adjoint();
        for ax in 0..p {
            let w = dl[ax][i] * inv.matrix();
            data.push(AlgebraElement::new(da[ax][i] - w * a[i], w));
        }
    }
    FormField::from_data(lattice, 1, data).expect("one 1-form component per axis")
}

/// `Omega = nabla E`: translation part `d xi - w ^ xi`, Lorentz part `d w - w ^ w`.
pub fn dislocation(e: &FormField<AlgebraElement>) -> Result<FormField<AlgebraElement>, FormsError> {
    let (xi, w) = split(e);
    let t = ext_d(&xi)?.combine(1.0, &wedge(&w, &xi)?, -1.0)?;
    let r = ext_d(&w)?.combine(1.0, &wedge(&w, &w)?, -1.0)?;
    join(&t, &r)
}

/// `Psi = nabla Omega` for a 2-form `Omega` and the deformation `E` it came from.
///
/// Translation part `d Omega_t + Omega_r ^ xi - w ^ Omega_t`, Lorentz part
/// `d Omega_r + Omega_r ^ w - w ^ Omega_r`.
pub fn incompatibility(
    omega: &FormField<AlgebraElement>,
    e: &FormField<AlgebraElement>,
) -> Result<FormField<AlgebraElement>, FormsError> {
    let (ot, or) = split(omega);
    let (xi, w) = split(e);
    let t = ext_d(&ot)?.combine(1.0, &wedge(&or, &xi)?, 1.0)?.combine(1.0, &wedge(&w, &ot)?, -1.0)?;
    let r = ext_d(&or)?.combine(1.0, &wedge(&or, &w)?, 1.0)?.combine(1.0, &wedge(&w, &or)?, -1.0)?;
    join(&t, &r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosednessResidual {
    pub translation: f64,
    pub rotation: f64,
}

impl ClosednessResidual {
    pub fn max(&self) -> f64 {
        self.translation.max(self.rotation)
    }
}

/// Interior max-norm of `d v` and `d w` for a Lagrangian deformation `(v, w)`.
pub fn closedness_residual(e: &FormField<AlgebraElement>) -> Result<ClosednessResidual, FormsError> {
    let (v, w) = split(e);
    Ok(ClosednessResidual {
        translation: ext_d(&v)?.interior_max_norm(),
        rotation: ext_d(&w)?.interior_max_norm(),
    })
}

/// A form whose value kind is only known at run time, e.g. after reading a file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyForm {
    Scalar(FormField<f64>),
    Vector(FormField<Vector4<f64>>),
    Matrix(FormField<Matrix4<f64>>),
    Algebra(FormField<AlgebraElement>),
}

impl AnyForm {
    pub fn kind(&self) -> ValueKind {
        match self {
            AnyForm::Scalar(_) => ValueKind::Scalar,
            AnyForm::Vector(_) => ValueKind::Vector,
            AnyForm::Matrix(_) => ValueKind::Matrix,
            AnyForm::Algebra(_) => ValueKind::Algebra,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            AnyForm::Scalar(f) => f.degree(),
            AnyForm::Vector(f) => f.degree(),
            AnyForm::Matrix(f) => f.degree(),
            AnyForm::Algebra(f) => f.degree(),
        }
    }

    pub fn ext_d(&self) -> Result<AnyForm, FormsError> {
        Ok(match self {
            AnyForm::Scalar(f) => AnyForm::Scalar(ext_d(f)?),
            AnyForm::Vector(f) => AnyForm::Vector(ext_d(f)?),
            AnyForm::Matrix(f) => AnyForm::Matrix(ext_d(f)?),
            AnyForm::Algebra(f) => AnyForm::Algebra(ext_d(f)?),
        })
    }

    /// Wedge with run-time pairing check; vector-vector, vector-matrix and any
    /// algebra operand have no pairing.
    pub fn wedge(&self, other: &AnyForm) -> Result<AnyForm, FormsError> {
        use AnyForm::*;
        Ok(match (self, other) {
            (Scalar(a), Scalar(b)) => Scalar(wedge(a, b)?),
            (Scalar(a), Vector(b)) => Vector(wedge(a, b)?),
            (Scalar(a), Matrix(b)) => Matrix(wedge(a, b)?),
            (Vector(a), Scalar(b)) => Vector(wedge(a, b)?),
            (Matrix(a), Scalar(b)) => Matrix(wedge(a, b)?),
            (Matrix(a), Vector(b)) => Vector(wedge(a, b)?),
            (Matrix(a), Matrix(b)) => Matrix(wedge(a, b)?),
            _ => return Err(FormsError::IncompatiblePairing { left: self.kind(), right: other.kind() }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Generator;
    use crate::lorentz::{FourVector, LorentzMatrix};

    fn plane(n: usize) -> Lattice {
        Lattice::unit_cube(2, n).unwrap()
    }

    #[test]
    fn d_of_coordinate_function_is_its_differential() {
        let l = plane(5);
        let f = FormField::from_fn(&l, 0, |x, _| 3.0 * x[0] - 2.0 * x[1]).unwrap();
        let df = ext_d(&f).unwrap();
        for p in 0..l.len() {
            assert!((df.component(p, &[0]).unwrap() - 3.0).abs() < 1e-13);
            assert!((df.component(p, &[1]).unwrap() + 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn d_of_one_form_is_curl() {
        // d(rho_2 d rho_1) = -d rho_1 ^ d rho_2
        let l = plane(4);
        let f = FormField::from_fn(&l, 1, |x, c| if c == [0] { x[1] } else { 0.0 }).unwrap();
        let df = ext_d(&f).unwrap();
        for p in 0..l.len() {
            assert!((df.component(p, &[0, 1]).unwrap() + 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn dd_vanishes_on_interior() {
        let l = Lattice::unit_cube(3, 7).unwrap();
        let f = FormField::from_fn(&l, 0, |x, _| (x[0] * 3.0).sin() * (x[1] + x[2] * x[2]).exp()).unwrap();
        let ddf = ext_d(&ext_d(&f).unwrap()).unwrap();
        assert!(ddf.interior_max_norm() < 1e-12);
        let g = FormField::from_fn(&l, 1, |x, c| (x[c[0]] * 2.0 + x[0] * x[1]).cos()).unwrap();
        assert!(ext_d(&ext_d(&g).unwrap()).unwrap().interior_max_norm() < 1e-11);
    }

    #[test]
    fn wedge_of_coordinate_differentials() {
        let l = plane(3);
        let dx = FormField::from_fn(&l, 1, |_, c| if c == [0] { 1.0 } else { 0.0 }).unwrap();
        let dy = FormField::from_fn(&l, 1, |_, c| if c == [1] { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(*wedge(&dx, &dy).unwrap().component(0, &[0, 1]).unwrap(), 1.0);
        assert_eq!(*wedge(&dy, &dx).unwrap().component(0, &[0, 1]).unwrap(), -1.0);
        assert!(matches!(wedge(&wedge(&dx, &dy).unwrap(), &dx), Err(FormsError::DegreeTooHigh { .. })));
    }

    #[test]
    fn wedge_of_one_forms_with_matrix_values_is_a_commutator_on_equal_factors() {
        let l = plane(3);
        let j = Generator::Rotation(1).element().w;
        let k = Generator::Boost(2).element().w;
        let w = FormField::from_fn(&l, 1, |_, c| if c == [0] { j } else { k }).unwrap();
        let ww = wedge(&w, &w).unwrap();
        assert_eq!(*ww.component(0, &[0, 1]).unwrap(), j * k - k * j);
    }

    #[test]
    fn mismatched_lattices_are_rejected() {
        let a = FormField::<f64>::zeros(&plane(3), 1).unwrap();
        let b = FormField::<f64>::zeros(&plane(4), 1).unwrap();
        assert!(matches!(wedge(&a, &b), Err(FormsError::LatticeMismatch)));
    }

    #[test]
    fn any_form_refuses_vector_vector_pairing() {
        let v = AnyForm::Vector(FormField::zeros(&plane(3), 0).unwrap());
        assert!(matches!(v.wedge(&v), Err(FormsError::IncompatiblePairing { .. })));
        let m = AnyForm::Matrix(FormField::zeros(&plane(3), 1).unwrap());
        assert_eq!(m.wedge(&v).unwrap().kind(), ValueKind::Vector);
    }

    #[test]
    fn constant_group_field_has_zero_deformation() {
        let l = plane(4);
        let g0 = PoincareElement::new(FourVector::new(1.0, 2.0, 0.0, -1.0), LorentzMatrix::boost(1, 0.3));
        let e = nabla_group(&GroupField::from_fn(&l, |_| g0));
        assert!(e.max_norm() < 1e-14);
    }

    #[test]
    fn translation_field_deformation_is_its_gradient() {
        let l = plane(5);
        let g = GroupField::from_fn(&l, |x| PoincareElement::translation(FourVector::new(x[0], 0.0, 2.0 * x[1], 0.0)));
        let e = nabla_group(&g);
        assert!((e.component(7, &[0]).unwrap().v - Vector4::new(1.0, 0.0, 0.0, 0.0)).amax() < 1e-13);
        assert!((e.component(7, &[1]).unwrap().v - Vector4::new(0.0, 0.0, 2.0, 0.0)).amax() < 1e-13);
    }

    #[test]
    fn closedness_detects_non_exact_translation_form() {
        let l = plane(5);
        let e = FormField::from_fn(&l, 1, |x, c| {
            let mut v = Vector4::zeros();
            if c == [0] {
                v[1] = x[1];
            }
            AlgebraElement::new(v, Matrix4::zeros())
        })
        .unwrap();
        let omega = dislocation(&e).unwrap();
        assert!((omega.component(12, &[0, 1]).unwrap().v[1] + 1.0).abs() < 1e-13);
        let r = closedness_residual(&e).unwrap();
        assert!((r.translation - 1.0).abs() < 1e-13);
        assert_eq!(r.rotation, 0.0);
    }
}
