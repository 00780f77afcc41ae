//! Kinematical states (1-jets of positions and frames over a material lattice)
//! and their deformation by Poincare displacement fields.
//!
//! Frames deform by left multiplication, `e = L e0`, so that deforming twice
//! composes as the group product: `deform(g2, deform(g1, s)) = deform(g2 g1, s)`.

use std::io::{BufRead, Write};

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::forms::{read_grid, write_grid, FormField, FormValue, FormsError, GridHeader, GridKind, Lattice};
use crate::lorentz::{lorentz_adjoint, lorentz_residual, max_abs};
use crate::poincare::PoincareElement;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("states live on different lattices")]
    LatticeMismatch,
    #[error("jet has {found} derivative slots, lattice dimension is {expected}")]
    JetLength { expected: usize, found: usize },
    #[error("displacement matrix at point {point} is not Lorentz (residual {residual:e})")]
    NotLorentz { point: usize, residual: f64 },
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// Position, frame and their derivatives along each material axis at one point.
///
/// `e[(mu, nu)]` is the mu-th component of frame axis nu.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub x: Vector4<f64>,
    pub e: Matrix4<f64>,
    pub x_d: Vec<Vector4<f64>>,
    pub e_d: Vec<Matrix4<f64>>,
}

impl JetPoint {
    /// Number of scalar coordinates: 20 for the point part plus 20 per axis.
    pub fn n_coords(&self) -> usize {
        20 * (1 + self.x_d.len())
    }

    /// Flat coordinates: x, e (row-major), then x_a and e_a for each axis.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_coords());
        self.x.write_flat(&mut out);
        self.e.write_flat(&mut out);
        for a in 0..self.x_d.len() {
            self.x_d[a].write_flat(&mut out);
            self.e_d[a].write_flat(&mut out);
        }
        out
    }

    pub fn from_flat(flat: &[f64], p: usize) -> Self {
        let mut x_d = Vec::with_capacity(p);
        let mut e_d = Vec::with_capacity(p);
        for a in 0..p {
            let base = 20 * (a + 1);
            x_d.push(Vector4::read_flat(&flat[base..base + 4]));
            e_d.push(Matrix4::read_flat(&flat[base + 4..base + 20]));
        }
        JetPoint { x: Vector4::read_flat(&flat[..4]), e: Matrix4::read_flat(&flat[4..20]), x_d, e_d }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KinematicalState {
    lattice: Lattice,
    points: Vec<JetPoint>,
}

impl KinematicalState {
    pub fn new(lattice: &Lattice, points: Vec<JetPoint>) -> Result<Self, KinematicsError> {
        if points.len() != lattice.len() {
            return Err(FormsError::Length { expected: lattice.len(), found: points.len() }.into());
        }
        if let Some(pt) = points.iter().find(|pt| pt.x_d.len() != lattice.dim() || pt.e_d.len() != lattice.dim()) {
            return Err(KinematicsError::JetLength { expected: lattice.dim(), found: pt.x_d.len().min(pt.e_d.len()) });
        }
        Ok(KinematicalState { lattice: lattice.clone(), points })
    }

    /// State with analytic jets supplied by the caller.
    pub fn from_fn(lattice: &Lattice, f: impl Fn(&[f64]) -> JetPoint) -> Result<Self, KinematicsError> {
        Self::new(lattice, (0..lattice.len()).map(|i| f(&lattice.coords(i))).collect())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[JetPoint] {
        &self.points
    }

    pub fn positions(&self) -> Vec<Vector4<f64>> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn frames(&self) -> Vec<Matrix4<f64>> {
        self.points.iter().map(|p| p.e).collect()
    }

    pub fn write<W: Write>(&self, out: &mut W) -> Result<(), KinematicsError> {
        let header = GridHeader {
            kind: GridKind::KinematicState,
            lattice: self.lattice.clone(),
            degree: 0,
            width: 20 * (1 + self.lattice.dim()),
        };
        let rows: Vec<Vec<f64>> = self.points.iter().map(JetPoint::to_flat).collect();
        Ok(write_grid(out, &header, &rows)?)
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self, KinematicsError> {
        let (header, rows) = read_grid(input)?;
        if header.kind != GridKind::KinematicState {
            return Err(FormsError::Parse { line: 2, message: "file does not hold a kinematic state".into() }.into());
        }
        let p = header.lattice.dim();
        if header.width != 20 * (1 + p) {
            return Err(FormsError::Length { expected: 20 * (1 + p), found: header.width }.into());
        }
        let points = rows.iter().map(|r| JetPoint::from_flat(r, p)).collect();
        Self::new(&header.lattice, points)
    }
}

/// Prolongs sampled positions and frames: jets are lattice derivatives.
pub fn prolong_points(
    lattice: &Lattice,
    x: Vec<Vector4<f64>>,
    e: Vec<Matrix4<f64>>,
) -> Result<KinematicalState, KinematicsError> {
    let p = lattice.dim();
    if x.len() != lattice.len() || e.len() != lattice.len() {
        return Err(FormsError::Length { expected: lattice.len(), found: x.len().min(e.len()) }.into());
    }
    let dx: Vec<Vec<Vector4<f64>>> = (0..p).map(|a| lattice.partial(&x, a)).collect();
    let de: Vec<Vec<Matrix4<f64>>> = (0..p).map(|a| lattice.partial(&e, a)).collect();
    let points = (0..lattice.len())
        .map(|i| JetPoint {
            x: x[i],
            e: e[i],
            x_d: (0..p).map(|a| dx[a][i]).collect(),
            e_d: (0..p).map(|a| de[a][i]).collect(),
        })
        .collect();
    KinematicalState::new(lattice, points)
}

/// Samples a placement `rho -> (x, e)` and prolongs it.
pub fn prolong(
    lattice: &Lattice,
    object: impl Fn(&[f64]) -> (Vector4<f64>, Matrix4<f64>),
) -> Result<KinematicalState, KinematicsError> {
    let (x, e): (Vec<_>, Vec<_>) = (0..lattice.len()).map(|i| object(&lattice.coords(i))).unzip();
    prolong_points(lattice, x, e)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegrabilityReport {
    /// Max over points of the gap between jets and lattice derivatives.
    pub residual: f64,
    pub integrable: bool,
}

pub fn is_integrable(s: &KinematicalState, tol: f64) -> IntegrabilityReport {
    let lattice = &s.lattice;
    let x = s.positions();
    let e = s.frames();
    let mut residual: f64 = 0.0;
    for a in 0..lattice.dim() {
        let dx = lattice.partial(&x, a);
        let de = lattice.partial(&e, a);
        for (i, pt) in s.points.iter().enumerate() {
            residual = residual.max((pt.x_d[a] - dx[i]).amax()).max(max_abs(&(pt.e_d[a] - de[i])));
        }
    }
    IntegrabilityReport { residual, integrable: residual <= tol }
}

/// Poincare displacement with derivatives along each material axis.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementPoint {
    pub a: Vector4<f64>,
    pub l: Matrix4<f64>,
    pub a_d: Vec<Vector4<f64>>,
    pub l_d: Vec<Matrix4<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementField {
    lattice: Lattice,
    points: Vec<DisplacementPoint>,
}

impl DisplacementField {
    /// Checks the Lorentz property of every `L` at tolerance `tol`.
    pub fn new(lattice: &Lattice, points: Vec<DisplacementPoint>, tol: f64) -> Result<Self, KinematicsError> {
        if points.len() != lattice.len() {
            return Err(FormsError::Length { expected: lattice.len(), found: points.len() }.into());
        }
        for (i, pt) in points.iter().enumerate() {
            if pt.a_d.len() != lattice.dim() || pt.l_d.len() != lattice.dim() {
                return Err(KinematicsError::JetLength { expected: lattice.dim(), found: pt.a_d.len().min(pt.l_d.len()) });
            }
            let residual = lorentz_residual(&pt.l);
            if !(residual <= tol) {
                return Err(KinematicsError::NotLorentz { point: i, residual });
            }
        }
        Ok(DisplacementField { lattice: lattice.clone(), points })
    }

    pub fn from_fn(lattice: &Lattice, f: impl Fn(&[f64]) -> DisplacementPoint, tol: f64) -> Result<Self, KinematicsError> {
        Self::new(lattice, (0..lattice.len()).map(|i| f(&lattice.coords(i))).collect(), tol)
    }

    /// Samples a group-valued field and takes lattice derivatives as jets.
    pub fn prolong(lattice: &Lattice, g: impl Fn(&[f64]) -> PoincareElement) -> Self {
        let samples: Vec<PoincareElement> = (0..lattice.len()).map(|i| g(&lattice.coords(i))).collect();
        let a: Vec<Vector4<f64>> = samples.iter().map(|s| *s.a.as_vector()).collect();
        let l: Vec<Matrix4<f64>> = samples.iter().map(|s| *s.l.matrix()).collect();
        let p = lattice.dim();
        let da: Vec<Vec<Vector4<f64>>> = (0..p).map(|ax| lattice.partial(&a, ax)).collect();
        let dl: Vec<Vec<Matrix4<f64>>> = (0..p).map(|ax| lattice.partial(&l, ax)).collect();
        let points = (0..lattice.len())
            .map(|i| DisplacementPoint {
                a: a[i],
                l: l[i],
                a_d: (0..p).map(|ax| da[ax][i]).collect(),
                l_d: (0..p).map(|ax| dl[ax][i]).collect(),
            })
            .collect();
        DisplacementField { lattice: lattice.clone(), points }
    }

    /// The same constant element at every point, with zero jets.
    pub fn constant(lattice: &Lattice, g: &PoincareElement) -> Self {
        let p = lattice.dim();
        let pt = DisplacementPoint {
            a: *g.a.as_vector(),
            l: *g.l.matrix(),
            a_d: vec![Vector4::zeros(); p],
            l_d: vec![Matrix4::zeros(); p],
        };
        DisplacementField { lattice: lattice.clone(), points: vec![pt; lattice.len()] }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[DisplacementPoint] {
        &self.points
    }

    /// Pointwise product `self * other` with product-rule jets.
    pub fn compose(&self, other: &DisplacementField) -> Result<DisplacementField, KinematicsError> {
        if self.lattice != other.lattice {
            return Err(KinematicsError::LatticeMismatch);
        }
        let points = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(g, h)| DisplacementPoint {
                a: g.a + g.l * h.a,
                l: g.l * h.l,
                a_d: (0..g.a_d.len()).map(|k| g.a_d[k] + g.l_d[k] * h.a + g.l * h.a_d[k]).collect(),
                l_d: (0..g.l_d.len()).map(|k| g.l_d[k] * h.l + g.l * h.l_d[k]).collect(),
            })
            .collect();
        Ok(DisplacementField { lattice: self.lattice.clone(), points })
    }
}

/// Deforms a state: `x = a + L x0`, `e = L e0`,
/// `x_a = a_a + L_a x0 + L x0_a`, `e_a = L_a e0 + L e0_a`.
pub fn deform(chi: &DisplacementField, s0: &KinematicalState) -> Result<KinematicalState, KinematicsError> {
    if chi.lattice != s0.lattice {
        return Err(KinematicsError::LatticeMismatch);
    }
    let points = chi
        .points
        .iter()
        .zip(&s0.points)
        .map(|(g, s)| JetPoint {
            x: g.a + g.l * s.x,
            e: g.l * s.e,
            x_d: (0..s.x_d.len()).map(|k| g.a_d[k] + g.l_d[k] * s.x + g.l * s.x_d[k]).collect(),
            e_d: (0..s.e_d.len()).map(|k| g.l_d[k] * s.e + g.l * s.e_d[k]).collect(),
        })
        .collect();
    Ok(KinematicalState { lattice: s0.lattice.clone(), points })
}

/// The Eulerian deformation 1-form: `w_a = L_a L~`, `xi_a = a_a - w_a a`.
pub fn eulerian_of(chi: &DisplacementField) -> FormField<AlgebraElement> {
    let p = chi.lattice.dim();
    let mut data = Vec::with_capacity(chi.lattice.len() * p);
    for g in &chi.points {
        let inv = lorentz_adjoint(&g.l);
        for k in 0..p {
            let w = g.l_d[k] * inv;
            data.push(AlgebraElement::new(g.a_d[k] - w * g.a, w));
        }
    }
    FormField::from_data(&chi.lattice, 1, data).expect("one component per axis")
}

/// Deforms a state through the Eulerian deformation: the point part as in
/// [`deform`], jets as `x_a = xi_a + w_a x + L x0_a`, `e_a = w_a e + L e0_a`.
pub fn eulerian_deform(chi: &DisplacementField, s0: &KinematicalState) -> Result<KinematicalState, KinematicsError> {
    if chi.lattice != s0.lattice {
        return Err(KinematicsError::LatticeMismatch);
    }
    let e_form = eulerian_of(chi);
    let p = chi.lattice.dim();
    let points = chi
        .points
        .iter()
        .zip(&s0.points)
        .enumerate()
        .map(|(i, (g, s))| {
            let x = g.a + g.l * s.x;
            let e = g.l * s.e;
            let x_d = (0..p)
                .map(|k| {
                    let d = e_form.get(i, k);
                    d.v + d.w * x + g.l * s.x_d[k]
                })
                .collect();
            let e_d = (0..p)
                .map(|k| {
                    let d = e_form.get(i, k);
                    d.w * e + g.l * s.e_d[k]
                })
                .collect();
            JetPoint { x, e, x_d, e_d }
        })
        .collect();
    Ok(KinematicalState { lattice: s0.lattice.clone(), points })
}

/// Max distance between the jets of two states on the same lattice.
pub fn jet_distance(a: &KinematicalState, b: &KinematicalState) -> Result<f64, KinematicsError> {
    if a.lattice != b.lattice {
        return Err(KinematicsError::LatticeMismatch);
    }
    Ok(a.points
        .iter()
        .zip(&b.points)
        .map(|(p, q)| {
            p.to_flat().iter().zip(q.to_flat()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{FourVector, LorentzMatrix};

    fn identity_placement(lattice: &Lattice) -> KinematicalState {
        prolong(lattice, |r| {
            let mut x = Vector4::zeros();
            for (a, v) in r.iter().enumerate() {
                x[a] = *v;
            }
            (x, Matrix4::identity())
        })
        .unwrap()
    }

    #[test]
    fn prolonged_state_is_integrable() {
        let l = Lattice::unit_cube(2, 6).unwrap();
        let s = prolong(&l, |r| (Vector4::new(r[0].sin(), r[1] * r[0], 0.0, 1.0), *LorentzMatrix::boost(1, r[1]).matrix()))
            .unwrap();
        let rep = is_integrable(&s, 1e-12);
        assert_eq!(rep.residual, 0.0);
        assert!(rep.integrable);
    }

    #[test]
    fn quadratic_analytic_jets_are_integrable() {
        let l = Lattice::unit_cube(2, 5).unwrap();
        let s = KinematicalState::from_fn(&l, |r| JetPoint {
            x: Vector4::new(r[0] * r[0], r[0] * r[1], 3.0 * r[1], 0.0),
            e: Matrix4::identity(),
            x_d: vec![Vector4::new(2.0 * r[0], r[1], 0.0, 0.0), Vector4::new(0.0, r[0], 3.0, 0.0)],
            e_d: vec![Matrix4::zeros(); 2],
        })
        .unwrap();
        assert!(is_integrable(&s, 1e-12).integrable);
    }

    #[test]
    fn corrupted_jet_is_not_integrable() {
        let l = Lattice::unit_cube(1, 5).unwrap();
        let mut pts = identity_placement(&l).points().to_vec();
        pts[2].x_d[0][3] += 0.5;
        let s = KinematicalState::new(&l, pts).unwrap();
        let rep = is_integrable(&s, 1e-9);
        assert!(!rep.integrable);
        assert!((rep.residual - 0.5).abs() < 1e-14);
    }

    #[test]
    fn identity_displacement_leaves_state_unchanged() {
        let l = Lattice::unit_cube(2, 4).unwrap();
        let s = identity_placement(&l);
        let out = deform(&DisplacementField::constant(&l, &PoincareElement::identity()), &s).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn constant_translation_shifts_positions_only() {
        let l = Lattice::unit_cube(2, 4).unwrap();
        let s = identity_placement(&l);
        let g = PoincareElement::translation(FourVector::new(1.0, 0.0, 0.0, 0.0));
        let out = deform(&DisplacementField::constant(&l, &g), &s).unwrap();
        for (p, q) in out.points().iter().zip(s.points()) {
            assert_eq!(p.x, q.x + Vector4::new(1.0, 0.0, 0.0, 0.0));
            assert_eq!(p.x_d, q.x_d);
        }
    }

    #[test]
    fn eulerian_jets_with_nonzero_translation_gradient() {
        let l = Lattice::unit_cube(1, 4).unwrap();
        let s = identity_placement(&l);
        let chi = DisplacementField::from_fn(
            &l,
            |_| DisplacementPoint {
                a: Vector4::zeros(),
                l: Matrix4::identity(),
                a_d: vec![Vector4::new(0.0, 0.0, 2.0, 0.0)],
                l_d: vec![Matrix4::zeros()],
            },
            1e-9,
        )
        .unwrap();
        let out = eulerian_deform(&chi, &s).unwrap();
        assert_eq!(out.points()[1].x_d[0], s.points()[1].x_d[0] + Vector4::new(0.0, 0.0, 2.0, 0.0));
    }

    #[test]
    fn non_lorentz_displacement_is_rejected() {
        let l = Lattice::unit_cube(1, 3).unwrap();
        let bad = DisplacementPoint { a: Vector4::zeros(), l: Matrix4::identity() * 1.1, a_d: vec![Vector4::zeros()], l_d: vec![Matrix4::zeros()] };
        assert!(matches!(DisplacementField::from_fn(&l, |_| bad.clone(), 1e-9), Err(KinematicsError::NotLorentz { .. })));
    }

    #[test]
    fn state_file_round_trip() {
        let l = Lattice::unit_cube(2, 3).unwrap();
        let s = prolong(&l, |r| (Vector4::new(r[0], r[1] * 0.1, 1.0 / 3.0, 0.0), *LorentzMatrix::rotation(3, r[0]).matrix())).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        assert_eq!(KinematicalState::read(buf.as_slice()).unwrap(), s);
    }
}
