//! Plain-text grid files. Layout:
//!
//! ```text
//! cosserat-grid 1
//! kind <scalar|vector|matrix|algebra|kinematic-state>
//! shape <n_1> ... <n_p>
//! spacing <h_1> ... <h_p>
//! origin <o_1> ... <o_p>
//! degree <k>
//! width <values per point>
//! data
//! <one line per lattice point, row-major with the last axis fastest>
//! ```
//!
//! For forms a point line holds every component in lexicographic multi-index
//! order; each value is flattened as scalar (1), vector (4), matrix (16,
//! row-major) or algebra element (v then w, 20). Numbers use the shortest
//! representation that parses back to the same double.

use std::io::{BufRead, Write};

use super::field::{AnyForm, FormField, FormValue, ValueKind};
use super::lattice::{multi_indices, Lattice};
use super::FormsError;

const MAGIC: &str = "cosserat-grid 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Form(ValueKind),
    KinematicState,
}

impl GridKind {
    fn name(&self) -> &'static str {
        match self {
            GridKind::Form(k) => k.name(),
            GridKind::KinematicState => "kinematic-state",
        }
    }

    fn parse(s: &str) -> Option<GridKind> {
        if s == "kinematic-state" {
            Some(GridKind::KinematicState)
        } else {
            ValueKind::parse(s).map(GridKind::Form)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridHeader {
    pub kind: GridKind,
    pub lattice: Lattice,
    pub degree: usize,
    pub width: usize,
}

fn join_nums<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_grid<W: Write>(out: &mut W, header: &GridHeader, rows: &[Vec<f64>]) -> Result<(), FormsError> {
    let l = &header.lattice;
    if rows.len() != l.len() {
        return Err(FormsError::Length { expected: l.len(), found: rows.len() });
    }
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "kind {}", header.kind.name())?;
    writeln!(out, "shape {}", join_nums(l.shape()))?;
    writeln!(out, "spacing {}", join_nums(l.spacing()))?;
    writeln!(out, "origin {}", join_nums(l.origin()))?;
    writeln!(out, "degree {}", header.degree)?;
    writeln!(out, "width {}", header.width)?;
    writeln!(out, "data")?;
    for row in rows {
        if row.len() != header.width {
            return Err(FormsError::Length { expected: header.width, found: row.len() });
        }
        writeln!(out, "{}", join_nums(row))?;
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>, FormsError> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| FormsError::Parse { line, message: format!("bad number '{t}'") }))
        .collect()
}

pub fn read_grid<R: BufRead>(input: R) -> Result<(GridHeader, Vec<Vec<f64>>), FormsError> {
    let mut lines = input.lines().enumerate();
    let mut next = |want: &str| -> Result<(usize, String), FormsError> {
        let (n, line) = lines.next().ok_or(FormsError::Parse { line: 0, message: format!("missing '{want}'") })?;
        Ok((n + 1, line?))
    };
    let (n, magic) = next("header")?;
    if magic.trim() != MAGIC {
        return Err(FormsError::Parse { line: n, message: "not a grid file".into() });
    }
    let mut field = |key: &str| -> Result<(usize, String), FormsError> {
        let (n, line) = next(key)?;
        let rest = line
            .strip_prefix(key)
            .ok_or_else(|| FormsError::Parse { line: n, message: format!("expected '{key}'") })?;
        Ok((n, rest.trim().to_string()))
    };
    let (n, kind) = field("kind")?;
    let kind = GridKind::parse(&kind).ok_or(FormsError::Parse { line: n, message: format!("unknown kind '{kind}'") })?;
    let (n, shape) = field("shape")?;
    let shape: Vec<usize> = parse_list(n, &shape)?;
    let (n, spacing) = field("spacing")?;
    let spacing: Vec<f64> = parse_list(n, &spacing)?;
    let (n, origin) = field("origin")?;
    let origin: Vec<f64> = parse_list(n, &origin)?;
    let (n, degree) = field("degree")?;
    let degree = degree.parse().map_err(|_| FormsError::Parse { line: n, message: "bad degree".into() })?;
    let (n, width) = field("width")?;
    let width = width.parse().map_err(|_| FormsError::Parse { line: n, message: "bad width".into() })?;
    let (n, data) = field("data")?;
    if !data.is_empty() {
        return Err(FormsError::Parse { line: n, message: "expected 'data'".into() });
    }
    let lattice = Lattice::new(shape, spacing, origin)?;
    let mut rows = Vec::with_capacity(lattice.len());
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = parse_list(i + 1, &line)?;
        if row.len() != width {
            return Err(FormsError::Parse { line: i + 1, message: format!("expected {width} values, found {}", row.len()) });
        }
        rows.push(row);
    }
    if rows.len() != lattice.len() {
        return Err(FormsError::Length { expected: lattice.len(), found: rows.len() });
    }
    Ok((GridHeader { kind, lattice, degree, width }, rows))
}

fn form_rows<V: FormValue>(f: &FormField<V>) -> Vec<Vec<f64>> {
    (0..f.lattice().len())
        .map(|p| {
            let mut row = Vec::with_capacity(f.n_components() * V::KIND.width());
            for c in 0..f.n_components() {
                f.get(p, c).write_flat(&mut row);
            }
            row
        })
        .collect()
}

fn form_header<V: FormValue>(f: &FormField<V>) -> GridHeader {
    GridHeader {
        kind: GridKind::Form(V::KIND),
        lattice: f.lattice().clone(),
        degree: f.degree(),
        width: f.n_components() * V::KIND.width(),
    }
}

pub fn write_form<W: Write>(out: &mut W, form: &AnyForm) -> Result<(), FormsError> {
    let (header, rows) = match form {
        AnyForm::Scalar(f) => (form_header(f), form_rows(f)),
        AnyForm::Vector(f) => (form_header(f), form_rows(f)),
        AnyForm::Matrix(f) => (form_header(f), form_rows(f)),
        AnyForm::Algebra(f) => (form_header(f), form_rows(f)),
    };
    write_grid(out, &header, &rows)
}

fn rebuild<V: FormValue>(header: &GridHeader, rows: &[Vec<f64>]) -> Result<FormField<V>, FormsError> {
    let ncomp = multi_indices(header.lattice.dim(), header.degree).len();
    let w = V::KIND.width();
    if header.width != ncomp * w {
        return Err(FormsError::Length { expected: ncomp * w, found: header.width });
    }
    let data = rows.iter().flat_map(|row| row.chunks(w).map(V::read_flat)).collect();
    FormField::from_data(&header.lattice, header.degree, data)
}

pub fn read_form<R: BufRead>(input: R) -> Result<AnyForm, FormsError> {
    let (header, rows) = read_grid(input)?;
    Ok(match header.kind {
        GridKind::Form(ValueKind::Scalar) => AnyForm::Scalar(rebuild(&header, &rows)?),
        GridKind::Form(ValueKind::Vector) => AnyForm::Vector(rebuild(&header, &rows)?),
        GridKind::Form(ValueKind::Matrix) => AnyForm::Matrix(rebuild(&header, &rows)?),
        GridKind::Form(ValueKind::Algebra) => AnyForm::Algebra(rebuild(&header, &rows)?),
        GridKind::KinematicState => {
            return Err(FormsError::Parse { line: 2, message: "file holds a kinematic state, not a form".into() })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraElement;
    use nalgebra::{Matrix4, Vector4};

    #[test]
    fn algebra_form_survives_a_round_trip_bit_for_bit() {
        let l = Lattice::new(vec![3, 4], vec![0.1, 1.0 / 3.0], vec![-1.0, 0.25]).unwrap();
        let f = FormField::from_fn(&l, 1, |x, c| {
            let s = (x[0] * 7.1 + x[1] * 0.3 + c[0] as f64).sin();
            AlgebraElement::new(Vector4::repeat(s / 3.0), Matrix4::from_fn(|i, j| s * (i as f64 - j as f64) * 1e-300))
        })
        .unwrap();
        let mut buf = Vec::new();
        write_form(&mut buf, &AnyForm::Algebra(f.clone())).unwrap();
        assert_eq!(read_form(buf.as_slice()).unwrap(), AnyForm::Algebra(f));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let l = Lattice::unit_cube(1, 3).unwrap();
        let f = FormField::from_fn(&l, 0, |x, _| x[0]).unwrap();
        let mut buf = Vec::new();
        write_form(&mut buf, &AnyForm::Scalar(f)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(9).map(|s| format!("{s}\n")).collect();
        assert!(read_form(cut.as_bytes()).is_err());
        assert!(read_form("hello\n".as_bytes()).is_err());
    }
}
