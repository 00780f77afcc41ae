//! Differential forms on a material lattice with scalar, vector, matrix or
//! algebra values, and the covariant derivative built from them.
//!
//! A k-form stores one value per strictly increasing multi-index
//! `a_0 < ... < a_{k-1}` at every lattice point. Derivatives use the same
//! second-order stencils everywhere, so `d d = 0` holds to rounding at
//! interior points.

mod field;
mod io;
mod lattice;

use thiserror::Error;

pub use field::{
    closedness_residual, dislocation, ext_d, incompatibility, join, nabla_group, split, wedge, wedge_with,
    AnyForm, ClosednessResidual, FormField, FormValue, GroupField, Pairing, ValueKind,
};
pub use io::{read_form, read_grid, write_form, write_grid, GridHeader, GridKind};
pub use lattice::{multi_indices, Lattice};

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("forms live on different lattices")]
    LatticeMismatch,
    #[error("degree {degree} exceeds lattice dimension {dim}")]
    DegreeTooHigh { degree: usize, dim: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("no pairing between {left:?} and {right:?} values")]
    IncompatiblePairing { left: ValueKind, right: ValueKind },
    #[error("grid file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected {expected} values, found {found}")]
    Length { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
