//! Relativistic Cosserat media on the Poincare group.
//!
//! Layers, bottom up: Minkowski geometry ([`lorentz`]), the Poincare group and
//! its Lie algebra ([`poincare`], [`algebra`]), algebra-valued differential
//! forms on a material lattice ([`forms`]), Cosserat kinematics and dynamics
//! ([`kinematics`], [`dynamics`]), Dirac bilinears ([`dirac`]) and the
//! Weyssenhoff spinning fluid ([`weyssenhoff`]).

// Tensor code indexes several arrays by the same loop variable, and the
// negated comparisons are there to reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dirac;
pub mod dynamics;
pub mod expm;
pub mod forms;
pub mod kinematics;
pub mod lorentz;
pub mod poincare;
pub mod weyssenhoff;

pub use lorentz::{FourVector, LorentzMatrix, Units};
