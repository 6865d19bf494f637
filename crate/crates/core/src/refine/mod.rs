//! Iterative tightening of diagonally dominant bounds.

mod atlas;
mod colgen;
mod problem;
mod pursuit;
mod trace;

use thiserror::Error;

use crate::compile::CompileError;
use crate::conic::ConicError;
use crate::poly::PolyError;

pub use atlas::{dd_extreme_rays, reconstruct_dd, RayAtlas};
pub use colgen::{column_generation, price, ColumnGenOptions, RayProgram};
pub use problem::BoundProblem;
pub use pursuit::{basis_pursuit, condition_number, expansion_gap, shifted_factor, BasisPursuitOptions};
pub use trace::{RefinementTrace, TerminalStatus, TraceStep};

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {row} is not diagonally dominant (deficit {deficit:.3e})")]
    NotDiagonallyDominant { row: usize, deficit: f64 },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
