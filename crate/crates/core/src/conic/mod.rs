//! Standard-form conic programs and an ADMM solver for them.

mod admm;
mod cones;
mod factor;
mod program;
mod residuals;
mod rowsparse;
mod sdpa;

use thiserror::Error;

pub use admm::{admm_solve, admm_solve_from, farkas_check, FarkasCheck, Solution, SolverOptions, Status, WarmStart};
pub use cones::{cone_distance, product_distance, project_cone};
pub use factor::NormalFactor;
pub use program::{matrix_to_svec, svec_index, svec_position, svec_to_matrix, Cone, ConicProgram, SparseMatrix};
pub use residuals::{compute_residuals, dual_cones, Residuals};
pub use rowsparse::{admm_solve_rowsparse, admm_solve_rowsparse_from, SelectorSplit};
pub use sdpa::{read_sdpa, write_sdpa};

#[derive(Debug, Error)]
pub enum ConicError {
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
