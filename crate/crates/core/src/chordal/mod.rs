//! Sparsity graphs, chordal extensions and clique decomposition of PSD blocks.

mod cliques;
mod decompose;
mod graph;

use thiserror::Error;

use crate::conic::ConicError;

pub use cliques::{chordal_extend, chordal_extend_with, is_chordal, CliqueTree, ExtendOptions};
pub use decompose::{completable, decompose_psd, DecomposedProgram, PartialSymMatrix};
pub use graph::{aggregate_graph, correlative_graph, SparsityGraph};

#[derive(Debug, Error)]
pub enum ChordalError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("expected exactly one PSD block, found {0}")]
    PsdBlockCount(usize),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("entry ({i}, {j}) is used by the program but lies outside the chordal pattern")]
    OutsidePattern { i: usize, j: usize },
    #[error("entry ({i}, {j}) of the pattern is unspecified")]
    MissingEntry { i: usize, j: usize },
    #[error(transparent)]
    Conic(#[from] ConicError),
}
