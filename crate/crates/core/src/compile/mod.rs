//! Polynomial nonnegativity problems as conic programs, by coefficient matching.

mod certificate;
mod matching;
mod program;

use thiserror::Error;

use crate::conic::ConicError;
use crate::chordal::{chordal_extend, correlative_graph};
use crate::poly::{monomials_in_vars, monomials_up_to, MonomialBasis, PolyError, Polynomial};

pub use certificate::{is_diagonally_dominant, verify_certificate, CertificateBlock, CertificateReport, GramCertificate};
pub use matching::{matching_density, matching_system, MatchingRow, MatchingSystem};
pub use program::{compile_bound, CompiledProgram, ConeSpec, GramBasis, GramBlock, GramCone};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("polynomial has odd degree {0}")]
    OddDegree(u32),
    #[error("monomial {0} cannot be produced by the Gram basis")]
    Uncoverable(String),
    #[error("variable count mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown cone '{0}' (expected sos, sdsos or dsos)")]
    UnknownCone(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Conic(#[from] ConicError),
}

fn half_degree(p: &Polynomial) -> Result<u32, CompileError> {
    let deg = p.degree();
    if deg % 2 == 1 {
        return Err(CompileError::OddDegree(deg));
    }
    Ok(deg / 2)
}

fn spec_bases(p: &Polynomial, spec: &ConeSpec) -> Result<Vec<GramBasis>, CompileError> {
    let d = half_degree(p)?;
    Ok(match &spec.clique_bases {
        Some(bases) => bases.iter().cloned().map(GramBasis::Monomials).collect(),
        None => vec![GramBasis::Monomials(monomials_up_to(p.n(), d))],
    })
}

/// Feasibility of `p = sum_k z_k^T Q_k z_k` with each `Q_k` in the spec's cone.
pub fn compile_feasibility(p: &Polynomial, spec: &ConeSpec) -> Result<CompiledProgram, CompileError> {
    compile_bound(p, None, spec_bases(p, spec)?, spec.tag)
}

/// Largest `gamma` with `p - gamma` in the spec's cone.
pub fn compile_pop(p: &Polynomial, spec: &ConeSpec) -> Result<CompiledProgram, CompileError> {
    let one = Polynomial::constant(p.n(), 1.0);
    compile_bound(p, Some(&one), spec_bases(p, spec)?, spec.tag)
}

/// Largest `gamma` with `f - gamma (x_1^2 + ... + x_n^2)^d` in `cone`, over the
/// degree-`d` monomials. `f` must be a form of degree `2d`.
pub fn compile_form_bound(f: &Polynomial, cone: GramCone) -> Result<CompiledProgram, CompileError> {
    let d = half_degree(f)?;
    if !f.is_homogeneous() {
        return Err(CompileError::Invalid("polynomial is not homogeneous".into()));
    }
    let weight = Polynomial::squared_norm_power(f.n(), d);
    let basis = crate::poly::monomials_of_degree(f.n(), d);
    compile_bound(f, Some(&weight), vec![GramBasis::Monomials(basis)], cone)
}

/// One monomial basis per maximal clique of the chordal-extended correlative
/// sparsity graph of `p`: monomials in the clique's variables up to half the
/// degree of `p`.
pub fn sparse_bases(p: &Polynomial) -> Result<Vec<MonomialBasis>, CompileError> {
    let d = half_degree(p)?;
    let tree = chordal_extend(&correlative_graph(p));
    Ok(tree.cliques.iter().map(|c| monomials_in_vars(p.n(), c, d)).collect())
}

/// Feasibility of `p` as a sum of SOS polynomials, one per clique.
pub fn compile_sparse_sos(p: &Polynomial) -> Result<CompiledProgram, CompileError> {
    let spec = ConeSpec { tag: GramCone::Sos, clique_bases: Some(sparse_bases(p)?) };
    compile_feasibility(p, &spec)
}

/// Largest `gamma` with `p - gamma` a sum of clique-wise terms in `cone`.
pub fn compile_sparse_pop(p: &Polynomial, cone: GramCone) -> Result<CompiledProgram, CompileError> {
    let spec = ConeSpec { tag: cone, clique_bases: Some(sparse_bases(p)?) };
    compile_pop(p, &spec)
}
