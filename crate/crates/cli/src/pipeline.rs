use std::time::Instant;

use sosrelax::chordal::{aggregate_graph, chordal_extend, decompose_psd};
use sosrelax::compile::{
    compile_feasibility, compile_form_bound, compile_pop, compile_sparse_pop, matching_density, matching_system,
    sparse_bases, verify_certificate, CompiledProgram, ConeSpec, GramCone,
};
use sosrelax::conic::{admm_solve, admm_solve_rowsparse, ConicProgram, SelectorSplit, Solution, SolverOptions};
use sosrelax::poly::{monomials_of_degree, monomials_up_to, Polynomial};

use crate::args::{Mode, SolverKind};
use crate::error::CliError;
use crate::report::{Sizing, Verification};

pub fn compile_poly(p: &Polynomial, mode: Mode, cone: GramCone, solver: SolverKind) -> Result<CompiledProgram, CliError> {
    let chordal = solver == SolverKind::Chordal;
    Ok(match mode {
        Mode::Bound if chordal => compile_sparse_pop(p, cone)?,
        Mode::Bound => compile_pop(p, &ConeSpec::dense(cone))?,
        Mode::Feasibility if chordal => compile_feasibility(p, &ConeSpec { tag: cone, clique_bases: Some(sparse_bases(p)?) })?,
        Mode::Feasibility => compile_feasibility(p, &ConeSpec::dense(cone))?,
        Mode::Sphere if chordal => return Err(CliError::Input("the chordal solver has no sphere mode".into())),
        Mode::Sphere => compile_form_bound(p, cone)?,
    })
}

fn program_density(p: &ConicProgram) -> f64 {
    p.a.nnz() as f64 / (p.num_rows().max(1) * p.num_vars.max(1)) as f64
}

pub fn poly_sizing(p: &Polynomial, mode: Mode, compiled: &CompiledProgram) -> Sizing {
    let d = p.degree() / 2;
    let basis = match mode {
        Mode::Sphere => monomials_of_degree(p.n(), d),
        _ => monomials_up_to(p.n(), d),
    };
    let density = matching_system(p, &basis).map(|ms| matching_density(&ms)).unwrap_or_else(|_| program_density(&compiled.program));
    let (gram_side, matching_rows) = compiled.size_summary();
    Sizing {
        n: Some(p.n()),
        degree: Some(p.degree()),
        gram_side,
        matching_rows,
        num_vars: compiled.program.num_vars,
        num_rows: compiled.program.num_rows(),
        nnz: compiled.program.a.nnz(),
        density,
    }
}

pub fn program_sizing(p: &ConicProgram) -> Sizing {
    let gram_side = p
        .cones
        .iter()
        .map(|c| match c {
            sosrelax::conic::Cone::Psd(side) => *side,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    Sizing {
        n: None,
        degree: None,
        gram_side,
        matching_rows: p.num_rows(),
        num_vars: p.num_vars,
        num_rows: p.num_rows(),
        nnz: p.a.nnz(),
        density: program_density(p),
    }
}

/// Runs the chosen solver. For the chordal path the PSD block is split over
/// the cliques of the aggregate sparsity graph and the point is lifted back.
pub fn solve_program(p: &ConicProgram, kind: SolverKind, opts: &SolverOptions, decompose: bool) -> Result<Solution, CliError> {
    match kind {
        SolverKind::Rowsparse => Ok(admm_solve_rowsparse(p, &SelectorSplit::new(p), opts)?),
        SolverKind::Chordal if decompose => {
            let tree = chordal_extend(&aggregate_graph(p)?);
            let d = decompose_psd(p, &tree)?;
            let mut sol = admm_solve(&d.program, opts)?;
            sol.x = d.lift(&sol.x);
            sol.diagnostics.push(format!("{} cliques, {} consensus rows", tree.cliques.len(), d.num_consensus_rows));
            Ok(sol)
        }
        _ => Ok(admm_solve(p, opts)?),
    }
}

pub fn verify(compiled: &CompiledProgram, x: &[f64], tol: f64) -> Result<(Verification, f64), CliError> {
    let t = Instant::now();
    let r = verify_certificate(&compiled.certified_polynomial(x), &compiled.certificate(x), tol)?;
    Ok((
        Verification { max_mismatch: r.max_mismatch, min_eigenvalues: r.min_eigenvalues, certified: r.certified },
        t.elapsed().as_secs_f64(),
    ))
}
