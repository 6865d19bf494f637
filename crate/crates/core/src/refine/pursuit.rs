use std::time::Instant;

use log::{info, warn};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::problem::BoundProblem;
use super::trace::{RefinementTrace, TerminalStatus, TraceStep};
use super::RefineError;
use crate::compile::{compile_bound, CompiledProgram, GramBasis, GramCone};
use crate::conic::{admm_solve_from, Solution, SolverOptions, Status, WarmStart};
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BasisPursuitOptions {
    pub cone: GramCone,
    pub max_iters: usize,
    pub time_budget_s: f64,
    pub improvement_floor: f64,
    pub patience: usize,
    /// Diagonal shift before factorizing, relative to `trace(Q) / N`.
    pub shift: f64,
    /// Allowed coefficient gap when re-expanding the transformed basis.
    pub expansion_tol: f64,
    pub solver: SolverOptions,
}

impl Default for BasisPursuitOptions {
    fn default() -> Self {
        Self {
            cone: GramCone::Dsos,
            max_iters: 20,
            time_budget_s: 600.0,
            improvement_floor: 1e-4,
            patience: 3,
            shift: 1e-9,
            expansion_tol: 1e-6,
            solver: SolverOptions { tol: 1e-7, max_iters: 300_000, ..Default::default() },
        }
    }
}

/// Upper factor `R` with `R^T R = Q + eps I`.
pub fn shifted_factor(q: &DMatrix<f64>, shift: f64) -> Option<DMatrix<f64>> {
    let n = q.nrows();
    let eps = shift * q.trace().abs().max(f64::MIN_POSITIVE) / n.max(1) as f64;
    let shifted = q + DMatrix::identity(n, n) * eps;
    shifted.cholesky().map(|c| c.l().transpose())
}

pub fn condition_number(t: &DMatrix<f64>) -> f64 {
    let sv = t.singular_values();
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo > 0.0 { hi / lo } else { f64::INFINITY }
}

/// Largest coefficient gap between `sum_k b_k^2` expanded term by term and
/// `z^T (T^T T) z`, relative to the largest coefficient.
pub fn expansion_gap(basis: &GramBasis, n: usize) -> Result<f64, RefineError> {
    let mut direct = Polynomial::zero(n);
    for b in basis.polynomials(n) {
        direct = direct.add(&b.mul(&b)?)?;
    }
    let t = basis.transform();
    let m = t.transpose() * &t;
    let mons = basis.monomials().entries();
    let mut via_matrix = Polynomial::zero(n);
    for a in 0..mons.len() {
        for b in 0..mons.len() {
            via_matrix.add_term(mons[a].product(&mons[b]), m[(a, b)]);
        }
    }
    let scale = via_matrix.terms().fold(1.0f64, |s, (_, c)| s.max(c.abs()));
    Ok(direct.max_coefficient_gap(&via_matrix)? / scale)
}

fn compile_with(problem: &BoundProblem, t: &DMatrix<f64>, cone: GramCone) -> Result<CompiledProgram, RefineError> {
    let basis = GramBasis::Transformed { monomials: problem.basis.clone(), transform: t.clone() };
    Ok(compile_bound(&problem.target, Some(&problem.weight), vec![basis], cone)?)
}

/// Iteratively changes the basis to `chol(Q) z` so the previous Gram matrix
/// becomes the identity, which every inner cone contains.
pub fn basis_pursuit(problem: &BoundProblem, opts: &BasisPursuitOptions) -> Result<RefinementTrace, RefineError> {
    let n = problem.target.n();
    let side = problem.basis.len();
    let start = Instant::now();
    let mut t = DMatrix::<f64>::identity(side, side);
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut warm: Option<WarmStart> = None;
    let mut change = "monomial basis".to_string();
    let mut best = f64::NEG_INFINITY;
    let mut flat = 0;

    let status = loop {
        let t0 = Instant::now();
        let compiled = compile_with(problem, &t, opts.cone)?;
        let mut sol: Solution = admm_solve_from(&compiled.program, &opts.solver, warm.as_ref())?;
        if sol.status != Status::Solved && warm.is_some() {
            warn!("warm-started solve ended {:?}; retrying cold", sol.status);
            sol = admm_solve_from(&compiled.program, &opts.solver, None)?;
        }
        let bound = compiled.gamma_value(&sol.x).unwrap_or(f64::NAN);
        steps.push(TraceStep {
            bound,
            change: change.clone(),
            solver_status: sol.status,
            solver_iterations: sol.iterations,
            residual: sol.residuals.max(),
            time_s: t0.elapsed().as_secs_f64(),
            min_reduced_cost: None,
            condition_number: Some(condition_number(&t)),
        });
        info!("basis pursuit step {}: bound {bound:.8}", steps.len() - 1);
        if sol.status != Status::Solved {
            break TerminalStatus::SolverFailure;
        }
        if bound - best < opts.improvement_floor && steps.len() > 1 {
            flat += 1;
        } else {
            flat = 0;
        }
        best = best.max(bound);
        if flat >= opts.patience {
            break TerminalStatus::Stalled;
        }
        if steps.len() > opts.max_iters {
            break TerminalStatus::MaxIterations;
        }
        if start.elapsed().as_secs_f64() > opts.time_budget_s {
            break TerminalStatus::TimeBudget;
        }
        let q = &compiled.gram_matrices(&sol.x)[0];
        let Some(r) = shifted_factor(q, opts.shift) else {
            warn!("shifted Gram matrix is not positive definite");
            break TerminalStatus::CholeskyFailure;
        };
        t = r * &t;
        let next = GramBasis::Transformed { monomials: problem.basis.clone(), transform: t.clone() };
        let gap = expansion_gap(&next, n)?;
        if gap > opts.expansion_tol {
            warn!("transformed basis expansion gap {gap:.3e}");
            break TerminalStatus::ExpansionMismatch;
        }
        let recompiled = compile_with(problem, &t, opts.cone)?;
        let z = recompiled.identity_point(bound);
        warm = Some(WarmStart { u: vec![0.0; z.len()], z, rho: sol.rho });
        change = format!("basis transform refactored (expansion gap {gap:.1e})");
    };
    Ok(RefinementTrace { method: format!("basis-pursuit-{}", opts.cone), steps, status, rays: None })
}
