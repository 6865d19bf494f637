use std::collections::HashSet;
use std::time::Instant;

use log::info;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::atlas::{canonical, dd_extreme_rays, RayAtlas};
use super::problem::BoundProblem;
use super::trace::{RefinementTrace, TerminalStatus, TraceStep};
use super::RefineError;
use crate::compile::{matching_system, MatchingSystem};
use crate::conic::{admm_solve_from, Cone, ConicProgram, Solution, SolverOptions, SparseMatrix, Status, WarmStart};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnGenOptions {
    /// Sparsity of the starting ray set.
    pub initial_k: usize,
    /// Sparsity of the pricing pool.
    pub pricing_k: usize,
    pub pricing_tol: f64,
    pub rays_per_iter: usize,
    pub max_iters: usize,
    pub time_budget_s: f64,
    /// Stop after `patience` consecutive solves improving by less than this.
    pub improvement_floor: f64,
    pub patience: usize,
    pub solver: SolverOptions,
}

impl Default for ColumnGenOptions {
    fn default() -> Self {
        Self {
            initial_k: 2,
            pricing_k: 3,
            pricing_tol: 1e-6,
            rays_per_iter: 1,
            max_iters: 20,
            time_budget_s: 600.0,
            improvement_floor: 1e-4,
            patience: 3,
            solver: SolverOptions { tol: 1e-7, max_iters: 300_000, ..Default::default() },
        }
    }
}

/// The ray-form program for a fixed set of rays.
pub struct RayProgram {
    pub program: ConicProgram,
    pair_row: Vec<Vec<usize>>,
    n: usize,
}

impl RayProgram {
    /// Variables: `gamma` (free) then one nonnegative weight per ray.
    pub fn new(problem: &BoundProblem, atlas: &RayAtlas) -> Result<Self, RefineError> {
        let ms = matching_system(&problem.target, &problem.basis)?;
        let n = problem.basis.len();
        if atlas.n != n {
            return Err(RefineError::DimensionMismatch { expected: n, found: atlas.n });
        }
        let pair_row = pair_rows(&ms);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ms.num_rows()];
        for (alpha, h) in problem.weight.terms() {
            let r = ms
                .rows
                .iter()
                .position(|row| row.alpha == *alpha)
                .ok_or_else(|| RefineError::Invalid(format!("weight monomial {alpha} is not matched")))?;
            rows[r].push((0, h));
        }
        for (k, ray) in atlas.rays.iter().enumerate() {
            for (r, c) in ray_column(ray, &pair_row) {
                rows[r].push((k + 1, c));
            }
        }
        let num_vars = atlas.len() + 1;
        let mut objective = vec![0.0; num_vars];
        objective[0] = -1.0;
        let a = SparseMatrix::from_rows(num_vars, rows)?;
        let program = ConicProgram::new(objective, a, ms.rhs.clone(), vec![Cone::Free(1), Cone::NonNeg(atlas.len())])?;
        Ok(Self { program, pair_row, n })
    }

    /// `X = -sum_alpha y_alpha A_alpha`; the reduced cost of a ray `v` is `v^T X v`.
    pub fn dual_matrix(&self, y: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| -y[self.pair_row[i.min(j)][i.max(j)]])
    }
}

/// Row of each monomial product `z_i z_j`, `i <= j`.
fn pair_rows(ms: &MatchingSystem) -> Vec<Vec<usize>> {
    let n = ms.basis.len();
    let mut out = vec![vec![usize::MAX; n]; n];
    for (r, row) in ms.rows.iter().enumerate() {
        for &(i, j, _) in &row.entries {
            out[i][j] = r;
        }
    }
    out
}

/// Coefficients of `(v^T z)^2` on the matching rows.
fn ray_column(ray: &[i8], pair_row: &[Vec<usize>]) -> Vec<(usize, f64)> {
    let support: Vec<usize> = (0..ray.len()).filter(|&i| ray[i] != 0).collect();
    let mut col = Vec::new();
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a..] {
            let w = if i == j { 1.0 } else { 2.0 };
            col.push((pair_row[i][j], w * (ray[i] * ray[j]) as f64));
        }
    }
    col
}

/// Most negative `v^T X v` over all sign-canonical rays with at most
/// `pool_k` nonzeros that are not in `atlas`, best first.
pub fn price(x: &DMatrix<f64>, atlas: &RayAtlas, pool_k: usize, count: usize) -> Vec<(Vec<i8>, f64)> {
    let n = x.nrows();
    let known: HashSet<&Vec<i8>> = atlas.rays.iter().collect();
    let pool = dd_extreme_rays(n, pool_k.min(n)).expect("valid pool size");
    let mut scored: Vec<(Vec<i8>, f64)> = pool
        .rays
        .into_iter()
        .filter(|r| !known.contains(r))
        .map(|r| {
            let support: Vec<usize> = (0..n).filter(|&i| r[i] != 0).collect();
            let mut v = 0.0;
            for &i in &support {
                for &j in &support {
                    v += (r[i] * r[j]) as f64 * x[(i, j)];
                }
            }
            (r, v)
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1));
    scored.truncate(count);
    scored
}

fn extend_warm(w: &WarmStart, added: usize) -> WarmStart {
    let mut z = w.z.clone();
    let mut u = w.u.clone();
    z.extend(std::iter::repeat_n(0.0, added));
    u.extend(std::iter::repeat_n(0.0, added));
    WarmStart { z, u, rho: w.rho }
}

/// Tightens the diagonally dominant bound by adding dd-style rays chosen from
/// the dual of each solve.
pub fn column_generation(problem: &BoundProblem, opts: &ColumnGenOptions) -> Result<RefinementTrace, RefineError> {
    if opts.initial_k < 2 {
        return Err(RefineError::Invalid("initial ray sparsity must be at least 2".into()));
    }
    let n = problem.basis.len();
    let mut atlas = dd_extreme_rays(n, opts.initial_k.min(n).max(1))?;
    let start = Instant::now();
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut warm: Option<WarmStart> = None;
    let mut change = format!("initial {} rays (k = {})", atlas.len(), atlas.k);
    let mut best = f64::NEG_INFINITY;
    let mut flat = 0;

    let status = loop {
        let t0 = Instant::now();
        let lp = RayProgram::new(problem, &atlas)?;
        let sol: Solution = admm_solve_from(&lp.program, &opts.solver, warm.as_ref())?;
        let bound = sol.x[0];
        let x = lp.dual_matrix(&sol.y);
        let candidates = price(&x, &atlas, opts.pricing_k, opts.rays_per_iter);
        let min_rc = candidates.first().map(|c| c.1);
        steps.push(TraceStep {
            bound,
            change: change.clone(),
            solver_status: sol.status,
            solver_iterations: sol.iterations,
            residual: sol.residuals.max(),
            time_s: t0.elapsed().as_secs_f64(),
            min_reduced_cost: min_rc,
            condition_number: None,
        });
        info!("column generation step {}: bound {bound:.8}, min reduced cost {min_rc:?}", steps.len() - 1);
        if sol.status != Status::Solved {
            break TerminalStatus::SolverFailure;
        }
        if bound - best < opts.improvement_floor && steps.len() > 1 {
            flat += 1;
        } else {
            flat = 0;
        }
        best = best.max(bound);
        let improving: Vec<&(Vec<i8>, f64)> = candidates.iter().filter(|c| c.1 < -opts.pricing_tol).collect();
        if improving.is_empty() {
            break TerminalStatus::NoImprovingRay;
        }
        if flat >= opts.patience {
            break TerminalStatus::Stalled;
        }
        if steps.len() > opts.max_iters {
            break TerminalStatus::MaxIterations;
        }
        if start.elapsed().as_secs_f64() > opts.time_budget_s {
            break TerminalStatus::TimeBudget;
        }
        let mut added = 0;
        let mut names = Vec::new();
        for (ray, rc) in improving {
            if atlas.push(ray) {
                added += 1;
                names.push(format!("{:?} (reduced cost {rc:.3e})", canonical(ray)));
            }
        }
        change = format!("added ray {}", names.join(", "));
        warm = Some(extend_warm(&sol.warm, added));
    };
    Ok(RefinementTrace { method: "column-generation".into(), steps, status, rays: Some(atlas.rays) })
}
