use std::time::Instant;

use log::debug;
use serde::{Deserialize, Serialize};

use super::admm::{project_product, stall_note, RhoSchedule, Solution, SolverOptions, Status, WarmStart};
use super::program::ConicProgram;
use super::residuals::{compute_residuals, dot, Residuals};
use super::ConicError;

/// Entry selectors of the constraint rows: row `i` only sees the columns in
/// `selected[i]`, and gets its own local copy of those entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectorSplit {
    pub selected: Vec<Vec<usize>>,
    /// Number of rows selecting each column.
    pub multiplicity: Vec<usize>,
}

impl SelectorSplit {
    pub fn new(p: &ConicProgram) -> Self {
        let mut multiplicity = vec![0; p.num_vars];
        let selected: Vec<Vec<usize>> = p
            .a
            .rows()
            .map(|(cols, _)| {
                cols.iter().for_each(|&c| multiplicity[c] += 1);
                cols.to_vec()
            })
            .collect();
        Self { selected, multiplicity }
    }

    /// Total size of the local copies.
    pub fn local_dim(&self) -> usize {
        self.selected.iter().map(Vec::len).sum()
    }

    /// The selectors must be exactly the row patterns of `p`.
    pub fn check(&self, p: &ConicProgram) -> Result<(), ConicError> {
        if self.selected.len() != p.num_rows() || self.multiplicity.len() != p.num_vars {
            return Err(ConicError::Invalid("selector split has the wrong shape".into()));
        }
        for (i, (cols, _)) in p.a.rows().enumerate() {
            if self.selected[i] != cols {
                return Err(ConicError::Invalid(format!("selector of row {i} differs from its sparsity pattern")));
            }
        }
        let mut count = vec![0; p.num_vars];
        self.selected.iter().flatten().for_each(|&c| count[c] += 1);
        if count != self.multiplicity {
            return Err(ConicError::Invalid("selector multiplicities are inconsistent".into()));
        }
        Ok(())
    }
}

/// Factorization-free ADMM.
///
/// Each row keeps a local copy `z_i` of the entries it touches and projects
/// it onto its own hyperplane; the global point is the average of the cone
/// copy and the local copies. Nothing is ever factored.
pub fn admm_solve_rowsparse(
    p: &ConicProgram,
    split: &SelectorSplit,
    opts: &SolverOptions,
) -> Result<Solution, ConicError> {
    admm_solve_rowsparse_from(p, split, opts, None)
}

pub fn admm_solve_rowsparse_from(
    p: &ConicProgram,
    split: &SelectorSplit,
    opts: &SolverOptions,
    warm: Option<&WarmStart>,
) -> Result<Solution, ConicError> {
    p.validate()?;
    opts.validate()?;
    split.check(p)?;
    let n = p.num_vars;
    let m = p.num_rows();
    let start = Instant::now();

    // offsets of each row's local copy in the flat storage
    let mut offset = Vec::with_capacity(m + 1);
    offset.push(0);
    for sel in &split.selected {
        offset.push(offset.last().unwrap() + sel.len());
    }
    let coeffs: Vec<&[f64]> = p.a.rows().map(|(_, v)| v).collect();
    let inv_norm2: Vec<f64> = coeffs.iter().map(|a| 1.0 / a.iter().map(|v| v * v).sum::<f64>()).collect();
    let weight: Vec<f64> = split.multiplicity.iter().map(|&d| 1.0 / (1.0 + d as f64)).collect();

    let (mut s, mut us, mut rho) = match warm {
        Some(w) if w.z.len() == n && w.u.len() == n && w.rho > 0.0 => (w.z.clone(), w.u.clone(), w.rho),
        Some(_) => return Err(ConicError::Invalid("warm start does not match the program size".into())),
        None => (vec![0.0; n], vec![0.0; n], opts.rho),
    };
    let local = split.local_dim();
    let mut zl = vec![0.0; local];
    let mut ul = vec![0.0; local];
    for (i, sel) in split.selected.iter().enumerate() {
        for (k, &c) in sel.iter().enumerate() {
            zl[offset[i] + k] = s[c];
        }
    }

    let alpha = opts.over_relax;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; m];
    let mut dual_slack = vec![0.0; n];
    let mut res = Residuals { primal: f64::INFINITY, dual: f64::INFINITY, gap: f64::INFINITY };
    let mut status = Status::MaxIters;
    let mut diagnostics = Vec::new();
    let mut iters = 0;
    let mut schedule = RhoSchedule::new();
    let mut last_gap_s = vec![0.0; n];
    let mut last_gap_l = vec![0.0; local];

    for k in 1..=opts.max_iters {
        iters = k;
        // consensus: average cone copy and local copies
        for j in 0..n {
            x[j] = s[j] - us[j] - p.objective[j] / rho;
        }
        for (i, sel) in split.selected.iter().enumerate() {
            for (kk, &c) in sel.iter().enumerate() {
                let t = offset[i] + kk;
                x[c] += zl[t] - ul[t];
            }
        }
        for j in 0..n {
            x[j] *= weight[j];
        }

        // cone copy
        for j in 0..n {
            let xh = alpha * x[j] + (1.0 - alpha) * s[j];
            last_gap_s[j] = xh;
            s[j] = xh + us[j];
        }
        project_product(&mut s, p);
        for j in 0..n {
            let xh = last_gap_s[j];
            us[j] += xh - s[j];
            last_gap_s[j] = xh - s[j];
        }

        // local copies, one hyperplane each
        for (i, sel) in split.selected.iter().enumerate() {
            let range = offset[i]..offset[i + 1];
            let a = coeffs[i];
            let mut lhs = 0.0;
            for (kk, &c) in sel.iter().enumerate() {
                let t = range.start + kk;
                let xh = alpha * x[c] + (1.0 - alpha) * zl[t];
                last_gap_l[t] = xh;
                zl[t] = xh + ul[t];
                lhs += a[kk] * zl[t];
            }
            let mu = (lhs - p.b[i]) * inv_norm2[i];
            for (kk, t) in range.enumerate() {
                zl[t] -= mu * a[kk];
                let xh = last_gap_l[t];
                ul[t] += xh - zl[t];
                last_gap_l[t] = xh - zl[t];
            }
        }

        let last = k == opts.max_iters;
        if k % opts.check_every != 0 && !last {
            continue;
        }
        if !s.iter().chain(&us).chain(&ul).all(|v| v.is_finite()) {
            status = Status::NumericalTrouble;
            diagnostics.push(format!("non-finite iterate at iteration {k}"));
            break;
        }
        // y_i from the multiplier of row i's hyperplane
        for (i, yi) in y.iter_mut().enumerate() {
            let range = offset[i]..offset[i + 1];
            *yi = -rho * dot(coeffs[i], &ul[range]) * inv_norm2[i];
        }
        for (d, u) in dual_slack.iter_mut().zip(&us) {
            *d = -rho * u;
        }
        res = compute_residuals(p, &s, &y);
        if res.max() <= opts.tol {
            status = Status::Solved;
            break;
        }
        if opts.adapt {
            if let Some(new_rho) = schedule.propose(k, res.primal, res.dual, rho) {
                let f = rho / new_rho;
                us.iter_mut().chain(ul.iter_mut()).for_each(|v| *v *= f);
                rho = new_rho;
            }
        }
        if let Some(limit) = opts.time_limit_s {
            if start.elapsed().as_secs_f64() > limit {
                diagnostics.push(format!("time limit of {limit} s reached"));
                break;
            }
        }
    }
    debug!("rowsparse admm: {status:?} after {iters} iterations, residuals {res:?}, rho {rho}");

    let mut infeasibility = None;
    if status == Status::MaxIters {
        // the drift of the local multipliers plays the role of A^T w
        let mut w = vec![0.0; m];
        for (i, wi) in w.iter_mut().enumerate() {
            let range = offset[i]..offset[i + 1];
            *wi = -dot(coeffs[i], &last_gap_l[range]) * inv_norm2[i];
        }
        let bw = dot(&p.b, &w);
        let candidate = (bw > 0.0 && bw.is_finite()).then(|| w.iter().map(|v| v / bw).collect());
        diagnostics.push(stall_note(p, candidate, &mut infeasibility));
    }
    Ok(Solution {
        objective: dot(&p.objective, &s),
        dual_objective: dot(&p.b, &y),
        x: s.clone(),
        y,
        s: dual_slack,
        status,
        residuals: res,
        iterations: iters,
        rho,
        diagnostics,
        infeasibility,
        warm: WarmStart { z: s, u: us, rho },
    })
}
