use std::time::Instant;

use log::debug;
use serde::{Deserialize, Serialize};

use super::cones::{product_distance, project_in_place};
use super::factor::NormalFactor;
use super::program::ConicProgram;
use super::residuals::{compute_residuals, dot, dual_cones, norm, Residuals};
use super::ConicError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub rho: f64,
    /// Residual balancing of `rho`.
    pub adapt: bool,
    pub over_relax: f64,
    /// Residuals are evaluated every this many iterations.
    pub check_every: usize,
    pub time_limit_s: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iters: 2000, rho: 1.0, adapt: true, over_relax: 1.5, check_every: 10, time_limit_s: None }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), ConicError> {
        let bad = |what: &str| Err(ConicError::Invalid(format!("solver option {what} out of range")));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol");
        }
        if self.max_iters == 0 {
            return bad("max_iters");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho");
        }
        if !(self.over_relax > 0.0 && self.over_relax < 2.0) {
            return bad("over_relax");
        }
        if self.check_every == 0 {
            return bad("check_every");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Solved,
    MaxIters,
    NumericalTrouble,
}

/// Iterate state that can seed another solve of a program with the same
/// variable layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Primal point, inside the cone.
    pub x: Vec<f64>,
    /// Multipliers of the equality rows.
    pub y: Vec<f64>,
    /// Dual slack, inside the dual cone.
    pub s: Vec<f64>,
    pub status: Status,
    pub objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub rho: f64,
    pub diagnostics: Vec<String>,
    /// Candidate `w` with `b^T w = 1` and `-A^T w` near the dual cone, filled
    /// in when a solve stalls with a persistent primal residual. Check it with
    /// [`farkas_check`]; it is evidence, not a certificate.
    pub infeasibility: Option<Vec<f64>>,
    pub warm: WarmStart,
}

/// How well `w` separates `b` from `A(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarkasCheck {
    /// `b^T w`; positive for a separating vector.
    pub b_dot_w: f64,
    /// Distance of `-A^T w` from the dual cone relative to `|A^T w|`.
    pub cone_violation: f64,
}

impl FarkasCheck {
    /// True when `w` rules out feasibility up to `tol`.
    pub fn separates(&self, tol: f64) -> bool {
        self.b_dot_w > 0.0 && self.cone_violation <= tol
    }
}

pub fn farkas_check(p: &ConicProgram, w: &[f64]) -> FarkasCheck {
    let mut atw = vec![0.0; p.num_vars];
    p.a.tmul_vec(w, &mut atw);
    let scale = norm(&atw);
    atw.iter_mut().for_each(|v| *v = -*v);
    let dist = product_distance(&atw, &dual_cones(&p.cones));
    FarkasCheck { b_dot_w: dot(&p.b, w), cone_violation: if scale > 0.0 { dist / scale } else { f64::INFINITY } }
}

pub(crate) fn project_product(v: &mut [f64], p: &ConicProgram) {
    let mut off = 0;
    for c in &p.cones {
        let d = c.dim();
        project_in_place(&mut v[off..off + d], c);
        off += d;
    }
}

const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;

/// Residual balancing with a growing gap between changes, so that `rho`
/// eventually settles and the fixed-penalty convergence argument applies.
pub(crate) struct RhoSchedule {
    next_allowed: usize,
    interval: usize,
}

impl RhoSchedule {
    pub(crate) fn new() -> Self {
        Self { next_allowed: 0, interval: 50 }
    }

    pub(crate) fn propose(&mut self, iter: usize, primal: f64, dual: f64, rho: f64) -> Option<f64> {
        if iter < self.next_allowed {
            return None;
        }
        let new_rho = if primal > 10.0 * dual {
            (rho * 2.0).min(RHO_MAX)
        } else if dual > 10.0 * primal {
            (rho / 2.0).max(RHO_MIN)
        } else {
            rho
        };
        if new_rho == rho {
            return None;
        }
        self.next_allowed = iter + self.interval;
        self.interval = self.interval * 3 / 2;
        Some(new_rho)
    }
}

/// Dense-factorization ADMM from a cold start.
pub fn admm_solve(p: &ConicProgram, opts: &SolverOptions) -> Result<Solution, ConicError> {
    admm_solve_from(p, opts, None)
}

/// Dense-factorization ADMM, optionally warm-started.
///
/// Splits `x` (affine set) from `z` (cone). The affine step reuses one
/// factorization of `A A^T` for every iteration.
pub fn admm_solve_from(p: &ConicProgram, opts: &SolverOptions, warm: Option<&WarmStart>) -> Result<Solution, ConicError> {
    p.validate()?;
    opts.validate()?;
    let n = p.num_vars;
    let m = p.num_rows();
    let factor = NormalFactor::new(&p.a)?;
    let start = Instant::now();

    let (mut z, mut u, mut rho) = match warm {
        Some(w) if w.z.len() == n && w.u.len() == n && w.rho > 0.0 => (w.z.clone(), w.u.clone(), w.rho),
        Some(_) => return Err(ConicError::Invalid("warm start does not match the program size".into())),
        None => (vec![0.0; n], vec![0.0; n], opts.rho),
    };

    let alpha = opts.over_relax;
    let mut xt = vec![0.0; n];
    let mut xh = vec![0.0; n];
    let mut rows = vec![0.0; m];
    let mut y = vec![0.0; m];
    let mut s = vec![0.0; n];
    let mut res = Residuals { primal: f64::INFINITY, dual: f64::INFINITY, gap: f64::INFINITY };
    let mut status = Status::MaxIters;
    let mut diagnostics = Vec::new();
    let mut iters = 0;
    let mut schedule = RhoSchedule::new();

    for k in 1..=opts.max_iters {
        iters = k;
        for i in 0..n {
            xt[i] = z[i] - u[i] - p.objective[i] / rho;
        }
        affine_project(p, &factor, &mut xt, &mut rows);
        for i in 0..n {
            xh[i] = alpha * xt[i] + (1.0 - alpha) * z[i];
            z[i] = xh[i] + u[i];
        }
        project_product(&mut z, p);
        for i in 0..n {
            u[i] += xh[i] - z[i];
        }

        let last = k == opts.max_iters;
        if k % opts.check_every != 0 && !last {
            continue;
        }
        if !z.iter().chain(&u).all(|v| v.is_finite()) {
            status = Status::NumericalTrouble;
            diagnostics.push(format!("non-finite iterate at iteration {k}"));
            break;
        }
        recover_dual(p, &factor, &u, rho, &mut y, &mut s);
        res = compute_residuals(p, &z, &y);
        if res.max() <= opts.tol {
            status = Status::Solved;
            break;
        }
        if opts.adapt {
            if let Some(new_rho) = schedule.propose(k, res.primal, res.dual, rho) {
                let f = rho / new_rho;
                u.iter_mut().for_each(|v| *v *= f);
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
    debug!("admm: {status:?} after {iters} iterations, residuals {res:?}, rho {rho}");

    let mut infeasibility = None;
    if status == Status::MaxIters {
        let delta: Vec<f64> = xh.iter().zip(&z).map(|(a, b)| a - b).collect();
        diagnostics.push(stall_note(p, infeasibility_candidate(p, &factor, &delta), &mut infeasibility));
    }
    Ok(Solution {
        objective: dot(&p.objective, &z),
        dual_objective: dot(&p.b, &y),
        x: z.clone(),
        y,
        s,
        status,
        residuals: res,
        iterations: iters,
        rho,
        diagnostics,
        infeasibility,
        warm: WarmStart { z, u, rho },
    })
}

pub(crate) fn stall_note(p: &ConicProgram, candidate: Option<Vec<f64>>, slot: &mut Option<Vec<f64>>) -> String {
    if let Some(w) = candidate {
        let check = farkas_check(p, &w);
        if check.separates(1e-2) {
            *slot = Some(w);
            return format!(
                "not solved; the iterates drift along a near-separating direction, so the program is likely \
                 infeasible (cone violation {:.2e})",
                check.cone_violation
            );
        }
    }
    "not solved within the iteration limit".into()
}

/// `v <- v - A^T (A A^T)^{-1} (A v - b)`
fn affine_project(p: &ConicProgram, factor: &NormalFactor, v: &mut [f64], rows: &mut [f64]) {
    p.a.mul_vec(v, rows);
    for (r, b) in rows.iter_mut().zip(&p.b) {
        *r -= b;
    }
    factor.solve_in_place(rows);
    for (r, (cols, vals)) in p.a.rows().enumerate() {
        let w = rows[r];
        for (&c, &a) in cols.iter().zip(vals) {
            v[c] -= a * w;
        }
    }
}

/// `s = -rho u`, then `y` from the least-squares fit `A^T y ~ c - s`.
fn recover_dual(p: &ConicProgram, factor: &NormalFactor, u: &[f64], rho: f64, y: &mut [f64], s: &mut [f64]) {
    for (si, ui) in s.iter_mut().zip(u) {
        *si = -rho * ui;
    }
    let diff: Vec<f64> = p.objective.iter().zip(s.iter()).map(|(c, s)| c - s).collect();
    p.a.mul_vec(&diff, y);
    factor.solve_in_place(y);
}

/// Turns the limiting step `x - z` into a normalised Farkas candidate.
fn infeasibility_candidate(p: &ConicProgram, factor: &NormalFactor, delta: &[f64]) -> Option<Vec<f64>> {
    if norm(delta) <= 1e-12 {
        return None;
    }
    let mut w = vec![0.0; p.num_rows()];
    p.a.mul_vec(delta, &mut w);
    factor.solve_in_place(&mut w);
    let bw = dot(&p.b, &w);
    if bw <= 0.0 || !bw.is_finite() {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= bw);
    Some(w)
}
