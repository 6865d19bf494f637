//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sosrelax::chordal::*;
use sosrelax::compile::*;
use sosrelax::conic::*;
use sosrelax::lifts::*;
use sosrelax::poly::*;
use sosrelax::refine::*;

type Outcome = Result<String, String>;

struct Criterion {
    label: &'static str,
    budget: Duration,
    gated: bool,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn matching_densities() -> Outcome {
    let cases = [(4usize, 2u32, 1.42e-2), (6, 2, 4.76e-3), (8, 2, 2.02e-3), (4, 3, 4.76e-3), (6, 3, 1.08e-3)];
    let mut worst: f64 = 0.0;
    for (n, d, target) in cases {
        let p = random_pop_instance(n, d, 0);
        let ms = matching_system(&p, &monomials_up_to(n, d)).map_err(|e| e.to_string())?;
        let rho = matching_density(&ms);
        let r = rel(rho, target);
        worst = worst.max(r);
        ensure(r <= 0.05, || format!("(n={n}, 2d={}) density {rho:.4e} vs {target:.2e}", 2 * d))?;
    }
    Ok(format!("worst relative deviation {worst:.2e}"))
}

fn quartic_pop_sizes() -> Outcome {
    for (n, big_n, m) in [(2usize, 6usize, 14usize), (6, 28, 209), (10, 66, 1000), (14, 120, 3059)] {
        let c = compile_pop(&random_pop_instance(n, 2, 1), &ConeSpec::dense(GramCone::Sos)).map_err(|e| e.to_string())?;
        let got = c.size_summary();
        ensure(got == (big_n, m), || format!("n={n}: {got:?} vs ({big_n}, {m})"))?;
        ensure(binomial(n as u64 + 2, 2) as usize == big_n && binomial(n as u64 + 4, 4) as usize - 1 == m, || {
            format!("n={n}: closed form disagrees")
        })?;
    }
    Ok("4/4 exact".into())
}

enum Bound {
    Value(f64),
    Infeasible,
}

fn pop_bound(p: &Polynomial, cone: GramCone, opts: &SolverOptions) -> Result<Bound, String> {
    let c = compile_pop(p, &ConeSpec::dense(cone)).map_err(|e| e.to_string())?;
    let sol = admm_solve(&c.program, opts).map_err(|e| e.to_string())?;
    if sol.status == Status::Solved {
        return Ok(Bound::Value(c.gamma_value(&sol.x).unwrap()));
    }
    match &sol.infeasibility {
        Some(w) if farkas_check(&c.program, w).separates(1e-6) => Ok(Bound::Infeasible),
        _ => Err(format!("{cone}: {:?} after {} iterations without separating evidence", sol.status, sol.iterations)),
    }
}

fn sampled_min(p: &Polynomial, rng: &mut impl Rng, count: usize) -> f64 {
    let n = p.n();
    let mut best = f64::INFINITY;
    let mut x = vec![0.0; n];
    for _ in 0..count {
        for v in x.iter_mut() {
            *v = rng.random_range(-2.5..2.5);
        }
        best = best.min(p.eval(&x).unwrap());
    }
    best
}

fn bound_chain() -> Outcome {
    let dsos_opts = SolverOptions { tol: 1e-6, max_iters: 20_000, ..Default::default() };
    let opts = SolverOptions { tol: 1e-6, max_iters: 1_000_000, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut dsos_solved, mut dsos_infeasible, mut sdsos_infeasible) = (0, 0, 0);
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let p = random_pop_instance(n, 2, 1000 + seed);
        let floor = sampled_min(&p, &mut rng, 100_000);
        let sos = match pop_bound(&p, GramCone::Sos, &opts)? {
            Bound::Value(v) => v,
            Bound::Infeasible => return Err(format!("seed {seed}: SOS reported infeasible")),
        };
        ensure(sos <= floor + 1e-3, || format!("seed {seed}: sos {sos} above sampled min {floor}"))?;
        let sdsos = match pop_bound(&p, GramCone::Sdsos, &opts)? {
            Bound::Value(v) => {
                ensure(v <= sos + 1e-3, || format!("seed {seed}: sdsos {v} > sos {sos}"))?;
                Some(v)
            }
            Bound::Infeasible => {
                sdsos_infeasible += 1;
                None
            }
        };
        match pop_bound(&p, GramCone::Dsos, &dsos_opts)? {
            Bound::Value(v) => {
                dsos_solved += 1;
                let cap = sdsos.unwrap_or(f64::NEG_INFINITY);
                ensure(v <= cap + 1e-3, || format!("seed {seed}: dsos {v} > sdsos {cap}"))?;
            }
            Bound::Infeasible => dsos_infeasible += 1,
        }
    }
    Ok(format!(
        "50 instances; dsos solved {dsos_solved}, infeasible {dsos_infeasible}; sdsos infeasible {sdsos_infeasible}"
    ))
}

fn dense_vs_rowsparse() -> Outcome {
    let reference = SolverOptions { tol: 1e-6, max_iters: 400_000, ..Default::default() };
    let relaxed = SolverOptions { tol: 1e-5, ..reference.clone() };
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let n = 2 + (seed % 5) as usize;
        let p = random_pop_instance(n, 2, 2000 + seed);
        let c = compile_pop(&p, &ConeSpec::dense(GramCone::Sos)).map_err(|e| e.to_string())?;
        let dense = admm_solve(&c.program, &reference).map_err(|e| e.to_string())?;
        let split = SelectorSplit::new(&c.program);
        let sparse = admm_solve_rowsparse(&c.program, &split, &relaxed).map_err(|e| e.to_string())?;
        ensure(dense.status == Status::Solved && sparse.status == Status::Solved, || {
            format!("seed {seed} n={n}: {:?} / {:?}", dense.status, sparse.status)
        })?;
        let r = rel(dense.objective, sparse.objective);
        worst = worst.max(r);
        ensure(r <= 1e-3, || format!("seed {seed} n={n}: {} vs {}", dense.objective, sparse.objective))?;
    }
    Ok(format!("20 instances, worst relative gap {worst:.2e}"))
}

fn chordal_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let opts = SolverOptions { tol: 1e-7, max_iters: 200_000, ..Default::default() };
    let mut worst: f64 = 0.0;
    for case in 0..30 {
        let n = rng.random_range(4..=15);
        let w = rng.random_range(1..=3);
        let p = random_band_sdp(&mut rng, n, w, n / 2);
        let full = admm_solve(&p, &opts).map_err(|e| e.to_string())?;
        let t = chordal_extend(&aggregate_graph(&p).map_err(|e| e.to_string())?);
        let d = decompose_psd(&p, &t).map_err(|e| e.to_string())?;
        let split = admm_solve(&d.program, &opts).map_err(|e| e.to_string())?;
        ensure(full.status == Status::Solved && split.status == Status::Solved, || {
            format!("case {case}: {:?} / {:?}", full.status, split.status)
        })?;
        let r = (full.objective - split.objective).abs() / (1.0 + full.objective.abs());
        worst = worst.max(r);
        ensure(r <= 1e-3, || format!("case {case} n={n}: {} vs {}", full.objective, split.objective))?;
    }
    let oracle_opts = SolverOptions { tol: 1e-6, max_iters: 20_000, ..Default::default() };
    let (mut checked, mut skipped, mut completable_count) = (0, 0, 0);
    while checked < 100 {
        let n = rng.random_range(2..=6);
        let g = random_graph(&mut rng, n, 0.5);
        let t = chordal_extend_with(&g, &ExtendOptions { merge: false, ..Default::default() });
        let (x, margin) = random_partial(&mut rng, &t);
        if margin.abs() < 0.05 {
            skipped += 1;
            continue;
        }
        let entries: Vec<((usize, usize), f64)> = x.entries().iter().map(|(&k, &v)| (k, v)).collect();
        let sol = admm_solve(&completion_program(n, &entries), &oracle_opts).map_err(|e| e.to_string())?;
        let oracle = sol.status == Status::Solved;
        let grone = completable(&x, &t, 1e-4).map_err(|e| e.to_string())?;
        ensure(grone == oracle, || format!("pattern {checked} n={n}: grone {grone}, oracle {oracle}"))?;
        completable_count += grone as usize;
        checked += 1;
    }
    Ok(format!(
        "30 band SDPs (worst {worst:.1e}); 100 patterns agree ({completable_count} completable, {skipped} near-boundary draws skipped)"
    ))
}

fn solve_sos(problem: &BoundProblem) -> Result<f64, String> {
    let c = problem.compile(GramCone::Sos).map_err(|e| e.to_string())?;
    let sol = admm_solve(&c.program, &SolverOptions { tol: 1e-8, max_iters: 300_000, ..Default::default() })
        .map_err(|e| e.to_string())?;
    ensure(sol.status == Status::Solved, || format!("sos reference {:?}", sol.status))?;
    Ok(c.gamma_value(&sol.x).unwrap())
}

fn check_trace(trace: &RefinementTrace, sos: f64, what: &str) -> Result<(), String> {
    ensure(!trace.steps.is_empty(), || format!("{what}: empty trace"))?;
    ensure(trace.worst_decrease() <= 1e-6, || format!("{what}: decreases by {:.2e}: {:?}", trace.worst_decrease(), trace.bounds()))?;
    let top = trace.bounds().into_iter().fold(f64::NEG_INFINITY, f64::max);
    ensure(top <= sos + 1e-3, || format!("{what}: bound {top} above sos {sos}"))
}

fn refinement() -> Outcome {
    let cg_opts = ColumnGenOptions { max_iters: 2000, patience: usize::MAX, rays_per_iter: 5, ..Default::default() };
    let mut cg_steps = 0;
    for seed in 0..20u64 {
        let n = 3 + (seed % 2) as usize;
        let problem = BoundProblem::form_on_sphere(&random_form(n, 4, 500 + seed)).map_err(|e| e.to_string())?;
        let sos = solve_sos(&problem)?;
        let trace = column_generation(&problem, &cg_opts).map_err(|e| e.to_string())?;
        let what = format!("colgen seed {seed}");
        check_trace(&trace, sos, &what)?;
        ensure(trace.status == TerminalStatus::NoImprovingRay, || format!("{what}: ended {:?}", trace.status))?;
        let last = trace.steps.last().unwrap().min_reduced_cost.unwrap_or(f64::NEG_INFINITY);
        ensure(last >= -1e-6, || format!("{what}: last reduced cost {last}"))?;
        cg_steps += trace.steps.len();
    }
    let mut failures = 0;
    for seed in 0..20u64 {
        let n = 3 + (seed % 2) as usize;
        let cone = if seed % 4 < 2 { GramCone::Dsos } else { GramCone::Sdsos };
        let problem = BoundProblem::form_on_sphere(&random_form(n, 4, 700 + seed)).map_err(|e| e.to_string())?;
        let sos = solve_sos(&problem)?;
        let trace = basis_pursuit(&problem, &BasisPursuitOptions { cone, ..Default::default() }).map_err(|e| e.to_string())?;
        check_trace(&trace, sos, &format!("pursuit {cone} seed {seed}"))?;
        failures += (trace.status == TerminalStatus::SolverFailure) as usize;
    }
    Ok(format!("20 colgen traces ({cg_steps} solves), 20 pursuit traces ({failures} ended on solver failure)"))
}

fn random_dd(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            if rng.random_bool(0.6) {
                let v = rng.random_range(-2.0..2.0);
                q[(i, j)] = v;
                q[(j, i)] = v;
            }
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| q[(i, j)].abs()).sum();
        q[(i, i)] = off + if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1.0) };
    }
    q
}

fn dd_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = rng.random_range(1..=10);
        let atlas = dd_extreme_rays(n, n.min(2)).map_err(|e| e.to_string())?;
        let q = random_dd(&mut rng, n);
        let alpha = reconstruct_dd(&q, &atlas).map_err(|e| format!("case {case}: {e}"))?;
        ensure(alpha.iter().all(|&a| a >= 0.0), || format!("case {case}: negative weight"))?;
        let err = (atlas.combine(&alpha) - &q).abs().max();
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("case {case} n={n}: error {err:.2e}"))?;
    }
    for n in 2..=8 {
        let len = dd_extreme_rays(n, 2).map_err(|e| e.to_string())?.len();
        ensure(len == n * n, || format!("n={n}: {len} rays"))?;
    }
    Ok(format!("200 round trips (worst {worst:.1e}); atlas sizes n^2 for n=2..8"))
}

fn slack_matrices() -> Outcome {
    for k in 2..=12 {
        let s = slack_matrix(k).map_err(|e| e.to_string())?;
        let duals: Vec<[f64; 5]> = (1..=k).map(|j| dual_point(j as f64)).collect();
        let paired = slack_from_cone_points(&pair_square_points(k), &duals, 0.0).map_err(|e| e.to_string())?;
        ensure(paired == s.to_matrix(), || format!("k={k}: constructions differ"))?;
        for (&(i1, i2), row) in s.rows.iter().zip(&s.entries) {
            for (c, &v) in row.iter().enumerate() {
                ensure((v == 0) == (c + 1 == i1 || c + 1 == i2), || format!("k={k} row ({i1},{i2}) col {}", c + 1))?;
            }
        }
    }
    Ok("k=2..12 exact".into())
}

fn projection_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for cone in cone_kinds() {
        for sample in 0..1000 {
            let v = gaussian(&mut rng, cone.dim());
            let p = project_cone(&v, &cone);
            let pp = project_cone(&p, &cone);
            let scale = 1.0 + p.iter().map(|x| x.abs()).fold(0.0, f64::max);
            ensure(max_abs_diff(&p, &pp) <= 1e-12 * scale, || format!("{cone:?} sample {sample}: not idempotent"))?;
            ensure(cone_distance(&p, &cone) <= 1e-12 * scale, || format!("{cone:?} sample {sample}: outside cone"))?;
            let w = cone_member(&mut rng, &cone);
            let slack = optimality_slack(&v, &w, &cone);
            ensure(slack <= 1e-9 * scale * scale, || format!("{cone:?} sample {sample}: member closer by {slack}"))?;
        }
    }
    Ok(format!("{} cone kinds x 1000 samples", cone_kinds().len()))
}

fn soft_envelope() -> Outcome {
    let p = random_pop_instance(10, 2, 0);
    let c = compile_pop(&p, &ConeSpec::dense(GramCone::Sos)).map_err(|e| e.to_string())?;
    let split = SelectorSplit::new(&c.program);
    let sol = admm_solve_rowsparse(&c.program, &split, &SolverOptions::default()).map_err(|e| e.to_string())?;
    Ok(format!(
        "n=10 SOS row-sparse: {:?} after {} iterations, bound {:.4}",
        sol.status,
        sol.iterations,
        c.gamma_value(&sol.x).unwrap()
    ))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { label: "1 matching densities", budget: secs(10), gated: true, run: matching_densities },
        Criterion { label: "2 quartic POP sizes", budget: secs(5), gated: true, run: quartic_pop_sizes },
        Criterion { label: "3 bound chain on random POPs", budget: secs(300), gated: true, run: bound_chain },
        Criterion { label: "4 dense vs row-sparse ADMM", budget: secs(300), gated: true, run: dense_vs_rowsparse },
        Criterion { label: "5 chordal decomposition and completion", budget: secs(300), gated: true, run: chordal_equivalence },
        Criterion { label: "6 refinement traces", budget: secs(600), gated: true, run: refinement },
        Criterion { label: "7 dd reconstruction", budget: secs(10), gated: true, run: dd_reconstruction },
        Criterion { label: "8 slack matrix cross-construction", budget: secs(10), gated: true, run: slack_matrices },
        Criterion { label: "9 projection fuzz", budget: secs(60), gated: true, run: projection_fuzz },
        Criterion { label: "soft n=10 SOS envelope", budget: secs(120), gated: false, run: soft_envelope },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > c.budget => Err(format!("{msg}; over budget {:.0}s", c.budget.as_secs_f64())),
            other => other,
        };
        let tag = match (&outcome, c.gated) {
            (Ok(_), true) => "PASS",
            (Err(_), true) => "FAIL",
            (Ok(_), false) => "INFO",
            (Err(_), false) => "WARN",
        };
        let msg = outcome.as_ref().unwrap_or_else(|e| e);
        println!("{tag} [{}] {msg} ({:.2}s)", c.label, took.as_secs_f64());
        if c.gated && outcome.is_err() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
