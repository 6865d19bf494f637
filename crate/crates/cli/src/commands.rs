use std::process::ExitCode;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use sosrelax::compile::GramCone;
use sosrelax::conic::{write_sdpa, SolverOptions, Status};
use sosrelax::lifts::{slack_matrix, verify_s2_factorization, S2Witness};
use sosrelax::poly::random_pop_instance;
use sosrelax::refine::{basis_pursuit, column_generation, BasisPursuitOptions, BoundProblem, ColumnGenOptions, RefinementTrace};

use crate::args::{BenchArgs, Mode, ProblemArgs, RefineArgs, RefineMethod, SlackArgs, SolverKind};
use crate::config::Settings;
use crate::error::CliError;
use crate::input::{describe, load, require_poly, Problem};
use crate::pipeline::{compile_poly, poly_sizing, program_sizing, solve_program, verify};
use crate::report::{table, RunReport, Timing};

/// Writes to stdout; a reader that went away early is not an error.
fn stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn write(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn status_name(s: Status) -> String {
    format!("{s:?}")
}

fn mode_name(m: Mode) -> String {
    format!("{m:?}").to_lowercase()
}

fn solver_name(s: SolverKind) -> String {
    format!("{s:?}").to_lowercase()
}

/// JSON to `out` plus a table on stdout, or JSON on stdout.
fn emit<T: Serialize>(value: &T, out: Option<&std::path::Path>, rows: String) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => {
            write(p, &json)?;
            stdout(&rows);
        }
        None => stdout(&format!("{json}\n")),
    }
    Ok(())
}

pub fn compile(args: &ProblemArgs) -> Result<ExitCode, CliError> {
    let settings = Settings::resolve(&args.solver, GramCone::Sos, SolverOptions::default())?;
    let p = require_poly(load(&args.input, settings.seed)?, "compile")?;
    let t = Instant::now();
    let compiled = compile_poly(&p, args.input.mode, settings.cone, settings.solver)?;
    let compile_s = t.elapsed().as_secs_f64();
    let report = RunReport {
        command: "compile".into(),
        input: describe(&args.input, settings.seed),
        seed: settings.seed,
        cone: Some(settings.cone.to_string()),
        solver: solver_name(settings.solver),
        mode: Some(mode_name(args.input.mode)),
        sizing: poly_sizing(&p, args.input.mode, &compiled),
        status: None,
        bound: None,
        objective: None,
        dual_objective: None,
        iterations: None,
        residual: None,
        timing: Timing { compile_s, ..Default::default() },
        verification: None,
        diagnostics: Vec::new(),
    };
    if let Some(stem) = &args.out {
        write(&stem.with_extension("json"), &compiled.program.to_json())?;
        match write_sdpa(&compiled.program) {
            Ok(text) => write(&stem.with_extension("dat-s"), &text)?,
            Err(e) => info!("no SDPA file: {e}"),
        }
        write(&stem.with_extension("report.json"), &report.to_json())?;
        stdout(&table(&["field", "value"], &report.summary_rows()));
    } else {
        stdout(&format!("{}\n", report.to_json()));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn solve(args: &ProblemArgs) -> Result<ExitCode, CliError> {
    let settings = Settings::resolve(&args.solver, GramCone::Sos, SolverOptions::default())?;
    let problem = load(&args.input, settings.seed)?;
    let t = Instant::now();
    let (compiled, sizing) = match &problem {
        Problem::Poly(p) => {
            let c = compile_poly(p, args.input.mode, settings.cone, settings.solver)?;
            let s = poly_sizing(p, args.input.mode, &c);
            (Some(c), s)
        }
        Problem::Program(prog) => (None, program_sizing(prog)),
    };
    let compile_s = t.elapsed().as_secs_f64();
    let program = match (&compiled, &problem) {
        (Some(c), _) => &c.program,
        (None, Problem::Program(p)) => p,
        (None, Problem::Poly(_)) => unreachable!("polynomials are always compiled"),
    };
    let t = Instant::now();
    let sol = solve_program(program, settings.solver, &settings.options, compiled.is_none())?;
    let solve_s = t.elapsed().as_secs_f64();
    let (verification, verify_s) = match &compiled {
        Some(c) => {
            let (v, s) = verify(c, &sol.x, args.verify_tol)?;
            (Some(v), s)
        }
        None => (None, 0.0),
    };
    for d in &sol.diagnostics {
        if sol.status == Status::Solved {
            info!("{d}");
        } else {
            warn!("{d}");
        }
    }
    let report = RunReport {
        command: "solve".into(),
        input: describe(&args.input, settings.seed),
        seed: settings.seed,
        cone: compiled.as_ref().map(|_| settings.cone.to_string()),
        solver: solver_name(settings.solver),
        mode: compiled.as_ref().map(|_| mode_name(args.input.mode)),
        sizing,
        status: Some(status_name(sol.status)),
        bound: compiled.as_ref().and_then(|c| c.gamma_value(&sol.x)),
        objective: Some(sol.objective),
        dual_objective: Some(sol.dual_objective),
        iterations: Some(sol.iterations),
        residual: Some(sol.residuals.max()),
        timing: Timing { compile_s, solve_s, verify_s },
        verification,
        diagnostics: sol.diagnostics.clone(),
    };
    emit(&report, args.out.as_deref(), table(&["field", "value"], &report.summary_rows()))?;
    if sol.status != Status::Solved {
        return Err(CliError::Solver(format!("solver stopped with {:?}: {}", sol.status, sol.diagnostics.join("; "))));
    }
    Ok(ExitCode::SUCCESS)
}

fn trace_rows(trace: &RefinementTrace) -> String {
    let rows: Vec<Vec<String>> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                i.to_string(),
                format!("{:.8}", s.bound),
                status_name(s.solver_status),
                s.solver_iterations.to_string(),
                format!("{:.3}", s.time_s),
                s.change.clone(),
            ]
        })
        .collect();
    let mut out = table(&["iter", "bound", "status", "solver iters", "time s", "change"], &rows);
    out.push_str(&format!("terminated: {:?}\n", trace.status));
    out
}

pub fn refine(args: &RefineArgs) -> Result<ExitCode, CliError> {
    let settings = Settings::resolve(&args.solver, GramCone::Dsos, ColumnGenOptions::default().solver)?;
    let p = require_poly(load(&args.input, settings.seed)?, "refine")?;
    let problem = match args.input.mode {
        Mode::Bound => BoundProblem::pop(&p)?,
        Mode::Sphere => BoundProblem::form_on_sphere(&p)?,
        Mode::Feasibility => return Err(CliError::Input("refinement needs --mode bound or --mode sphere".into())),
    };
    let iters = args.iters.or(settings.file.iters);
    let budget = settings.budget_s;
    let trace = match args.method {
        RefineMethod::Colgen => {
            let mut opts = ColumnGenOptions { solver: settings.options.clone(), ..Default::default() };
            if let Some(k) = args.initial_k.or(settings.file.initial_k) {
                opts.initial_k = k;
            }
            if let Some(k) = args.pool_k.or(settings.file.pool_k) {
                opts.pricing_k = k;
            }
            if let Some(i) = iters {
                opts.max_iters = i;
            }
            if let Some(b) = budget {
                opts.time_budget_s = b;
            }
            column_generation(&problem, &opts)?
        }
        RefineMethod::Basispursuit => {
            if settings.cone == GramCone::Sos {
                return Err(CliError::Input("basis pursuit refines dsos or sdsos bounds".into()));
            }
            let mut opts = BasisPursuitOptions { cone: settings.cone, solver: settings.options.clone(), ..Default::default() };
            if let Some(i) = iters {
                opts.max_iters = i;
            }
            if let Some(b) = budget {
                opts.time_budget_s = b;
            }
            basis_pursuit(&problem, &opts)?
        }
    };
    emit(&trace, args.out.as_deref(), trace_rows(&trace))?;
    match trace.steps.first() {
        Some(s) if s.solver_status == Status::Solved => Ok(ExitCode::SUCCESS),
        _ => Err(CliError::Solver("the first refinement solve did not converge".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub gram_side: usize,
    pub m: usize,
    pub method: String,
    pub bound: f64,
    pub time_s: f64,
    pub iters: usize,
    pub status: String,
    pub seed: u64,
}

fn bench_cell(n: usize, degree: u32, seed: u64, cone: GramCone, kind: SolverKind, opts: &SolverOptions) -> Result<BenchRow, CliError> {
    let p = random_pop_instance(n, degree / 2, seed);
    let t = Instant::now();
    let compiled = compile_poly(&p, Mode::Bound, cone, kind)?;
    let sol = solve_program(&compiled.program, kind, opts, false)?;
    let (gram_side, m) = compiled.size_summary();
    Ok(BenchRow {
        n,
        gram_side,
        m,
        method: cone.to_string(),
        // an unconverged bound variable certifies nothing
        bound: if sol.status == Status::Solved { compiled.gamma_value(&sol.x).unwrap_or(f64::NAN) } else { f64::NAN },
        time_s: t.elapsed().as_secs_f64(),
        iters: sol.iterations,
        status: status_name(sol.status),
        seed,
    })
}

pub fn bench(args: &BenchArgs) -> Result<ExitCode, CliError> {
    let settings = Settings::resolve(&args.solver, GramCone::Sos, SolverOptions::default())?;
    if args.degree == 0 || args.degree % 2 == 1 {
        return Err(CliError::Input(format!("degree must be positive and even, got {}", args.degree)));
    }
    if let Some(&bad) = args.n.iter().find(|&&n| n == 0) {
        return Err(CliError::Input(format!("variable counts must be positive, got {bad}")));
    }
    let cones: Vec<GramCone> = args.methods.iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
    let mut cells = Vec::new();
    for &n in &args.n {
        for seed in settings.seed..settings.seed + args.seeds {
            for &cone in &cones {
                cells.push((n, seed, cone));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let results: Vec<Result<BenchRow, CliError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, seed, cone)| bench_cell(n, args.degree, seed, cone, settings.solver, &settings.options))
            .collect()
    });
    let mut rows = Vec::new();
    for ((n, seed, cone), r) in cells.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => warn!("cell n={n} seed={seed} {cone} failed: {e}"),
        }
    }
    let mut csv = String::from("n,N,m,method,bound,time_s,iters,status,seed\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{:?},{:.6},{},{},{}\n",
            r.n, r.gram_side, r.m, r.method, r.bound, r.time_s, r.iters, r.status, r.seed
        ));
    }
    match &args.out {
        Some(p) => {
            write(p, &csv)?;
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.seed.to_string(),
                        r.gram_side.to_string(),
                        r.m.to_string(),
                        r.method.clone(),
                        format!("{:.6}", r.bound),
                        format!("{:.3}", r.time_s),
                        r.iters.to_string(),
                        r.status.clone(),
                    ]
                })
                .collect();
            stdout(&table(&["n", "seed", "N", "m", "method", "bound", "time s", "iters", "status"], &cells));
        }
        None => stdout(&csv),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn slack(args: &SlackArgs) -> Result<ExitCode, CliError> {
    let s = slack_matrix(args.k)?;
    let Some(path) = &args.witness else {
        match &args.out {
            Some(p) => write(p, &s.to_csv())?,
            None => stdout(&s.to_csv()),
        }
        return Ok(ExitCode::SUCCESS);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let witness: S2Witness = serde_json::from_str(&text)?;
    let report = verify_s2_factorization(&s.to_matrix(), &witness, args.tol);
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(p) => write(p, &json)?,
        None => stdout(&format!("{json}\n")),
    }
    if report.accepted() {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CliError::Input(format!("witness rejected with {} violations", report.violations.len())))
    }
}
