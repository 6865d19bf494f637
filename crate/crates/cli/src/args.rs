use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sosrelax", version, about = "Sum-of-squares bounds via first-order conic solves")]
pub struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a polynomial into a conic program and report its size.
    Compile(ProblemArgs),
    /// Solve a polynomial bound or a conic program.
    Solve(ProblemArgs),
    /// Tighten a DSOS/SDSOS bound by column generation or basis pursuit.
    Refine(RefineArgs),
    /// Sweep random instances and write one CSV row per cell.
    Bench(BenchArgs),
    /// Emit the slack matrix S^(k), optionally checking a factorization witness.
    Slack(SlackArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Dense,
    Rowsparse,
    Chordal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Largest gamma with p - gamma in the cone.
    Bound,
    /// Is p itself in the cone.
    Feasibility,
    /// Largest gamma with f - gamma * (sum x_i^2)^d in the cone, for forms.
    Sphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefineMethod {
    Colgen,
    Basispursuit,
}

#[derive(Args, Debug, Default, Clone)]
pub struct SolverFlags {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// sos, sdsos or dsos.
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Keep the penalty fixed.
    #[arg(long)]
    pub no_adapt: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget_s: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Polynomial text file, SDPA `.dat-s` file or program `.json` file.
    pub input: Option<PathBuf>,
    /// Use a seeded random instance in this many variables instead of a file.
    #[arg(long, conflicts_with = "input")]
    pub random: Option<usize>,
    /// Degree of the random instance.
    #[arg(long, default_value_t = 4)]
    pub degree: u32,
    #[arg(long, value_enum, default_value_t = Mode::Bound)]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct ProblemArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Allowed coefficient mismatch when checking the certificate.
    #[arg(long, default_value_t = 1e-3)]
    pub verify_tol: f64,
    /// Output path: report JSON for `solve`, file stem for `compile`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long, value_enum, default_value_t = RefineMethod::Colgen)]
    pub method: RefineMethod,
    /// Refinement iterations after the first solve.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Sparsity of the starting rays.
    #[arg(long)]
    pub initial_k: Option<usize>,
    /// Sparsity of the pricing pool.
    #[arg(long)]
    pub pool_k: Option<usize>,
    /// Trace JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Variable counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub degree: u32,
    /// Seeds per variable count, starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, value_delimiter = ',', default_values_t = vec!["dsos".to_string(), "sdsos".to_string(), "sos".to_string()])]
    pub methods: Vec<String>,
    /// Worker threads (0 picks one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// CSV path; the CSV goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SlackArgs {
    #[arg(long)]
    pub k: usize,
    /// JSON witness to check against S^(k).
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// CSV path; the CSV goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
