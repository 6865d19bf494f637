use std::path::Path;

use serde::{Deserialize, Serialize};
use sosrelax::compile::GramCone;
use sosrelax::conic::SolverOptions;

use crate::args::{SolverFlags, SolverKind};
use crate::error::CliError;

/// Settings readable from a TOML file; flags on the command line win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cone: Option<String>,
    pub solver: Option<SolverKind>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub rho: Option<f64>,
    pub adapt: Option<bool>,
    pub seed: Option<u64>,
    pub budget_s: Option<f64>,
    pub iters: Option<usize>,
    pub initial_k: Option<usize>,
    pub pool_k: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(toml::from_str(&text)?)
    }
}

/// Flags merged over the config file over the built-in defaults.
#[derive(Clone, Debug)]
pub struct Settings {
    pub cone: GramCone,
    pub solver: SolverKind,
    pub options: SolverOptions,
    pub seed: u64,
    pub budget_s: Option<f64>,
    pub file: RunConfig,
}

impl Settings {
    pub fn resolve(flags: &SolverFlags, default_cone: GramCone, defaults: SolverOptions) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let cone = match flags.cone.as_ref().or(file.cone.as_ref()) {
            Some(name) => name.parse()?,
            None => default_cone,
        };
        let mut options = defaults;
        if let Some(t) = flags.tol.or(file.tol) {
            options.tol = t;
        }
        if let Some(m) = flags.max_iters.or(file.max_iters) {
            options.max_iters = m;
        }
        if let Some(r) = flags.rho.or(file.rho) {
            options.rho = r;
        }
        if flags.no_adapt {
            options.adapt = false;
        } else if let Some(a) = file.adapt {
            options.adapt = a;
        }
        let budget_s = flags.budget_s.or(file.budget_s);
        if let Some(b) = budget_s {
            if !(b > 0.0) {
                return Err(CliError::Input(format!("budget must be positive, got {b}")));
            }
            options.time_limit_s = Some(b);
        }
        options.validate()?;
        Ok(Self {
            cone,
            solver: flags.solver.or(file.solver).unwrap_or(SolverKind::Dense),
            options,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            budget_s,
            file,
        })
    }
}
