use std::path::Path;

use sosrelax::conic::{read_sdpa, ConicProgram};
use sosrelax::poly::{parse_polynomial, random_form, random_pop_instance, Polynomial};

use crate::args::{InputArgs, Mode};
use crate::error::CliError;

pub enum Problem {
    Poly(Polynomial),
    Program(ConicProgram),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Label used in reports.
pub fn describe(args: &InputArgs, seed: u64) -> String {
    match (&args.input, args.random) {
        (Some(p), _) => p.display().to_string(),
        (None, Some(n)) => format!("random n={n} degree={} seed={seed}", args.degree),
        (None, None) => String::new(),
    }
}

pub fn load(args: &InputArgs, seed: u64) -> Result<Problem, CliError> {
    if let Some(n) = args.random {
        if n == 0 || args.degree == 0 || args.degree % 2 == 1 {
            return Err(CliError::Input(format!("random instances need n >= 1 and a positive even degree, got n={n} degree={}", args.degree)));
        }
        let p = match args.mode {
            Mode::Sphere => random_form(n, args.degree, seed),
            _ => random_pop_instance(n, args.degree / 2, seed),
        };
        return Ok(Problem::Poly(p));
    }
    let Some(path) = &args.input else {
        return Err(CliError::Input("no input: give a file or --random N".into()));
    };
    let text = read(path)?;
    let name = path.to_string_lossy();
    if name.ends_with(".dat-s") {
        Ok(Problem::Program(read_sdpa(&text)?))
    } else if name.ends_with(".json") {
        Ok(Problem::Program(ConicProgram::from_json(&text)?))
    } else {
        Ok(Problem::Poly(parse_polynomial(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?))
    }
}

pub fn require_poly(problem: Problem, command: &str) -> Result<Polynomial, CliError> {
    match problem {
        Problem::Poly(p) => Ok(p),
        Problem::Program(_) => Err(CliError::Input(format!("`{command}` needs a polynomial input"))),
    }
}
