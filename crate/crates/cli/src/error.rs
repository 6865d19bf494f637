use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Solver(_) => ExitCode::from(3),
        }
    }
}

macro_rules! input_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_errors!(
    std::io::Error,
    serde_json::Error,
    toml::de::Error,
    sosrelax::poly::PolyError,
    sosrelax::compile::CompileError,
    sosrelax::chordal::ChordalError,
    sosrelax::lifts::LiftError
);

impl From<sosrelax::conic::ConicError> for CliError {
    fn from(e: sosrelax::conic::ConicError) -> Self {
        use sosrelax::conic::ConicError;
        match e {
            ConicError::Numerical(m) => CliError::Solver(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<sosrelax::refine::RefineError> for CliError {
    fn from(e: sosrelax::refine::RefineError) -> Self {
        use sosrelax::refine::RefineError;
        match e {
            RefineError::Conic(c) => c.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
