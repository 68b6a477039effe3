//! Bundled benchmarks, the experiment runner and the `pmdp` command-line
//! tool built on `pmdp-core`.

pub mod benches;
pub mod builtins;
pub mod experiment;

pub use builtins::{builtin_model, grid, GridErrors, BUILTIN_NAMES};
pub use experiment::{load_model, read_csv, run_experiment, write_csv, ExperimentSpec, ResultRow};

/// Errors of the command-line layer; each maps to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(pmdp_core::Error),
    #[error("{0}")]
    Solver(pmdp_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Classifies a core error raised while loading or encoding a model.
    pub fn from_model(e: pmdp_core::Error) -> Self {
        match e {
            pmdp_core::Error::InvalidArgument(msg) => CliError::Usage(msg),
            other => CliError::Model(other),
        }
    }

    /// 1 usage, 2 model validation, 3 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Model(_) => 2,
            CliError::Solver(_) | CliError::Csv(_) => 3,
        }
    }
}
