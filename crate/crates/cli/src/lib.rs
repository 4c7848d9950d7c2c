//! Configuration loading, experiment sweeps and CSV output for the `zsrp`
//! binary.

pub mod config;
pub mod experiment;
pub mod selftest;

pub use config::{load_config, parse_config, EvaluatorKind, ExperimentKind, ExperimentSpec};
pub use experiment::{run_experiment, write_csv, Row, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] zsrp_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("self-test failed: {0}")]
    Selftest(String),
}

impl CliError {
    /// 2 for configuration and input errors, 3 for numerical accuracy
    /// failures, 4 for capacity limits, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use zsrp_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Domain(_) | E::NotAvailable(_)) => 2,
            CliError::Core(E::Accuracy { .. }) => 3,
            CliError::Core(E::Capacity(_)) => 4,
            CliError::Selftest(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
