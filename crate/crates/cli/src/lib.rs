//! Experiment runner for the `mimo-ic` library: scenario sweeps over SNR and
//! CSI error variance, approximation-accuracy studies and convergence traces,
//! all emitted as CSV.

pub mod csv;
pub mod experiment;
pub mod scenario;
pub mod spec;

pub use experiment::{accuracy, converge, sweep, ConvergeRow, ResultRow};
pub use scenario::Scenario;
pub use spec::ExperimentSpec;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Numeric(#[from] mimo_ic::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 2 for a bad spec, 1 for anything that failed while
    /// running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::InvalidSpec(_) => 2,
            RunError::Numeric(_) | RunError::Io(_) => 1,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> RunError {
    RunError::InvalidSpec(msg.into())
}
