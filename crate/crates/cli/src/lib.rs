//! Scenario loading, orchestration and file output for the `qinsim` binary.

pub mod mc;
pub mod output;
pub mod scenario;
pub mod simulate;
pub mod verify;

pub use output::RunSummary;
pub use scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("no dual-visibility window\n{0}")]
    NoWindow(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 1 for failed checks, 2 for scenario, geometry and file problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Scenario(_) | CliError::NoWindow(_) | CliError::Output(_) => 2,
        }
    }
}
