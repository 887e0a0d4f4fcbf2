//! File formats, reports and the `cvame` command line on top of `cvame-core`.

pub mod cli;
pub mod format;
pub mod report;

/// Anything that should end with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Core(#[from] cvame_core::Error),
}
