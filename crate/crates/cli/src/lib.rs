//! Experiment drivers and the verification suite behind the `polyrellich`
//! binary. Everything here is callable as a library so the integration
//! tests exercise the exact code paths of the CLI.

pub mod csvout;
pub mod experiments;
pub mod verify;

/// Error split deciding the process exit code: configuration problems exit
/// with 2, numerical invariant failures with 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

/// Setup-stage errors (loading regions, parsing knobs) become config errors.
pub fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}
