//! Experiment runner: configuration, the experiment registry, CSV reports
//! and the on-disk sieve cache.

pub mod cache;
pub mod config;
pub mod experiments;
pub mod report;
pub mod systems;
pub mod values;

use std::fmt;

pub use config::ExperimentConfig;
pub use experiments::{list_experiments, run_experiment, run_with_cache, Check, Outcome, REGISTRY};
pub use report::{ExperimentReport, ReportRow};

/// Failure of a CLI operation, carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad command line or configuration (exit 2).
    Usage(String),
    /// A computation needs more memory or range than available (exit 3).
    Resources(String),
    /// Any other failure, such as I/O (exit 2).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Other(_) => 2,
            Self::Resources(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Resources(m) => write!(f, "insufficient resources: {m}"),
            Self::Other(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ergolab::Error> for CliError {
    fn from(e: ergolab::Error) -> Self {
        match e {
            ergolab::Error::ResourceExhausted { what, needed_log10 } => {
                Self::Resources(format!("{what}; a sieve limit of about 10^{needed_log10:.1} would suffice"))
            }
            ergolab::Error::OutOfRange { n, limit } => {
                Self::Resources(format!("argument {n} exceeds the sieve limit {limit}; a limit of {n} would suffice"))
            }
            ergolab::Error::Io(m) => Self::Other(m),
            other => Self::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit code when `--accept` finds a tolerance violation.
pub const EXIT_TOLERANCE: i32 = 1;
