use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested point or parameter set lies outside the region where
    /// the chosen representation is defined (divergent series, pole, octant
    /// violation, coincident source and field points).
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration failed to reach the requested tolerance within
    /// its configured budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed caller input (bad options, vector length mismatch, an
    /// unparsable row).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// File or stream problem while reading points or writing reports.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
