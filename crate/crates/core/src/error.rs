use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("unknown column `{0}` (expected time, status, group)")]
    UnknownColumn(String),
    #[error("dataset contains no failure observations")]
    NoFailures,
    #[error("draw covers {got} observations but the dataset has {expected}")]
    MismatchedDraw { expected: usize, got: usize },
    #[error("curve never falls to level {0}")]
    NonIdentifiable(f64),
    #[error("no fiducial draw falls to level {0}")]
    AllNonIdentifiable(f64),
    #[error("survival estimate is zero at t = {0}; log interval undefined")]
    DegenerateAtZero(f64),
    #[error("ensembles differ in size ({0} vs {1})")]
    MismatchedM(usize, usize),
    #[error("pooled sample has no failure observations")]
    NoEvents,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Variant name, used verbatim in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::UnknownColumn(_) => "UnknownColumn",
            Error::NoFailures => "NoFailures",
            Error::MismatchedDraw { .. } => "MismatchedDraw",
            Error::NonIdentifiable(_) => "NonIdentifiable",
            Error::AllNonIdentifiable(_) => "AllNonIdentifiable",
            Error::DegenerateAtZero(_) => "DegenerateAtZero",
            Error::MismatchedM(..) => "MismatchedM",
            Error::NoEvents => "NoEvents",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::InvalidScenario(_) => "InvalidScenario",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
