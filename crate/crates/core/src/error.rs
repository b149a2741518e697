use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample has {0} observation(s); at least 2 are required")]
    EmptySample(usize),

    #[error("interval [{lower}, {upper}] has lower endpoint above upper endpoint")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("non-finite value in column {column}")]
    NonFinite { column: usize },

    #[error("mode {mode} lies outside the interval [{lower}, {upper}]")]
    ModeOutOfRange { mode: f64, lower: f64, upper: f64 },

    #[error("expected 4 or 6 values per row, found {0}")]
    RowLength(usize),

    /// Wraps a validation failure with the 1-based row it came from.
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("observation {index}: internal variation lies outside the open Wishart support")]
    OutOfSupport { index: usize },

    #[error(
        "observation {index}: internal variation is degenerate (classical data); \
         the Wishart factor of the likelihood is undefined"
    )]
    DegenerateTheta { index: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not square or has a non-finite entry")]
    BadMatrix,

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("vertex enumeration over 2^{p} corners refused (p > 20)")]
    TooManyVertices { p: usize },

    #[error("observation {row} has {found} intervals, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("need at least 2 variables, found {0}")]
    TooFewVariables(usize),

    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Strips any [`Error::Row`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Row { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn at_row(self, row: usize) -> Error {
        Error::Row {
            row,
            source: Box::new(self),
        }
    }
}
