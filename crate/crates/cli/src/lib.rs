//! Command implementations behind the `symint` binary.
//!
//! Every command is a pure function of its input bytes and options and
//! returns a [`Report`]; the binary only handles files and stdout.

pub mod commands;
pub mod csvio;
pub mod report;

pub use commands::{
    cmd_appendix_a, cmd_estimate, cmd_gradcheck, cmd_pca, cmd_simulate, parse_params, EstimateOptions,
    GradcheckOptions, GradcheckSource, PcaOptions, PcaOutput, SimulateOptions, SimulateOutput,
};
pub use report::{Format, Report};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SYMINT_OUT_DIR";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Io,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::Io => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    pub hint: Option<String>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Io, message)
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Numerical, message)
    }

    fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub(crate) fn in_row(mut self, row: usize) -> Self {
        self.message = format!("row {row}: {}", self.message);
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)?;
        if let Some(h) = &self.hint {
            write!(f, "\nhint: {h}")?;
        }
        Ok(())
    }
}

impl std::error::Error for CliError {}

impl From<symint_core::Error> for CliError {
    fn from(e: symint_core::Error) -> Self {
        use symint_core::Error as E;
        let kind = match e.root() {
            E::NotSymmetric | E::BadMatrix | E::NoConvergence { .. } | E::TooManyVertices { .. } => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Validation,
        };
        let mut err = CliError::new(kind, e.to_string());
        if let E::DegenerateTheta { .. } = e.root() {
            err = err.with_hint(
                "every interval has zero width, so there is no internal variation to fit; \
                 supply intervals with positive widths or run with --synthetic",
            );
        }
        err
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}
