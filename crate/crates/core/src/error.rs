use std::fmt;

/// Errors raised by the numerical pipeline and the configuration front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition (grid size, truncation margin, ...) does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative or adaptive routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// A series was cut at its index cap before the term bound dropped below tolerance.
    #[error("series did not converge: {0}")]
    Convergence(String),
    /// The configuration document could not be parsed or validated.
    #[error("{0}")]
    Config(ConfigErrors),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Precondition(_) => 1,
            Error::Numeric(_) | Error::Convergence(_) => 2,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single configuration problem, optionally located in the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{l}:{c}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

/// Every issue found while validating a configuration, not just the first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl ConfigErrors {
    pub fn push(&mut self, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            line: None,
            column: None,
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ConfigIssue> {
        self.0.iter()
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} issue(s))", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}
