use std::fmt;

use compact_conserve::Error;

/// Process exit status: 0 success, 1 numeric or feasibility failure, 2 bad input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Numeric = 1,
    Input = 2,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn input(e: impl Into<anyhow::Error>) -> Self {
        Self { status: Status::Input, source: e.into() }
    }

    pub fn numeric(e: impl Into<anyhow::Error>) -> Self {
        Self { status: Status::Numeric, source: e.into() }
    }

    pub fn context(mut self, what: impl fmt::Display + Send + Sync + 'static) -> Self {
        self.source = self.source.context(what);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SchemeFormat(_)
            | Error::InvalidConfig(_)
            | Error::InvalidGrid(_)
            | Error::InvalidParamCount { .. }
            | Error::GridTooSmall { .. }
            | Error::LengthMismatch { .. }
            | Error::ShapeMismatch { .. }
            | Error::InvalidNode { .. }
            | Error::OmegaOutOfRange(_) => Self::input(e),
            _ => Self::numeric(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
