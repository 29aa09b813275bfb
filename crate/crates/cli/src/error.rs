use std::fmt;
use std::process::ExitCode;

use expfam_div::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// Schema or domain violation in the input.
    Input,
    /// A numerical procedure failed on valid input.
    Numeric,
    /// The verification suite found a failing check.
    Verification,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub failure: Failure,
    pub message: String,
}

impl CliError {
    /// Bad input at `path` (a JSON path, flag or variable name).
    pub fn input(path: impl AsRef<str>, message: impl fmt::Display) -> Self {
        Self {
            failure: Failure::Input,
            message: format!("{}: {message}", path.as_ref()),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Verification,
            message: message.into(),
        }
    }

    /// Classify a library error raised while evaluating `context`.
    pub fn from_library(context: &str, e: &Error) -> Self {
        let failure = match e {
            Error::NonConvergent(_) | Error::DegenerateSolution(_) => Failure::Numeric,
            _ => Failure::Input,
        };
        Self {
            failure,
            message: format!("{context}: {e}"),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            failure: Failure::Numeric,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self.failure {
            Failure::Verification => 1,
            Failure::Input => 2,
            Failure::Numeric => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
