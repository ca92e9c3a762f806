use std::fmt;

use bubbletest::ErrorKind;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

/// An error carrying the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    /// Failure writing outputs.
    pub fn io(path: &std::path::Path, err: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<bubbletest::Error> for CliError {
    fn from(err: bubbletest::Error) -> Self {
        let code = match err.kind() {
            ErrorKind::Input => EXIT_INPUT,
            ErrorKind::Config => EXIT_CONFIG,
            ErrorKind::Numerical => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: format!("serialization failed: {err}"),
        }
    }
}
