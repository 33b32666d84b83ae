use std::fmt;

use interact2vec::error::ErrorCategory;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// A failure with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<interact2vec::Error> for CliError {
    fn from(e: interact2vec::Error) -> Self {
        let code = match e.category() {
            ErrorCategory::Usage => EXIT_USAGE,
            ErrorCategory::Data => EXIT_DATA,
            ErrorCategory::Numeric => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
