//! Library side of the `qopdist` command: file formats and one function per
//! subcommand, each returning the text to print so that they can be tested
//! without spawning the binary.

pub mod commands;
pub mod format;
pub mod svg;

use std::fmt;

/// Exit code for a successful run or a positive verdict.
pub const EXIT_OK: i32 = 0;
/// Exit code for unreadable or invalid input.
pub const EXIT_INPUT: i32 = 1;
/// Exit code for a numerical failure inside the library.
pub const EXIT_NUMERICAL: i32 = 2;
/// Exit code for a definite negative answer.
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numerical(String),
    Negative(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Negative(_) => EXIT_NEGATIVE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Negative(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qopdist::Error> for CliError {
    fn from(e: qopdist::Error) -> Self {
        use qopdist::Error as E;
        match e {
            E::NotDistinguishable { .. } => CliError::Negative(e.to_string()),
            E::DimensionMismatch { .. }
            | E::InvalidArgument(_)
            | E::NonFinite(_)
            | E::Empty
            | E::NotTracePreserving(_)
            | E::NotComplete(_)
            | E::NotIsometry(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
