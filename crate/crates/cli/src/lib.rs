//! Library surface of the `cwt` binary: error type and file-format helpers,
//! shared with the integration tests.

// same guard idiom as cwt-core: `!(x > 1.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod io;

use std::fmt;

use cwt_core::CwtError;

#[derive(Debug)]
pub enum CliError {
    Core(CwtError),
    Io(std::io::Error),
    Parse(String),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    /// 2 validation/parse, 3 construction failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                CwtError::TauberianFail(_)
                | CwtError::DegenerateDenominator { .. }
                | CwtError::BandCoverage { .. } => 3,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "Io: {e}"),
            CliError::Parse(msg) => write!(f, "Validation: {msg}"),
        }
    }
}

impl From<CwtError> for CliError {
    fn from(e: CwtError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
