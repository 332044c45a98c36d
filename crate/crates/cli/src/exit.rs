//! Exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | invalid configuration or arguments |
//! | 2 | command-line usage error |
//! | 3 | audit failure (`Delta_k` positivity, monotonicity, singular gluing) |
//! | 4 | solvability violation |
//! | 5 | I/O or parse error |
//! | 6 | recovery finished but a residual exceeds its tolerance |
//! | 7 | a verification check failed |

use std::fmt;
use std::process::ExitCode;

use fracmix::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Invalid = 1,
    Audit = 3,
    Solvability = 4,
    Io = 5,
    Tolerance = 6,
    Verify = 7,
}

#[derive(Debug)]
pub struct Failure {
    pub code: Code,
    pub message: String,
}

impl Failure {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(Code::Invalid, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Code::Io, message)
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code as u8)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DeltaNotPositive { .. } | Error::SingularSystem { .. } | Error::NotMonotone { .. } => Code::Audit,
            Error::Solvability(_) => Code::Solvability,
            Error::Io(_) | Error::Csv(_) => Code::Io,
            _ => Code::Invalid,
        };
        let message = match &e {
            Error::Solvability(v) => format!("{e} [{}]", v.code()),
            _ => e.to_string(),
        };
        Failure::new(code, message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

impl From<fracmix::error::SpecialError> for Failure {
    fn from(e: fracmix::error::SpecialError) -> Self {
        Failure::invalid(e.to_string())
    }
}
