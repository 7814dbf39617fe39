//! Process exit codes.

use std::fmt;

use magnomech::Error;

pub const OK: i32 = 0;
pub const VERIFY_FAILED: i32 = 1;
pub const CONFIG: i32 = 2;
pub const UNSTABLE: i32 = 3;
pub const NON_CONVERGENCE: i32 = 4;

/// An error paired with the exit code it maps to.
#[derive(Debug)]
pub struct Exit {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Exit {
    pub fn config(error: anyhow::Error) -> Self {
        Exit {
            code: CONFIG,
            error,
        }
    }

    pub fn unstable(error: anyhow::Error) -> Self {
        Exit {
            code: UNSTABLE,
            error,
        }
    }
}

pub fn code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } | Error::Schema(_) => CONFIG,
        Error::SingularSpectrum { .. }
        | Error::Heating { .. }
        | Error::Unstable { .. }
        | Error::UnphysicalCovariance { .. }
        | Error::NoFeasiblePoint => UNSTABLE,
        Error::NonConvergence { .. } => NON_CONVERGENCE,
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        Exit {
            code: code_for(&e),
            error: e.into(),
        }
    }
}

impl From<std::io::Error> for Exit {
    fn from(e: std::io::Error) -> Self {
        Exit::config(e.into())
    }
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}
