use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A user-supplied value or combination of values is invalid.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("failed to parse {what} `{input}`: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("{path}:{line}: {reason}")]
    File {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("no q_rho > 0 for rho <= {rho_max}; raise rho_max")]
    NoRhoStar { rho_max: usize },

    /// The asymptotic activation probability was requested outside `p*t < 0.1`.
    #[error("p*t = {pt} is outside the asymptotic regime (p*t < {limit})")]
    OutOfRegime { pt: f64, limit: f64 },

    #[error("no interior minimum of the mean usable-edge trajectory on (0, {horizon})")]
    Degenerate { horizon: f64 },

    #[error("parameters sit on a branch boundary: {0}")]
    BranchBoundary(String),

    #[error("no transition in the swept range")]
    NoTransition,

    #[error("unknown {kind} `{name}` (available: {available})")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("estimated work {estimate:.3e} exceeds budget {budget:.3e}")]
    Budget { estimate: f64, budget: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than by the run itself.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_) | Error::Budget { .. })
    }
}
