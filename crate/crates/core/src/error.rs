use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: exponential argument {argument:.6e} exceeds cap {cap}")]
    Overflow { argument: f64, cap: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e}, target {target:.3e})")]
    Solver {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("Nehari projection failed: no sign change of h' up to t = {t_max:.6e} (h' there is {h_prime:+.3e})")]
    Projection { t_max: f64, h_prime: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("hypothesis {name} failed{}", witness.map(|w| format!(" at {w:.6e}")).unwrap_or_default())]
    Hypothesis { name: String, witness: Option<f64> },

    #[error("probe failure: {0}")]
    Probe(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn overflow(argument: f64, cap: f64) -> Self {
        Error::Overflow { argument, cap }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, Error::Overflow { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
