use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Population in the top Fock band exceeded the truncation tolerance.
    #[error("truncation leakage: {population:.3e} in Fock levels >= {band_start} exceeds {tolerance:.1e} (raise n_max)")]
    Leakage {
        population: f64,
        band_start: usize,
        tolerance: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("convergence error: {0}")]
    Convergence(String),
    #[error("state is not positive: minimum eigenvalue {min_eigenvalue:.3e}")]
    Cptp { min_eigenvalue: f64 },
    #[error("herald impossible: probability {probability:.3e}")]
    HeraldImpossible { probability: f64 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("alias error: {0}")]
    Alias(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn index(msg: impl Into<String>) -> Self {
        Error::Index(msg.into())
    }

    /// Short machine-readable tag, used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Leakage { .. } => "leakage",
            Error::Domain(_) => "domain",
            Error::Index(_) => "index",
            Error::Convergence(_) => "convergence",
            Error::Cptp { .. } => "cptp",
            Error::HeraldImpossible { .. } => "herald_impossible",
            Error::Parse { .. } => "parse",
            Error::Alias(_) => "alias",
            Error::Coverage(_) => "coverage",
            Error::InvalidState(_) => "invalid_state",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
