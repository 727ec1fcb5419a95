use thiserror::Error;

use crate::bessel::BesselError;
use crate::ode::OdeError;
use crate::roots::RootError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
    #[error("no eigenvalue found: {0}")]
    NoRoot(String),
    #[error("root bracketing grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("root refinement failed: {0}")]
    Refinement(String),
    #[error("L_max = {l_max} is insufficient: lowest eigenvalue of mode {next} is {next_lambda} <= {threshold}")]
    InsufficientLMax { l_max: usize, next: usize, next_lambda: f64, threshold: f64 },
    #[error("dimension {0} not supported here (shape derivatives are two-dimensional)")]
    Dimension(usize),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("finite-difference step h = {h:e} rejected: {reason}")]
    FdStep { h: f64, reason: String },
    #[error("positivity violated: {0}")]
    Positivity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<RootError<Error>> for Error {
    fn from(e: RootError<Error>) -> Self {
        match e {
            RootError::Function(inner) => inner,
            other => Error::Refinement(other.to_string()),
        }
    }
}
