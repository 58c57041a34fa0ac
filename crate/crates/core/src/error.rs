use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the laboratory.
///
/// A blow-up is not an error: it truncates the trajectory and is recorded on it.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("equilibrium refinement from seed ({:.6}, {:.6}, {:.6}) did not converge in {iterations} iterations", seed[0], seed[1], seed[2])]
    RootNotConverged { seed: [f64; 3], iterations: usize },

    #[error("implicit stage did not converge at step {step} (residual {residual:e})")]
    NewtonNotConverged { step: u64, residual: f64 },

    #[error("adaptive step size fell below {min_step:e} at t = {t}")]
    StepSizeUnderflow { t: f64, min_step: f64 },

    #[error("cannot measure order: {0}")]
    CannotMeasure(String),

    #[error("trajectories have no common sample times")]
    NoOverlap,

    #[error("separation is zero in the window [{t_lo}, {t_hi}]")]
    ZeroSeparation { t_lo: f64, t_hi: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        LabError::Csv {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
