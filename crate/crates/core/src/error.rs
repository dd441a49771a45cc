use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong while building states or solving channels.
#[derive(Debug, Error)]
pub enum MazerError {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The scattering integrator could not meet its tolerance.
    #[error("solver failure (coupling {coupling:.6}, coupling*length {coupling_length:.6}): {reason}")]
    Solver {
        coupling: f64,
        coupling_length: f64,
        reason: String,
    },

    /// A solver failure tagged with the photon-number channel it came from.
    #[error("channel n={channel}: {source}")]
    Channel {
        channel: usize,
        #[source]
        source: Box<MazerError>,
    },

    /// Loss of precision in a special-function recurrence.
    #[error("numerical breakdown at n={index}: {reason}")]
    Numerical { index: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl MazerError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        MazerError::InvalidInput(msg.into())
    }

    /// True for failures that originate in the numerical solver rather than in
    /// user input. The CLI maps these to a distinct exit code.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            MazerError::Solver { .. } | MazerError::Numerical { .. } => true,
            MazerError::Channel { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, MazerError>;
