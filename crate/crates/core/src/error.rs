use thiserror::Error;

/// Errors raised by channel generation, codebooks, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate matrix: {0}")]
    Degenerate(String),

    #[error("construction not applicable: {0}")]
    NotApplicable(String),

    #[error("SDP solver did not converge after {iterations} Newton steps (gap {gap:.3e}, residual {residual:.3e})")]
    SolverFailure {
        iterations: usize,
        gap: f64,
        residual: f64,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
