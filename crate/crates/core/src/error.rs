use thiserror::Error;

/// Unified error type for the solver and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("t = {t} outside domain [{t_min}, {t_max}]")]
    Domain { t: f64, t_min: f64, t_max: f64 },

    #[error("segment mismatch at t = {at}: {what} (measured {measured:e})")]
    Consistency { at: f64, what: String, measured: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The computed half-step left the a-priori bound |x| <= M; the caller
    /// must restart with a larger M.
    #[error("orbit bound exceeded: max |x| = {max_abs} > M = {bound}")]
    BoundExceeded { max_abs: f64, bound: f64 },

    /// Runtime contraction monitoring saw a Picard ratio stuck above 0.99.
    #[error("Picard iteration not contracting: ratio {ratio} over {window} iterations")]
    NonContracting { ratio: f64, window: usize },

    #[error("Picard iteration did not reach tolerance: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    /// Wraps a solver error with the half-step index at which it occurred.
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Error {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}
