use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("series did not converge after {terms} terms (partial sum {partial_sum:e})")]
    NonConvergence { partial_sum: f64, terms: usize },

    #[error("series term overflow at index {index} (log-magnitude {log_magnitude:.1})")]
    Overflow { index: usize, log_magnitude: f64 },

    #[error("quadrature failed to reach tolerance (error estimate {error_estimate:e})")]
    Quadrature { value: f64, error_estimate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
