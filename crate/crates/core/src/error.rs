use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failed to converge on shell {shell}: {detail}")]
    Quadrature { shell: i64, detail: String },

    #[error("gauge window rejected: {0}")]
    GaugeWindow(String),

    #[error("modulus validation failed: {0}")]
    Modulus(String),

    #[error("resource limit exceeded: {what} ({estimate:.3e} > {limit:.3e})")]
    ResourceLimit {
        what: &'static str,
        estimate: f64,
        limit: f64,
    },

    #[error("not enough usable scales for regression: got {got}, need {need}")]
    InsufficientScales { got: usize, need: usize },

    #[error("{0}")]
    Mismatch(String),
}
