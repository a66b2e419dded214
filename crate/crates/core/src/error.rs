use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("{what}: argument {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("quadrature of {integrand} did not converge (best estimate {estimate}, error bound {abs_error:e})")]
    Convergence {
        integrand: &'static str,
        estimate: f64,
        abs_error: f64,
    },

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("invariant violated on stream {stream_id}: {detail}")]
    InvariantViolation { stream_id: u64, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
