//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building polynomial systems,
/// evaluating families, running oracles, or simulating.
#[derive(Debug, Error)]
pub enum Error {
    /// A Hankel moment matrix had a negative pivot beyond rounding noise,
    /// so the provided moments are not a valid moment sequence.
    #[error("moment matrix is not positive semidefinite (pivot {eigenvalue:.3e})")]
    MomentMatrixNotPsd { eigenvalue: f64 },

    /// A marginal collapsed to a single support point, so no
    /// standardized transform exists.
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    /// A polynomial degree outside the constructed range was requested.
    #[error("degree {degree} out of range (system holds degrees 0..={cap})")]
    DegreeOutOfRange { degree: usize, cap: usize },

    /// A quadrature rule could not be constructed or failed to converge.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// A family or request document had parameters outside the valid domain.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A point outside the distribution's support was passed to a
    /// conditional-moment or density routine.
    #[error("value {value} outside the support")]
    OutOfSupport { value: f64 },

    /// A_n * B_n came out negative beyond rounding noise, which violates
    /// the diagonal structure the computation relies on.
    #[error("negative product A_{n} * B_{n} = {product:.3e}")]
    NegativeProduct { n: usize, product: f64 },

    /// A joint distribution had a zero row or column mass where one was
    /// required.
    #[error("degenerate marginal: {0}")]
    DegenerateMarginal(String),

    /// Simulation output had too little variance to form a correlation
    /// or a batch-means standard error.
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),

    /// A series expansion failed to terminate or visibly converge within
    /// the configured cap.
    #[error("series not terminated after {cap} terms (last term {last_term:.3e})")]
    SeriesNotTerminated { cap: usize, last_term: f64 },

    /// A family or model name outside the supported set.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// Underlying I/O failure (file reads, stdout).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a spec or report document.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
