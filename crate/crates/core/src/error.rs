use thiserror::Error;

/// Errors raised by the geometry, flow and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The discrete hypersurface lost strict convexity (or left its chart).
    #[error("degenerate shape at node {node}: eigenvalue {eigenvalue:e} ({detail})")]
    DegenerateShape {
        node: usize,
        eigenvalue: f64,
        detail: String,
    },

    /// A precondition of the call was not met.
    #[error("usage error: {0}")]
    Usage(String),

    /// A structural invariant was violated (for example a speed that changes sign).
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
