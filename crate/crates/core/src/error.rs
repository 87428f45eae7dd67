use thiserror::Error;

/// Errors raised by the numerical and analytic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller-side precondition was violated (length mismatch, unnormalized input, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// The request exceeds what the implementation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The grid cannot represent the requested state to the required accuracy.
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    /// The minimum-uncertainty construction was asked for a state outside its regime.
    #[error("outside validity regime: {0}")]
    Validity(String),
    /// The shooting mismatch has no sign change inside the bracket.
    #[error("no eigenvalue in bracket [{lo}, {hi}]")]
    NoEigenvalue { lo: f64, hi: f64 },
    /// The converged state does not have the requested number of radial nodes.
    #[error("bracket converged to a state with {found} nodes, expected {expected}")]
    Bracket { expected: usize, found: usize },
    /// A potential table could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
