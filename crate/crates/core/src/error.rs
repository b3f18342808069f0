use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// A documented precondition of the called operation does not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("matrix is numerically singular")]
    Singular,

    /// Input is not general enough (repeated eigenvalues, coincident branches, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ill-conditioned interpolation: {0}")]
    Conditioning(String),

    #[error("no convergence after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("unsupported torus rank {0} (at most 3)")]
    UnsupportedRank(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A post-condition that theory guarantees for general data failed.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by non-general numerical input rather than
    /// malformed requests.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular
                | Error::Degenerate(_)
                | Error::Conditioning(_)
                | Error::Convergence { .. }
                | Error::Invariant(_)
        )
    }
}
