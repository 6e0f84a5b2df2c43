use thiserror::Error;

#[derive(Debug, Error)]
pub enum DimerError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("non-bipartite edge: {0}")]
    NonBipartite(String),
    #[error("planarity violation: {0}")]
    Planarity(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("no perfect matching: {0}")]
    NoPerfectMatching(String),
    #[error("too large for enumeration: more than {cap} matchings")]
    TooLarge { cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ill-conditioned weights: interpolation residual {residual:.3e} exceeds {tolerance:.1e}")]
    IllConditioned { residual: f64, tolerance: f64 },
    #[error("sign assignment inconsistent: {0}")]
    SignAssignment(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DimerError {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            DimerError::IllConditioned { .. }
                | DimerError::NonConvergence(_)
                | DimerError::Singular(_)
                | DimerError::Indeterminate(_)
                | DimerError::SignAssignment(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, DimerError>;
