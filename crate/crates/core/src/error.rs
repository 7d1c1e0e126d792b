use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical input is outside its admissible range.
    #[error("{field}: {detail}")]
    Domain { field: &'static str, detail: String },

    /// The angle-domain state matrix has a singular modal block, so the
    /// zero-phase hold cannot form `A_w^-1 B_w`.
    #[error("state matrix is singular in mode {mode}; the ZOH hold needs every mode to be damped and non-rigid")]
    SingularMode { mode: usize },

    #[error("feedback matrix I + a_p*S*D_L is singular at a_p = {axial_depth:e} m (rcond estimate {rcond:e})")]
    IllConditioned { axial_depth: f64, rcond: f64 },

    /// `I - A_L` (or `I - Phi`) cannot be inverted.
    #[error("steady state does not exist: {0}")]
    NoSteadyState(&'static str),

    #[error("eigenvalue iteration failed to converge on a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },

    #[error("time-marching solution diverged in tooth period {period}")]
    Divergence { period: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            field,
            detail: detail.into(),
        }
    }
}
