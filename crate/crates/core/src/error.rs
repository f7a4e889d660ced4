use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomoError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Both `mu` and `nu` are below the small-parameter threshold.
    #[error("degenerate tomogram point (mu = {mu}, nu = {nu})")]
    Degenerate { mu: f64, nu: f64 },

    /// A lookup into sampled tomogram data fell outside the sampled domain.
    #[error("lookup at (x = {x}, nu = {nu}) lies outside the sampled domain")]
    Domain { x: f64, nu: f64 },

    #[error("singular frequency: omega_x must be non-zero")]
    SingularFrequency,

    /// The reconstruction anchor psi(0) vanishes, so the autocorrelation
    /// slices cannot be divided through.
    #[error("reconstruction anchor vanishes: |psi(0)|^2 estimate = {0:e}")]
    NodeAtOrigin(f64),

    /// The nu = 0 plane needed as reconstruction anchor was not supplied.
    #[error("no nu = 0 plane supplied; the anchor slice psi(0)psi*(0) is required")]
    MissingAnchor,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, TomoError>;

pub(crate) fn invalid(msg: impl Into<String>) -> TomoError {
    TomoError::InvalidInput(msg.into())
}
