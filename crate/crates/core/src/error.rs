use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("non-finite integrand value {value} at node {node}")]
    NonFiniteIntegrand { node: f64, value: f64 },

    #[error("jacobian is numerically singular at iteration {iteration}")]
    DegenerateRoot { iteration: usize },

    #[error("conics are identical; infinitely many intersections")]
    IdenticalConics,

    #[error("resultant vanishes identically; conics share a common component")]
    ResultantVanishes,

    #[error("domain too short: estimated tail contribution {tail:e} exceeds {limit:e}")]
    InsufficientDomain { tail: f64, limit: f64 },

    #[error("insufficient tail: found {found} envelope extrema, need {needed}")]
    InsufficientTail { found: usize, needed: usize },

    #[error("shooting window: every trial integration blew up or failed ({0})")]
    ShootingWindow(String),

    #[error("quadrature did not settle under refinement: successive estimates differ by {delta:e}")]
    QuadratureNotConverged { delta: f64 },

    #[error("singularity resolution insufficient: divergence term {value:e} exceeds {limit:e}")]
    SingularityResolution { value: f64, limit: f64 },

    #[error("singular exponent: 5p = n + 5 at n = {n}, p = {p}")]
    SingularExponent { n: f64, p: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
