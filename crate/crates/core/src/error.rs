use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A surface specification violates a geometric invariant.
    #[error("invalid surface parameter `{param}`: {reason}")]
    Surface { param: String, reason: String },

    /// Quadrature resolution below the supported minimum.
    #[error("resolution ({n_theta}, {n_phi}) below minimum (4, 8)")]
    Resolution { n_theta: usize, n_phi: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// The impedance coefficient violates inf Im(eta) > 0.
    #[error("impedance hypothesis violated: min Im = {min_imag:e} (must be > 0)")]
    Impedance { min_imag: f64 },

    #[error("grid does not lie on the sphere of radius {radius}: deviation {deviation:e}")]
    GridMismatch { radius: f64, deviation: f64 },

    #[error("invalid source placement: {0}")]
    Sources(String),

    /// Point evaluation coincides with a source location.
    #[error("evaluation point coincides with source {index}")]
    Singular { index: usize },

    #[error("least-squares rank collapse: effective rank {rank} of {cols}")]
    RankCollapse { rank: usize, cols: usize },

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("expression error at {pos}: {reason}")]
    Expr { pos: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
