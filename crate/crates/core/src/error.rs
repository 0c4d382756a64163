use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("eigensolver did not converge after {iterations} iterations (eigenvalue index {index})")]
    NoConvergence { iterations: usize, index: usize },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("alpha = {alpha} violates periodic boundary conditions for the eigenstate form: {reason}")]
    NonLatticeAlpha { alpha: String, reason: String },

    #[error("unsupported particle number N = {n} for {what}")]
    UnsupportedParticleNumber { n: usize, what: &'static str },

    #[error("sampler acceptance {acceptance:.4} below {floor} after tuning")]
    PathologicalAcceptance { acceptance: f64, floor: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
