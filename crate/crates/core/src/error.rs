use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cutoff {cutoff} too small: truncated tail mass {tail_mass:e} exceeds {limit:e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail_mass: f64,
        limit: f64,
    },

    #[error("unnormalized Hermite polynomial H_{n}({x}) overflows; use the normalized log form")]
    HermiteOverflow { n: usize, x: f64 },

    #[error("unphysical reservoir: {0}")]
    UnphysicalReservoir(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected cutoff {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("step {dtau:e} violates stability guard (dtau * max|coefficient| = {product:.3} >= 0.5)")]
    StabilityGuard { dtau: f64, product: f64 },

    #[error("trace error {drift:e} at tau = {tau} exceeds 1e-6")]
    TraceBlowup { tau: f64, drift: f64 },

    #[error("non-finite density matrix entry at tau = {tau}")]
    NonFinite { tau: f64 },

    #[error("adaptive step size underflow at tau = {tau} (h = {h:e})")]
    StepUnderflow { tau: f64, h: f64 },

    #[error("grid too coarse: halving the spacing moved the result by {relative_shift:.3e}")]
    GridTooCoarse { relative_shift: f64 },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
