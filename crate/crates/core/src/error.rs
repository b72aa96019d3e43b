use thiserror::Error;

/// Errors raised by grid construction, transforms, norms and operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    InvalidGridSize(usize),
    #[error("grid period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("inputs live on different grids")]
    GridMismatch,
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("dilated Gaussian with lambda={lambda} does not decay inside the grid (boundary value {boundary:e})")]
    Aliasing { lambda: f64, boundary: f64 },
    #[error("Hermite index {n} exceeds the resolution guard {max}")]
    HermiteResolution { n: usize, max: usize },
    #[error("window is identically zero")]
    ZeroWindow,
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("not a frame at this resolution: lower frame bound {0:e}")]
    NotAFrame(f64),
    #[error("frame bounds have not been computed for this Gabor system")]
    FrameNotVerified,
    #[error("exponent must lie in (0, inf], got {0}")]
    InvalidExponent(f64),
    #[error("weight {kind} cannot be evaluated at a point of dimension {dim}")]
    WeightDimension { kind: &'static str, dim: usize },
    #[error("Wigner resampling would discard {0:e} of the lag energy")]
    ResampleEnergy(f64),
    #[error("singular value decomposition did not converge")]
    Decomposition,
    #[error("inadmissible index tuple: {0}")]
    InadmissibleIndices(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Errors caused by invalid inputs rather than by a numerical outcome.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidGridSize(_)
                | Error::InvalidPeriod(_)
                | Error::Aliasing { .. }
                | Error::HermiteResolution { .. }
                | Error::InvalidLattice(_)
                | Error::InvalidExponent(_)
                | Error::InadmissibleIndices(_)
                | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Validates an exponent in `(0, inf]`.
pub fn check_exponent(p: f64) -> Result<f64> {
    if p > 0.0 && !p.is_nan() {
        Ok(p)
    } else {
        Err(Error::InvalidExponent(p))
    }
}
