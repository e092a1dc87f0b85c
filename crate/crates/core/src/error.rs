use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors or matrices that must agree in size do not.
    DimensionMismatch { expected: usize, found: usize },
    /// An index is outside `0..len`.
    IndexOutOfRange { index: usize, len: usize },
    /// A scalar or count argument violates its precondition.
    InvalidArgument(&'static str),
    /// Every row of the coreset problem is zero, so no vertex exists.
    DegenerateProblem,
    /// The target vector `r` is zero, so GIGA has no direction to follow.
    ZeroTarget,
    /// A matrix expected to be symmetric is not.
    NotSymmetric,
    /// Cholesky factorization hit a non-positive pivot.
    NotPositiveDefinite,
    /// Classification needs at least two distinct labels.
    SingleClass,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DegenerateProblem => write!(f, "degenerate coreset problem: all rows are zero"),
            Error::ZeroTarget => write!(f, "degenerate coreset problem: target vector is zero"),
            Error::NotSymmetric => write!(f, "matrix is not symmetric"),
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::SingleClass => write!(f, "labels contain fewer than two classes"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
