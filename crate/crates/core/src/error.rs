use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `x_n = 0`: the digit is undefined and the orbit stops here.
    #[error("last coordinate is zero; digit undefined")]
    ZeroLastCoordinate,
    #[error("first coordinate is zero")]
    ZeroFirstCoordinate,
    #[error("digit does not fit in 64 bits")]
    DigitOverflow,
    #[error("point is not in the simplex: {0}")]
    NotInSimplex(String),
    #[error("vector is not in the cone x_0 > x_1 > ... > x_n > 0")]
    NotInCone,
    #[error("zero vector")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("bit sequence ends inside a run of ones")]
    IncompleteBlock,
    #[error("cell matrix is singular")]
    SingularCell,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("period is not contracting: {0}")]
    NonContractingPeriod(String),
    #[error("pole hit: denominator ({0}) vanishes")]
    PoleHit(String),
    #[error("point on the boundary of the simplex")]
    BoundaryPoint,
    #[error("transfer series does not converge at this point (x_(n-1) = 0)")]
    NonConvergent,
    #[error("orbit terminated after {0} steps")]
    OrbitTerminated(usize),
    #[error("no block of zeros found within {0} digits")]
    NoJumpFound(usize),
    #[error("parse error: {0}")]
    Parse(String),
}
