use alloc::string::String;

/// Errors raised by the algebraic and dynamical routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field F_{p}^{k} is too large for single-word element encoding")]
    FieldTooLarge { p: u64, k: usize },
    #[error("extension degree must be at least 1")]
    ZeroExtensionDegree,
    #[error("polynomial is not monic irreducible: {0}")]
    NotIrreducible(String),
    #[error("field element {0} is out of range")]
    InvalidElement(u64),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("degenerate map: numerator and denominator share a root (resultant is zero)")]
    DegenerateMap,
    #[error("map degree {0} is below 2")]
    DegreeTooSmall(usize),
    #[error("inseparable map: P'Q - PQ' vanishes identically")]
    InseparableMap,
    #[error("characteristic {p} divides the degree {d}")]
    CharDividesDegree { p: u64, d: usize },
    #[error("{what} exceeded its cap of {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("operation requires a closed point")]
    NotClosedPoint,
    #[error("point is not in the requested fiber")]
    PointNotInFiber,
    #[error("points do not form a periodic cycle of the map")]
    NotACycle,
    #[error("the zero function has no valuation")]
    ZeroFunction,
    #[error("point is not tame")]
    NotTame,
    #[error("branch parameter must be positive")]
    InvalidParameter,
    #[error("good reduction fails: p-adic valuation of the resultant is {valuation}")]
    GoodReductionFailure { valuation: u64 },
    #[error("Hensel lifting failed at a nominally simple root")]
    LiftFailure,
    #[error("ideal is not cofinite: colength did not stabilize by truncation order {cap}")]
    NonCofinite { cap: usize },
    #[error("invalid germ: {0}")]
    InvalidGerm(&'static str),
    #[error("unsupported point: {0}")]
    UnsupportedPoint(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
