use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a group element: leading coefficient a_1 is zero")]
    NotGroupElement,
    #[error("empty coefficient vector (jet order must be at least 1)")]
    EmptyReparam,
    #[error("jet order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bracket left the span of the basis (closure violated at k={k})")]
    ClosureViolation { k: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("jet is not regular (first column is zero)")]
    NonRegularJet,
    #[error("zero Plücker vector has no projective class")]
    ZeroPlucker,
    #[error("z-point needs k <= n (got k={k}, n={n})")]
    KExceedsN { k: usize, n: usize },
    #[error(
        "resource cap exceeded at (k={k}, n={n}, m={m}): {size} monomials > cap {cap}"
    )]
    CapExceeded {
        k: usize,
        n: usize,
        m: usize,
        size: usize,
        cap: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}
