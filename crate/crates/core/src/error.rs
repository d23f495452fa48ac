use thiserror::Error;

/// Errors raised by the geometry, group and search routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero has no multiplicative order")]
    ZeroHasNoOrder,
    #[error("code {code} is not an element of GF({size})")]
    InvalidElement { code: u32, size: u32 },
    #[error("polynomial {modulus:#b} is not irreducible of degree {k} over GF(2)")]
    Reducible { k: u32, modulus: u32 },
    #[error("unsupported extension degree {0}")]
    UnsupportedDegree(u32),
    #[error("unsupported field order q = {0}")]
    UnsupportedOrder(u32),
    #[error("q = {0} needs the long-running flag")]
    LongRunning(u32),
    #[error("the two points coincide")]
    EqualPoints,
    #[error("the two lines coincide")]
    IdenticalLines,
    #[error("vectors do not span a {0}-dimensional subspace")]
    Rank(usize),
    #[error("point {point} does not lie on plane {plane}")]
    NotAFlag { point: u32, plane: u32 },
    #[error("line {line} does not lie in plane {plane}")]
    LineNotInPlane { line: u32, plane: u32 },
    #[error("line index {0} out of range")]
    InvalidLine(u32),
    #[error("line {0} is not a member of the set")]
    LineNotInSet(u32),
    #[error("duplicate line {0}")]
    DuplicateLine(u32),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("quadratic form is not hyperbolic")]
    NotHyperbolic,
    #[error("group closure exceeded {0} elements")]
    GroupTooLarge(usize),
    #[error("domain is not invariant: line {0} escapes")]
    NotInvariant(u32),
    #[error("graph has {n} vertices, above the cap of {cap}")]
    GraphTooLarge { n: usize, cap: usize },
    #[error("automorphism group order overflows")]
    OrderOverflow,
    #[error("clique {0:?} is neither concurrent nor coplanar")]
    StrayClique(Vec<u32>),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
