//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generator list is empty")]
    EmptyGeneratorList,
    #[error("generator {index} is an empty simplex")]
    EmptySimplex { index: usize },
    #[error("duplicate vertex `{label}` inside one generator")]
    DuplicateVertexInGenerator { label: String },
    #[error("unknown vertex label `{label}`")]
    UnknownVertex { label: String },
    #[error("skeleton rank must be at least 1")]
    InvalidRank,
    #[error("face enumeration exceeds cap of {cap} simplices")]
    FaceCapExceeded { cap: usize },
    #[error("vertex enumeration exceeds cap of {cap}")]
    VertexCapExceeded { cap: usize },
    #[error("separation condition fails: sigma({x}) is contained in sigma({y})")]
    SeparationFails { x: String, y: String },
    #[error("both nerve conditions must hold: {reason}")]
    ConditionsFail { reason: String },
    #[error("{0} is not a maximal simplex of the nerve")]
    NotMaximalInNerve(String),
    #[error("vertex map is not a simplicial automorphism: {reason}")]
    NotAnAutomorphism { reason: String },
    #[error("`{0}` is not a simplex of the complex")]
    NotASimplex(String),
    #[error("ambient rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("vector dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("intersection matrix is not symmetric at ({a}, {b})")]
    AsymmetricMatrix { a: String, b: String },
    #[error("intersection matrix has non-zero diagonal at {0}")]
    NonzeroDiagonal(String),
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u32),
    #[error("census genus must lie in 2..=4, got {0}")]
    GenusOutOfRange(u32),
    #[error("relabeling does not preserve the intersection matrix at ({a}, {b})")]
    NotIntersectionPreserving { a: String, b: String },
    #[error("multitwist exponent for `{0}` must be non-zero")]
    ZeroExponent(String),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}
