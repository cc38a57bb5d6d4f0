use thiserror::Error;

use crate::fiber::FiberClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("function has {found} values but the graph has {expected} vertices")]
    SizeMismatch { expected: usize, found: usize },

    #[error("vertex {vertex} is out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("exponent s = {0} must exceed 1")]
    ExponentTooSmall(f64),

    #[error("norm index θ = {0} must be at least 1")]
    NormIndexTooSmall(f64),

    #[error("embedding into L^θ is only claimed for θ ≥ p (θ = {theta}, p = {p})")]
    EmbeddingIndexBelowP { theta: f64, p: f64 },

    #[error("value at vertex {vertex} is {value}; a strictly positive function is required")]
    NonPositive { vertex: usize, value: f64 },

    #[error("value at vertex {vertex} is {value}; a nonnegative function is required")]
    Negative { vertex: usize, value: f64 },

    #[error("fiber parameter t = {0} must be positive")]
    NonPositiveScale(f64),

    #[error("direction is identically zero")]
    DegenerateDirection,

    #[error("fibering derivative has no zero (λ∫g u^(α+1) dμ ≤ 0)")]
    NoStationary,

    #[error("fiber has no transversal root pair (classification {0:?})")]
    NoRootPair(FiberClass),

    #[error("λ = {lambda} is outside the admissible range {range}")]
    LambdaOutOfRange { lambda: f64, range: String },

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("invalid coefficient fields: {0}")]
    InvalidCoefficients(String),

    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
