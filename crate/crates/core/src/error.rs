//! Error types shared across the crate.

use thiserror::Error;

/// Graph construction, parsing, and path errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("unknown vertex `{0}`")]
    NoSuchVertex(String),
    #[error("unknown edge `{0}`")]
    NoSuchEdge(String),
    #[error("invalid id `{0}`")]
    InvalidId(String),
    #[error("edge sequence is not composable at position {0}")]
    NotComposable(usize),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("infinitely many paths into `{0}`: a cycle reaches it")]
    InfinitePathCount(String),
    #[error("path count exceeds the representable range")]
    PathCountOverflow,
}

/// Algebra-engine errors: bad generators, mismatched contexts, scalar misuse.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown generator id `{0}`")]
    UnknownGenerator(String),
    #[error("elements belong to different graphs")]
    GraphMismatch,
    #[error("elements belong to different coefficient fields")]
    FieldMismatch,
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u32),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("empty word")]
    EmptyWord,
    #[error("expression error at byte {position}: {msg}")]
    Expr { position: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors from the subalgebra machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalGlobalError {
    #[error("edge `{0}` is not an edge of the graph")]
    UnknownEdgeInF(String),
    #[error("zero element in input")]
    ZeroInput,
    #[error("cycle visits non-edge-type vertex `{0}`")]
    NonEdgeTypeCycle(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Errors from the structure-theorem verifiers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("cycle `{0}` has an exit; the shape theorem does not apply")]
    CycleHasExit(String),
    #[error("graph has a cycle; finite-dimensional method inapplicable")]
    CyclicGraph,
    #[error("element is not homogeneous; graded regularity covers homogeneous elements only")]
    NonHomogeneous,
    #[error("search exhausted after {0} trials")]
    SearchExhausted(usize),
    #[error("vertex `{0}` does not carry a single-loop component")]
    NotSingleLoop(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors from the dual-graph constructions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualError {
    #[error("not a subgraph: {0}")]
    NotASubgraph(String),
    #[error("id collision in dual construction: `{0}`")]
    NameCollision(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
