//! Exact computer algebra for Leavitt path algebras of finite directed
//! multigraphs.
//!
//! The crate has three layers:
//!
//! * [`quiver`] — the graph model: parsing, sinks/sources, cycle
//!   enumeration, exits, reachability, cofinality, exact path counting.
//! * [`element`] / [`rewrite`] — the algebra engine: canonical normal forms
//!   for words in vertices, edges, and ghost edges under the Cuntz–Krieger
//!   relations, with grading, involution, and basis enumeration over exact
//!   scalars ([`scalar`]).
//! * [`localglobal`], [`structure`], [`dualgraph`] — the theorem machinery:
//!   the finite companion graph built from an edge set together with the
//!   subalgebra embedding and its direct-sum decomposition, matricial
//!   shapes, von Neumann regularity witnesses, direct finiteness, graded
//!   ideals, Bézout verification, and dual-graph invariants.
//!
//! Everything is deterministic: set-valued outputs are sorted, randomized
//! searches take explicit seeds, and all arithmetic is exact.

pub mod dualgraph;
pub mod element;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod localglobal;
pub mod quiver;
pub mod report;
pub mod rewrite;
pub mod scalar;
pub mod structure;

pub use element::{Element, Monomial};
pub use error::{AlgebraError, DualError, GraphError, LocalGlobalError, StructureError};
pub use quiver::{Cycle, EdgeIx, Graph, GraphRef, Path, VertexIx};
pub use report::{Check, CheckStatus, Report};
pub use scalar::{FieldSpec, Scalar};
