//! Dual-graph constructions: the usual dual D(E) on the edge set, the dual
//! of a subgraph F inside E, the dual graph d(E) = D_E(E), and
//! invariant-level comparison of a graph against its duals.
//!
//! Naming: an edge of the inner dual D(F) joining edge-vertices e and f is
//! named `e.f`; the edges that connect an edge-vertex to one of the adjoined
//! vertices keep their original edge id (they live in the edge namespace, so
//! no clash with the vertex of the same name).

use std::collections::BTreeSet;

use crate::element::dimension;
use crate::error::{DualError, GraphError};
use crate::quiver::{no_cycle_has_exit, EdgeIx, Graph, GraphRef, VertexIx};
use crate::report::Report;
use crate::structure::matricial_shape;

/// A subgraph: a vertex subset and an edge subset whose endpoints stay
/// inside the vertex subset.
#[derive(Debug, Clone)]
pub struct SubgraphSpec {
    pub vertices: BTreeSet<VertexIx>,
    pub edges: BTreeSet<EdgeIx>,
}

impl SubgraphSpec {
    pub fn new(
        g: &Graph,
        vertices: BTreeSet<VertexIx>,
        edges: BTreeSet<EdgeIx>,
    ) -> Result<SubgraphSpec, DualError> {
        for &e in &edges {
            if !vertices.contains(&g.src(e)) || !vertices.contains(&g.dst(e)) {
                return Err(DualError::NotASubgraph(format!(
                    "edge `{}` leaves the vertex subset",
                    g.edge_name(e)
                )));
            }
        }
        Ok(SubgraphSpec { vertices, edges })
    }

    pub fn whole(g: &Graph) -> SubgraphSpec {
        SubgraphSpec { vertices: g.vertices().collect(), edges: g.edges().collect() }
    }

    pub fn empty() -> SubgraphSpec {
        SubgraphSpec { vertices: BTreeSet::new(), edges: BTreeSet::new() }
    }
}

fn build_checked(builder: crate::quiver::GraphBuilder) -> Result<Graph, DualError> {
    builder.build().map_err(|e| match e {
        GraphError::DuplicateVertex(id) | GraphError::DuplicateEdge(id) => {
            DualError::NameCollision(id)
        }
        other => DualError::Graph(other),
    })
}

/// The usual dual: vertices are the edges of `g`; each composable pair e,f
/// becomes an edge `e.f` from e to f.
pub fn usual_dual(g: &Graph) -> Result<Graph, DualError> {
    let mut builder = Graph::builder();
    for e in g.edges() {
        builder.vertex(g.edge_name(e));
    }
    for e in g.edges() {
        for f in g.edges() {
            if g.dst(e) == g.src(f) {
                builder.edge(
                    format!("{}.{}", g.edge_name(e), g.edge_name(f)),
                    g.edge_name(e),
                    g.edge_name(f),
                );
            }
        }
    }
    build_checked(builder)
}

/// The dual of a subgraph F in E: the inner dual D(F) together with the
/// F-sink vertices (F1) and the vertices emitting edges both inside and
/// outside F (F2), re-attached along the F-edges that range into them.
pub fn dual_in(g: &Graph, f: &SubgraphSpec) -> Result<Graph, DualError> {
    // validate the spec against this graph
    for &e in &f.edges {
        if !f.vertices.contains(&g.src(e)) || !f.vertices.contains(&g.dst(e)) {
            return Err(DualError::NotASubgraph(format!(
                "edge `{}` leaves the vertex subset",
                g.edge_name(e)
            )));
        }
    }

    // F1: subgraph vertices emitting no F-edge; F2: vertices emitting both
    // an F-edge and a non-F-edge
    let f1: BTreeSet<VertexIx> = f
        .vertices
        .iter()
        .copied()
        .filter(|&v| !g.out_edges(v).iter().any(|e| f.edges.contains(e)))
        .collect();
    let f2: BTreeSet<VertexIx> = g
        .vertices()
        .filter(|&v| {
            let out = g.out_edges(v);
            out.iter().any(|e| f.edges.contains(e)) && out.iter().any(|e| !f.edges.contains(e))
        })
        .collect();

    let mut builder = Graph::builder();
    for &e in &f.edges {
        builder.vertex(g.edge_name(e));
    }
    for &v in f1.iter().chain(f2.iter()) {
        builder.vertex(g.vertex_name(v));
    }
    // inner dual edges
    for &e in &f.edges {
        for &h in &f.edges {
            if g.dst(e) == g.src(h) {
                builder.edge(
                    format!("{}.{}", g.edge_name(e), g.edge_name(h)),
                    g.edge_name(e),
                    g.edge_name(h),
                );
            }
        }
    }
    // re-attachment edges keep their id: from the edge-vertex to the range
    for &e in &f.edges {
        let r = g.dst(e);
        if f1.contains(&r) || f2.contains(&r) {
            builder.edge(g.edge_name(e), g.edge_name(e), g.vertex_name(r));
        }
    }
    build_checked(builder)
}

/// The dual graph d(E) = the dual of E in itself.
pub fn dual(g: &Graph) -> Result<Graph, DualError> {
    dual_in(g, &SubgraphSpec::whole(g))
}

/// Compares isomorphism invariants of `g` against d(g), and against D(g)
/// when `g` has no sinks (where the two duals coincide and the usual-dual
/// isomorphism applies). Inapplicable comparisons are omitted.
pub fn compare_invariants(g: &GraphRef) -> Result<Report, DualError> {
    let mut report = Report::new();
    let d = std::sync::Arc::new(dual(g)?);

    compare_pair(&mut report, "d", g, &d);

    if g.sinks().is_empty() {
        let ud = std::sync::Arc::new(usual_dual(g)?);
        compare_pair(&mut report, "D", g, &ud);
        // with no sinks the adjoined parts are empty and the duals agree
        report.check("duals_coincide_without_sinks", *d == *ud, || {
            format!("d(E) = {} vs D(E) = {}", d.to_text(), ud.to_text())
        });
    }
    Ok(report)
}

fn compare_pair(report: &mut Report, tag: &str, g: &GraphRef, other: &GraphRef) {
    report.check(
        format!("acyclic({tag})"),
        g.is_acyclic() == other.is_acyclic(),
        || format!("{} vs {}", g.is_acyclic(), other.is_acyclic()),
    );
    let (dg, dd) = (dimension(g), dimension(other));
    report.check(format!("dimension({tag})"), dg == dd, || format!("{dg} vs {dd}"));
    if no_cycle_has_exit(g) && no_cycle_has_exit(other) {
        match (matricial_shape(g), matricial_shape(other)) {
            (Ok(a), Ok(b)) => {
                report.check(format!("matricial_shape({tag})"), a == b, || {
                    format!("{:?} vs {:?}", a, b)
                });
            }
            (Err(e), _) | (_, Err(e)) => {
                report.fail(format!("matricial_shape({tag})"), e.to_string())
            }
        }
    }
    report.check(
        format!("no_exit({tag})"),
        no_cycle_has_exit(g) == no_cycle_has_exit(other),
        || "direct finiteness differs".to_string(),
    );
}
