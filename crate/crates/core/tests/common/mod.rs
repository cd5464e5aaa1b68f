//! Shared generators for the randomized suites: seeded, deterministic.

use lpa_core::element::{enumerate_basis, Element};
use lpa_core::quiver::{EdgeIx, Graph, GraphRef};
use lpa_core::rewrite::{Generator, RawWord};
use lpa_core::scalar::FieldSpec;
use rand::Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

pub fn rose(n: usize) -> GraphRef {
    let mut b = Graph::builder();
    b.vertex("v");
    for i in 1..=n {
        b.edge(format!("y{i}"), "v", "v");
    }
    Arc::new(b.build().unwrap())
}

pub fn single_edge() -> GraphRef {
    let mut b = Graph::builder();
    b.vertex("v").vertex("w").edge("f", "v", "w");
    Arc::new(b.build().unwrap())
}

pub fn clock3() -> GraphRef {
    let mut b = Graph::builder();
    b.vertex("v").vertex("w1").vertex("w2").vertex("w3");
    b.edge("f", "v", "w1").edge("g", "v", "w2").edge("h", "v", "w3");
    Arc::new(b.build().unwrap())
}

/// Two truncation levels of the chain graph: loops f1,g1 at v1; loops f2,g2
/// at v2; e1 from v2 to v1.
pub fn chain2() -> GraphRef {
    let mut b = Graph::builder();
    b.vertex("v1").vertex("v2");
    b.edge("f1", "v1", "v1").edge("g1", "v1", "v1");
    b.edge("f2", "v2", "v2").edge("g2", "v2", "v2");
    b.edge("e1", "v2", "v1");
    Arc::new(b.build().unwrap())
}

/// Uniform multigraph on 1..=max_v vertices with 0..=max_e edges.
pub fn random_graph<R: Rng>(rng: &mut R, max_v: usize, max_e: usize) -> GraphRef {
    let nv = rng.random_range(1..=max_v);
    let ne = rng.random_range(0..=max_e);
    let mut b = Graph::builder();
    for i in 0..nv {
        b.vertex(format!("v{i}"));
    }
    for i in 0..ne {
        let s = rng.random_range(0..nv);
        let d = rng.random_range(0..nv);
        b.edge(format!("e{i}"), format!("v{s}"), format!("v{d}"));
    }
    Arc::new(b.build().unwrap())
}

/// Uniform DAG: edges only run from lower-numbered to higher-numbered
/// vertices.
pub fn random_acyclic_graph<R: Rng>(rng: &mut R, max_v: usize, max_e: usize) -> GraphRef {
    let nv = rng.random_range(2..=max_v.max(2));
    let ne = rng.random_range(0..=max_e);
    let mut b = Graph::builder();
    for i in 0..nv {
        b.vertex(format!("v{i}"));
    }
    for i in 0..ne {
        let s = rng.random_range(0..nv - 1);
        let d = rng.random_range(s + 1..nv);
        b.edge(format!("e{i}"), format!("v{s}"), format!("v{d}"));
    }
    Arc::new(b.build().unwrap())
}

/// A random subset of the graph's edges.
pub fn random_edge_subset<R: Rng>(rng: &mut R, g: &GraphRef) -> BTreeSet<EdgeIx> {
    g.edges().filter(|_| rng.random_bool(0.5)).collect()
}

/// A nonempty random subset of the graph's edges (when the graph has any).
pub fn random_nonempty_edge_subset<R: Rng>(rng: &mut R, g: &GraphRef) -> BTreeSet<EdgeIx> {
    let all: Vec<EdgeIx> = g.edges().collect();
    if all.is_empty() {
        return BTreeSet::new();
    }
    loop {
        let s = random_edge_subset(rng, g);
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random element supported on canonical monomials of total length at
/// most `max_len`, with at most `max_terms` terms and coefficients in
/// [-3, 3].
pub fn random_element<R: Rng>(
    rng: &mut R,
    g: &GraphRef,
    field: FieldSpec,
    max_terms: usize,
    max_len: usize,
) -> Element {
    let basis = enumerate_basis(g, max_len);
    let mut acc = Element::zero(g.clone(), field);
    if basis.is_empty() {
        return acc;
    }
    let terms = rng.random_range(1..=max_terms);
    for _ in 0..terms {
        let m = basis[rng.random_range(0..basis.len())].clone();
        let k = rng.random_range(-3i64..=3);
        if k != 0 {
            let t = Element::from_monomial(g.clone(), field, m, field.integer(k));
            acc = acc.add(&t).expect("same graph");
        }
    }
    acc
}

/// A nonzero random element (resamples until nonzero).
pub fn random_nonzero_element<R: Rng>(
    rng: &mut R,
    g: &GraphRef,
    field: FieldSpec,
    max_terms: usize,
    max_len: usize,
) -> Element {
    loop {
        let a = random_element(rng, g, field, max_terms, max_len);
        if !a.is_zero() {
            return a;
        }
    }
}

/// A uniformly random word over the graph's generators.
pub fn random_word<R: Rng>(rng: &mut R, g: &GraphRef, max_len: usize) -> RawWord {
    let len = rng.random_range(1..=max_len);
    let nv = g.vertex_count() as u32;
    let ne = g.edge_count() as u32;
    (0..len)
        .map(|_| {
            if ne == 0 || rng.random_bool(0.2) {
                Generator::Vertex(lpa_core::quiver::VertexIx(rng.random_range(0..nv)))
            } else if rng.random_bool(0.5) {
                Generator::Edge(lpa_core::quiver::EdgeIx(rng.random_range(0..ne)))
            } else {
                Generator::Ghost(lpa_core::quiver::EdgeIx(rng.random_range(0..ne)))
            }
        })
        .collect()
}
