//! Elements of the Leavitt path algebra of a finite graph in canonical
//! normal form.
//!
//! The spanning monomials are products `p q*` of a real path and a reversed
//! ghost path meeting at a common range vertex. For every non-sink vertex we
//! fix a *special* edge (the lexicographically smallest outgoing edge) and
//! orient the relation
//!
//! ```text
//! v = sum over s(e) = v of e e*
//! ```
//!
//! so that the pair of special edges at a monomial's junction rewrites into
//! the remaining terms. Monomials whose real and ghost parts do not both end
//! in the special edge of the junction's source are *canonical*; they form
//! the standard basis of the algebra, and every element here is a finitely
//! supported exact-scalar combination of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::quiver::{EdgeIx, Graph, GraphRef, Path, VertexIx};
use crate::scalar::{display_is_negative, FieldSpec, Scalar};
use serde_json::json;

/// The special edge of a vertex: the smallest edge it emits, if any.
pub fn special_edge(g: &Graph, v: VertexIx) -> Option<EdgeIx> {
    g.out_edges(v).first().copied()
}

/// Special edges of every non-sink vertex.
pub fn special_edges(g: &Graph) -> BTreeMap<VertexIx, EdgeIx> {
    g.vertices().filter_map(|v| special_edge(g, v).map(|e| (v, e))).collect()
}

/// A spanning monomial `p q*` with `r(p) = r(q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    real: Path,
    ghost: Path,
}

impl Monomial {
    pub fn new(real: Path, ghost: Path) -> Result<Monomial, AlgebraError> {
        if real.range() != ghost.range() {
            return Err(AlgebraError::GraphMismatch);
        }
        Ok(Monomial { real, ghost })
    }

    pub fn vertex(v: VertexIx) -> Monomial {
        Monomial { real: Path::trivial(v), ghost: Path::trivial(v) }
    }

    pub fn real(&self) -> &Path {
        &self.real
    }

    pub fn ghost(&self) -> &Path {
        &self.ghost
    }

    /// `|p| - |q|`, the integer grade.
    pub fn degree(&self) -> i64 {
        self.real.len() as i64 - self.ghost.len() as i64
    }

    pub fn total_len(&self) -> usize {
        self.real.len() + self.ghost.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.real.is_trivial() && self.ghost.is_trivial()
    }

    /// Canonical monomials do not end, on both sides of the junction, in the
    /// same special edge.
    pub fn is_canonical(&self, g: &Graph) -> bool {
        match (self.real.edges().last(), self.ghost.edges().last()) {
            (Some(&a), Some(&b)) => a != b || special_edge(g, g.src(a)) != Some(a),
            _ => true,
        }
    }

    /// Word form: real edges left to right, then ghost edges reversed and
    /// starred; a vertex for the trivial monomial.
    pub fn display(&self, g: &Graph) -> String {
        if self.is_vertex() {
            return g.vertex_name(self.real.source()).to_string();
        }
        let mut parts: Vec<String> =
            self.real.edges().iter().map(|&e| g.edge_name(e).to_string()).collect();
        parts.extend(self.ghost.edges().iter().rev().map(|&e| format!("{}*", g.edge_name(e))));
        parts.join(" ")
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.real.len(), self.ghost.len(), self.real.edges(), self.ghost.edges(), self.real.source(), self.ghost.source())
            .cmp(&(
                other.real.len(),
                other.ghost.len(),
                other.real.edges(),
                other.ghost.edges(),
                other.real.source(),
                other.ghost.source(),
            ))
    }
}

/// A finitely supported combination of canonical monomials over one graph
/// and one coefficient field. Zero keeps its graph so mixed-graph arithmetic
/// is always rejected. Immutable; operations return fresh values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    graph: GraphRef,
    field: FieldSpec,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero(graph: GraphRef, field: FieldSpec) -> Element {
        Element { graph, field, terms: BTreeMap::new() }
    }

    pub fn from_vertex(graph: GraphRef, field: FieldSpec, v: VertexIx) -> Element {
        let one = field.one();
        Element::from_monomial(graph, field, Monomial::vertex(v), one)
    }

    pub fn from_edge(graph: GraphRef, field: FieldSpec, e: EdgeIx) -> Element {
        let m = Monomial {
            real: Path::from_edges(&graph, vec![e]).expect("single edge is a path"),
            ghost: Path::trivial(graph.dst(e)),
        };
        let one = field.one();
        Element::from_monomial(graph, field, m, one)
    }

    pub fn from_ghost(graph: GraphRef, field: FieldSpec, e: EdgeIx) -> Element {
        let m = Monomial {
            real: Path::trivial(graph.dst(e)),
            ghost: Path::from_edges(&graph, vec![e]).expect("single edge is a path"),
        };
        let one = field.one();
        Element::from_monomial(graph, field, m, one)
    }

    /// Builds `c · m`, rewriting `m` into canonical form if needed.
    pub fn from_monomial(graph: GraphRef, field: FieldSpec, m: Monomial, c: Scalar) -> Element {
        let mut el = Element::zero(graph, field);
        el.accumulate(m, c);
        el
    }

    pub fn from_path(graph: GraphRef, field: FieldSpec, real: Path, ghost: Path) -> Result<Element, AlgebraError> {
        let m = Monomial::new(real, ghost)?;
        let one = field.one();
        Ok(Element::from_monomial(graph, field, m, one))
    }

    /// The sum of all vertices: the identity of the (finite-graph, hence
    /// unital) algebra.
    pub fn identity(graph: GraphRef, field: FieldSpec) -> Element {
        let mut el = Element::zero(graph.clone(), field);
        for v in graph.vertices() {
            el.accumulate(Monomial::vertex(v), field.one());
        }
        el
    }

    pub fn graph(&self) -> &GraphRef {
        &self.graph
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Largest `|p| + |q|` over the support; 0 for the zero element.
    pub fn max_total_len(&self) -> usize {
        self.terms.keys().map(|m| m.total_len()).max().unwrap_or(0)
    }

    fn same_context(&self, other: &Element) -> Result<(), AlgebraError> {
        if !Arc::ptr_eq(&self.graph, &other.graph) && *self.graph != *other.graph {
            return Err(AlgebraError::GraphMismatch);
        }
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch);
        }
        Ok(())
    }

    /// Adds `c · m` to the accumulator, rewriting `m` to canonical form.
    fn accumulate(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let mut stack = vec![(m, false)];
        while let Some((m, negated)) = stack.pop() {
            match junction_rewrite(&self.graph, &m) {
                None => {
                    let coeff = if negated { c.neg() } else { c.clone() };
                    let new_val = match self.terms.get(&m) {
                        Some(old) => old.add(&coeff),
                        None => coeff,
                    };
                    if new_val.is_zero() {
                        self.terms.remove(&m);
                    } else {
                        self.terms.insert(m, new_val);
                    }
                }
                Some((head, tail)) => {
                    stack.push((head, negated));
                    for t in tail {
                        stack.push((t, !negated));
                    }
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let entry = out.terms.entry(m.clone()).or_insert_with(|| out.field.zero());
            *entry = entry.add(c);
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        Element { graph: self.graph.clone(), field: self.field, terms }
    }

    pub fn scale(&self, k: &Scalar) -> Result<Element, AlgebraError> {
        if k.field() != self.field {
            return Err(AlgebraError::FieldMismatch);
        }
        if k.is_zero() {
            return Ok(Element::zero(self.graph.clone(), self.field));
        }
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect();
        Ok(Element { graph: self.graph.clone(), field: self.field, terms })
    }

    pub fn multiply(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.same_context(other)?;
        let mut out = Element::zero(self.graph.clone(), self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(m) = junction_product(&self.graph, m1, m2) {
                    out.accumulate(m, c1.mul(c2));
                }
            }
        }
        Ok(out)
    }

    /// The involution: linear, `(p q*)* = q p*`.
    pub fn adjoint(&self) -> Element {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                // swapping sides preserves canonicity (the junction condition is symmetric)
                (Monomial { real: m.ghost.clone(), ghost: m.real.clone() }, c.clone())
            })
            .collect();
        Element { graph: self.graph.clone(), field: self.field, terms }
    }

    /// Splits into homogeneous components keyed by degree `|p| - |q|`.
    pub fn degree_split(&self) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            let part = out
                .entry(m.degree())
                .or_insert_with(|| Element::zero(self.graph.clone(), self.field));
            part.terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// True iff the support has a single degree (zero counts as homogeneous).
    pub fn is_homogeneous(&self) -> bool {
        self.degree_split().len() <= 1
    }

    /// Vertices `U` such that `u = sum of U` satisfies `u a = a u = a`:
    /// the sources of all real and ghost paths in the support.
    pub fn support_vertices(&self) -> BTreeSet<VertexIx> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            out.insert(m.real.source());
            out.insert(m.ghost.source());
        }
        out
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = display_is_negative(c);
            let abs = if negative { c.neg() } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push_str("- ");
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if !abs.is_one() {
                out.push_str(&abs.to_string());
                out.push(' ');
            }
            out.push_str(&m.display(&self.graph));
        }
        out
    }

    /// JSON form: a list of `{real, ghost, base, coeff}` records in term order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let base = if m.is_vertex() {
                    json!(self.graph.vertex_name(m.real.source()))
                } else {
                    json!(null)
                };
                json!({
                    "real": m.real.edges().iter().map(|&e| self.graph.edge_name(e)).collect::<Vec<_>>(),
                    "ghost": m.ghost.edges().iter().map(|&e| self.graph.edge_name(e)).collect::<Vec<_>>(),
                    "base": base,
                    "coeff": c.coeff_string(),
                })
            })
            .collect();
        json!(terms)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// One oriented rewrite at the junction, if the monomial is non-canonical:
/// `p'γ (q'γ)* -> p' q'* - sum over e != γ at s(γ) of p'e (q'e)*`.
/// Returns the head term and the negated tail terms; the tail terms are
/// already canonical at the junction.
fn junction_rewrite(g: &Graph, m: &Monomial) -> Option<(Monomial, Vec<Monomial>)> {
    let (&a, &b) = match (m.real.edges().last(), m.ghost.edges().last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return None,
    };
    if a != b || special_edge(g, g.src(a)) != Some(a) {
        return None;
    }
    let v = g.src(a);
    let p = m.real.dropping_last(g);
    let q = m.ghost.dropping_last(g);
    let head = Monomial { real: p.clone(), ghost: q.clone() };
    let tail = g
        .out_edges(v)
        .iter()
        .filter(|&&e| e != a)
        .map(|&e| Monomial { real: p.extended(g, e), ghost: q.extended(g, e) })
        .collect();
    Some((head, tail))
}

/// The product of two monomials before canonicalization: the inner `q* r`
/// collapses by prefix comparison (one of `q`, `r` must be a prefix of the
/// other, else the product is zero).
fn junction_product(g: &Graph, m1: &Monomial, m2: &Monomial) -> Option<Monomial> {
    let q = &m1.ghost;
    let r = &m2.real;
    let k = q.len();
    let l = r.len();
    if k == 0 && l == 0 {
        if q.source() != r.source() {
            return None;
        }
        return Some(Monomial { real: m1.real.clone(), ghost: m2.ghost.clone() });
    }
    if k == 0 {
        if r.source() != q.source() {
            return None;
        }
        return Some(Monomial { real: m1.real.concat(g, r), ghost: m2.ghost.clone() });
    }
    if l == 0 {
        if q.source() != r.source() {
            return None;
        }
        return Some(Monomial { real: m1.real.clone(), ghost: m2.ghost.concat(g, q) });
    }
    let shared = k.min(l);
    if q.edges()[..shared] != r.edges()[..shared] {
        return None;
    }
    if k <= l {
        let mut real = m1.real.clone();
        for &e in &r.edges()[k..] {
            real = real.extended(g, e);
        }
        Some(Monomial { real, ghost: m2.ghost.clone() })
    } else {
        let mut ghost = m2.ghost.clone();
        for &e in &q.edges()[l..] {
            ghost = ghost.extended(g, e);
        }
        Some(Monomial { real: m1.real.clone(), ghost })
    }
}

/// All paths of length at most `n`, grouped by length.
pub fn paths_up_to(g: &Graph, n: usize) -> Vec<Vec<Path>> {
    let mut by_len: Vec<Vec<Path>> = vec![g.vertices().map(Path::trivial).collect()];
    for _ in 1..=n {
        let prev = by_len.last().unwrap();
        let mut next = Vec::new();
        for p in prev {
            for &e in g.out_edges(p.range()) {
                next.push(p.extended(g, e));
            }
        }
        if next.is_empty() {
            break;
        }
        by_len.push(next);
    }
    by_len
}

/// All canonical monomials with `|p| + |q| <= n`, in term order.
pub fn enumerate_basis(g: &Graph, n: usize) -> Vec<Monomial> {
    let paths = paths_up_to(g, n);
    // group paths by range vertex
    let mut by_range: BTreeMap<VertexIx, Vec<&Path>> = BTreeMap::new();
    for level in &paths {
        for p in level {
            by_range.entry(p.range()).or_default().push(p);
        }
    }
    let mut out = BTreeSet::new();
    for (_, group) in by_range {
        for &p in &group {
            for &q in &group {
                if p.len() + q.len() > n {
                    continue;
                }
                let m = Monomial { real: p.clone(), ghost: q.clone() };
                if m.is_canonical(g) {
                    out.insert(m);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Length of the longest path, or `None` when the graph has a cycle.
pub fn longest_path_len(g: &Graph) -> Option<usize> {
    if !g.is_acyclic() {
        return None;
    }
    // DAG longest path by iterating lengths to a fixed point
    let n = g.vertex_count();
    let mut dist = vec![0usize; n];
    let mut changed = true;
    let mut rounds = 0usize;
    while changed {
        changed = false;
        rounds += 1;
        assert!(rounds <= n + 1, "acyclic graph converges within |V| rounds");
        for e in g.edges() {
            let cand = dist[g.src(e).idx()] + 1;
            if cand > dist[g.dst(e).idx()] {
                dist[g.dst(e).idx()] = cand;
                changed = true;
            }
        }
    }
    dist.into_iter().max().or(Some(0))
}

/// The full canonical basis of a finite-dimensional (acyclic) algebra, or
/// `None` when the graph has a cycle.
pub fn full_basis(g: &Graph) -> Option<Vec<Monomial>> {
    let l = longest_path_len(g)?;
    Some(enumerate_basis(g, 2 * l))
}

/// The dimension of the algebra over its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Finite(u64),
    Infinite,
}

impl Dimension {
    pub fn is_finite(&self) -> bool {
        matches!(self, Dimension::Finite(_))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::Infinite => write!(f, "infinite"),
        }
    }
}

/// Finite iff the graph is acyclic, in which case the dimension is the sum
/// over sinks of the squared path counts into them.
pub fn dimension(g: &Graph) -> Dimension {
    if !g.is_acyclic() {
        return Dimension::Infinite;
    }
    let mut total: u64 = 0;
    let no_forbidden = BTreeSet::new();
    for w in g.sinks() {
        let c = g.count_paths_into(w, &no_forbidden).expect("acyclic graph has finite path counts");
        total = total
            .checked_add(c.checked_mul(c).expect("dimension fits u64"))
            .expect("dimension fits u64");
    }
    Dimension::Finite(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Graph;

    fn rose(n: usize) -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v");
        for i in 1..=n {
            b.edge(format!("y{i}"), "v", "v");
        }
        Arc::new(b.build().unwrap())
    }

    fn single_edge() -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v").vertex("w").edge("f", "v", "w");
        Arc::new(b.build().unwrap())
    }

    fn clock3() -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v").vertex("w1").vertex("w2").vertex("w3");
        b.edge("f", "v", "w1").edge("g", "v", "w2").edge("h", "v", "w3");
        Arc::new(b.build().unwrap())
    }

    const Q: FieldSpec = FieldSpec::Rational;

    #[test]
    fn special_edges_are_lexicographically_smallest() {
        let g = rose(2);
        let v = g.vertex("v").unwrap();
        assert_eq!(special_edge(&g, v), g.edge("y1"));

        let sink_only = Arc::new(Graph::parse("vertex v\n").unwrap());
        assert!(special_edges(&sink_only).is_empty());

        let mut b = Graph::builder();
        b.vertex("v1").edge("f1", "v1", "v1").edge("g1", "v1", "v1");
        let g = b.build().unwrap();
        assert_eq!(special_edges(&g)[&g.vertex("v1").unwrap()], g.edge("f1").unwrap());
    }

    #[test]
    fn special_pair_rewrites_to_ck2_complement() {
        // y1 y1* on the two-petal rose normalizes to v - y2 y2*
        let g = rose(2);
        let y1 = g.edge("y1").unwrap();
        let e = Element::from_edge(g.clone(), Q, y1);
        let prod = e.multiply(&Element::from_ghost(g.clone(), Q, y1)).unwrap();
        assert_eq!(prod.display(), "v - y2 y2*");

        // adding y2 y2* back gives the vertex, witnessing the relation
        let y2 = g.edge("y2").unwrap();
        let e2 = Element::from_edge(g.clone(), Q, y2);
        let back = prod.add(&e2.multiply(&Element::from_ghost(g.clone(), Q, y2)).unwrap()).unwrap();
        assert_eq!(back, Element::from_vertex(g.clone(), Q, g.vertex("v").unwrap()));
    }

    #[test]
    fn non_special_pair_is_canonical() {
        let g = rose(2);
        let y2 = g.edge("y2").unwrap();
        let e = Element::from_edge(g.clone(), Q, y2);
        let prod = e.multiply(&Element::from_ghost(g.clone(), Q, y2)).unwrap();
        assert_eq!(prod.display(), "y2 y2*");
        assert_eq!(prod.support_size(), 1);
    }

    #[test]
    fn adjoint_is_an_involution() {
        let g = rose(2);
        let y1 = Element::from_edge(g.clone(), Q, g.edge("y1").unwrap());
        assert_eq!(y1.adjoint().display(), "y1*");
        let mix = y1.add(&Element::from_vertex(g.clone(), Q, g.vertex("v").unwrap())).unwrap();
        assert_eq!(mix.adjoint().adjoint(), mix);
        let scaled = mix.scale(&Q.integer(3)).unwrap();
        assert_eq!(scaled.adjoint(), mix.adjoint().scale(&Q.integer(3)).unwrap());
    }

    #[test]
    fn degree_split_collects_grades() {
        let g = rose(1);
        let v = Element::from_vertex(g.clone(), Q, g.vertex("v").unwrap());
        let y1 = Element::from_edge(g.clone(), Q, g.edge("y1").unwrap());
        let sum = v.add(&y1).unwrap();
        let split = sum.degree_split();
        assert_eq!(split.len(), 2);
        assert_eq!(split[&0], v);
        assert_eq!(split[&1], y1);

        let zero = Element::zero(g.clone(), Q);
        assert!(zero.degree_split().is_empty());
    }

    #[test]
    fn multiplication_follows_the_junction_rule() {
        // y1 y1* y1 = y1
        let g = rose(2);
        let y1 = Element::from_edge(g.clone(), Q, g.edge("y1").unwrap());
        let prod = y1.multiply(&y1.adjoint()).unwrap().multiply(&y1).unwrap();
        assert_eq!(prod, y1);

        // v · v = v
        let v = Element::from_vertex(g.clone(), Q, g.vertex("v").unwrap());
        assert_eq!(v.multiply(&v).unwrap(), v);

        // f f* f = f on the single edge graph
        let se = single_edge();
        let f = Element::from_edge(se.clone(), Q, se.edge("f").unwrap());
        let ffsf = f.multiply(&f.adjoint()).unwrap().multiply(&f).unwrap();
        assert_eq!(ffsf, f);
    }

    #[test]
    fn non_composable_products_vanish() {
        let clock = clock3();
        let f = Element::from_edge(clock.clone(), Q, clock.edge("f").unwrap());
        let gch = Element::from_edge(clock.clone(), Q, clock.edge("g").unwrap());
        assert!(f.multiply(&gch).unwrap().is_zero());
    }

    #[test]
    fn mixed_graph_arithmetic_is_rejected() {
        let a = Element::zero(rose(1), Q);
        let b = Element::zero(rose(2), Q);
        assert!(matches!(a.add(&b), Err(AlgebraError::GraphMismatch)));
        let c = Element::zero(rose(1), FieldSpec::fp(5).unwrap());
        assert!(matches!(a.add(&c), Err(AlgebraError::FieldMismatch)));
    }

    /// Brute-force oracle: directly enumerate pairs of paths with a common
    /// range and filter by the canonicity predicate.
    fn brute_force_basis(g: &Graph, n: usize) -> Vec<Monomial> {
        fn all_paths(g: &Graph, n: usize) -> Vec<Path> {
            let mut out: Vec<Path> = g.vertices().map(Path::trivial).collect();
            let mut frontier = out.clone();
            for _ in 0..n {
                let mut next = Vec::new();
                for p in &frontier {
                    for &e in g.out_edges(p.range()) {
                        next.push(p.extended(g, e));
                    }
                }
                out.extend(next.iter().cloned());
                frontier = next;
            }
            out
        }
        let paths = all_paths(g, n);
        let mut set = BTreeSet::new();
        for p in &paths {
            for q in &paths {
                if p.range() == q.range() && p.len() + q.len() <= n {
                    let m = Monomial::new(p.clone(), q.clone()).unwrap();
                    if m.is_canonical(g) {
                        set.insert(m);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    #[test]
    fn basis_enumeration_single_edge() {
        // {v, w, f, f*}: the special pair f f* rewrites to v and is excluded;
        // term order sorts by (|p|, |q|, ids), so f* precedes f
        let g = single_edge();
        let basis = enumerate_basis(&g, 2);
        let names: Vec<String> = basis.iter().map(|m| m.display(&g)).collect();
        assert_eq!(names, vec!["v", "w", "f*", "f"]);
        assert_eq!(basis, brute_force_basis(&g, 2));
    }

    #[test]
    fn basis_enumeration_rose_one_petal() {
        // y1 y1* rewrites to v, so it is not canonical
        let g = rose(1);
        let basis = enumerate_basis(&g, 2);
        let names: Vec<String> = basis.iter().map(|m| m.display(&g)).collect();
        assert_eq!(names, vec!["v", "y1*", "y1* y1*", "y1", "y1 y1"]);
        assert_eq!(basis, brute_force_basis(&g, 2));
    }

    #[test]
    fn basis_at_zero_is_the_vertex_set() {
        let g = clock3();
        let basis = enumerate_basis(&g, 0);
        assert_eq!(basis.len(), g.vertex_count());
        assert!(basis.iter().all(|m| m.is_vertex()));
    }

    #[test]
    fn dimension_matches_saturated_basis() {
        let se = single_edge();
        assert_eq!(dimension(&se), Dimension::Finite(4));
        assert_eq!(full_basis(&se).unwrap().len(), 4);

        let clock = clock3();
        assert_eq!(dimension(&clock), Dimension::Finite(12));
        assert_eq!(full_basis(&clock).unwrap().len(), 12);

        assert_eq!(dimension(&rose(1)), Dimension::Infinite);
        assert!(full_basis(&rose(1)).is_none());
    }

    #[test]
    fn local_units_absorb() {
        let g = clock3();
        let f = Element::from_edge(g.clone(), Q, g.edge("f").unwrap());
        let a = f.add(&Element::from_vertex(g.clone(), Q, g.vertex("w2").unwrap())).unwrap();
        let mut u = Element::zero(g.clone(), Q);
        for v in a.support_vertices() {
            u = u.add(&Element::from_vertex(g.clone(), Q, v)).unwrap();
        }
        assert_eq!(u.multiply(&a).unwrap(), a);
        assert_eq!(a.multiply(&u).unwrap(), a);
    }

    #[test]
    fn identity_of_finite_graph() {
        let g = clock3();
        let one = Element::identity(g.clone(), Q);
        let f = Element::from_edge(g.clone(), Q, g.edge("f").unwrap());
        assert_eq!(one.multiply(&f).unwrap(), f);
        assert_eq!(f.multiply(&one).unwrap(), f);
    }

    #[test]
    fn display_and_json_are_deterministic() {
        let g = rose(2);
        let y1 = Element::from_edge(g.clone(), Q, g.edge("y1").unwrap());
        let x = y1
            .multiply(&y1.adjoint())
            .unwrap()
            .scale(&Q.integer(2))
            .unwrap();
        assert_eq!(x.display(), "2 v - 2 y2 y2*");
        let j = x.to_json();
        assert_eq!(j[0]["base"], "v");
        assert_eq!(j[0]["coeff"], "2/1");
        assert_eq!(j[1]["real"][0], "y2");
    }
}
