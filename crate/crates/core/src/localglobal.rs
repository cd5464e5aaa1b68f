//! The local-to-global machinery: from a finite edge set F of a graph E,
//! build the finite companion graph E_F, the homomorphism θ from the algebra
//! of E_F into the algebra of E, and the subalgebra B(a_1,…,a_l) generated
//! by Im(θ), the stray vertices S_3, and the corner idempotents u_w — with
//! verifiers for every property the construction promises.
//!
//! Vertices of E_F come in three kinds: each edge e in F is a vertex; each
//! vertex of E that ranges F, sources F, and also sources an edge outside F
//! is a *middle* vertex; each vertex in r(F)\s(F) is a *range* vertex. An
//! E_F edge (e, x) runs from the edge-vertex e to x whenever r(e) = σ(x),
//! where σ(x) is s(x) for an edge-vertex and x itself otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::element::{enumerate_basis, Element, Monomial};
use crate::error::{AlgebraError, LocalGlobalError};
use crate::linalg::{EchelonBasis, MonomialIndexer};
use crate::quiver::{Cycle, EdgeIx, Graph, GraphRef, Path, VertexIx};
use crate::report::Report;
use crate::scalar::{FieldSpec, Scalar};

/// What an E_F vertex stands for in the base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfVertexKind {
    /// An edge of F.
    EdgeType(EdgeIx),
    /// A vertex in r(F) ∩ s(F) ∩ s(E¹\F).
    Middle(VertexIx),
    /// A vertex in r(F) \ s(F).
    Range(VertexIx),
}

/// The companion graph E_F with back-references into the base graph.
#[derive(Debug, Clone)]
pub struct EfGraph {
    graph: GraphRef,
    base: GraphRef,
    f: BTreeSet<EdgeIx>,
    kinds: Vec<EfVertexKind>,
    /// Per E_F edge: the F-edge it departs and the E_F vertex it enters.
    pairs: Vec<(EdgeIx, VertexIx)>,
}

impl EfGraph {
    /// The companion graph itself.
    pub fn graph(&self) -> &GraphRef {
        &self.graph
    }

    /// The base graph E.
    pub fn base(&self) -> &GraphRef {
        &self.base
    }

    pub fn f(&self) -> &BTreeSet<EdgeIx> {
        &self.f
    }

    pub fn kind(&self, v: VertexIx) -> EfVertexKind {
        self.kinds[v.idx()]
    }

    /// The defining pair of an E_F edge: (F-edge in E, target E_F vertex).
    pub fn pair(&self, e: EdgeIx) -> (EdgeIx, VertexIx) {
        self.pairs[e.idx()]
    }
}

/// Builds E_F for an edge subset F (possibly empty).
pub fn build_ef(base: &GraphRef, f: &BTreeSet<EdgeIx>) -> Result<EfGraph, LocalGlobalError> {
    for &e in f {
        if e.idx() >= base.edge_count() {
            return Err(LocalGlobalError::UnknownEdgeInF(format!("#{}", e.0)));
        }
    }
    let r_f: BTreeSet<VertexIx> = f.iter().map(|&e| base.dst(e)).collect();
    let s_f: BTreeSet<VertexIx> = f.iter().map(|&e| base.src(e)).collect();
    let sources_outside: BTreeSet<VertexIx> = base
        .edges()
        .filter(|e| !f.contains(e))
        .map(|e| base.src(e))
        .collect();

    // vertex name -> kind, in deterministic order
    let mut vertex_kinds: BTreeMap<String, EfVertexKind> = BTreeMap::new();
    for &e in f {
        vertex_kinds.insert(base.edge_name(e).to_string(), EfVertexKind::EdgeType(e));
    }
    for &v in r_f.intersection(&s_f) {
        if sources_outside.contains(&v) {
            vertex_kinds.insert(base.vertex_name(v).to_string(), EfVertexKind::Middle(v));
        }
    }
    for &v in r_f.difference(&s_f) {
        vertex_kinds.insert(base.vertex_name(v).to_string(), EfVertexKind::Range(v));
    }

    // σ(x): where an E_F vertex sits in E for edge attachment
    let sigma = |kind: EfVertexKind| -> VertexIx {
        match kind {
            EfVertexKind::EdgeType(e) => base.src(e),
            EfVertexKind::Middle(v) | EfVertexKind::Range(v) => v,
        }
    };

    let mut builder = Graph::builder();
    for name in vertex_kinds.keys() {
        builder.vertex(name.clone());
    }
    // edge name -> (F-edge, target vertex name)
    let mut edge_pairs: BTreeMap<String, (EdgeIx, String)> = BTreeMap::new();
    for &e in f {
        for (target_name, &kind) in &vertex_kinds {
            if base.dst(e) == sigma(kind) {
                let name = format!("({},{})", base.edge_name(e), target_name);
                builder.edge(name.clone(), base.edge_name(e), target_name.clone());
                edge_pairs.insert(name, (e, target_name.clone()));
            }
        }
    }
    let graph = Arc::new(builder.build().map_err(AlgebraError::Graph)?);

    let kinds: Vec<EfVertexKind> =
        graph.vertices().map(|v| vertex_kinds[graph.vertex_name(v)]).collect();
    let pairs: Vec<(EdgeIx, VertexIx)> = graph
        .edges()
        .map(|e| {
            let (base_edge, target) = &edge_pairs[graph.edge_name(e)];
            (*base_edge, graph.vertex(target).expect("target declared"))
        })
        .collect();

    Ok(EfGraph { graph, base: base.clone(), f: f.clone(), kinds, pairs })
}

/// Convenience: builds E_F from edge names.
pub fn build_ef_named(base: &GraphRef, names: &[&str]) -> Result<EfGraph, LocalGlobalError> {
    let mut f = BTreeSet::new();
    for n in names {
        let e = base
            .edge(n)
            .ok_or_else(|| LocalGlobalError::UnknownEdgeInF(n.to_string()))?;
        f.insert(e);
    }
    build_ef(base, &f)
}

/// Checks the acyclicity transfer: an acyclic base forces an acyclic E_F.
/// Vacuous (reported as such) when the base has a cycle.
pub fn acyclicity_transfer_check(base: &GraphRef, f: &BTreeSet<EdgeIx>) -> Report {
    let mut report = Report::new();
    match build_ef(base, f) {
        Err(e) => report.fail("acyclicity_transfer", format!("construction failed: {e}")),
        Ok(ef) => {
            if base.is_acyclic() {
                report.check("acyclicity_transfer", ef.graph().is_acyclic(), || {
                    format!(
                        "base is acyclic but companion has cycle ({})",
                        ef.graph().cycle_witness().expect("cyclic").display(ef.graph())
                    )
                });
            } else {
                report.pass("acyclicity_transfer(vacuous: base has a cycle)");
            }
        }
    }
    report
}

/// θ on generators: an element of L_K(E) for every vertex and edge of E_F,
/// each in canonical normal form.
#[derive(Debug, Clone)]
pub struct Theta {
    ef: EfGraph,
    field: FieldSpec,
    vertex_images: BTreeMap<VertexIx, Element>,
    edge_images: BTreeMap<EdgeIx, Element>,
}

/// Builds the generator images:
///   edge-vertex e  ↦ e e*
///   middle vertex v ↦ v − Σ_{f∈F, s(f)=v} f f*
///   range vertex v  ↦ v
///   edge (e, f-edge) ↦ e f f*
///   edge (e, middle v) ↦ e − Σ_{f∈F, s(f)=r(e)} e f f*
///   edge (e, range v)  ↦ e
pub fn theta_generators(ef: &EfGraph, field: FieldSpec) -> Theta {
    let base = ef.base().clone();
    let edge_elem = |e: EdgeIx| Element::from_edge(base.clone(), field, e);
    let ghost_elem = |e: EdgeIx| Element::from_ghost(base.clone(), field, e);
    let vertex_elem = |v: VertexIx| Element::from_vertex(base.clone(), field, v);

    // corner of v cut down by the F-edges it emits: v − Σ f f*
    let corner = |v: VertexIx| -> Element {
        let mut acc = vertex_elem(v);
        for &f in base.out_edges(v) {
            if ef.f().contains(&f) {
                let ffs = edge_elem(f).multiply(&ghost_elem(f)).expect("same graph");
                acc = acc.sub(&ffs).expect("same graph");
            }
        }
        acc
    };

    let mut vertex_images = BTreeMap::new();
    for v in ef.graph().vertices() {
        let img = match ef.kind(v) {
            EfVertexKind::EdgeType(e) => edge_elem(e).multiply(&ghost_elem(e)).expect("same graph"),
            EfVertexKind::Middle(w) => corner(w),
            EfVertexKind::Range(w) => vertex_elem(w),
        };
        vertex_images.insert(v, img);
    }

    let mut edge_images = BTreeMap::new();
    for ef_edge in ef.graph().edges() {
        let (e, target) = ef.pair(ef_edge);
        let img = match ef.kind(target) {
            EfVertexKind::EdgeType(f) => edge_elem(e)
                .multiply(&edge_elem(f))
                .and_then(|x| x.multiply(&ghost_elem(f)))
                .expect("same graph"),
            EfVertexKind::Middle(_) => edge_elem(e).multiply(&corner(base.dst(e))).expect("same graph"),
            EfVertexKind::Range(_) => edge_elem(e),
        };
        edge_images.insert(ef_edge, img);
    }

    Theta { ef: ef.clone(), field, vertex_images, edge_images }
}

impl Theta {
    pub fn ef(&self) -> &EfGraph {
        &self.ef
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn vertex_image(&self, v: VertexIx) -> &Element {
        &self.vertex_images[&v]
    }

    pub fn edge_image(&self, e: EdgeIx) -> &Element {
        &self.edge_images[&e]
    }

    pub fn vertex_images(&self) -> impl Iterator<Item = (&VertexIx, &Element)> {
        self.vertex_images.iter()
    }

    pub fn edge_images_iter(&self) -> impl Iterator<Item = (&EdgeIx, &Element)> {
        self.edge_images.iter()
    }

    fn path_image(&self, p: &Path) -> Element {
        if p.is_trivial() {
            return self.vertex_images[&p.source()].clone();
        }
        let mut acc: Option<Element> = None;
        for &e in p.edges() {
            let img = &self.edge_images[&e];
            acc = Some(match acc {
                None => img.clone(),
                Some(a) => a.multiply(img).expect("same graph"),
            });
        }
        acc.expect("nonempty path")
    }

    /// Applies θ to an element of L_K(E_F): multiplicative on monomials,
    /// with ghost paths sent through the involution.
    pub fn apply(&self, a: &Element) -> Result<Element, AlgebraError> {
        if *a.graph().as_ref() != *self.ef.graph().as_ref() {
            return Err(AlgebraError::GraphMismatch);
        }
        if a.field() != self.field {
            return Err(AlgebraError::FieldMismatch);
        }
        let base = self.ef.base().clone();
        let mut out = Element::zero(base, self.field);
        for (m, c) in a.terms() {
            let img = self.monomial_image(m)?;
            out = out.add(&img.scale(c)?)?;
        }
        Ok(out)
    }

    /// θ of a single canonical E_F monomial.
    pub fn monomial_image(&self, m: &Monomial) -> Result<Element, AlgebraError> {
        let real = self.path_image(m.real());
        let ghost = self.path_image(m.ghost()).adjoint();
        real.multiply(&ghost)
    }

    /// All θ-images of canonical E_F monomials of total length at most `n`,
    /// labelled by the monomial, in term order.
    pub fn monomial_images_up_to(&self, n: usize) -> Result<Vec<(Monomial, Element)>, AlgebraError> {
        enumerate_basis(self.ef.graph(), n)
            .into_iter()
            .map(|m| self.monomial_image(&m).map(|img| (m, img)))
            .collect()
    }
}

/// Verifies that θ is a graded homomorphism with the promised image:
/// every companion-graph relator maps to zero, vertex images are orthogonal
/// idempotents, images are homogeneous of the right degree, and the three
/// image properties hold with explicit witnesses.
pub fn verify_theta_homomorphism(ef: &EfGraph, field: FieldSpec) -> Report {
    let mut report = Report::new();
    let theta = theta_generators(ef, field);
    let efg = ef.graph();
    let base = ef.base().clone();
    let edge_elem = |e: EdgeIx| Element::from_edge(base.clone(), field, e);
    let ghost_elem = |e: EdgeIx| Element::from_ghost(base.clone(), field, e);
    let vertex_elem = |v: VertexIx| Element::from_vertex(base.clone(), field, v);

    // (1) vertex relators: θ(u)θ(w) = δ_{uw} θ(u) — orthogonal idempotents
    for u in efg.vertices() {
        for w in efg.vertices() {
            let prod = theta.vertex_image(u).multiply(theta.vertex_image(w)).expect("same graph");
            let expected = if u == w {
                theta.vertex_image(u).clone()
            } else {
                Element::zero(base.clone(), field)
            };
            report.check(
                format!("vertex_images({},{})", efg.vertex_name(u), efg.vertex_name(w)),
                prod == expected,
                || format!("product is {}", prod.display()),
            );
        }
    }

    // (2) composability relators: θ(s(a)) θ(a) = θ(a) = θ(a) θ(r(a))
    for a in efg.edges() {
        let img = theta.edge_image(a);
        let left = theta.vertex_image(efg.src(a)).multiply(img).expect("same graph");
        let right = img.multiply(theta.vertex_image(efg.dst(a))).expect("same graph");
        report.check(
            format!("edge_composability({})", efg.edge_name(a)),
            left == *img && right == *img,
            || format!("s·a = {}, a·r = {}", left.display(), right.display()),
        );
    }

    // (CK1) θ(a)* θ(b) = δ_{ab} θ(r(b))
    for a in efg.edges() {
        for b in efg.edges() {
            let prod =
                theta.edge_image(a).adjoint().multiply(theta.edge_image(b)).expect("same graph");
            let expected = if a == b {
                theta.vertex_image(efg.dst(b)).clone()
            } else {
                Element::zero(base.clone(), field)
            };
            report.check(
                format!("ck1({},{})", efg.edge_name(a), efg.edge_name(b)),
                prod == expected,
                || format!("product is {}", prod.display()),
            );
        }
    }

    // (CK2) θ(v) = Σ_{s(a)=v} θ(a) θ(a)* for non-sink v of E_F
    for v in efg.vertices() {
        if efg.is_sink(v) {
            continue;
        }
        let mut sum = Element::zero(base.clone(), field);
        for &a in efg.out_edges(v) {
            let aas = theta.edge_image(a).multiply(&theta.edge_image(a).adjoint()).expect("same graph");
            sum = sum.add(&aas).expect("same graph");
        }
        report.check(
            format!("ck2({})", efg.vertex_name(v)),
            sum == *theta.vertex_image(v),
            || format!("sum is {}", sum.display()),
        );
    }

    // graded: vertex images homogeneous of degree 0, edge images of degree 1
    for v in efg.vertices() {
        let split = theta.vertex_image(v).degree_split();
        report.check(
            format!("graded_vertex({})", efg.vertex_name(v)),
            split.keys().copied().collect::<Vec<_>>() == vec![0],
            || format!("degrees {:?}", split.keys().collect::<Vec<_>>()),
        );
    }
    for a in efg.edges() {
        let split = theta.edge_image(a).degree_split();
        report.check(
            format!("graded_edge({})", efg.edge_name(a)),
            split.keys().copied().collect::<Vec<_>>() == vec![1],
            || format!("degrees {:?}", split.keys().collect::<Vec<_>>()),
        );
    }

    // property (1): every e in F (and its ghost) lies in Im(θ):
    // e = Σ over E_F edges departing the edge-vertex e of their images
    for &e in ef.f() {
        let ev = efg.vertex(base.edge_name(e)).expect("edge-vertex present");
        let mut sum = Element::zero(base.clone(), field);
        for &a in efg.out_edges(ev) {
            sum = sum.add(theta.edge_image(a)).expect("same graph");
        }
        let ok = sum == edge_elem(e);
        report.check(
            format!("property1({})", base.edge_name(e)),
            ok && sum.adjoint() == ghost_elem(e),
            || format!("witness sums to {}", sum.display()),
        );
    }

    // property (2): w in r(F) implies w in Im(θ):
    // w = Σ_{f∈F, s(f)=w} θ(f-vertex) + θ(w-vertex) when present
    let r_f: BTreeSet<VertexIx> = ef.f().iter().map(|&e| base.dst(e)).collect();
    for &w in &r_f {
        let mut sum = Element::zero(base.clone(), field);
        for &f in base.out_edges(w) {
            if ef.f().contains(&f) {
                let fv = efg.vertex(base.edge_name(f)).expect("edge-vertex present");
                sum = sum.add(theta.vertex_image(fv)).expect("same graph");
            }
        }
        if let Some(wv) = efg.vertex(base.vertex_name(w)) {
            sum = sum.add(theta.vertex_image(wv)).expect("same graph");
        }
        report.check(
            format!("property2({})", base.vertex_name(w)),
            sum == vertex_elem(w),
            || format!("witness sums to {}", sum.display()),
        );
    }

    // property (3): ∅ ≠ s^{-1}(w) ⊆ F implies w in Im(θ): w = Σ θ(f-vertex)
    for w in base.vertices() {
        let out = base.out_edges(w);
        if out.is_empty() || !out.iter().all(|e| ef.f().contains(e)) {
            continue;
        }
        let mut sum = Element::zero(base.clone(), field);
        for &f in out {
            let fv = efg.vertex(base.edge_name(f)).expect("edge-vertex present");
            sum = sum.add(theta.vertex_image(fv)).expect("same graph");
        }
        report.check(
            format!("property3({})", base.vertex_name(w)),
            sum == vertex_elem(w),
            || format!("witness sums to {}", sum.display()),
        );
    }

    report
}

/// The edge set F and vertex set S extracted from elements in normal form,
/// with the four-way partition of S.
#[derive(Debug, Clone)]
pub struct SPartition {
    graph: GraphRef,
    pub f: BTreeSet<EdgeIx>,
    pub s: BTreeSet<VertexIx>,
    pub s1: BTreeSet<VertexIx>,
    pub s2: BTreeSet<VertexIx>,
    pub s3: BTreeSet<VertexIx>,
    pub s4: BTreeSet<VertexIx>,
}

impl SPartition {
    pub fn graph(&self) -> &GraphRef {
        &self.graph
    }
}

/// Reads F (edges occurring in any non-vertex monomial) and S (vertices
/// occurring as trivial monomials) off the canonical normal forms, then
/// partitions S: S1 meets r(F); of the rest, S2 emits edges only into F,
/// S3 emits none into F, and S4 emits into both F and its complement.
pub fn extract_context(elements: &[Element]) -> Result<SPartition, LocalGlobalError> {
    let first = elements.first().ok_or(LocalGlobalError::ZeroInput)?;
    let graph = first.graph().clone();
    for a in elements {
        if a.is_zero() {
            return Err(LocalGlobalError::ZeroInput);
        }
        if *a.graph().as_ref() != *graph.as_ref() {
            return Err(LocalGlobalError::Algebra(AlgebraError::GraphMismatch));
        }
    }
    let mut f = BTreeSet::new();
    let mut s = BTreeSet::new();
    for a in elements {
        for (m, _) in a.terms() {
            if m.is_vertex() {
                s.insert(m.real().source());
            } else {
                f.extend(m.real().edges().iter().copied());
                f.extend(m.ghost().edges().iter().copied());
            }
        }
    }
    let r_f: BTreeSet<VertexIx> = f.iter().map(|&e| graph.dst(e)).collect();
    let s1: BTreeSet<VertexIx> = s.intersection(&r_f).copied().collect();
    let mut s2 = BTreeSet::new();
    let mut s3 = BTreeSet::new();
    let mut s4 = BTreeSet::new();
    for &v in s.difference(&s1) {
        let out = graph.out_edges(v);
        let in_f = out.iter().filter(|e| f.contains(e)).count();
        let outside = out.len() - in_f;
        if in_f == 0 {
            s3.insert(v);
        } else if outside == 0 {
            s2.insert(v);
        } else {
            s4.insert(v);
        }
    }
    Ok(SPartition { graph, f, s, s1, s2, s3, s4 })
}

/// The subalgebra B(a_1,…,a_l): the companion graph, the θ images, the S_3
/// vertices, and the S_4 idempotents u_w = w − Σ_{f∈F, s(f)=w} f f*.
#[derive(Debug, Clone)]
pub struct SubalgebraDecomposition {
    pub partition: SPartition,
    pub ef: EfGraph,
    pub theta: Theta,
    /// S_3 vertices as elements.
    pub s3_elements: Vec<(VertexIx, Element)>,
    /// u_w for each w in S_4.
    pub s4_idempotents: Vec<(VertexIx, Element)>,
    field: FieldSpec,
}

/// A generator of B in the decomposition's labelled sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BGenerator {
    /// θ of a canonical E_F monomial.
    Theta(Monomial),
    /// A vertex of S_3.
    S3(VertexIx),
    /// The idempotent u_w of a vertex w in S_4.
    S4(VertexIx),
}

impl BGenerator {
    pub fn describe(&self, b: &SubalgebraDecomposition) -> String {
        match self {
            BGenerator::Theta(m) => format!("theta({})", m.display(b.ef.graph())),
            BGenerator::S3(v) => format!("s3({})", b.partition.graph().vertex_name(*v)),
            BGenerator::S4(w) => format!("u_{}", b.partition.graph().vertex_name(*w)),
        }
    }
}

/// Outcome of a bounded membership solve.
#[derive(Debug, Clone)]
pub enum Membership {
    /// Exact coefficients over the labelled generators (zeros omitted).
    InSpan(Vec<(BGenerator, Scalar)>),
    /// Not in the span at this bound — not a proof of non-membership.
    NotInSpanAtBound,
}

impl Membership {
    pub fn is_in_span(&self) -> bool {
        matches!(self, Membership::InSpan(_))
    }
}

/// Assembles B(a_1,…,a_l) from nonzero elements in normal form.
pub fn build_b(elements: &[Element]) -> Result<SubalgebraDecomposition, LocalGlobalError> {
    let partition = extract_context(elements)?;
    let field = elements[0].field();
    let graph = partition.graph().clone();
    let ef = build_ef(&graph, &partition.f)?;
    let theta = theta_generators(&ef, field);

    let s3_elements = partition
        .s3
        .iter()
        .map(|&v| (v, Element::from_vertex(graph.clone(), field, v)))
        .collect();

    let mut s4_idempotents = Vec::new();
    for &w in &partition.s4 {
        let mut u = Element::from_vertex(graph.clone(), field, w);
        for &f in graph.out_edges(w) {
            if partition.f.contains(&f) {
                let ffs = Element::from_edge(graph.clone(), field, f)
                    .multiply(&Element::from_ghost(graph.clone(), field, f))
                    .expect("same graph");
                u = u.sub(&ffs).expect("same graph");
            }
        }
        s4_idempotents.push((w, u));
    }

    Ok(SubalgebraDecomposition { partition, ef, theta, s3_elements, s4_idempotents, field })
}

impl SubalgebraDecomposition {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// The labelled generating family at a monomial-length bound: θ-images
    /// of canonical E_F monomials up to the bound, then S_3, then u_w.
    pub fn generators_up_to(
        &self,
        bound: usize,
    ) -> Result<Vec<(BGenerator, Element)>, AlgebraError> {
        let mut out = Vec::new();
        for (m, img) in self.theta.monomial_images_up_to(bound)? {
            out.push((BGenerator::Theta(m), img));
        }
        for (v, el) in &self.s3_elements {
            out.push((BGenerator::S3(*v), el.clone()));
        }
        for (w, u) in &self.s4_idempotents {
            out.push((BGenerator::S4(*w), u.clone()));
        }
        Ok(out)
    }

    /// Default bound for membership solves: 2 plus the longest generator.
    pub fn default_bound(&self, inputs: &[Element]) -> usize {
        2 + inputs.iter().map(|a| a.max_total_len()).max().unwrap_or(0)
    }
}

/// Solves for `x` in the span of B's generators at the bound.
pub fn membership(
    b: &SubalgebraDecomposition,
    x: &Element,
    bound: usize,
) -> Result<Membership, LocalGlobalError> {
    let gens = b.generators_up_to(bound).map_err(LocalGlobalError::Algebra)?;
    let mut indexer = MonomialIndexer::new();
    let mut basis = EchelonBasis::new(b.field);
    let vecs: Vec<_> = gens.iter().map(|(_, el)| indexer.vectorize(el)).collect();
    for v in vecs {
        basis.insert(v);
    }
    let target = indexer.vectorize(x);
    match basis.express(&target) {
        None => Ok(Membership::NotInSpanAtBound),
        Some(combo) => {
            let mut coeffs = Vec::new();
            for (i, c) in combo {
                if !c.is_zero() {
                    coeffs.push((gens[i].0.clone(), c));
                }
            }
            Ok(Membership::InSpan(coeffs))
        }
    }
}

/// Verifies the direct-sum decomposition of B at a bound: u_w idempotent and
/// homogeneous of degree 0, all cross products between the three parts
/// vanish both ways, and the joint family is linearly independent.
pub fn verify_decomposition(b: &SubalgebraDecomposition, bound: usize) -> Report {
    let mut report = Report::new();
    let g = b.partition.graph();

    for (w, u) in &b.s4_idempotents {
        let sq = u.multiply(u).expect("same graph");
        report.check(
            format!("u_idempotent({})", g.vertex_name(*w)),
            sq == *u,
            || format!("u^2 = {}", sq.display()),
        );
        let degrees: Vec<i64> = u.degree_split().keys().copied().collect();
        report.check(
            format!("u_homogeneous({})", g.vertex_name(*w)),
            degrees == vec![0],
            || format!("degrees {degrees:?}"),
        );
    }

    // cross products: collect one generator family per part
    let mut theta_gens: Vec<(String, Element)> = Vec::new();
    for (v, img) in b.theta.vertex_images() {
        theta_gens.push((format!("theta_v({})", b.ef.graph().vertex_name(*v)), img.clone()));
    }
    for e in b.ef.graph().edges() {
        let img = b.theta.edge_image(e);
        theta_gens.push((format!("theta_e({})", b.ef.graph().edge_name(e)), img.clone()));
        theta_gens.push((format!("theta_e*({})", b.ef.graph().edge_name(e)), img.adjoint()));
    }
    let s3_gens: Vec<(String, Element)> = b
        .s3_elements
        .iter()
        .map(|(v, el)| (format!("s3({})", g.vertex_name(*v)), el.clone()))
        .collect();
    let s4_gens: Vec<(String, Element)> = b
        .s4_idempotents
        .iter()
        .map(|(w, u)| (format!("u({})", g.vertex_name(*w)), u.clone()))
        .collect();

    let parts: [&[(String, Element)]; 3] = [&theta_gens, &s3_gens, &s4_gens];
    for (i, part_a) in parts.iter().enumerate() {
        for (j, part_b) in parts.iter().enumerate() {
            if i == j {
                continue;
            }
            for (na, a) in part_a.iter() {
                for (nb, bb) in part_b.iter() {
                    let prod = a.multiply(bb).expect("same graph");
                    report.check(
                        format!("orthogonal({na},{nb})"),
                        prod.is_zero(),
                        || format!("product is {}", prod.display()),
                    );
                }
            }
        }
    }
    // distinct S_3 vertices and distinct u_w are orthogonal among themselves
    for (i, (na, a)) in s3_gens.iter().enumerate() {
        for (nb, bb) in s3_gens.iter().skip(i + 1) {
            let prod = a.multiply(bb).expect("same graph");
            report.check(format!("orthogonal({na},{nb})"), prod.is_zero(), || prod.display());
        }
    }
    for (i, (na, a)) in s4_gens.iter().enumerate() {
        for (nb, bb) in s4_gens.iter().skip(i + 1) {
            let prod = a.multiply(bb).expect("same graph");
            report.check(format!("orthogonal({na},{nb})"), prod.is_zero(), || prod.display());
        }
    }

    // joint linear independence of θ-monomial images ≤ bound, S_3, u_w
    match b.generators_up_to(bound) {
        Err(e) => report.fail("joint_independence", e.to_string()),
        Ok(gens) => {
            let mut indexer = MonomialIndexer::new();
            let mut basis = EchelonBasis::new(b.field);
            let mut dependent: Option<String> = None;
            for (label, el) in &gens {
                if !basis.insert(indexer.vectorize(el)) {
                    dependent = Some(label.describe(b));
                    break;
                }
            }
            report.check(
                format!("joint_independence(bound={bound},{} generators)", gens.len()),
                dependent.is_none(),
                || format!("dependent generator {}", dependent.unwrap()),
            );
        }
    }

    report
}

/// Checks B(S) ⊆ B(S') generator by generator via bounded membership.
pub fn directedness_check(
    small: &[Element],
    large: &[Element],
    bound: usize,
) -> Result<Report, LocalGlobalError> {
    let mut report = Report::new();
    let b_small = build_b(small)?;
    let b_large = build_b(large)?;
    let gens = b_small.generators_up_to(bound).map_err(LocalGlobalError::Algebra)?;
    for (label, el) in gens {
        let outcome = membership(&b_large, &el, bound)?;
        report.check(
            format!("directedness({})", label.describe(&b_small)),
            outcome.is_in_span(),
            || "not in span of the larger subalgebra at this bound".to_string(),
        );
    }
    Ok(report)
}

/// Lifts a cycle of E_F to the closed path in E traversing the first
/// components of its edge pairs, and checks exit preservation. The lift can
/// repeat source vertices, so it is returned as a path.
pub fn lift_cycle(ef: &EfGraph, c: &Cycle) -> Result<(Path, bool), LocalGlobalError> {
    let efg = ef.graph();
    for v in c.vertices_in(efg) {
        if !matches!(ef.kind(v), EfVertexKind::EdgeType(_)) {
            return Err(LocalGlobalError::NonEdgeTypeCycle(efg.vertex_name(v).to_string()));
        }
    }
    let lifted: Vec<EdgeIx> = c.edges().iter().map(|&a| ef.pair(a).0).collect();
    let path = Path::from_edges(ef.base(), lifted).map_err(AlgebraError::Graph)?;
    debug_assert_eq!(path.source(), path.range(), "lift of a cycle closes up");
    let exit_preserved = c.exit(efg).is_none() || path.has_exit(ef.base()).is_some();
    Ok((path, exit_preserved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_element;

    const Q: FieldSpec = FieldSpec::Rational;

    fn rose(n: usize) -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v");
        for i in 1..=n {
            b.edge(format!("y{i}"), "v", "v");
        }
        Arc::new(b.build().unwrap())
    }

    fn clock3() -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v").vertex("w1").vertex("w2").vertex("w3");
        b.edge("f", "v", "w1").edge("g", "v", "w2").edge("h", "v", "w3");
        Arc::new(b.build().unwrap())
    }

    /// The two-level chain: loops f1,g1 at v1; loops f2,g2 and e1:v2→v1 at v2.
    fn chain2() -> GraphRef {
        let mut b = Graph::builder();
        b.vertex("v1").vertex("v2");
        b.edge("f1", "v1", "v1").edge("g1", "v1", "v1");
        b.edge("f2", "v2", "v2").edge("g2", "v2", "v2");
        b.edge("e1", "v2", "v1");
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn companion_of_the_rose() {
        let g = rose(2);
        let ef = build_ef_named(&g, &["y1"]).unwrap();
        let efg = ef.graph();
        let vnames: Vec<&str> = efg.vertices().map(|v| efg.vertex_name(v)).collect();
        assert_eq!(vnames, vec!["v", "y1"]);
        let enames: Vec<&str> = efg.edges().map(|e| efg.edge_name(e)).collect();
        assert_eq!(enames, vec!["(y1,v)", "(y1,y1)"]);
        assert!(matches!(ef.kind(efg.vertex("y1").unwrap()), EfVertexKind::EdgeType(_)));
        assert!(matches!(ef.kind(efg.vertex("v").unwrap()), EfVertexKind::Middle(_)));
    }

    #[test]
    fn companion_of_the_chain() {
        let g = chain2();
        let ef = build_ef_named(&g, &["f1", "g1"]).unwrap();
        let efg = ef.graph();
        let vnames: Vec<&str> = efg.vertices().map(|v| efg.vertex_name(v)).collect();
        assert_eq!(vnames, vec!["f1", "g1"]);
        let enames: Vec<&str> = efg.edges().map(|e| efg.edge_name(e)).collect();
        assert_eq!(enames, vec!["(f1,f1)", "(f1,g1)", "(g1,f1)", "(g1,g1)"]);
    }

    #[test]
    fn companion_of_the_clock() {
        let g = clock3();
        let ef = build_ef_named(&g, &["f"]).unwrap();
        let efg = ef.graph();
        let vnames: Vec<&str> = efg.vertices().map(|v| efg.vertex_name(v)).collect();
        assert_eq!(vnames, vec!["f", "w1"]);
        let enames: Vec<&str> = efg.edges().map(|e| efg.edge_name(e)).collect();
        assert_eq!(enames, vec!["(f,w1)"]);
        assert!(matches!(ef.kind(efg.vertex("w1").unwrap()), EfVertexKind::Range(_)));
    }

    #[test]
    fn companion_of_the_empty_set_is_empty() {
        let g = rose(3);
        let ef = build_ef(&g, &BTreeSet::new()).unwrap();
        assert_eq!(ef.graph().vertex_count(), 0);
        assert_eq!(ef.graph().edge_count(), 0);
    }

    #[test]
    fn unknown_edge_is_rejected() {
        let g = rose(1);
        assert!(matches!(
            build_ef_named(&g, &["zz"]),
            Err(LocalGlobalError::UnknownEdgeInF(_))
        ));
    }

    #[test]
    fn acyclic_transfer_on_fixtures() {
        let clock = clock3();
        let f: BTreeSet<EdgeIx> = [clock.edge("f").unwrap()].into();
        assert!(acyclicity_transfer_check(&clock, &f).all_passed());

        let r = rose(1);
        let f: BTreeSet<EdgeIx> = [r.edge("y1").unwrap()].into();
        let report = acyclicity_transfer_check(&r, &f);
        assert!(report.all_passed()); // vacuous
        let ef = build_ef(&r, &f).unwrap();
        assert!(!ef.graph().is_acyclic());
    }

    #[test]
    fn theta_generator_images_match_the_construction() {
        let g = rose(2);
        let ef = build_ef_named(&g, &["y1"]).unwrap();
        let theta = theta_generators(&ef, Q);
        let efg = ef.graph();
        let y1v = efg.vertex("y1").unwrap();
        let vv = efg.vertex("v").unwrap();
        assert_eq!(
            *theta.vertex_image(y1v),
            parse_element(&g, Q, "y1 y1*").unwrap()
        );
        assert_eq!(
            *theta.vertex_image(vv),
            parse_element(&g, Q, "v - y1 y1*").unwrap()
        );
        let loop_edge = efg.edge("(y1,y1)").unwrap();
        let exit_edge = efg.edge("(y1,v)").unwrap();
        assert_eq!(
            *theta.edge_image(loop_edge),
            parse_element(&g, Q, "y1 y1 y1*").unwrap()
        );
        assert_eq!(
            *theta.edge_image(exit_edge),
            parse_element(&g, Q, "y1 - y1 y1 y1*").unwrap()
        );
        // the two edge images sum to y1, witnessing property (1)
        let sum = theta.edge_image(loop_edge).add(theta.edge_image(exit_edge)).unwrap();
        assert_eq!(sum, parse_element(&g, Q, "y1").unwrap());
    }

    #[test]
    fn theta_on_the_clock_sends_range_data_identically() {
        let g = clock3();
        let ef = build_ef_named(&g, &["f"]).unwrap();
        let theta = theta_generators(&ef, Q);
        let efg = ef.graph();
        assert_eq!(
            *theta.vertex_image(efg.vertex("w1").unwrap()),
            parse_element(&g, Q, "w1").unwrap()
        );
        assert_eq!(
            *theta.edge_image(efg.edge("(f,w1)").unwrap()),
            parse_element(&g, Q, "f").unwrap()
        );
    }

    #[test]
    fn theta_is_a_verified_homomorphism_on_paper_fixtures() {
        for (g, f) in [
            (rose(2), vec!["y1"]),
            (chain2(), vec!["f1", "g1"]),
            (clock3(), vec!["f"]),
        ] {
            let ef = build_ef_named(&g, &f.iter().map(|s| *s).collect::<Vec<_>>()).unwrap();
            let report = verify_theta_homomorphism(&ef, Q);
            assert!(report.all_passed(), "{report}");
        }
    }

    #[test]
    fn theta_application_respects_products() {
        let g = rose(2);
        let ef = build_ef_named(&g, &["y1"]).unwrap();
        let theta = theta_generators(&ef, Q);
        let efg = ef.graph();
        // θ(m) for the vertex monomial is idempotent
        let y1v = efg.vertex("y1").unwrap();
        let img = theta.vertex_image(y1v);
        assert_eq!(img.multiply(img).unwrap(), *img);
        // θ over a length-2 monomial agrees with the product of images
        let a = efg.edge("(y1,y1)").unwrap();
        let m = Monomial::new(
            Path::from_edges(efg, vec![a]).unwrap(),
            Path::trivial(efg.dst(a)),
        )
        .unwrap();
        let via_monomial = theta.monomial_image(&m).unwrap();
        assert_eq!(via_monomial, *theta.edge_image(a));
    }

    #[test]
    fn context_extraction_partitions() {
        // rose 2: a = 2v + y1 y1* normalizes to 3v - y2 y2*, so F = {y2}, S1 = {v}
        let g = rose(2);
        let a = parse_element(&g, Q, "2 v + y1 y1*").unwrap();
        let p = extract_context(&[a]).unwrap();
        assert_eq!(p.f, [g.edge("y2").unwrap()].into());
        assert_eq!(p.s1, [g.vertex("v").unwrap()].into());
        assert!(p.s2.is_empty() && p.s3.is_empty() && p.s4.is_empty());

        // isolated vertex lands in S3
        let mut b = Graph::builder();
        b.vertex("v").vertex("w").vertex("z").edge("f", "v", "w");
        let g = Arc::new(b.build().unwrap());
        let a = parse_element(&g, Q, "z + f").unwrap();
        let p = extract_context(&[a]).unwrap();
        assert_eq!(p.f, [g.edge("f").unwrap()].into());
        assert_eq!(p.s3, [g.vertex("z").unwrap()].into());

        // clock: a = v + f puts v in S4
        let g = clock3();
        let a = parse_element(&g, Q, "v + f").unwrap();
        let p = extract_context(&[a]).unwrap();
        assert_eq!(p.s4, [g.vertex("v").unwrap()].into());

        // zero input is rejected
        let z = Element::zero(g.clone(), Q);
        assert!(matches!(extract_context(&[z]), Err(LocalGlobalError::ZeroInput)));
    }

    #[test]
    fn partition_is_total_and_disjoint() {
        let g = chain2();
        let a = parse_element(&g, Q, "v1 + v2 + f1 g1*").unwrap();
        let p = extract_context(&[a]).unwrap();
        let mut union = BTreeSet::new();
        for part in [&p.s1, &p.s2, &p.s3, &p.s4] {
            for &v in part.iter() {
                assert!(union.insert(v), "partition overlaps");
            }
        }
        assert_eq!(union, p.s);
    }

    #[test]
    fn subalgebra_of_the_clock_example() {
        let g = clock3();
        let a = parse_element(&g, Q, "v + f").unwrap();
        let b = build_b(&[a.clone()]).unwrap();
        assert_eq!(b.s4_idempotents.len(), 1);
        let (w, u) = &b.s4_idempotents[0];
        assert_eq!(g.vertex_name(*w), "v");
        assert_eq!(*u, parse_element(&g, Q, "v - f f*").unwrap());

        // u_v annihilates f f*
        let ffs = parse_element(&g, Q, "f f*").unwrap();
        assert!(u.multiply(&ffs).unwrap().is_zero());

        let report = verify_decomposition(&b, 2);
        assert!(report.all_passed(), "{report}");

        // every input passes membership at its own length + 2
        let bound = b.default_bound(&[a.clone()]);
        assert!(membership(&b, &a, bound).unwrap().is_in_span());
    }

    #[test]
    fn subalgebra_without_vertex_terms_has_no_extra_parts() {
        let g = chain2();
        let a = parse_element(&g, Q, "f1 + g1").unwrap();
        let b = build_b(&[a]).unwrap();
        assert!(b.partition.s.is_empty());
        assert!(b.s3_elements.is_empty());
        assert!(b.s4_idempotents.is_empty());
    }

    #[test]
    fn membership_finds_trivial_and_rejects_outside() {
        let g = rose(2);
        // b built from a = y1 y1* (normal form v - y2 y2*, so F = {y2})
        let a = parse_element(&g, Q, "y1 y1*").unwrap();
        let b = build_b(&[a.clone()]).unwrap();
        assert_eq!(b.partition.f, [g.edge("y2").unwrap()].into());

        let bound = b.default_bound(&[a.clone()]);
        assert!(membership(&b, &a, bound).unwrap().is_in_span());

        // y2 y2* is θ of the companion vertex y2
        let x = parse_element(&g, Q, "y2 y2*").unwrap();
        assert!(membership(&b, &x, bound).unwrap().is_in_span());

        // the edge y1 never appears in any generator's support
        let y1 = parse_element(&g, Q, "y1").unwrap();
        for n in 1..=4 {
            assert!(!membership(&b, &y1, n).unwrap().is_in_span());
        }
    }

    #[test]
    fn membership_coefficient_on_u_is_one() {
        let g = clock3();
        let a = parse_element(&g, Q, "v + f").unwrap();
        let b = build_b(&[a]).unwrap();
        let (w, u) = b.s4_idempotents[0].clone();
        match membership(&b, &u, 2).unwrap() {
            Membership::InSpan(coeffs) => {
                assert_eq!(coeffs.len(), 1);
                assert_eq!(coeffs[0].0, BGenerator::S4(w));
                assert!(coeffs[0].1.is_one());
            }
            Membership::NotInSpanAtBound => panic!("u_w must be a generator"),
        }
    }

    #[test]
    fn directedness_on_the_rose() {
        let g = rose(2);
        let a1 = parse_element(&g, Q, "y1").unwrap();
        let a2 = parse_element(&g, Q, "y1 + v").unwrap();
        let report = directedness_check(
            &[a1.clone()],
            &[a1.clone(), a2.clone()],
            4,
        )
        .unwrap();
        assert!(report.all_passed(), "{report}");

        // S = S' passes trivially
        let report = directedness_check(&[a1.clone()], &[a1], 3).unwrap();
        assert!(report.all_passed());
    }

    #[test]
    fn cycles_lift_with_exits() {
        // rose: (y1,y1) lifts to y1
        let g = rose(2);
        let ef = build_ef_named(&g, &["y1"]).unwrap();
        let efg = ef.graph();
        let c = efg.simple_cycles().into_iter().next().unwrap();
        let (path, preserved) = lift_cycle(&ef, &c).unwrap();
        assert_eq!(path.display(&g), "y1");
        assert!(preserved);

        // chain: (f1,g1)(g1,f1) lifts to the closed path f1 g1
        let g = chain2();
        let ef = build_ef_named(&g, &["f1", "g1"]).unwrap();
        let efg = ef.graph();
        let two_cycle = efg
            .simple_cycles()
            .into_iter()
            .find(|c| c.len() == 2)
            .expect("two-step cycle exists");
        let (path, preserved) = lift_cycle(&ef, &two_cycle).unwrap();
        assert_eq!(path.display(&g), "f1 g1");
        assert!(preserved);
    }
}
