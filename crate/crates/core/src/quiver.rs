//! Finite directed multigraphs (quivers) with the graph-theoretic predicates
//! the ring theorems key on: sinks and sources, cycle enumeration, exits,
//! reachability, cofinality, and exact path counting.
//!
//! Vertices and edges are named by strings; internally both are indexed by
//! position in the lexicographically sorted id tables, so index order agrees
//! with id order and every set-valued output is deterministic. Vertex ids and
//! edge ids live in separate namespaces: a vertex and an edge may share a
//! name (dual-graph constructions produce this), but two vertices or two
//! edges never do.

use serde_json::json;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::GraphError;

/// Index of a vertex in a graph's sorted vertex table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexIx(pub u32);

/// Index of an edge in a graph's sorted edge table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIx(pub u32);

impl VertexIx {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl EdgeIx {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A finite directed multigraph. Immutable after construction; share via
/// `Arc` and send freely between threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    edge_src: Vec<VertexIx>,
    edge_dst: Vec<VertexIx>,
    out_edges: Vec<Vec<EdgeIx>>,
    in_edges: Vec<Vec<EdgeIx>>,
}

/// Accumulates vertex and edge declarations, then validates and indexes.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
}

/// Ids accepted by the graph file format: a plain id is a letter followed by
/// letters, digits, or underscores. Machine-generated graphs (the `ef` and
/// dual constructions) additionally use composite ids built with `(`, `)`,
/// `,`, and `.`, and those round-trip through the parser too.
pub fn valid_id(id: &str) -> bool {
    let mut chars = id.chars();
    let first = match chars.next() {
        Some(c) => c,
        None => return false,
    };
    if !(first.is_ascii_alphabetic() || first == '(') {
        return false;
    }
    id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '(' | ')' | ',' | '.'))
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, id: impl Into<String>) -> &mut Self {
        self.vertices.push(id.into());
        self
    }

    pub fn edge(
        &mut self,
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
    ) -> &mut Self {
        self.edges.push((id.into(), src.into(), dst.into()));
        self
    }

    pub fn build(self) -> Result<Graph, GraphError> {
        let mut vertex_names = self.vertices;
        for id in &vertex_names {
            if !valid_id(id) {
                return Err(GraphError::InvalidId(id.clone()));
            }
        }
        vertex_names.sort();
        if let Some(w) = vertex_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0].clone()));
        }

        let mut edges = self.edges;
        for (id, _, _) in &edges {
            if !valid_id(id) {
                return Err(GraphError::InvalidId(id.clone()));
            }
        }
        edges.sort();
        if let Some(w) = edges.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(GraphError::DuplicateEdge(w[0].0.clone()));
        }

        let vertex_ix = |name: &str| -> Option<VertexIx> {
            vertex_names.binary_search_by(|v| v.as_str().cmp(name)).ok().map(|i| VertexIx(i as u32))
        };

        let mut edge_names = Vec::with_capacity(edges.len());
        let mut edge_src = Vec::with_capacity(edges.len());
        let mut edge_dst = Vec::with_capacity(edges.len());
        for (id, src, dst) in edges {
            let s = vertex_ix(&src)
                .ok_or_else(|| GraphError::UnknownVertex { edge: id.clone(), vertex: src.clone() })?;
            let d = vertex_ix(&dst)
                .ok_or_else(|| GraphError::UnknownVertex { edge: id.clone(), vertex: dst.clone() })?;
            edge_names.push(id);
            edge_src.push(s);
            edge_dst.push(d);
        }

        let mut out_edges = vec![Vec::new(); vertex_names.len()];
        let mut in_edges = vec![Vec::new(); vertex_names.len()];
        for e in 0..edge_names.len() {
            out_edges[edge_src[e].idx()].push(EdgeIx(e as u32));
            in_edges[edge_dst[e].idx()].push(EdgeIx(e as u32));
        }

        Ok(Graph { vertex_names, edge_names, edge_src, edge_dst, out_edges, in_edges })
    }
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    /// Parses the line-based graph file format: `vertex <id>`,
    /// `edge <id> <src> <dst>`, `# comment`, or blank lines.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut builder = GraphBuilder::new();
        let mut seen_vertices = BTreeSet::new();
        let mut seen_edges = BTreeSet::new();
        let mut any = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            any = true;
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match fields[0] {
                "vertex" => {
                    if fields.len() != 2 {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("expected `vertex <id>`, got `{trimmed}`"),
                        });
                    }
                    let id = fields[1];
                    if !valid_id(id) {
                        return Err(GraphError::Parse { line, msg: format!("invalid id `{id}`") });
                    }
                    if !seen_vertices.insert(id.to_string()) {
                        return Err(GraphError::Parse { line, msg: format!("duplicate vertex id `{id}`") });
                    }
                    builder.vertex(id);
                }
                "edge" => {
                    if fields.len() != 4 {
                        return Err(GraphError::Parse {
                            line,
                            msg: format!("expected `edge <id> <src> <dst>`, got `{trimmed}`"),
                        });
                    }
                    let (id, src, dst) = (fields[1], fields[2], fields[3]);
                    for part in [id, src, dst] {
                        if !valid_id(part) {
                            return Err(GraphError::Parse { line, msg: format!("invalid id `{part}`") });
                        }
                    }
                    if !seen_edges.insert(id.to_string()) {
                        return Err(GraphError::Parse { line, msg: format!("duplicate edge id `{id}`") });
                    }
                    for v in [src, dst] {
                        if !seen_vertices.contains(v) {
                            return Err(GraphError::Parse {
                                line,
                                msg: format!("edge `{id}` references undeclared vertex `{v}`"),
                            });
                        }
                    }
                    builder.edge(id, src, dst);
                }
                other => {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("unknown directive `{other}`"),
                    });
                }
            }
        }
        if !any {
            return Err(GraphError::Parse { line: 1, msg: "empty graph file".into() });
        }
        builder.build()
    }

    /// Serializes back to the graph file format; `parse` of the output yields
    /// an identical graph.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertex_names {
            out.push_str("vertex ");
            out.push_str(v);
            out.push('\n');
        }
        for e in 0..self.edge_names.len() {
            out.push_str("edge ");
            out.push_str(&self.edge_names[e]);
            out.push(' ');
            out.push_str(self.vertex_name(self.edge_src[e]));
            out.push(' ');
            out.push_str(self.vertex_name(self.edge_dst[e]));
            out.push('\n');
        }
        if out.is_empty() {
            out.push_str("# empty graph\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.vertex_names,
            "edges": (0..self.edge_names.len()).map(|e| json!({
                "id": self.edge_names[e],
                "src": self.vertex_name(self.edge_src[e]),
                "dst": self.vertex_name(self.edge_dst[e]),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexIx> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexIx)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        (0..self.edge_names.len() as u32).map(EdgeIx)
    }

    pub fn vertex_name(&self, v: VertexIx) -> &str {
        &self.vertex_names[v.idx()]
    }

    pub fn edge_name(&self, e: EdgeIx) -> &str {
        &self.edge_names[e.idx()]
    }

    pub fn vertex(&self, name: &str) -> Option<VertexIx> {
        self.vertex_names
            .binary_search_by(|v| v.as_str().cmp(name))
            .ok()
            .map(|i| VertexIx(i as u32))
    }

    pub fn edge(&self, name: &str) -> Option<EdgeIx> {
        self.edge_names.binary_search_by(|v| v.as_str().cmp(name)).ok().map(|i| EdgeIx(i as u32))
    }

    pub fn src(&self, e: EdgeIx) -> VertexIx {
        self.edge_src[e.idx()]
    }

    pub fn dst(&self, e: EdgeIx) -> VertexIx {
        self.edge_dst[e.idx()]
    }

    /// `s^{-1}(v)`, sorted by edge id.
    pub fn out_edges(&self, v: VertexIx) -> &[EdgeIx] {
        &self.out_edges[v.idx()]
    }

    /// `r^{-1}(v)`, sorted by edge id.
    pub fn in_edges(&self, v: VertexIx) -> &[EdgeIx] {
        &self.in_edges[v.idx()]
    }

    pub fn is_sink(&self, v: VertexIx) -> bool {
        self.out_edges(v).is_empty()
    }

    pub fn is_source(&self, v: VertexIx) -> bool {
        self.in_edges(v).is_empty()
    }

    /// Vertices emitting no edges, sorted.
    pub fn sinks(&self) -> Vec<VertexIx> {
        self.vertices().filter(|&v| self.is_sink(v)).collect()
    }

    /// Vertices receiving no edges, sorted.
    pub fn sources(&self) -> Vec<VertexIx> {
        self.vertices().filter(|&v| self.is_source(v)).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.cycle_witness().is_none()
    }

    /// Some cycle of the graph, or `None` if acyclic.
    pub fn cycle_witness(&self) -> Option<Cycle> {
        // DFS with a vertex stack; a back edge closes a vertex-simple cycle.
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let n = self.vertex_count();
        let mut color = vec![Color::White; n];
        for start in self.vertices() {
            if color[start.idx()] != Color::White {
                continue;
            }
            // stack of (vertex, next out-edge position); path_edges tracks the tree path
            let mut stack = vec![(start, 0usize)];
            let mut path_edges: Vec<EdgeIx> = Vec::new();
            color[start.idx()] = Color::Gray;
            while let Some(frame) = stack.last_mut() {
                let v = frame.0;
                if frame.1 < self.out_edges(v).len() {
                    let e = self.out_edges(v)[frame.1];
                    frame.1 += 1;
                    let w = self.dst(e);
                    match color[w.idx()] {
                        Color::Gray => {
                            // pop path edges back to w
                            let mut cyc = vec![e];
                            let mut at = v;
                            for &pe in path_edges.iter().rev() {
                                if at == w {
                                    break;
                                }
                                cyc.push(pe);
                                at = self.src(pe);
                            }
                            cyc.reverse();
                            let path = Path::from_edges(self, cyc).expect("DFS cycle is composable");
                            return Some(Cycle::new(self, path).expect("DFS cycle is vertex-simple"));
                        }
                        Color::White => {
                            color[w.idx()] = Color::Gray;
                            path_edges.push(e);
                            stack.push((w, 0));
                        }
                        Color::Black => {}
                    }
                } else {
                    color[v.idx()] = Color::Black;
                    stack.pop();
                    path_edges.pop();
                }
            }
        }
        None
    }

    /// All simple cycles up to rotation, each based at its smallest vertex,
    /// sorted by (base, length, edge sequence).
    pub fn simple_cycles(&self) -> Vec<Cycle> {
        let mut found = Vec::new();
        for base in self.vertices() {
            // DFS only through vertices >= base so each rotation class is
            // discovered exactly once, based at its minimum vertex.
            let mut edge_stack: Vec<EdgeIx> = Vec::new();
            let mut on_path = vec![false; self.vertex_count()];
            on_path[base.idx()] = true;
            self.cycle_dfs(base, base, &mut edge_stack, &mut on_path, &mut found);
        }
        found.sort_by(|a, b| {
            (a.base(), a.len(), a.path().edges())
                .cmp(&(b.base(), b.len(), b.path().edges()))
        });
        found
    }

    fn cycle_dfs(
        &self,
        base: VertexIx,
        at: VertexIx,
        edge_stack: &mut Vec<EdgeIx>,
        on_path: &mut Vec<bool>,
        found: &mut Vec<Cycle>,
    ) {
        for &e in self.out_edges(at) {
            let w = self.dst(e);
            if w == base {
                edge_stack.push(e);
                let path = Path::from_edges(self, edge_stack.clone()).expect("composable by construction");
                found.push(Cycle::new(self, path).expect("vertex-simple by construction"));
                edge_stack.pop();
            } else if w > base && !on_path[w.idx()] {
                on_path[w.idx()] = true;
                edge_stack.push(e);
                self.cycle_dfs(base, w, edge_stack, on_path, found);
                edge_stack.pop();
                on_path[w.idx()] = false;
            }
        }
    }

    /// True iff some (possibly trivial) path runs from `v` to `w`.
    pub fn reaches(&self, v: VertexIx, w: VertexIx) -> bool {
        if v == w {
            return true;
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([v]);
        seen[v.idx()] = true;
        while let Some(x) = queue.pop_front() {
            for &e in self.out_edges(x) {
                let y = self.dst(e);
                if y == w {
                    return true;
                }
                if !seen[y.idx()] {
                    seen[y.idx()] = true;
                    queue.push_back(y);
                }
            }
        }
        false
    }

    /// Decides cofinality: every vertex must reach every sink and (some
    /// vertex of) every simple cycle. On finite graphs every element of
    /// E^{<=infinity} either ends in a sink or eventually enters a simple
    /// cycle, so this is a complete decision procedure.
    pub fn is_cofinal(&self) -> CofinalityCheck {
        let sinks = self.sinks();
        let cycles = self.simple_cycles();
        for v in self.vertices() {
            for &t in &sinks {
                if !self.reaches(v, t) {
                    return CofinalityCheck::NotCofinal { vertex: v, tail: Tail::Sink(t) };
                }
            }
            for c in &cycles {
                if !c.vertices_in(self).iter().any(|&w| self.reaches(v, w)) {
                    return CofinalityCheck::NotCofinal { vertex: v, tail: Tail::Cycle(c.clone()) };
                }
            }
        }
        CofinalityCheck::Cofinal
    }

    /// Number of paths (including the trivial path) ending at `v` and using
    /// no forbidden edge. Errors if a cycle avoiding the forbidden edges
    /// reaches `v` (infinitely many paths).
    pub fn count_paths_into(
        &self,
        v: VertexIx,
        forbidden: &BTreeSet<EdgeIx>,
    ) -> Result<u64, GraphError> {
        // restrict to ancestors of v along allowed edges
        let mut relevant = vec![false; self.vertex_count()];
        relevant[v.idx()] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for &e in self.in_edges(x) {
                if forbidden.contains(&e) {
                    continue;
                }
                let y = self.src(e);
                if !relevant[y.idx()] {
                    relevant[y.idx()] = true;
                    queue.push_back(y);
                }
            }
        }
        // memoized count with cycle detection on the relevant subgraph
        let mut memo: Vec<Option<u64>> = vec![None; self.vertex_count()];
        let mut in_progress = vec![false; self.vertex_count()];
        self.count_paths_rec(v, forbidden, &mut memo, &mut in_progress)
    }

    fn count_paths_rec(
        &self,
        v: VertexIx,
        forbidden: &BTreeSet<EdgeIx>,
        memo: &mut Vec<Option<u64>>,
        in_progress: &mut Vec<bool>,
    ) -> Result<u64, GraphError> {
        if let Some(c) = memo[v.idx()] {
            return Ok(c);
        }
        if in_progress[v.idx()] {
            return Err(GraphError::InfinitePathCount(self.vertex_name(v).to_string()));
        }
        in_progress[v.idx()] = true;
        let mut total: u64 = 1; // the trivial path at v
        for &e in self.in_edges(v) {
            if forbidden.contains(&e) {
                continue;
            }
            let c = self.count_paths_rec(self.src(e), forbidden, memo, in_progress)?;
            total = total.checked_add(c).ok_or(GraphError::PathCountOverflow)?;
        }
        in_progress[v.idx()] = false;
        memo[v.idx()] = Some(total);
        Ok(total)
    }
}

/// A path: a vertex (trivial, length 0) or a composable edge sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    source: VertexIx,
    edges: Vec<EdgeIx>,
    range: VertexIx,
}

impl Path {
    pub fn trivial(v: VertexIx) -> Path {
        Path { source: v, edges: Vec::new(), range: v }
    }

    pub fn from_edges(g: &Graph, edges: Vec<EdgeIx>) -> Result<Path, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::NotComposable(0));
        }
        for i in 0..edges.len() - 1 {
            if g.dst(edges[i]) != g.src(edges[i + 1]) {
                return Err(GraphError::NotComposable(i + 1));
            }
        }
        let source = g.src(edges[0]);
        let range = g.dst(*edges.last().unwrap());
        Ok(Path { source, edges, range })
    }

    pub fn from_edge_names(g: &Graph, names: &[&str]) -> Result<Path, GraphError> {
        let edges = names
            .iter()
            .map(|n| g.edge(n).ok_or_else(|| GraphError::NoSuchEdge(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Path::from_edges(g, edges)
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> VertexIx {
        self.source
    }

    pub fn range(&self) -> VertexIx {
        self.range
    }

    pub fn edges(&self) -> &[EdgeIx] {
        &self.edges
    }

    /// The path with its last edge removed; panics on trivial paths.
    pub fn dropping_last(&self, g: &Graph) -> Path {
        let last = *self.edges.last().expect("nonempty path");
        let edges = self.edges[..self.edges.len() - 1].to_vec();
        if edges.is_empty() {
            Path::trivial(g.src(last))
        } else {
            Path { source: self.source, edges, range: g.src(last) }
        }
    }

    /// The path extended by one composable edge.
    pub fn extended(&self, g: &Graph, e: EdgeIx) -> Path {
        assert_eq!(self.range, g.src(e), "extension edge not composable");
        let mut edges = self.edges.clone();
        edges.push(e);
        let source = if edges.len() == 1 { g.src(e) } else { self.source };
        Path { source, edges, range: g.dst(e) }
    }

    /// Concatenation `self · other`; panics unless `r(self) = s(other)`.
    pub fn concat(&self, g: &Graph, other: &Path) -> Path {
        if other.is_trivial() {
            assert_eq!(self.range, other.source, "paths not composable");
            return self.clone();
        }
        let mut p = self.clone();
        for &e in other.edges() {
            p = p.extended(g, e);
        }
        p
    }

    /// Display form over a graph: edge ids joined by spaces, or the vertex id.
    pub fn display(&self, g: &Graph) -> String {
        if self.is_trivial() {
            g.vertex_name(self.source).to_string()
        } else {
            self.edges.iter().map(|&e| g.edge_name(e)).collect::<Vec<_>>().join(" ")
        }
    }

    /// Exit of a closed path: an edge `e` with `s(e) = s(e_i)` and
    /// `e != e_i` at some position `i`. On cycles (distinct sources) this
    /// coincides with "an edge starting on the cycle that is not an edge of
    /// the cycle". Returns the smallest such edge.
    pub fn has_exit(&self, g: &Graph) -> Option<EdgeIx> {
        let mut exits: Vec<EdgeIx> = Vec::new();
        for &pe in &self.edges {
            for &e in g.out_edges(g.src(pe)) {
                if e != pe {
                    exits.push(e);
                }
            }
        }
        exits.sort();
        exits.first().copied()
    }
}

/// A closed vertex-simple path of length >= 1 with a chosen base vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    path: Path,
}

impl Cycle {
    /// Validates closure and distinct edge sources.
    pub fn new(g: &Graph, path: Path) -> Result<Cycle, GraphError> {
        if path.is_trivial() {
            return Err(GraphError::NotACycle("trivial path".into()));
        }
        if path.source() != path.range() {
            return Err(GraphError::NotACycle(format!(
                "source `{}` differs from range `{}`",
                g.vertex_name(path.source()),
                g.vertex_name(path.range())
            )));
        }
        let mut sources: Vec<VertexIx> = path.edges().iter().map(|&e| g.src(e)).collect();
        sources.sort();
        let distinct = sources.windows(2).all(|w| w[0] != w[1]);
        if !distinct {
            return Err(GraphError::NotACycle("repeated edge source".into()));
        }
        Ok(Cycle { path })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn base(&self) -> VertexIx {
        self.path.source()
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edges(&self) -> &[EdgeIx] {
        self.path.edges()
    }

    /// Rotates the cycle so it is based at `v` (which must lie on it).
    pub fn rotate_to(&self, g: &Graph, v: VertexIx) -> Result<Cycle, GraphError> {
        let pos = self
            .path
            .edges()
            .iter()
            .position(|&e| g.src(e) == v)
            .ok_or_else(|| GraphError::NotACycle(format!("vertex `{}` not on cycle", g.vertex_name(v))))?;
        let mut edges = self.path.edges()[pos..].to_vec();
        edges.extend_from_slice(&self.path.edges()[..pos]);
        let path = Path::from_edges(g, edges)?;
        Cycle::new(g, path)
    }

    /// Rotation with base at the smallest vertex on the cycle.
    pub fn canonical_rotation(&self, g: &Graph) -> Cycle {
        let min = self.path.edges().iter().map(|&e| g.src(e)).min().unwrap();
        self.rotate_to(g, min).expect("min vertex lies on cycle")
    }

    pub fn vertices_in(&self, g: &Graph) -> Vec<VertexIx> {
        self.path.edges().iter().map(|&e| g.src(e)).collect()
    }

    /// The smallest edge departing the cycle from one of its vertices, if any.
    pub fn exit(&self, g: &Graph) -> Option<EdgeIx> {
        let on_cycle: BTreeSet<EdgeIx> = self.path.edges().iter().copied().collect();
        let mut candidates: Vec<EdgeIx> = Vec::new();
        for &v in &self.vertices_in(g) {
            for &e in g.out_edges(v) {
                if !on_cycle.contains(&e) {
                    candidates.push(e);
                }
            }
        }
        candidates.sort();
        candidates.first().copied()
    }

    pub fn display(&self, g: &Graph) -> String {
        self.path.display(g)
    }
}

/// Outcome of the cofinality decision.
#[derive(Debug, Clone)]
pub enum CofinalityCheck {
    Cofinal,
    NotCofinal { vertex: VertexIx, tail: Tail },
}

impl CofinalityCheck {
    pub fn is_cofinal(&self) -> bool {
        matches!(self, CofinalityCheck::Cofinal)
    }

    pub fn describe(&self, g: &Graph) -> String {
        match self {
            CofinalityCheck::Cofinal => "cofinal".to_string(),
            CofinalityCheck::NotCofinal { vertex, tail } => format!(
                "vertex `{}` cannot reach {}",
                g.vertex_name(*vertex),
                tail.describe(g)
            ),
        }
    }
}

/// The unreachable tail witnessing a cofinality failure.
#[derive(Debug, Clone)]
pub enum Tail {
    Sink(VertexIx),
    Cycle(Cycle),
}

impl Tail {
    pub fn describe(&self, g: &Graph) -> String {
        match self {
            Tail::Sink(v) => format!("sink `{}`", g.vertex_name(*v)),
            Tail::Cycle(c) => format!("cycle ({})", c.display(g)),
        }
    }
}

/// True iff no simple cycle of the graph has an exit.
pub fn no_cycle_has_exit(g: &Graph) -> bool {
    g.simple_cycles().iter().all(|c| c.exit(g).is_none())
}

/// Shared handle used throughout the algebra layer.
pub type GraphRef = Arc<Graph>;

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose(n: usize) -> Graph {
        let mut b = Graph::builder();
        b.vertex("v");
        for i in 1..=n {
            b.edge(format!("y{i}"), "v", "v");
        }
        b.build().unwrap()
    }

    fn clock3() -> Graph {
        let mut b = Graph::builder();
        b.vertex("v").vertex("w1").vertex("w2").vertex("w3");
        b.edge("f", "v", "w1").edge("g", "v", "w2").edge("h", "v", "w3");
        b.build().unwrap()
    }

    fn single_edge() -> Graph {
        let mut b = Graph::builder();
        b.vertex("v").vertex("w").edge("f", "v", "w");
        b.build().unwrap()
    }

    /// Two truncation levels of the chain graph: loops f1,g1 at v1, loops
    /// f2,g2 at v2, and e1 from v2 to v1.
    fn chain2() -> Graph {
        let mut b = Graph::builder();
        b.vertex("v1").vertex("v2");
        b.edge("f1", "v1", "v1").edge("g1", "v1", "v1");
        b.edge("f2", "v2", "v2").edge("g2", "v2", "v2");
        b.edge("e1", "v2", "v1");
        b.build().unwrap()
    }

    #[test]
    fn parse_rose_with_one_petal() {
        let g = Graph::parse("vertex v\nedge y1 v v\n").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 1);
        let e = g.edge("y1").unwrap();
        assert_eq!(g.src(e), g.dst(e));
    }

    #[test]
    fn parse_single_vertex() {
        let g = Graph::parse("vertex v\n").unwrap();
        assert_eq!(g.sinks(), vec![g.vertex("v").unwrap()]);
        assert_eq!(g.sources(), vec![g.vertex("v").unwrap()]);
    }

    #[test]
    fn parse_duplicate_edge_is_an_error() {
        let err = Graph::parse("vertex v\nvertex w\nedge f v w\nedge f v w\n").unwrap_err();
        match err {
            GraphError::Parse { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("duplicate"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_reports_undeclared_vertex_with_line() {
        let err = Graph::parse("vertex v\nedge f v w\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
    }

    #[test]
    fn vertex_and_edge_namespaces_are_independent() {
        // dual graphs produce a vertex and an edge with the same id
        let g = Graph::parse("vertex f\nvertex w\nedge f f w\n").unwrap();
        assert!(g.vertex("f").is_some());
        assert!(g.edge("f").is_some());
    }

    #[test]
    fn round_trip_is_identity() {
        let g = chain2();
        let again = Graph::parse(&g.to_text()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn sinks_and_sources() {
        let rose = rose(3);
        assert!(rose.sinks().is_empty());
        assert!(rose.sources().is_empty());

        let clock = clock3();
        let names: Vec<&str> = clock.sinks().iter().map(|&v| clock.vertex_name(v)).collect();
        assert_eq!(names, vec!["w1", "w2", "w3"]);
        assert_eq!(clock.sources(), vec![clock.vertex("v").unwrap()]);
    }

    #[test]
    fn acyclicity_witnesses() {
        assert!(single_edge().is_acyclic());
        let r = rose(1);
        let w = r.cycle_witness().unwrap();
        assert_eq!(w.display(&r), "y1");
        let c = chain2();
        let w = c.cycle_witness().unwrap();
        assert_eq!(w.len(), 1); // some loop
    }

    /// Brute-force oracle: enumerate all edge sequences up to `max_len`,
    /// keep the closed vertex-simple ones, count rotation classes.
    fn brute_force_cycle_count(g: &Graph, max_len: usize) -> usize {
        fn extend(
            g: &Graph,
            seq: &mut Vec<EdgeIx>,
            max_len: usize,
            all: &mut Vec<Vec<EdgeIx>>,
        ) {
            let last = *seq.last().unwrap();
            if g.dst(last) == g.src(seq[0]) {
                let mut srcs: Vec<_> = seq.iter().map(|&e| g.src(e)).collect();
                srcs.sort();
                srcs.dedup();
                if srcs.len() == seq.len() {
                    all.push(seq.clone());
                }
            }
            if seq.len() < max_len {
                for e in g.edges() {
                    if g.src(e) == g.dst(last) {
                        seq.push(e);
                        extend(g, seq, max_len, all);
                        seq.pop();
                    }
                }
            }
        }
        let mut all = Vec::new();
        for e in g.edges() {
            let mut seq = vec![e];
            extend(g, &mut seq, max_len, &mut all);
        }
        // quotient by rotation
        let mut reps = BTreeSet::new();
        for seq in all {
            let mut best: Option<Vec<u32>> = None;
            for k in 0..seq.len() {
                let rot: Vec<u32> =
                    seq[k..].iter().chain(&seq[..k]).map(|e| e.0).collect();
                if best.as_ref().map_or(true, |b| rot < *b) {
                    best = Some(rot);
                }
            }
            reps.insert(best.unwrap());
        }
        reps.len()
    }

    #[test]
    fn simple_cycles_two_loops() {
        // two loops f1, g1 at one vertex: the cycles are f1 and g1; the
        // closed path f1 g1 repeats the source v, so it is not a cycle
        let mut b = Graph::builder();
        b.vertex("v").edge("f1", "v", "v").edge("g1", "v", "v");
        let g = b.build().unwrap();
        let cycles = g.simple_cycles();
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles.len(), brute_force_cycle_count(&g, 2));
        let names: Vec<String> = cycles.iter().map(|c| c.display(&g)).collect();
        assert_eq!(names, vec!["f1", "g1"]);
    }

    #[test]
    fn simple_cycles_acyclic_and_two_cycle() {
        assert!(clock3().simple_cycles().is_empty());

        let mut b = Graph::builder();
        b.vertex("v").vertex("w").edge("e", "v", "w").edge("f", "w", "v");
        let g = b.build().unwrap();
        let cycles = g.simple_cycles();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].display(&g), "e f");
        assert_eq!(brute_force_cycle_count(&g, 2), 1);
    }

    #[test]
    fn cycle_exits() {
        let r2 = rose(2);
        let y1 = Cycle::new(&r2, Path::from_edge_names(&r2, &["y1"]).unwrap()).unwrap();
        assert_eq!(y1.exit(&r2), r2.edge("y2"));

        let r1 = rose(1);
        let loop1 = Cycle::new(&r1, Path::from_edge_names(&r1, &["y1"]).unwrap()).unwrap();
        assert_eq!(loop1.exit(&r1), None);

        let ch = chain2();
        let f1 = Cycle::new(&ch, Path::from_edge_names(&ch, &["f1"]).unwrap()).unwrap();
        assert_eq!(f1.exit(&ch), ch.edge("g1"));
    }

    #[test]
    fn exit_is_invariant_under_rotation() {
        let mut b = Graph::builder();
        b.vertex("a").vertex("b");
        b.edge("e", "a", "b").edge("f", "b", "a").edge("x", "b", "b");
        let g = b.build().unwrap();
        let c = Cycle::new(&g, Path::from_edge_names(&g, &["e", "f"]).unwrap()).unwrap();
        let rotated = c.rotate_to(&g, g.vertex("b").unwrap()).unwrap();
        assert_eq!(c.exit(&g).is_some(), rotated.exit(&g).is_some());
    }

    #[test]
    fn reachability() {
        let clock = clock3();
        let v = clock.vertex("v").unwrap();
        let w1 = clock.vertex("w1").unwrap();
        assert!(clock.reaches(v, v));
        assert!(clock.reaches(v, w1));
        assert!(!clock.reaches(w1, v));

        let ch = chain2();
        assert!(ch.reaches(ch.vertex("v2").unwrap(), ch.vertex("v1").unwrap()));
        assert!(!ch.reaches(ch.vertex("v1").unwrap(), ch.vertex("v2").unwrap()));
    }

    #[test]
    fn cofinality_of_paper_graphs() {
        assert!(rose(2).is_cofinal().is_cofinal());
        assert!(!chain2().is_cofinal().is_cofinal());

        // Example 1's E_F shape: a loop plus an edge to a sink
        let mut b = Graph::builder();
        b.vertex("y1").vertex("v");
        b.edge("c", "y1", "y1").edge("d", "y1", "v");
        let ef = b.build().unwrap();
        match ef.is_cofinal() {
            CofinalityCheck::NotCofinal { vertex, tail: Tail::Cycle(_) } => {
                assert_eq!(ef.vertex_name(vertex), "v");
            }
            other => panic!("expected cycle witness, got {other:?}"),
        }

        // Example 2's E_F shape: two vertices, all four edges
        let mut b = Graph::builder();
        b.vertex("f1").vertex("g1");
        b.edge("a", "f1", "f1").edge("b", "f1", "g1").edge("c", "g1", "f1").edge("d", "g1", "g1");
        assert!(b.build().unwrap().is_cofinal().is_cofinal());
    }

    /// Brute-force oracle: enumerate paths into `v` by reverse extension.
    fn brute_force_paths_into(g: &Graph, v: VertexIx, forbidden: &BTreeSet<EdgeIx>, cap: usize) -> usize {
        let mut count = 0usize;
        let mut frontier: Vec<Vec<EdgeIx>> = vec![Vec::new()];
        while let Some(path) = frontier.pop() {
            count += 1;
            assert!(count <= cap, "path explosion");
            let first = path.first().map(|&e| g.src(e)).unwrap_or(v);
            for &e in g.in_edges(first) {
                if !forbidden.contains(&e) {
                    let mut longer = vec![e];
                    longer.extend_from_slice(&path);
                    frontier.push(longer);
                }
            }
        }
        count
    }

    #[test]
    fn path_counting() {
        let se = single_edge();
        let w = se.vertex("w").unwrap();
        assert_eq!(se.count_paths_into(w, &BTreeSet::new()).unwrap(), 2);
        assert_eq!(brute_force_paths_into(&se, w, &BTreeSet::new(), 100), 2);

        let clock = clock3();
        let w1 = clock.vertex("w1").unwrap();
        assert_eq!(clock.count_paths_into(w1, &BTreeSet::new()).unwrap(), 2);
        assert_eq!(brute_force_paths_into(&clock, w1, &BTreeSet::new(), 100), 2);

        let r1 = rose(1);
        let v = r1.vertex("v").unwrap();
        assert!(matches!(
            r1.count_paths_into(v, &BTreeSet::new()),
            Err(GraphError::InfinitePathCount(_))
        ));
        // forbidding the loop makes the count finite
        let forbidden: BTreeSet<_> = [r1.edge("y1").unwrap()].into();
        assert_eq!(r1.count_paths_into(v, &forbidden).unwrap(), 1);
    }

    #[test]
    fn json_export_is_sorted() {
        let g = chain2();
        let j = g.to_json();
        let ids: Vec<&str> =
            j["edges"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }
}
