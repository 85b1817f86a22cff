//! Measurement scenarios as finite simplicial complexes.
//!
//! A scenario is stored as its declared maximal contexts; the full complex is
//! their downward closure, which is automatically closed under nonempty
//! intersection. Acyclicity is decided by Graham reduction over the maximal
//! contexts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid vertex label {0:?}: labels are nonempty and contain no commas or whitespace")]
    InvalidLabel(String),
    #[error("scenario has no vertices")]
    NoVertices,
    #[error("context is empty")]
    EmptyContext,
    #[error("vertex {0} appears twice in one context")]
    DuplicateVertex(VertexId),
    #[error("vertex {0} is not covered by any maximal context")]
    UncoveredVertex(VertexId),
    #[error("maximal context {inner} is contained in {outer}")]
    RedundantMaximalContext { inner: Context, outer: Context },
    #[error("context mentions undeclared vertex {0}")]
    UnknownVertex(VertexId),
    #[error("expected a context of dimension {expected}, got {context}")]
    WrongDimension { expected: usize, context: Context },
    #[error("graph is disconnected: {0} is unreachable from the base vertex")]
    DisconnectedGraph(VertexId),
}

/// Label of a simple measurement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VertexId(String);

impl VertexId {
    pub fn new(label: impl Into<String>) -> Result<Self, ScenarioError> {
        let label = label.into();
        if label.is_empty() || label.chars().any(|c| c == ',' || c.is_whitespace()) {
            return Err(ScenarioError::InvalidLabel(label));
        }
        Ok(VertexId(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for VertexId {
    type Error = ScenarioError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        VertexId::new(s)
    }
}

impl From<VertexId> for String {
    fn from(v: VertexId) -> String {
        v.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand used by the builtin tables and tests. Panics on an invalid label.
pub fn v(label: &str) -> VertexId {
    VertexId::new(label).expect("valid vertex label")
}

/// A simplex: a nonempty, sorted, duplicate-free set of vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    vertices: Vec<VertexId>,
}

impl Context {
    pub fn new<I: IntoIterator<Item = VertexId>>(vertices: I) -> Result<Self, ScenarioError> {
        let mut vs: Vec<VertexId> = vertices.into_iter().collect();
        if vs.is_empty() {
            return Err(ScenarioError::EmptyContext);
        }
        vs.sort();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(ScenarioError::DuplicateVertex(w[0].clone()));
        }
        Ok(Context { vertices: vs })
    }

    /// Builds a context from labels, e.g. `Context::of(&["b", "a"])`.
    /// Panics on invalid input; meant for tables and tests.
    pub fn of(labels: &[&str]) -> Self {
        Context::new(labels.iter().map(|l| v(l))).expect("valid context")
    }

    /// Parses a context key such as `"a,b"`.
    pub fn parse_key(key: &str) -> Result<Self, ScenarioError> {
        Context::new(
            key.split(',')
                .map(|s| VertexId::new(s.trim()))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    pub fn position(&self, v: &VertexId) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn is_subset(&self, other: &Context) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    pub fn intersection(&self, other: &Context) -> Option<Context> {
        let common: Vec<VertexId> = self
            .vertices
            .iter()
            .filter(|v| other.contains(v))
            .cloned()
            .collect();
        if common.is_empty() {
            None
        } else {
            Some(Context { vertices: common })
        }
    }

    /// Every nonempty subset, including the context itself.
    pub fn nonempty_subsets(&self) -> Vec<Context> {
        let n = self.vertices.len();
        (1u64..(1u64 << n))
            .map(|mask| Context {
                vertices: (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.vertices[i].clone())
                    .collect(),
            })
            .collect()
    }

    /// Subsets with exactly `size` vertices, in lexicographic order.
    pub fn subsets_of_size(&self, size: usize) -> Vec<Context> {
        let mut out: Vec<Context> = self
            .nonempty_subsets()
            .into_iter()
            .filter(|c| c.len() == size)
            .collect();
        out.sort();
        out
    }

    /// Comma-joined key used in files and reports.
    pub fn key(&self) -> String {
        self.vertices
            .iter()
            .map(VertexId::as_str)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl Serialize for Context {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialScenario {
    vertices: BTreeSet<VertexId>,
    maximal: BTreeSet<Context>,
    complex: BTreeSet<Context>,
}

impl SimplicialScenario {
    pub fn build<V, C>(vertices: V, maximal_contexts: C) -> Result<Self, ScenarioError>
    where
        V: IntoIterator<Item = VertexId>,
        C: IntoIterator<Item = Context>,
    {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(ScenarioError::NoVertices);
        }
        let maximal: BTreeSet<Context> = maximal_contexts.into_iter().collect();
        for c in &maximal {
            if let Some(u) = c.vertices().iter().find(|u| !vertices.contains(*u)) {
                return Err(ScenarioError::UnknownVertex(u.clone()));
            }
        }
        for inner in &maximal {
            if let Some(outer) = maximal.iter().find(|o| *o != inner && inner.is_subset(o)) {
                return Err(ScenarioError::RedundantMaximalContext {
                    inner: inner.clone(),
                    outer: outer.clone(),
                });
            }
        }
        for u in &vertices {
            if !maximal.iter().any(|c| c.contains(u)) {
                return Err(ScenarioError::UncoveredVertex(u.clone()));
            }
        }
        let complex = maximal
            .iter()
            .flat_map(Context::nonempty_subsets)
            .collect();
        Ok(SimplicialScenario {
            vertices,
            maximal,
            complex,
        })
    }

    /// Scenario whose vertices are exactly those mentioned by the contexts.
    pub fn from_contexts<C: IntoIterator<Item = Context>>(contexts: C) -> Result<Self, ScenarioError> {
        let maximal: Vec<Context> = contexts.into_iter().collect();
        let vertices: BTreeSet<VertexId> = maximal
            .iter()
            .flat_map(|c| c.vertices().iter().cloned())
            .collect();
        Self::build(vertices, maximal)
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn maximal_contexts(&self) -> &BTreeSet<Context> {
        &self.maximal
    }

    pub fn complex(&self) -> &BTreeSet<Context> {
        &self.complex
    }

    pub fn dim(&self) -> usize {
        self.maximal.iter().map(Context::dim).max().unwrap_or(0)
    }

    /// All simplices of dimension exactly `n`.
    pub fn faces(&self, n: usize) -> BTreeSet<Context> {
        self.complex.iter().filter(|c| c.dim() == n).cloned().collect()
    }

    pub fn one_skeleton(&self) -> Graph {
        let mut g = Graph::with_nodes(self.vertices.iter().cloned());
        for e in self.faces(1) {
            g.add_edge(e.vertices()[0].clone(), e.vertices()[1].clone());
        }
        g
    }

    pub fn is_acyclic(&self) -> (bool, ReductionTrace) {
        let trace = graham_reduce(self.maximal.iter());
        (trace.is_acyclic(), trace)
    }
}

/// Cycle graph `labels[0] - labels[1] - ... - labels[0]`.
pub fn cycle_scenario(labels: &[&str]) -> SimplicialScenario {
    let n = labels.len();
    SimplicialScenario::from_contexts(
        (0..n).map(|i| Context::of(&[labels[i], labels[(i + 1) % n]])),
    )
    .expect("cycle of distinct labels")
}

/// A single filled simplex on `n + 1` vertices `v0..vn`.
pub fn filled_simplex(n: usize) -> SimplicialScenario {
    let ctx = Context::new((0..=n).map(|i| v(&format!("v{i}")))).expect("distinct labels");
    SimplicialScenario::from_contexts([ctx]).expect("single context")
}

/// Barycentric subdivision of the triangle `abc`: corners `a,b,c`, edge
/// midpoints `ab,bc,ac` (labelled `mab,mbc,mac`) and centre `o`, with six
/// small triangles as maximal contexts.
pub fn barycentric_subdivided_triangle() -> SimplicialScenario {
    let faces = [
        ["a", "mab", "o"],
        ["mab", "b", "o"],
        ["b", "mbc", "o"],
        ["mbc", "c", "o"],
        ["c", "mac", "o"],
        ["mac", "a", "o"],
    ];
    SimplicialScenario::from_contexts(faces.iter().map(|f| Context::of(f))).expect("valid faces")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "object")]
pub enum GrahamStep {
    /// Vertex removed from the only hyperedge containing it.
    DeleteVertex { vertex: VertexId, hyperedge: Vec<VertexId> },
    /// Hyperedge removed because it is empty or strictly inside another.
    DeleteHyperedge { hyperedge: Vec<VertexId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<GrahamStep>,
    /// Hyperedges left when no rule applies.
    pub residual: Vec<Vec<VertexId>>,
}

impl ReductionTrace {
    pub fn is_acyclic(&self) -> bool {
        self.residual.is_empty()
    }
}

type Hyperedges = BTreeSet<BTreeSet<VertexId>>;

/// Every rule application that is legal on `edges`, vertex deletions first,
/// each group in lexicographic order.
fn legal_steps(edges: &Hyperedges) -> Vec<GrahamStep> {
    let mut owners: BTreeMap<&VertexId, Vec<&BTreeSet<VertexId>>> = BTreeMap::new();
    for e in edges {
        for u in e {
            owners.entry(u).or_default().push(e);
        }
    }
    let mut steps: Vec<GrahamStep> = owners
        .into_iter()
        .filter(|(_, es)| es.len() == 1)
        .map(|(u, es)| GrahamStep::DeleteVertex {
            vertex: u.clone(),
            hyperedge: es[0].iter().cloned().collect(),
        })
        .collect();
    for e in edges {
        let contained = e.is_empty()
            || edges
                .iter()
                .any(|o| o.len() > e.len() && e.is_subset(o));
        if contained {
            steps.push(GrahamStep::DeleteHyperedge {
                hyperedge: e.iter().cloned().collect(),
            });
        }
    }
    steps
}

fn apply_step(edges: &mut Hyperedges, step: &GrahamStep) {
    match step {
        GrahamStep::DeleteVertex { vertex, hyperedge } => {
            let old: BTreeSet<VertexId> = hyperedge.iter().cloned().collect();
            edges.remove(&old);
            let mut new = old;
            new.remove(vertex);
            // Equal hyperedges merge: the hypergraph is a set.
            edges.insert(new);
        }
        GrahamStep::DeleteHyperedge { hyperedge } => {
            let old: BTreeSet<VertexId> = hyperedge.iter().cloned().collect();
            edges.remove(&old);
        }
    }
}

/// Graham reduction with a caller-chosen rule order. `choose` receives the
/// legal steps (never empty) and returns the index of the one to apply.
pub fn graham_reduce_with<'a, I, F>(hyperedges: I, mut choose: F) -> ReductionTrace
where
    I: IntoIterator<Item = &'a Context>,
    F: FnMut(&[GrahamStep]) -> usize,
{
    let mut edges: Hyperedges = hyperedges
        .into_iter()
        .map(|c| c.vertices().iter().cloned().collect())
        .collect();
    let mut steps = Vec::new();
    loop {
        let legal = legal_steps(&edges);
        if legal.is_empty() {
            break;
        }
        let step = legal[choose(&legal).min(legal.len() - 1)].clone();
        apply_step(&mut edges, &step);
        steps.push(step);
    }
    ReductionTrace {
        steps,
        residual: edges.into_iter().map(|e| e.into_iter().collect()).collect(),
    }
}

/// Deterministic Graham reduction: smallest deletable vertex first, then the
/// smallest contained hyperedge.
pub fn graham_reduce<'a, I>(hyperedges: I) -> ReductionTrace
where
    I: IntoIterator<Item = &'a Context>,
{
    graham_reduce_with(hyperedges, |_| 0)
}

/// Simple undirected graph with sorted adjacency.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adjacency: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn with_nodes<I: IntoIterator<Item = VertexId>>(nodes: I) -> Self {
        Graph {
            adjacency: nodes.into_iter().map(|n| (n, BTreeSet::new())).collect(),
        }
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) {
        self.adjacency.entry(a.clone()).or_default().insert(b.clone());
        self.adjacency.entry(b).or_default().insert(a);
    }

    pub fn nodes(&self) -> impl Iterator<Item = &VertexId> {
        self.adjacency.keys()
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, n: &VertexId) -> impl Iterator<Item = &VertexId> {
        self.adjacency.get(n).into_iter().flatten()
    }

    pub fn has_edge(&self, a: &VertexId, b: &VertexId) -> bool {
        self.adjacency.get(a).is_some_and(|s| s.contains(b))
    }

    /// Edges as sorted pairs, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.adjacency
            .iter()
            .flat_map(|(a, ns)| ns.iter().filter(move |b| a < *b).map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// BFS spanning tree from `base`: parent of every reached vertex.
    fn bfs_parents(&self, base: &VertexId) -> Result<BTreeMap<VertexId, Option<VertexId>>, ScenarioError> {
        if !self.adjacency.contains_key(base) {
            return Err(ScenarioError::UnknownVertex(base.clone()));
        }
        let mut parent = BTreeMap::new();
        parent.insert(base.clone(), None);
        let mut queue = VecDeque::from([base.clone()]);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(&u) {
                if !parent.contains_key(w) {
                    parent.insert(w.clone(), Some(u.clone()));
                    queue.push_back(w.clone());
                }
            }
        }
        if let Some(missing) = self.nodes().find(|n| !parent.contains_key(*n)) {
            return Err(ScenarioError::DisconnectedGraph(missing.clone()));
        }
        Ok(parent)
    }

    /// Tree path from `base` to `target` (inclusive at both ends).
    fn tree_path(parent: &BTreeMap<VertexId, Option<VertexId>>, target: &VertexId) -> Vec<VertexId> {
        let mut path = vec![target.clone()];
        let mut cur = target;
        while let Some(Some(p)) = parent.get(cur) {
            path.push(p.clone());
            cur = p;
        }
        path.reverse();
        path
    }

    /// Any path from `from` to `to` along the BFS tree rooted at `from`.
    pub fn tree_path_between(&self, from: &VertexId, to: &VertexId) -> Result<Vec<VertexId>, ScenarioError> {
        let parent = self.bfs_parents(from)?;
        Ok(Self::tree_path(&parent, to))
    }

    /// Fundamental cycles of the BFS spanning tree rooted at `base`
    /// (lexicographic neighbour order). Each loop starts and ends at `base`:
    /// tree path to `u`, the non-tree edge `u - w` (`u < w`), tree path back.
    pub fn cycle_basis(&self, base: &VertexId) -> Result<Vec<Vec<VertexId>>, ScenarioError> {
        let parent = self.bfs_parents(base)?;
        let is_tree_edge = |a: &VertexId, b: &VertexId| {
            parent.get(a) == Some(&Some(b.clone())) || parent.get(b) == Some(&Some(a.clone()))
        };
        let mut loops = Vec::new();
        for (a, b) in self.edges() {
            if is_tree_edge(&a, &b) {
                continue;
            }
            let mut path = Self::tree_path(&parent, &a);
            let mut back = Self::tree_path(&parent, &b);
            back.reverse();
            path.extend(back);
            loops.push(path);
        }
        Ok(loops)
    }
}

/// Oriented boundary of a 2-simplex `[x0,x1,x2]`: `(x0,x1),(x1,x2),(x2,x0)`.
pub fn boundary(face: &Context) -> Result<Vec<(VertexId, VertexId)>, ScenarioError> {
    if face.dim() != 2 {
        return Err(ScenarioError::WrongDimension {
            expected: 2,
            context: face.clone(),
        });
    }
    let x = face.vertices();
    Ok(vec![
        (x[0].clone(), x[1].clone()),
        (x[1].clone(), x[2].clone()),
        (x[2].clone(), x[0].clone()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_cycle() -> SimplicialScenario {
        cycle_scenario(&["a", "b", "c", "d", "e"])
    }

    fn tetra_boundary() -> SimplicialScenario {
        SimplicialScenario::from_contexts(
            [["a", "b", "c"], ["a", "b", "d"], ["a", "c", "d"], ["b", "c", "d"]]
                .iter()
                .map(|f| Context::of(f)),
        )
        .unwrap()
    }

    #[test]
    fn labels_are_validated() {
        assert!(VertexId::new("a,b").is_err());
        assert!(VertexId::new("a b").is_err());
        assert!(VertexId::new("").is_err());
        assert!(VertexId::new("A0").is_ok());
        assert_eq!(
            Context::new([v("a"), v("a")]),
            Err(ScenarioError::DuplicateVertex(v("a")))
        );
    }

    #[test]
    fn five_cycle_complex_has_ten_simplices() {
        let s = five_cycle();
        assert_eq!(s.complex().len(), 10);
        assert_eq!(s.faces(0).len(), 5);
        let edges: Vec<String> = s.faces(1).iter().map(Context::key).collect();
        assert_eq!(edges, ["a,b", "a,e", "b,c", "c,d", "d,e"]);
        assert!(s.faces(2).is_empty());
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn single_point_and_tetrahedron() {
        let p = SimplicialScenario::from_contexts([Context::of(&["a"])]).unwrap();
        assert_eq!(p.complex().len(), 1);
        let g = p.one_skeleton();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));

        let t = tetra_boundary();
        assert_eq!(t.complex().len(), 14);
        assert_eq!(t.faces(2).len(), 4);
        assert_eq!(t.faces(1).len(), 6);
        let g = t.one_skeleton();
        assert_eq!((g.node_count(), g.edge_count()), (4, 6));
    }

    #[test]
    fn build_errors() {
        let err = SimplicialScenario::build([v("a"), v("b"), v("c")], [Context::of(&["a", "b"])]);
        assert_eq!(err, Err(ScenarioError::UncoveredVertex(v("c"))));
        let err = SimplicialScenario::build(
            [v("a"), v("b")],
            [Context::of(&["a", "b"]), Context::of(&["a"])],
        );
        assert!(matches!(err, Err(ScenarioError::RedundantMaximalContext { .. })));
        let err = SimplicialScenario::build([v("a")], [Context::of(&["a", "z"])]);
        assert_eq!(err, Err(ScenarioError::UnknownVertex(v("z"))));
        let err = SimplicialScenario::build(Vec::<VertexId>::new(), Vec::<Context>::new());
        assert_eq!(err, Err(ScenarioError::NoVertices));
    }

    #[test]
    fn build_is_order_independent() {
        let a = SimplicialScenario::from_contexts([Context::of(&["b", "a"]), Context::of(&["c", "b"])]);
        let b = SimplicialScenario::from_contexts([Context::of(&["b", "c"]), Context::of(&["a", "b"])]);
        assert_eq!(a, b);
    }

    #[test]
    fn closure_properties() {
        for s in [five_cycle(), tetra_boundary(), barycentric_subdivided_triangle(), filled_simplex(3)] {
            for c in s.complex() {
                for sub in c.nonempty_subsets() {
                    assert!(s.complex().contains(&sub));
                }
                for d in s.complex() {
                    if let Some(i) = c.intersection(d) {
                        assert!(s.complex().contains(&i));
                    }
                }
            }
        }
    }

    #[test]
    fn graham_examples() {
        let tri = Context::of(&["a", "b", "c"]);
        let trace = graham_reduce([&tri]);
        assert!(trace.is_acyclic());
        assert!(matches!(trace.steps.last(), Some(GrahamStep::DeleteHyperedge { .. })));

        let s = five_cycle();
        let trace = graham_reduce(s.maximal_contexts());
        assert!(trace.steps.is_empty());
        assert_eq!(trace.residual.len(), 5);

        assert!(!tetra_boundary().is_acyclic().0);
        assert!(!barycentric_subdivided_triangle().is_acyclic().0);
    }

    #[test]
    fn graham_on_path_and_star_is_acyclic() {
        let path = SimplicialScenario::from_contexts([
            Context::of(&["a", "b"]),
            Context::of(&["b", "c"]),
            Context::of(&["c", "d"]),
        ])
        .unwrap();
        assert!(path.is_acyclic().0);
        // Two triangles glued along an edge.
        let glued = SimplicialScenario::from_contexts([
            Context::of(&["a", "b", "c"]),
            Context::of(&["b", "c", "d"]),
        ])
        .unwrap();
        assert!(glued.is_acyclic().0);
    }

    #[test]
    fn simplices_and_cycles() {
        for n in 0..=4 {
            assert!(filled_simplex(n).is_acyclic().0, "simplex {n}");
        }
        let labels = ["a", "b", "c", "d", "e", "f", "g", "h"];
        for n in 3..=8 {
            assert!(!cycle_scenario(&labels[..n]).is_acyclic().0, "cycle {n}");
        }
    }

    #[test]
    fn cycle_basis_examples() {
        let g = five_cycle().one_skeleton();
        let loops = g.cycle_basis(&v("a")).unwrap();
        let labels: Vec<Vec<&str>> = loops
            .iter()
            .map(|l| l.iter().map(VertexId::as_str).collect())
            .collect();
        assert_eq!(labels, vec![vec!["a", "b", "c", "d", "e", "a"]]);

        let tree = SimplicialScenario::from_contexts([Context::of(&["a", "b"]), Context::of(&["a", "c"])])
            .unwrap()
            .one_skeleton();
        assert!(tree.cycle_basis(&v("a")).unwrap().is_empty());

        let k4 = tetra_boundary().one_skeleton();
        let loops = k4.cycle_basis(&v("a")).unwrap();
        assert_eq!(loops.len(), 3);
        for l in &loops {
            assert_eq!(l.first(), Some(&v("a")));
            assert_eq!(l.last(), Some(&v("a")));
            for w in l.windows(2) {
                assert!(k4.has_edge(&w[0], &w[1]));
            }
        }
    }

    #[test]
    fn cycle_basis_rejects_disconnected() {
        let mut g = Graph::with_nodes([v("a"), v("b"), v("c")]);
        g.add_edge(v("a"), v("b"));
        assert_eq!(g.cycle_basis(&v("a")), Err(ScenarioError::DisconnectedGraph(v("c"))));
    }

    #[test]
    fn boundary_examples() {
        let b = boundary(&Context::of(&["a", "b", "c"])).unwrap();
        assert_eq!(b, vec![(v("a"), v("b")), (v("b"), v("c")), (v("c"), v("a"))]);
        let b = boundary(&Context::of(&["a", "b", "d"])).unwrap();
        assert_eq!(b, vec![(v("a"), v("b")), (v("b"), v("d")), (v("d"), v("a"))]);
        assert!(matches!(
            boundary(&Context::of(&["a", "b"])),
            Err(ScenarioError::WrongDimension { .. })
        ));
    }
}
