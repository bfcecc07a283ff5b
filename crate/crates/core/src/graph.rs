//! Graph, edge-stream and matching primitives shared by every algorithm.
//!
//! Vertices are dense `usize` ids. Edges get dense ids in arrival order.
//! A [`Matching`] keeps a per-vertex index of its matched edge, so conflict
//! lookups against a new edge cost two array reads.

use std::cell::Cell;
use std::collections::HashSet;

use arrayvec::ArrayVec;
use serde::Serialize;

use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub weight: f64,
}

impl Edge {
    pub fn new(id: usize, u: VertexId, v: VertexId, weight: f64) -> Self {
        Edge { id: EdgeId(id), u, v, weight }
    }

    pub fn unit(id: usize, u: VertexId, v: VertexId) -> Self {
        Edge::new(id, u, v, 1.0)
    }

    #[inline]
    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite `x`. `x` must be an endpoint.
    #[inline]
    pub fn other(&self, x: VertexId) -> VertexId {
        debug_assert!(self.touches(x));
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    #[inline]
    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }

    fn key(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mcm,
    Mwm,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Mcm => "mcm",
            Mode::Mwm => "mwm",
        }
    }
}

/// Structural promises an arrival sequence makes about itself.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub is_tree: bool,
    pub is_growing_tree: bool,
    pub max_degree: Option<usize>,
}

impl Flags {
    pub fn tree() -> Self {
        Flags { is_tree: true, ..Flags::default() }
    }

    pub fn growing_tree() -> Self {
        Flags { is_tree: true, is_growing_tree: true, max_degree: None }
    }

    pub fn max_degree(d: usize) -> Self {
        Flags { max_degree: Some(d), ..Flags::default() }
    }
}

/// Incremental validator for a stream of edges: rejects self-loops,
/// duplicates, and anything breaking the declared [`Flags`].
#[derive(Clone, Debug)]
pub struct StreamGuard {
    mode: Mode,
    flags: Flags,
    edges: Vec<Edge>,
    pairs: HashSet<(VertexId, VertexId)>,
    degree: Vec<usize>,
    parent: Vec<usize>,
}

impl StreamGuard {
    pub fn new(mode: Mode, flags: Flags) -> Self {
        StreamGuard { mode, flags, edges: Vec::new(), pairs: HashSet::new(), degree: Vec::new(), parent: Vec::new() }
    }

    /// Accepts only the declared-flag-free checks (no tree, no degree cap).
    pub fn unchecked(mode: Mode) -> Self {
        StreamGuard::new(mode, Flags::default())
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.degree.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.degree.get(v).copied().unwrap_or(0)
    }

    /// Whether `v` has appeared on some revealed edge.
    pub fn is_seen(&self, v: VertexId) -> bool {
        self.degree(v) > 0
    }

    fn grow(&mut self, v: VertexId) {
        if v >= self.degree.len() {
            let old = self.degree.len();
            self.degree.resize(v + 1, 0);
            self.parent.extend(old..=v);
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Validates `e` against everything seen so far, then records it.
    pub fn admit(&mut self, e: &Edge) -> Result<()> {
        if e.id.0 != self.edges.len() {
            return Err(Error::EdgeOrder { expected: self.edges.len(), got: e.id.0 });
        }
        if e.u == e.v {
            return Err(Error::SelfLoop(e.u));
        }
        if !e.weight.is_finite() || e.weight < 0.0 {
            return Err(Error::BadWeight(e.weight));
        }
        if self.mode == Mode::Mcm && e.weight != 1.0 {
            return Err(Error::NonUnitWeight(e.weight));
        }
        if self.pairs.contains(&e.key()) {
            return Err(Error::DuplicateEdge(e.u, e.v));
        }
        self.grow(e.u.max(e.v));
        if self.flags.is_growing_tree && !self.edges.is_empty() {
            let shared = self.is_seen(e.u) as usize + self.is_seen(e.v) as usize;
            if shared != 1 {
                return Err(Error::NotGrowing(e.u, e.v));
            }
        }
        if self.flags.is_tree || self.flags.is_growing_tree {
            let (a, b) = (self.find(e.u), self.find(e.v));
            if a == b {
                return Err(Error::NotATree(e.u, e.v));
            }
        }
        if let Some(d) = self.flags.max_degree {
            for x in [e.u, e.v] {
                if self.degree[x] + 1 > d {
                    return Err(Error::DegreeExceeded { vertex: x, max: d });
                }
            }
        }
        let (a, b) = (self.find(e.u), self.find(e.v));
        self.parent[a] = b;
        self.degree[e.u] += 1;
        self.degree[e.v] += 1;
        self.pairs.insert(e.key());
        self.edges.push(*e);
        Ok(())
    }
}

/// Edges in arrival order plus the flags the stream claims to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrivalSequence {
    pub mode: Mode,
    pub flags: Flags,
    pub n_vertices: usize,
    pub edges: Vec<Edge>,
}

impl ArrivalSequence {
    pub fn builder(mode: Mode, flags: Flags) -> SequenceBuilder {
        SequenceBuilder { guard: StreamGuard::new(mode, flags), n_vertices: 0 }
    }

    /// Unit-weight MCM sequence from vertex pairs. Panics on invalid input;
    /// meant for fixtures.
    pub fn mcm(flags: Flags, pairs: &[(VertexId, VertexId)]) -> Self {
        let mut b = ArrivalSequence::builder(Mode::Mcm, flags);
        for &(u, v) in pairs {
            b.push(u, v, 1.0).expect("invalid fixture edge");
        }
        b.finish()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Re-checks every declared flag from scratch.
    pub fn validate(&self) -> Result<()> {
        let mut guard = StreamGuard::new(self.mode, self.flags);
        for e in &self.edges {
            guard.admit(e)?;
        }
        Ok(())
    }

    pub fn graph(&self) -> Graph {
        Graph::new(self.n_vertices, self.edges.clone())
    }

    /// The graph formed by the first `k` arrivals.
    pub fn prefix_graph(&self, k: usize) -> Graph {
        Graph::new(self.n_vertices, self.edges[..k].to_vec())
    }
}

pub struct SequenceBuilder {
    guard: StreamGuard,
    n_vertices: usize,
}

impl SequenceBuilder {
    pub fn push(&mut self, u: VertexId, v: VertexId, weight: f64) -> Result<EdgeId> {
        let id = self.guard.edges().len();
        let e = Edge::new(id, u, v, weight);
        self.guard.admit(&e)?;
        self.n_vertices = self.n_vertices.max(u.max(v) + 1);
        Ok(e.id)
    }

    /// Declare isolated vertices beyond the highest id seen on an edge.
    pub fn reserve_vertices(&mut self, n: usize) {
        self.n_vertices = self.n_vertices.max(n);
    }

    pub fn finish(self) -> ArrivalSequence {
        ArrivalSequence {
            mode: self.guard.mode(),
            flags: self.guard.flags(),
            n_vertices: self.n_vertices,
            edges: self.guard.edges,
        }
    }
}

/// Static adjacency view of a finished (or prefix) graph.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<EdgeId>>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Self {
        let n = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0).max(n_vertices);
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push(e.id);
            adj[e.v].push(e.id);
        }
        Graph { n, edges, adj }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge lookup by id. Ids are positions in the original arrival order,
    /// so prefix graphs index the same way.
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Component label per vertex, plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &id in &self.adj[x] {
                    let y = self.edges[id.0].other(x);
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_forest(&self) -> bool {
        let (_, c) = self.components();
        self.edges.len() + c == self.n
    }
}

/// At most two conflicting edges: one per endpoint.
pub type Conflicts = ArrayVec<EdgeId, 2>;

/// A matching with an O(1) vertex → matched-edge index.
#[derive(Clone, Debug, Default)]
pub struct Matching {
    mate: Vec<Option<EdgeId>>,
    member: Vec<bool>,
    len: usize,
}

impl Matching {
    pub fn new() -> Self {
        Matching::default()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, id: EdgeId) -> bool {
        self.member.get(id.0).copied().unwrap_or(false)
    }

    #[inline]
    pub fn mate(&self, v: VertexId) -> Option<EdgeId> {
        self.mate.get(v).copied().flatten()
    }

    #[inline]
    pub fn covers(&self, v: VertexId) -> bool {
        self.mate(v).is_some()
    }

    pub fn members(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.member.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| EdgeId(i))
    }

    pub fn insert(&mut self, e: &Edge) -> Result<()> {
        if self.covers(e.u) || self.covers(e.v) {
            return Err(Error::Conflict(e.id));
        }
        let top = e.u.max(e.v);
        if top >= self.mate.len() {
            self.mate.resize(top + 1, None);
        }
        if e.id.0 >= self.member.len() {
            self.member.resize(e.id.0 + 1, false);
        }
        self.mate[e.u] = Some(e.id);
        self.mate[e.v] = Some(e.id);
        self.member[e.id.0] = true;
        self.len += 1;
        Ok(())
    }

    /// Returns whether `e` was a member.
    pub fn remove(&mut self, e: &Edge) -> bool {
        if !self.contains(e.id) {
            return false;
        }
        self.mate[e.u] = None;
        self.mate[e.v] = None;
        self.member[e.id.0] = false;
        self.len -= 1;
        true
    }

    pub fn weight(&self, edges: &[Edge]) -> f64 {
        self.members().map(|id| edges[id.0].weight).sum()
    }

    /// Full rebuild check of the vertex index against the member set.
    pub fn is_consistent(&self, edges: &[Edge]) -> bool {
        let mut mate: Vec<Option<EdgeId>> = vec![None; self.mate.len()];
        let mut count = 0;
        for id in self.members() {
            let e = &edges[id.0];
            for x in [e.u, e.v] {
                if x >= mate.len() || mate[x].is_some() {
                    return false;
                }
                mate[x] = Some(id);
            }
            count += 1;
        }
        count == self.len && mate == self.mate
    }
}

impl PartialEq for Matching {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.members().eq(other.members())
    }
}

impl Eq for Matching {}

/// `X(M, e)`: members of `m` sharing a vertex with `e`, not counting `e`.
pub fn conflicts(m: &Matching, e: &Edge) -> Conflicts {
    let mut out = Conflicts::new();
    if let Some(a) = m.mate(e.u) {
        if a != e.id {
            out.push(a);
        }
    }
    if let Some(b) = m.mate(e.v) {
        if b != e.id && Some(b) != out.first().copied() {
            out.push(b);
        }
    }
    out
}

/// `k` matchings over one revealed edge set, with live `|M_i ∩ M_j|`
/// counters and a work-unit tally.
#[derive(Clone, Debug)]
pub struct MultiMatchingState {
    graph: StreamGuard,
    matchings: Vec<Matching>,
    pair: Vec<Vec<usize>>,
    work: Cell<u64>,
}

impl MultiMatchingState {
    pub fn new(k: usize, mode: Mode, flags: Flags) -> Self {
        MultiMatchingState {
            graph: StreamGuard::new(mode, flags),
            matchings: vec![Matching::new(); k],
            pair: vec![vec![0; k]; k],
            work: Cell::new(0),
        }
    }

    pub fn k(&self) -> usize {
        self.matchings.len()
    }

    pub fn guard(&self) -> &StreamGuard {
        &self.graph
    }

    pub fn edges(&self) -> &[Edge] {
        self.graph.edges()
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.graph.edges()[id.0]
    }

    pub fn matching(&self, i: usize) -> &Matching {
        &self.matchings[i]
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.matchings.iter().map(Matching::len).collect()
    }

    /// `|M_i ∩ M_j|`; the diagonal holds `|M_i|`.
    pub fn intersection(&self, i: usize, j: usize) -> usize {
        self.pair[i][j]
    }

    pub fn work(&self) -> u64 {
        self.work.get()
    }

    #[inline]
    pub fn charge(&self, units: u64) {
        self.work.set(self.work.get() + units);
    }

    pub fn reveal(&mut self, e: &Edge) -> Result<()> {
        self.graph.admit(e)
    }

    /// Membership check, one work unit.
    #[inline]
    pub fn contains(&self, i: usize, id: EdgeId) -> bool {
        self.charge(1);
        self.matchings[i].contains(id)
    }

    /// Matched-edge lookup at a vertex, one work unit.
    #[inline]
    pub fn mate(&self, i: usize, v: VertexId) -> Option<EdgeId> {
        self.charge(1);
        self.matchings[i].mate(v)
    }

    /// `X(M_i, e)`, two work units.
    #[inline]
    pub fn conflicts(&self, i: usize, e: &Edge) -> Conflicts {
        self.charge(2);
        conflicts(&self.matchings[i], e)
    }

    pub fn add(&mut self, i: usize, id: EdgeId) -> Result<()> {
        let e = *self.edge(id);
        self.matchings[i].insert(&e)?;
        self.charge(1);
        for j in 0..self.k() {
            if j != i && self.contains(j, id) {
                self.pair[i][j] += 1;
                self.pair[j][i] += 1;
                self.charge(1);
            }
        }
        self.pair[i][i] += 1;
        Ok(())
    }

    pub fn remove(&mut self, i: usize, id: EdgeId) -> bool {
        let e = *self.edge(id);
        if !self.matchings[i].remove(&e) {
            return false;
        }
        self.charge(1);
        for j in 0..self.k() {
            if j != i && self.contains(j, id) {
                self.pair[i][j] -= 1;
                self.pair[j][i] -= 1;
                self.charge(1);
            }
        }
        self.pair[i][i] -= 1;
        true
    }

    /// `M_i ← M_i \ out ∪ {in}`, transactional: on a rejected switch the
    /// state is left untouched.
    pub fn apply_switch(&mut self, i: usize, out: &[EdgeId], incoming: EdgeId) -> Result<()> {
        let e = *self.edge(incoming);
        if self.matchings[i].contains(incoming) {
            return Err(Error::InvalidSwitch { matching: i, reason: format!("{incoming:?} already a member") });
        }
        for &o in out {
            if !self.matchings[i].contains(o) {
                return Err(Error::InvalidSwitch { matching: i, reason: format!("{o:?} is not a member") });
            }
        }
        for c in conflicts(&self.matchings[i], &e) {
            if !out.contains(&c) {
                return Err(Error::InvalidSwitch {
                    matching: i,
                    reason: format!("{incoming:?} still conflicts with {c:?}"),
                });
            }
        }
        for &o in out {
            self.remove(i, o);
        }
        self.add(i, incoming)
    }

    /// Reverses a committed [`apply_switch`](Self::apply_switch).
    pub fn undo_switch(&mut self, i: usize, out: &[EdgeId], incoming: EdgeId) -> Result<()> {
        if !self.remove(i, incoming) {
            return Err(Error::InvalidSwitch { matching: i, reason: "nothing to undo".into() });
        }
        for &o in out {
            self.add(i, o)?;
        }
        Ok(())
    }

    /// Switching potential for matching `i` against `e`: the sum of
    /// `|M_i ∩ M_j|` over `j ∈ donors, j ≠ i`. With `qualified`, only those
    /// `j` for which every edge of `X(M_i, e)` also lies in `M_j` count.
    pub fn overlap(&self, i: usize, e: &Edge, donors: usize, qualified: bool) -> usize {
        let x = if qualified { self.conflicts(i, e) } else { Conflicts::new() };
        let mut total = 0;
        for j in 0..donors {
            if j == i {
                continue;
            }
            self.charge(1);
            if qualified && !x.iter().all(|&f| self.contains(j, f)) {
                continue;
            }
            total += self.pair[i][j];
        }
        total
    }

    /// Number of matchings covering `e`: having a member at `e.u` or `e.v`.
    pub fn coverage(&self, e: &Edge) -> usize {
        self.matchings.iter().filter(|m| m.covers(e.u) || m.covers(e.v)).count()
    }

    /// How many matchings contain edge `id`.
    pub fn multiplicity(&self, id: EdgeId) -> usize {
        self.matchings.iter().filter(|m| m.contains(id)).count()
    }

    /// Intersection counters recomputed from the member sets.
    pub fn recount_intersections(&self) -> Vec<Vec<usize>> {
        let k = self.k();
        let mut out = vec![vec![0; k]; k];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.matchings[i].members().filter(|&id| self.matchings[j].contains(id)).count();
            }
        }
        out
    }

    pub fn counters(&self) -> &[Vec<usize>] {
        &self.pair
    }

    /// Matching `i` is maximal iff every revealed edge is covered by it.
    pub fn is_maximal(&self, i: usize) -> bool {
        let m = &self.matchings[i];
        self.edges().iter().all(|e| m.covers(e.u) || m.covers(e.v))
    }

    pub fn is_consistent(&self) -> bool {
        self.matchings.iter().all(|m| m.is_consistent(self.edges())) && self.recount_intersections() == self.pair
    }
}
