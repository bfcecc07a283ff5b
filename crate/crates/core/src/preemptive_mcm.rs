//! Four-matching randomized online-preemptive MCM for trees, the bad-edge
//! classifier, and the structural checkers that go with it.
//!
//! Every arriving edge first joins each matching where it has no conflict
//! (augment). Then, for `M_2, M_3, M_4` in order, the edge is switched in
//! (evicting its conflicts) when that strictly lowers the qualified overlap
//! potential of that matching. Evicted edges never return.
//!
//! The only randomness is the output index, so [`PreemptiveMcm::expected_size`]
//! is the exact mean of the four sizes.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{Action, EventLog};
use crate::graph::{Edge, EdgeId, Flags, Graph, Matching, Mode, MultiMatchingState, VertexId};
use crate::rng::SplitMix64;
use crate::Rational;

pub const K: usize = 4;

#[derive(Clone, Debug)]
pub struct PreemptiveMcm {
    core: MultiMatchingState,
    log: EventLog,
    step: usize,
    sampled: Option<usize>,
}

impl Default for PreemptiveMcm {
    fn default() -> Self {
        PreemptiveMcm::new(Flags::tree())
    }
}

impl PreemptiveMcm {
    pub fn new(flags: Flags) -> Self {
        PreemptiveMcm {
            core: MultiMatchingState::new(K, Mode::Mcm, flags),
            log: EventLog::new(),
            step: 0,
            sampled: None,
        }
    }

    /// Fix the output index from `seed` (sampling mode).
    pub fn with_sample(mut self, seed: u64) -> Self {
        self.sampled = Some(SplitMix64::new(seed).below(K as u64) as usize);
        self
    }

    pub fn core(&self) -> &MultiMatchingState {
        &self.core
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn sampled_index(&self) -> Option<usize> {
        self.sampled
    }

    pub fn process_edge(&mut self, e: &Edge) -> Result<()> {
        self.core.reveal(e)?;
        let step = self.step;
        self.step += 1;

        for i in 0..K {
            if self.core.conflicts(i, e).is_empty() {
                self.core.add(i, e.id)?;
                self.log.push(e.id, i, Action::AugmentAdd, step);
            }
        }

        for i in 1..K {
            if self.core.contains(i, e.id) {
                continue;
            }
            let out = self.core.conflicts(i, e);
            let before = self.core.overlap(i, e, K, true);
            self.core.apply_switch(i, &out, e.id)?;
            let after = self.core.overlap(i, e, K, true);
            if after < before {
                for &o in &out {
                    self.log.push(o, i, Action::SwitchOut, step);
                }
                self.log.push(e.id, i, Action::SwitchIn, step);
            } else {
                self.core.undo_switch(i, &out, e.id)?;
            }
        }
        Ok(())
    }

    pub fn run(mut self, edges: &[Edge]) -> Result<Self> {
        for e in edges {
            self.process_edge(e)?;
        }
        Ok(self)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.core.sizes()
    }

    /// Mean of the four sizes.
    pub fn expected_size(&self) -> Rational {
        let total: usize = self.core.sizes().iter().sum();
        Rational::new(total as i64, K as i64)
    }

    /// `|M_l|` for the sampled index, or the exact mean when not sampling.
    pub fn output_size(&self) -> Rational {
        match self.sampled {
            Some(l) => Rational::from_integer(self.core.matching(l).len() as i64),
            None => self.expected_size(),
        }
    }

    pub fn graph(&self) -> Graph {
        Graph::new(self.core.guard().n_vertices(), self.core.edges().to_vec())
    }

    pub fn classify_edges(&self) -> Result<Vec<EdgeClass>> {
        classify(self.core.matchings(), &self.graph())
    }

    /// Edges whose endpoints are covered by fewer than three matchings.
    pub fn low_coverage_edges(&self) -> Vec<EdgeId> {
        self.core.edges().iter().filter(|e| self.core.coverage(e) < 3).map(|e| e.id).collect()
    }

    /// Runs on the lenient classification so that a coverage deficit is
    /// reported by [`Self::low_coverage_edges`] rather than aborting the path check.
    pub fn check_lemma_internal(&self) -> Result<PathReport> {
        let g = self.graph();
        if !g.is_forest() {
            return Err(Error::Cyclic);
        }
        Ok(check_lemma_internal(&g, &classify_lenient(self.core.matchings(), &g)))
    }

    pub fn check_m4bad(&self) -> Result<M4BadReport> {
        let g = self.graph();
        Ok(check_m4bad(self.core.matchings(), &self.log, &classify_lenient(self.core.matchings(), &g), &g))
    }

    /// Every edge in no matching sees four distinct matched edges, one per
    /// matching, at its endpoints. Returns the offending edges.
    pub fn unmatched_edges_without_witnesses(&self) -> Vec<EdgeId> {
        let ms = self.core.matchings();
        self.core
            .edges()
            .iter()
            .filter(|e| ms.iter().all(|m| !m.contains(e.id)))
            .filter(|e| !has_distinct_witnesses(ms, e))
            .map(|e| e.id)
            .collect()
    }
}

fn has_distinct_witnesses(ms: &[Matching], e: &Edge) -> bool {
    let options: Vec<Vec<EdgeId>> = ms
        .iter()
        .map(|m| {
            let mut v: Vec<EdgeId> = [m.mate(e.u), m.mate(e.v)].into_iter().flatten().collect();
            v.dedup();
            v
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return false;
    }
    fn pick(options: &[Vec<EdgeId>], used: &mut Vec<EdgeId>) -> bool {
        let Some((first, rest)) = options.split_first() else { return true };
        for &c in first {
            if !used.contains(&c) {
                used.push(c);
                if pick(rest, used) {
                    return true;
                }
                used.pop();
            }
        }
        false
    }
    pick(&options, &mut Vec::new())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeClass {
    pub coverage: usize,
    pub is_internal: bool,
    pub is_leaf_edge: bool,
    pub is_bad: bool,
}

/// Classifies every edge of `g` against the final four matchings.
///
/// "Matched edges at an endpoint" means edges other than `e` itself that
/// belong to some matching. Coverage below three is an invariant violation.
pub fn classify(ms: &[Matching], g: &Graph) -> Result<Vec<EdgeClass>> {
    let classes = classify_lenient(ms, g);
    match g.edges().iter().zip(&classes).find(|(_, c)| c.coverage < 3) {
        Some((e, c)) => Err(Error::Invariant(format!(
            "edge {:?} ({}, {}) covered by only {} matchings",
            e.id, e.u, e.v, c.coverage
        ))),
        None => Ok(classes),
    }
}

/// [`classify`] without the coverage check; low-coverage edges are not bad.
pub fn classify_lenient(ms: &[Matching], g: &Graph) -> Vec<EdgeClass> {
    let in_some = |id: EdgeId| ms.iter().any(|m| m.contains(id));
    g.edges()
        .iter()
        .map(|e| {
            let coverage = ms.iter().filter(|m| m.covers(e.u) || m.covers(e.v)).count();
            let matched_other = |x: VertexId| g.incident(x).iter().any(|&f| f != e.id && in_some(f));
            let (mu, mv) = (matched_other(e.u), matched_other(e.v));
            EdgeClass { coverage, is_internal: mu && mv, is_leaf_edge: !mu || !mv, is_bad: coverage == 3 }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathReport {
    pub pass: bool,
    /// Vertices on the longest simple path whose every vertex has a bad edge.
    pub max_len: usize,
    pub witness: Vec<VertexId>,
}

pub const MAX_BAD_RUN: usize = 5;

/// Longest run of consecutive bad-incident vertices along a path of the
/// forest `g`. Passes iff it is at most five vertices.
pub fn check_lemma_internal(g: &Graph, classes: &[EdgeClass]) -> PathReport {
    let n = g.n_vertices();
    let mut marked = vec![false; n];
    for e in g.edges() {
        if classes[e.id.0].is_bad {
            marked[e.u] = true;
            marked[e.v] = true;
        }
    }
    let neighbours = |x: VertexId| g.incident(x).iter().map(move |&id| g.edge(id).other(x)).filter(|&y| marked[y]);

    // Farthest marked vertex from `s` inside the marked subforest, with parents.
    let bfs = |s: VertexId, dist: &mut Vec<usize>, par: &mut Vec<usize>| -> VertexId {
        let mut q = VecDeque::from([s]);
        dist[s] = 0;
        par[s] = usize::MAX;
        let mut far = s;
        while let Some(x) = q.pop_front() {
            if dist[x] > dist[far] {
                far = x;
            }
            for y in neighbours(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    par[y] = x;
                    q.push_back(y);
                }
            }
        }
        far
    };

    let mut seen = vec![false; n];
    let mut dist = vec![usize::MAX; n];
    let mut par = vec![usize::MAX; n];
    let mut best: Vec<VertexId> = Vec::new();
    for s in 0..n {
        if !marked[s] || seen[s] {
            continue;
        }
        let a = bfs(s, &mut dist, &mut par);
        let comp: Vec<usize> = (0..n).filter(|&x| dist[x] != usize::MAX).collect();
        for &x in &comp {
            seen[x] = true;
            dist[x] = usize::MAX;
        }
        let b = bfs(a, &mut dist, &mut par);
        if dist[b] + 1 > best.len() {
            let mut path = vec![b];
            let mut x = b;
            while par[x] != usize::MAX {
                x = par[x];
                path.push(x);
            }
            best = path;
        }
        for &x in &comp {
            dist[x] = usize::MAX;
        }
    }
    let max_len = best.len();
    let pass = max_len <= MAX_BAD_RUN;
    PathReport { pass, max_len, witness: if pass { Vec::new() } else { best } }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct M4BadReport {
    pub pass: bool,
    /// Edges only in `M_4` with bad edges at both endpoints.
    pub part_a_violations: Vec<EdgeId>,
    /// Bad edges whose only entries into `M_4` were switch-ins.
    pub part_b_violations: Vec<EdgeId>,
    pub m4_only: usize,
    pub switched_into_m4: usize,
}

/// Two history-dependent facts about `M_4` (index 3):
/// (a) an edge ending the run only in `M_4` has bad neighbours on at most
/// one side; (b) an edge that entered `M_4` only by switching is not bad.
pub fn check_m4bad(ms: &[Matching], log: &EventLog, classes: &[EdgeClass], g: &Graph) -> M4BadReport {
    const M4: usize = 3;
    let bad_side = |x: VertexId, e: EdgeId| g.incident(x).iter().any(|&f| f != e && classes[f.0].is_bad);

    let mut part_a = Vec::new();
    let mut m4_only = 0;
    for e in g.edges() {
        if ms[M4].contains(e.id) && (0..M4).all(|i| !ms[i].contains(e.id)) {
            m4_only += 1;
            if bad_side(e.u, e.id) && bad_side(e.v, e.id) {
                part_a.push(e.id);
            }
        }
    }

    let mut augmented = vec![false; g.edges().len()];
    let mut switched = vec![false; g.edges().len()];
    for ev in log.events().iter().filter(|ev| ev.matching == M4) {
        match ev.action {
            Action::AugmentAdd => augmented[ev.edge.0] = true,
            Action::SwitchIn => switched[ev.edge.0] = true,
            _ => {}
        }
    }
    let only_switched: Vec<usize> = (0..g.edges().len()).filter(|&i| switched[i] && !augmented[i]).collect();
    let part_b: Vec<EdgeId> = only_switched.iter().filter(|&&i| classes[i].is_bad).map(|&i| EdgeId(i)).collect();

    M4BadReport {
        pass: part_a.is_empty() && part_b.is_empty(),
        part_a_violations: part_a,
        part_b_violations: part_b,
        m4_only,
        switched_into_m4: only_switched.len(),
    }
}
