//! Exact optimum matchings for verification.
//!
//! Forests use the usual two-state tree DP. Small general graphs (at most
//! 64 edges) use exhaustive search over alive-edge bitmasks with
//! memoisation, component splitting and an upper-bound cutoff.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};

pub const EXACT_EDGE_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    /// Cardinality (unweighted) or total weight.
    pub value: f64,
    pub witness: Vec<EdgeId>,
}

impl OptResult {
    pub fn cardinality(&self) -> usize {
        self.witness.len()
    }

    /// Whether the witness is a matching of `g` worth `value`.
    pub fn is_valid_for(&self, g: &Graph, weighted: bool) -> bool {
        let mut used = vec![false; g.n_vertices()];
        let mut total = 0.0;
        for &id in &self.witness {
            let e = g.edge(id);
            if used[e.u] || used[e.v] {
                return false;
            }
            used[e.u] = true;
            used[e.v] = true;
            total += if weighted { e.weight } else { 1.0 };
        }
        (total - self.value).abs() <= 1e-9 * self.value.abs().max(1.0)
    }
}

fn weight_of(g: &Graph, id: EdgeId, weighted: bool) -> f64 {
    if weighted {
        g.edge(id).weight
    } else {
        1.0
    }
}

/// Maximum matching of a forest.
pub fn opt_matching_forest(g: &Graph, weighted: bool) -> Result<OptResult> {
    if !g.is_forest() {
        return Err(Error::Cyclic);
    }
    let n = g.n_vertices();
    // free[v]: best in v's subtree with v unmatched below.
    // best[v]: best in v's subtree, v possibly matched to a child.
    let mut free = vec![0.0f64; n];
    let mut best = vec![0.0f64; n];
    let mut pick: Vec<Option<EdgeId>> = vec![None; n];
    let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            order.push(x);
            for &id in g.incident(x) {
                let y = g.edge(id).other(x);
                if !visited[y] {
                    visited[y] = true;
                    parent_edge[y] = Some(id);
                    stack.push(y);
                }
            }
        }
    }

    for &x in order.iter().rev() {
        let mut f = 0.0;
        for &id in g.incident(x) {
            if Some(id) != parent_edge[x] {
                f += best[g.edge(id).other(x)];
            }
        }
        free[x] = f;
        best[x] = f;
        for &id in g.incident(x) {
            if Some(id) == parent_edge[x] {
                continue;
            }
            let c = g.edge(id).other(x);
            let cand = f - best[c] + free[c] + weight_of(g, id, weighted);
            if cand > best[x] {
                best[x] = cand;
                pick[x] = Some(id);
            }
        }
    }

    // Top-down reconstruction; `may_match` is false when x is taken by its parent.
    let mut witness = Vec::new();
    let mut value = 0.0;
    let mut may_match = vec![true; n];
    for &x in &order {
        let chosen = if may_match[x] { pick[x] } else { None };
        if let Some(id) = chosen {
            witness.push(id);
            may_match[g.edge(id).other(x)] = false;
        }
        if parent_edge[x].is_none() {
            value += best[x];
        }
    }
    witness.sort();
    Ok(OptResult { value, witness })
}

struct Exact<'a> {
    g: &'a Graph,
    weights: Vec<f64>,
    ends: Vec<(VertexId, VertexId)>,
    incident: Vec<u64>,
    memo: HashMap<u64, (f64, u64)>,
}

impl Exact<'_> {
    fn upper_bound(&self, alive: u64) -> f64 {
        // Each matched edge is worth at most the mean of its endpoints' heaviest edges.
        let mut best_at = vec![0.0f64; self.incident.len()];
        let mut total = 0.0;
        let mut m = alive;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            let (u, v) = self.ends[i];
            best_at[u] = best_at[u].max(self.weights[i]);
            best_at[v] = best_at[v].max(self.weights[i]);
            total += self.weights[i];
        }
        (best_at.iter().sum::<f64>() / 2.0).min(total)
    }

    fn component(&self, alive: u64) -> u64 {
        let seed = alive & alive.wrapping_neg();
        let mut comp = seed;
        loop {
            let mut grown = comp;
            let mut m = comp;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                let (u, v) = self.ends[i];
                grown |= (self.incident[u] | self.incident[v]) & alive;
            }
            if grown == comp {
                return comp;
            }
            comp = grown;
        }
    }

    fn solve(&mut self, alive: u64) -> (f64, u64) {
        if alive == 0 {
            return (0.0, 0);
        }
        if alive & (alive - 1) == 0 {
            let i = alive.trailing_zeros() as usize;
            return (self.weights[i], alive);
        }
        if let Some(&hit) = self.memo.get(&alive) {
            return hit;
        }
        let comp = self.component(alive);
        let result = if comp != alive {
            let (a, wa) = self.solve(comp);
            let (b, wb) = self.solve(alive & !comp);
            (a + b, wa | wb)
        } else {
            self.branch(alive)
        };
        self.memo.insert(alive, result);
        result
    }

    fn branch(&mut self, alive: u64) -> (f64, u64) {
        // Vertex of maximum remaining degree.
        let (v, _) = self
            .incident
            .iter()
            .enumerate()
            .map(|(v, &m)| (v, (m & alive).count_ones()))
            .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
            .expect("non-empty");
        let ub = self.upper_bound(alive);
        let mut best = self.solve(alive & !self.incident[v]);
        let mut m = self.incident[v] & alive;
        while m != 0 {
            if best.0 >= ub {
                break;
            }
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            let (a, b) = self.ends[i];
            let (val, wit) = self.solve(alive & !self.incident[a] & !self.incident[b]);
            let cand = val + self.weights[i];
            if cand > best.0 {
                best = (cand, wit | (1u64 << i));
            }
        }
        best
    }
}

/// Exact maximum matching for arbitrary graphs with at most `cap` edges
/// (`cap ≤ 64`).
pub fn opt_matching_exact_capped(g: &Graph, weighted: bool, cap: usize) -> Result<OptResult> {
    let cap = cap.min(EXACT_EDGE_CAP);
    let m = g.edges().len();
    if m > cap {
        return Err(Error::TooLarge { edges: m, cap });
    }
    let mut incident = vec![0u64; g.n_vertices()];
    for (i, e) in g.edges().iter().enumerate() {
        incident[e.u] |= 1 << i;
        incident[e.v] |= 1 << i;
    }
    let mut solver = Exact {
        g,
        weights: g.edges().iter().map(|e| weight_of(g, e.id, weighted)).collect(),
        ends: g.edges().iter().map(|e| (e.u, e.v)).collect(),
        incident,
        memo: HashMap::new(),
    };
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let (value, mask) = solver.solve(all);
    let witness = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| solver.g.edges()[i].id).collect();
    Ok(OptResult { value, witness })
}

pub fn opt_matching_exact(g: &Graph, weighted: bool) -> Result<OptResult> {
    opt_matching_exact_capped(g, weighted, EXACT_EDGE_CAP)
}

/// Forest DP when possible, else exact search within the cap.
pub fn opt_matching(g: &Graph, weighted: bool) -> Result<OptResult> {
    if g.is_forest() {
        opt_matching_forest(g, weighted)
    } else {
        opt_matching_exact(g, weighted)
    }
}
