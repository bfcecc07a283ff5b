//! Seeded arrival-sequence generators.
//!
//! Everything is driven by [`SplitMix64`] and self-contained integer
//! sampling, so a `(GenSpec, seed)` pair determines the instance exactly.
//! Random trees are uniform labelled trees via Prüfer sequences.
//!
//! `n` is the number of edges for trees, paths and stars, an upper bound on
//! the edge count for bounded-degree graphs, and the number of stages for
//! the two weighted adversaries.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ArrivalSequence, Flags, Mode, VertexId};
use crate::rng::SplitMix64;

pub const DEFAULT_DELTA: f64 = 1e-6;
/// Generated weights must stay below this to keep integer-spaced floats exact.
pub const WEIGHT_CEILING: f64 = 4_503_599_627_370_496.0; // 2^52

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    GrowingTree,
    TreeAnyOrder,
    BoundedDegree,
    Path,
    Star,
    McgregorAdversary,
    Alg4Tight,
}

impl GenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::GrowingTree => "growing-tree",
            GenKind::TreeAnyOrder => "tree-any-order",
            GenKind::BoundedDegree => "bounded-degree",
            GenKind::Path => "path",
            GenKind::Star => "star",
            GenKind::McgregorAdversary => "mcgregor-adversary",
            GenKind::Alg4Tight => "alg4-tight",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let all = [
            GenKind::GrowingTree,
            GenKind::TreeAnyOrder,
            GenKind::BoundedDegree,
            GenKind::Path,
            GenKind::Star,
            GenKind::McgregorAdversary,
            GenKind::Alg4Tight,
        ];
        let norm = s.replace('_', "-");
        all.into_iter().find(|k| k.as_str() == norm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
    /// Eviction factor the McGregor adversary targets.
    pub gamma: f64,
    pub delta: f64,
    /// Degree cap for `BoundedDegree`.
    pub max_degree: usize,
    /// When set, random instances are MWM with weights log-uniform in
    /// `[1, max_weight]`; otherwise unit-weight MCM.
    pub max_weight: Option<f64>,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            seed,
            gamma: std::f64::consts::FRAC_1_SQRT_2,
            delta: DEFAULT_DELTA,
            max_degree: 3,
            max_weight: None,
        }
    }

    pub fn weighted(mut self, max_weight: f64) -> Self {
        self.max_weight = Some(max_weight);
        self
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn max_degree(mut self, d: usize) -> Self {
        self.max_degree = d;
        self
    }
}

/// Uniform random labelled tree on `n_vertices` vertices.
pub fn prufer_tree(n_vertices: usize, rng: &mut SplitMix64) -> Vec<(VertexId, VertexId)> {
    if n_vertices < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n_vertices - 2).map(|_| rng.index(n_vertices)).collect();
    decode_prufer(&seq, n_vertices)
}

pub fn decode_prufer(seq: &[usize], n_vertices: usize) -> Vec<(VertexId, VertexId)> {
    let mut degree = vec![1usize; n_vertices];
    for &x in seq {
        degree[x] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n_vertices).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n_vertices - 1);
    for &x in seq {
        let Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.push(Reverse(x));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    edges
}

/// Relabels vertices by first appearance and builds the sequence.
fn assemble(mode: Mode, flags: Flags, edges: &[(VertexId, VertexId, f64)]) -> Result<ArrivalSequence> {
    let mut label: HashMap<VertexId, VertexId> = HashMap::new();
    let mut b = ArrivalSequence::builder(mode, flags);
    for &(u, v, w) in edges {
        let next = label.len();
        let u = *label.entry(u).or_insert(next);
        let next = label.len();
        let v = *label.entry(v).or_insert(next);
        b.push(u, v, w)?;
    }
    Ok(b.finish())
}

fn weights(spec: &GenSpec, rng: &mut SplitMix64, m: usize) -> Result<(Mode, Vec<f64>)> {
    match spec.max_weight {
        None => Ok((Mode::Mcm, vec![1.0; m])),
        Some(hi) if (1.0..WEIGHT_CEILING).contains(&hi) => {
            let ln = hi.ln();
            Ok((Mode::Mwm, (0..m).map(|_| (rng.unit() * ln).exp()).collect()))
        }
        Some(hi) => Err(Error::Domain(format!("max weight {hi} must be in [1, 2^52)"))),
    }
}

fn reveal_growing(tree: &[(VertexId, VertexId)], n_vertices: usize, rng: &mut SplitMix64) -> Vec<(VertexId, VertexId)> {
    let mut adj = vec![Vec::new(); n_vertices];
    for &(a, b) in tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let start = rng.index(n_vertices);
    let mut revealed = vec![false; n_vertices];
    revealed[start] = true;
    let mut frontier: Vec<(VertexId, VertexId)> = adj[start].iter().map(|&y| (start, y)).collect();
    let mut out = Vec::with_capacity(tree.len());
    while !frontier.is_empty() {
        let k = rng.index(frontier.len());
        let (old, new) = frontier.swap_remove(k);
        out.push((old, new));
        revealed[new] = true;
        frontier.extend(adj[new].iter().filter(|&&y| !revealed[y]).map(|&y| (new, y)));
    }
    out
}

fn bounded_degree(n_edges: usize, d: usize, rng: &mut SplitMix64) -> Vec<(VertexId, VertexId)> {
    let n_vertices = (2 * n_edges).div_ceil(d) + 2;
    let mut stubs: Vec<VertexId> = (0..n_vertices).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    rng.shuffle(&mut stubs);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for pair in stubs.chunks_exact(2) {
        if out.len() == n_edges {
            break;
        }
        let (a, b) = (pair[0], pair[1]);
        if a != b && seen.insert((a.min(b), a.max(b))) {
            out.push((a, b));
        }
    }
    out
}

fn adversary(spec: &GenSpec, factor_of_y: f64, factor_of_x: f64, final_x: f64) -> Result<ArrivalSequence> {
    if spec.delta.is_nan() || spec.delta <= 0.0 {
        return Err(Error::Domain("adversary needs delta > 0".into()));
    }
    // Path p_0 p_1 ... carries the x-edges; pendant q_i hangs the y-edges.
    // x_i = (p_i, p_{i+1}); y_{i+1} sits on p_i.
    let path = |i: usize| 2 * i;
    let pendant = |i: usize| 2 * i + 1;
    let mut edges = vec![(path(0), path(1), 1.0)];
    let mut x = 1.0f64;
    for i in 0..spec.n {
        let y = factor_of_y * x;
        let next = factor_of_x * x + spec.delta;
        if next >= WEIGHT_CEILING || y >= WEIGHT_CEILING {
            return Err(Error::Domain(format!("adversary weights exceed 2^52 at stage {}", i + 1)));
        }
        if ((next - factor_of_x * x) - spec.delta).abs() > 1e-9 * next {
            return Err(Error::Invariant(format!("weight recurrence drifted at stage {}", i + 1)));
        }
        edges.push((path(i), pendant(i + 1), y));
        edges.push((path(i + 1), path(i + 2), next));
        x = next;
    }
    let n = spec.n;
    edges.push((path(n), pendant(n + 1), factor_of_y * x));
    edges.push((path(n + 1), path(n + 2), final_x * x));
    assemble(Mode::Mwm, Flags::growing_tree(), &edges)
}

pub fn gen(spec: &GenSpec) -> Result<ArrivalSequence> {
    if spec.n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let with_weights = |pairs: Vec<(VertexId, VertexId)>, flags: Flags, rng: &mut SplitMix64| {
        let (mode, w) = weights(spec, rng, pairs.len())?;
        let edges: Vec<_> = pairs.into_iter().zip(w).map(|((a, b), w)| (a, b, w)).collect();
        assemble(mode, flags, &edges)
    };
    match spec.kind {
        GenKind::GrowingTree => {
            let tree = prufer_tree(spec.n + 1, &mut rng);
            let order = reveal_growing(&tree, spec.n + 1, &mut rng);
            with_weights(order, Flags::growing_tree(), &mut rng)
        }
        GenKind::TreeAnyOrder => {
            let mut tree = prufer_tree(spec.n + 1, &mut rng);
            rng.shuffle(&mut tree);
            for e in tree.iter_mut() {
                if rng.below(2) == 1 {
                    *e = (e.1, e.0);
                }
            }
            with_weights(tree, Flags::tree(), &mut rng)
        }
        GenKind::BoundedDegree => {
            if spec.max_degree == 0 {
                return Err(Error::Domain("max degree must be positive".into()));
            }
            let pairs = bounded_degree(spec.n, spec.max_degree, &mut rng);
            with_weights(pairs, Flags::max_degree(spec.max_degree), &mut rng)
        }
        GenKind::Path => with_weights((0..spec.n).map(|i| (i, i + 1)).collect(), Flags::growing_tree(), &mut rng),
        GenKind::Star => with_weights((1..=spec.n).map(|i| (0, i)).collect(), Flags::growing_tree(), &mut rng),
        GenKind::McgregorAdversary => {
            if spec.gamma.is_nan() || spec.gamma <= 0.0 {
                return Err(Error::Domain("mcgregor adversary needs gamma > 0".into()));
            }
            adversary(spec, 1.0 + spec.gamma, 1.0 + spec.gamma, 1.0 + spec.gamma)
        }
        GenKind::Alg4Tight => adversary(spec, 1.0, 2.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prufer_round_trip_small() {
        // Sequence [3, 3] on 4 vertices is the star centred at 3.
        let mut e = decode_prufer(&[3, 3], 4);
        e.sort();
        assert_eq!(e, vec![(0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn growing_tree_of_two_is_a_path() {
        let s = gen(&GenSpec::new(GenKind::GrowingTree, 2, 9)).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.flags.is_growing_tree);
        assert_eq!(s.n_vertices, 3);
        s.validate().unwrap();
    }

    #[test]
    fn deterministic() {
        for kind in [GenKind::GrowingTree, GenKind::TreeAnyOrder, GenKind::BoundedDegree] {
            let a = gen(&GenSpec::new(kind, 40, 123)).unwrap();
            let b = gen(&GenSpec::new(kind, 40, 123)).unwrap();
            let c = gen(&GenSpec::new(kind, 40, 124)).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn adversary_shapes() {
        let s = gen(&GenSpec::new(GenKind::Alg4Tight, 3, 0)).unwrap();
        let w: Vec<f64> = s.edges.iter().map(|e| e.weight).collect();
        let d = DEFAULT_DELTA;
        let x1 = 2.0 + d;
        let x2 = 2.0 * x1 + d;
        let x3 = 2.0 * x2 + d;
        assert_eq!(w, vec![1.0, 1.0, x1, x1, x2, x2, x3, x3, x3]);
        s.validate().unwrap();

        assert!(gen(&GenSpec::new(GenKind::Alg4Tight, 3, 0).delta(0.0)).is_err());
        assert!(gen(&GenSpec::new(GenKind::McgregorAdversary, 3, 0).gamma(0.0)).is_err());
        assert!(gen(&GenSpec::new(GenKind::Alg4Tight, 60, 0)).is_err());
        assert!(gen(&GenSpec::new(GenKind::Path, 0, 0)).is_err());
    }

    #[test]
    fn kind_names() {
        assert_eq!(GenKind::parse("growing_tree"), Some(GenKind::GrowingTree));
        assert_eq!(GenKind::parse("alg4-tight"), Some(GenKind::Alg4Tight));
        assert_eq!(GenKind::parse("nope"), None);
    }
}
