//! Dual certificates for the three-matching incremental algorithm.
//!
//! Each edge's primal charge (its multiplicity across `M_1..M_3`) is pushed
//! onto its endpoints. If every edge constraint `y_u + y_v` then reaches a
//! threshold `t`, `y / t` is a fractional vertex cover and bounds the
//! optimum by weak duality: `OPT ≤ Σy / t`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Matching, VertexId};
use crate::Rational;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Tree,
    MaxDegree3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualCertificate {
    pub kind: CertificateKind,
    pub y: Vec<Rational>,
    pub threshold: Rational,
    pub total: Rational,
    /// Edge with the smallest `y_u + y_v − threshold`, and that slack.
    pub min_slack: Option<(EdgeId, Rational)>,
}

impl DualCertificate {
    fn build(kind: CertificateKind, y: Vec<Rational>, threshold: Rational, g: &Graph) -> Self {
        let total = y.iter().copied().sum();
        let min_slack = g
            .edges()
            .iter()
            .map(|e| (e.id, y[e.u] + y[e.v] - threshold))
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        DualCertificate { kind, y, threshold, total, min_slack }
    }

    pub fn feasible(&self) -> bool {
        self.min_slack.is_none_or(|(_, s)| s >= Rational::from_integer(0))
    }

    pub fn nonnegative(&self) -> bool {
        self.y.iter().all(|&v| v >= Rational::from_integer(0))
    }

    /// `Σy / threshold`.
    pub fn certified_bound(&self) -> Rational {
        self.total / self.threshold
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            kind: self.kind,
            threshold: self.threshold.to_string(),
            total: self.total.to_string(),
            min_slack: self.min_slack.map(|(_, s)| s.to_string()),
            min_slack_edge: self.min_slack.map(|(e, _)| e),
            certified_bound: self.certified_bound().to_string(),
            pass: self.feasible() && self.nonnegative(),
        }
    }

    /// JSON map `vertex → {num, den}` plus the summary.
    pub fn to_json(&self) -> serde_json::Value {
        let duals: BTreeMap<String, serde_json::Value> = self
            .y
            .iter()
            .enumerate()
            .map(|(v, r)| (v.to_string(), serde_json::json!({ "num": r.numer(), "den": r.denom() })))
            .collect();
        serde_json::json!({
            "schema_version": crate::SCHEMA_VERSION,
            "duals": duals,
            "summary": self.summary(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub kind: CertificateKind,
    pub threshold: String,
    pub total: String,
    pub min_slack: Option<String>,
    pub min_slack_edge: Option<EdgeId>,
    pub certified_bound: String,
    pub pass: bool,
}

fn multiplicity(ms: &[Matching], id: EdgeId) -> usize {
    ms.iter().filter(|m| m.contains(id)).count()
}

fn coverage(ms: &[Matching], v: VertexId) -> usize {
    ms.iter().filter(|m| m.covers(v)).count()
}

fn check_three(ms: &[Matching]) -> Result<()> {
    if ms.len() != 3 {
        return Err(Error::Certificate(format!("expected 3 matchings, got {}", ms.len())));
    }
    Ok(())
}

/// Tree charging, rooted at `roots` (one vertex per component; components
/// without a listed root are rooted at their lowest vertex). Child `u`,
/// parent `v`: one matching → `y_v += 1`; two → `y_u += 1, y_v += 1`;
/// three → `y_v += 3`. Threshold 2.
pub fn assign_duals_tree(ms: &[Matching], g: &Graph, roots: &[VertexId]) -> Result<DualCertificate> {
    check_three(ms)?;
    if !g.is_forest() {
        return Err(Error::Cyclic);
    }
    let n = g.n_vertices();
    let (comp, count) = g.components();
    let mut root_of = vec![usize::MAX; count];
    for &r in roots {
        if r < n && root_of[comp[r]] == usize::MAX {
            root_of[comp[r]] = r;
        }
    }
    for v in 0..n {
        if root_of[comp[v]] == usize::MAX {
            root_of[comp[v]] = v;
        }
    }

    let mut parent = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    for &r in &root_of {
        visited[r] = true;
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            for &id in g.incident(x) {
                let y = g.edge(id).other(x);
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
    }

    let mut y = vec![Rational::from_integer(0); n];
    for e in g.edges() {
        let (child, par) = if parent[e.u] == e.v { (e.u, e.v) } else { (e.v, e.u) };
        match multiplicity(ms, e.id) {
            0 => {}
            1 => y[par] += 1,
            2 => {
                y[child] += 1;
                y[par] += 1;
            }
            _ => y[par] += 3,
        }
    }
    Ok(DualCertificate::build(CertificateKind::Tree, y, Rational::from_integer(2), g))
}

/// The extra share given to a singly-covered endpoint.
pub fn degree3_epsilon() -> Rational {
    Rational::new(1, 6)
}

/// Charging for graphs of maximum degree 3. A one-matching edge with
/// exactly one singly-covered endpoint gives it `1/2 + ε` and the other
/// `1/2 − ε`; otherwise each endpoint gets half. Two or three matchings
/// split evenly. Threshold `3/2 + ε`, with `ε = 1/6`.
pub fn assign_duals_deg3(ms: &[Matching], g: &Graph) -> Result<DualCertificate> {
    check_three(ms)?;
    if g.max_degree() > 3 {
        return Err(Error::Certificate(format!("max degree {} exceeds 3", g.max_degree())));
    }
    let eps = degree3_epsilon();
    let half = Rational::new(1, 2);
    let mut y = vec![Rational::from_integer(0); g.n_vertices()];
    for e in g.edges() {
        match multiplicity(ms, e.id) {
            0 => {}
            1 => {
                let (cu, cv) = (coverage(ms, e.u) == 1, coverage(ms, e.v) == 1);
                match (cu, cv) {
                    (true, true) => {
                        return Err(Error::Certificate(format!(
                            "edge {:?} ({}, {}) in one matching with both endpoints singly covered",
                            e.id, e.u, e.v
                        )))
                    }
                    (true, false) => {
                        y[e.u] += half + eps;
                        y[e.v] += half - eps;
                    }
                    (false, true) => {
                        y[e.v] += half + eps;
                        y[e.u] += half - eps;
                    }
                    (false, false) => {
                        y[e.u] += half;
                        y[e.v] += half;
                    }
                }
            }
            k => {
                let share = Rational::new(k as i64, 2);
                y[e.u] += share;
                y[e.v] += share;
            }
        }
    }
    Ok(DualCertificate::build(CertificateKind::MaxDegree3, y, Rational::new(3, 2) + eps, g))
}

/// `(Σy / threshold) / expected_size`: the approximation ratio certified by
/// the duals. Refuses infeasible certificates. An empty instance (zero
/// expected size and zero total) certifies ratio 1.
pub fn weak_duality_ratio(cert: &DualCertificate, expected_size: Rational) -> Result<Rational> {
    if !cert.feasible() {
        let (e, s) = cert.min_slack.expect("infeasible implies an edge");
        return Err(Error::Certificate(format!("edge {e:?} below threshold by {}", -s)));
    }
    if expected_size == Rational::from_integer(0) {
        if cert.total == Rational::from_integer(0) {
            return Ok(Rational::from_integer(1));
        }
        return Err(Error::Certificate("zero expected size with positive dual total".into()));
    }
    Ok(cert.certified_bound() / expected_size)
}

/// Weak duality against a known optimum: `OPT ≤ Σy / threshold`.
pub fn dominates(cert: &DualCertificate, opt: usize) -> bool {
    Rational::from_integer(opt as i64) <= cert.certified_bound()
}
