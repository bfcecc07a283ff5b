//! Online-preemptive maximum weight matching.
//!
//! [`RandomizedMwm`] runs two preemptive matchings side by side with
//! eviction thresholds `γ_1` and `γ_2`, and outputs `M_1` with probability
//! `p`. On growing trees it can also maintain an online primal-dual ledger
//! whose invariants are audited every round.
//!
//! [`McGregor`] is the single-matching deterministic rule with one `γ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, Flags, Mode, MultiMatchingState, VertexId};
use crate::rng::SplitMix64;
use crate::Rational;

/// Relative tolerance for every floating-point audit.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct MwmParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub p: f64,
}

impl MwmParams {
    pub fn new(p: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p = {p} not in [0, 1]")));
        }
        if !(gamma1 >= 0.0 && gamma2 >= 0.0 && gamma1.is_finite() && gamma2.is_finite()) {
            return Err(Error::Domain(format!("gammas must be nonnegative, got {gamma1}, {gamma2}")));
        }
        Ok(MwmParams { gamma1, gamma2, p })
    }

    /// `p = 1/3, γ_1 = 0, γ_2 = 1`: the parameters with ratio exactly 3.
    pub fn three_competitive() -> Self {
        MwmParams { gamma1: 0.0, gamma2: 1.0, p: 1.0 / 3.0 }
    }

    fn gamma(&self, i: usize) -> f64 {
        if i == 0 {
            self.gamma1
        } else {
            self.gamma2
        }
    }
}

/// Worst-case expected competitive ratio of the two-matching algorithm on
/// growing trees:
/// `max{(1+γ1)/p, (1+γ2)/(1−p), (1+γ1)(1+γ2)(1+2γ1) / (pγ1 + (1−p)γ2 + γ1γ2)}`.
pub fn ratio_bound(params: &MwmParams) -> Result<f64> {
    let MwmParams { gamma1: g1, gamma2: g2, p } = *params;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("bound needs p in (0, 1), got {p}")));
    }
    let denom = p * g1 + (1.0 - p) * g2 + g1 * g2;
    if denom <= 0.0 {
        return Err(Error::Domain("p·γ1 + (1−p)·γ2 + γ1·γ2 must be positive".into()));
    }
    let a = (1.0 + g1) / p;
    let b = (1.0 + g2) / (1.0 - p);
    let c = (1.0 + g1) * (1.0 + g2) * (1.0 + 2.0 * g1) / denom;
    Ok(a.max(b).max(c))
}

/// [`ratio_bound`] in exact arithmetic, for rational parameters.
pub fn ratio_bound_exact(p: Rational, gamma1: Rational, gamma2: Rational) -> Result<Rational> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if p <= zero || p >= one {
        return Err(Error::Domain(format!("bound needs p in (0, 1), got {p}")));
    }
    let denom = p * gamma1 + (one - p) * gamma2 + gamma1 * gamma2;
    if denom <= zero {
        return Err(Error::Domain("p·γ1 + (1−p)·γ2 + γ1·γ2 must be positive".into()));
    }
    let a = (one + gamma1) / p;
    let b = (one + gamma2) / (one - p);
    let c = (one + gamma1) * (one + gamma2) * (one + gamma1 * 2) / denom;
    Ok(a.max(b).max(c))
}

/// McGregor's competitive ratio `(1+γ)(2+1/γ)`.
pub fn mcgregor_bound(gamma: f64) -> f64 {
    (1.0 + gamma) * (2.0 + 1.0 / gamma)
}

/// The preemptive acceptance rule: strictly heavier than `(1+γ)` times the
/// total weight of the conflicts.
#[inline]
fn accepts(weight: f64, gamma: f64, conflict_weight: f64) -> bool {
    weight > (1.0 + gamma) * conflict_weight
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MwmAudit {
    pub rounds: usize,
    pub feasibility_violations: usize,
    pub obs3_violations: usize,
    pub primal_mismatches: usize,
    pub dual_decreases: usize,
    pub ratio_violations: usize,
    /// Largest per-round `ΔDual / ΔPrimal` seen.
    pub max_round_ratio: f64,
    /// Smallest `y_u + y_v − w_e` over revealed edges, after the last round.
    pub min_dual_slack: f64,
    pub dual_total: f64,
    pub primal_total: f64,
}

impl MwmAudit {
    pub fn clean(&self) -> bool {
        self.feasibility_violations == 0
            && self.obs3_violations == 0
            && self.primal_mismatches == 0
            && self.dual_decreases == 0
            && self.ratio_violations == 0
    }
}

/// Online primal and dual variables for growing-tree inputs.
#[derive(Clone, Debug)]
pub struct DualLedger {
    y: Vec<f64>,
    x: Vec<f64>,
    bound: Option<f64>,
    full_audit: bool,
    audit: MwmAudit,
}

impl DualLedger {
    fn new(params: &MwmParams) -> Self {
        DualLedger {
            y: Vec::new(),
            x: Vec::new(),
            bound: ratio_bound(params).ok(),
            full_audit: true,
            audit: MwmAudit { min_dual_slack: f64::INFINITY, ..MwmAudit::default() },
        }
    }

    pub fn y(&self, v: VertexId) -> f64 {
        self.y.get(v).copied().unwrap_or(0.0)
    }

    pub fn x(&self, e: EdgeId) -> f64 {
        self.x.get(e.0).copied().unwrap_or(0.0)
    }

    pub fn audit(&self) -> &MwmAudit {
        &self.audit
    }

    fn set_y(&mut self, v: VertexId, value: f64) {
        if v >= self.y.len() {
            self.y.resize(v + 1, 0.0);
        }
        if value < self.y[v] {
            self.audit.dual_decreases += 1;
        }
        self.y[v] = value;
    }
}

/// What happened to one arriving edge in both matchings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub accepted: [bool; 2],
    pub evicted: [Vec<EdgeId>; 2],
}

#[derive(Clone, Debug)]
pub struct RandomizedMwm {
    core: MultiMatchingState,
    params: MwmParams,
    ledger: Option<DualLedger>,
    sampled: Option<usize>,
}

impl RandomizedMwm {
    pub fn new(params: MwmParams, flags: Flags) -> Self {
        RandomizedMwm { core: MultiMatchingState::new(2, Mode::Mwm, flags), params, ledger: None, sampled: None }
    }

    /// Turns on the primal-dual ledger. Only defined on growing trees.
    pub fn with_duals(mut self) -> Result<Self> {
        if !self.core.guard().flags().is_growing_tree {
            return Err(Error::Domain("dual accounting requires a growing-tree instance".into()));
        }
        self.ledger = Some(DualLedger::new(&self.params));
        Ok(self)
    }

    /// Per-round dual and slack checks touch every vertex
    /// and edge; switch them off for large streams.
    pub fn with_full_audit(mut self, on: bool) -> Self {
        if let Some(l) = self.ledger.as_mut() {
            l.full_audit = on;
        }
        self
    }

    /// Output `M_1` with probability `p`, decided once from `seed`.
    pub fn with_sample(mut self, seed: u64) -> Self {
        let j = if SplitMix64::new(seed).unit() < self.params.p { 0 } else { 1 };
        self.sampled = Some(j);
        self
    }

    pub fn params(&self) -> &MwmParams {
        &self.params
    }

    pub fn core(&self) -> &MultiMatchingState {
        &self.core
    }

    pub fn ledger(&self) -> Option<&DualLedger> {
        self.ledger.as_ref()
    }

    pub fn sampled_index(&self) -> Option<usize> {
        self.sampled
    }

    pub fn process_edge(&mut self, e: &Edge) -> Result<RoundOutcome> {
        let (seen_u, seen_v) = (self.core.guard().is_seen(e.u), self.core.guard().is_seen(e.v));
        self.core.reveal(e)?;
        // Old endpoint `u`, new endpoint `v`.
        let (u, v) = if seen_v && !seen_u { (e.v, e.u) } else { (e.u, e.v) };
        let before: [Option<EdgeId>; 2] = [self.core.matching(0).mate(u), self.core.matching(1).mate(u)];

        let mut outcome = RoundOutcome { accepted: [false; 2], evicted: [Vec::new(), Vec::new()] };
        for i in 0..2 {
            let x = self.core.conflicts(i, e);
            let wx: f64 = x.iter().map(|&f| self.core.edge(f).weight).sum();
            if accepts(e.weight, self.params.gamma(i), wx) {
                self.core.apply_switch(i, &x, e.id)?;
                outcome.accepted[i] = true;
                outcome.evicted[i] = x.to_vec();
            }
        }

        if self.ledger.is_some() {
            self.dual_step(e, u, v, before, &outcome);
        }
        Ok(outcome)
    }

    fn dual_step(&mut self, e: &Edge, u: VertexId, v: VertexId, before: [Option<EdgeId>; 2], out: &RoundOutcome) {
        let MwmParams { gamma1: g1, gamma2: g2, p } = self.params;
        let weight_of = |id: Option<EdgeId>| id.map_or(0.0, |f| self.core.edge(f).weight);
        let (w1, w2) = (weight_of(before[0]), weight_of(before[1]));
        let w = e.weight;
        let evicted: Vec<(f64, f64)> = out.evicted[0]
            .iter()
            .map(|&f| (self.core.edge(f).weight, p))
            .chain(out.evicted[1].iter().map(|&f| (self.core.edge(f).weight, 1.0 - p)))
            .collect();

        let ledger = self.ledger.as_mut().expect("ledger enabled");
        let (yu0, yv0) = (ledger.y(u), ledger.y(v));
        if ledger.x.len() <= e.id.0 {
            ledger.x.resize(e.id.0 + 1, 0.0);
        }
        let x_e = match out.accepted {
            [false, false] => {
                ledger.set_y(v, 0.0);
                0.0
            }
            [true, false] => {
                ledger.set_y(u, yu0.max(((1.0 + g1) * w).min((1.0 + g2) * w2)));
                ledger.set_y(v, 0.0);
                p
            }
            [false, true] => {
                ledger.set_y(u, yu0.max(((1.0 + g1) * w1).min((1.0 + g2) * w)));
                ledger.set_y(v, 0.0);
                1.0 - p
            }
            [true, true] => {
                ledger.set_y(u, yu0.max((1.0 + g1) * w));
                ledger.set_y(v, (1.0 + g1) * w);
                1.0
            }
        };
        ledger.x[e.id.0] = x_e;
        for (k, &f) in out.evicted[0].iter().chain(out.evicted[1].iter()).enumerate() {
            ledger.x[f.0] -= evicted[k].1;
        }

        let d_dual = (ledger.y(u) - yu0) + (ledger.y(v) - yv0);
        let d_primal = w * x_e - evicted.iter().map(|(wf, share)| wf * share).sum::<f64>();
        ledger.audit.rounds += 1;
        ledger.audit.dual_total += d_dual;
        ledger.audit.primal_total += d_primal;
        if d_dual > 0.0 {
            let scale = d_dual.abs().max(1.0);
            if d_primal <= 0.0 {
                ledger.audit.ratio_violations += 1;
            } else {
                let r = d_dual / d_primal;
                ledger.audit.max_round_ratio = ledger.audit.max_round_ratio.max(r);
                if let Some(b) = ledger.bound {
                    if d_dual > b * d_primal + TOLERANCE * scale {
                        ledger.audit.ratio_violations += 1;
                    }
                }
            }
        }

        if ledger.full_audit {
            self.full_audit();
        } else {
            let ledger = self.ledger.as_mut().expect("ledger enabled");
            let slack = ledger.y(e.u) + ledger.y(e.v) - w;
            if slack < -TOLERANCE * w.max(1.0) {
                ledger.audit.feasibility_violations += 1;
            }
            ledger.audit.min_dual_slack = ledger.audit.min_dual_slack.min(slack);
        }
    }

    fn full_audit(&mut self) {
        let MwmParams { gamma1: g1, gamma2: g2, p } = self.params;
        let core = &self.core;
        let ledger = self.ledger.as_mut().expect("ledger enabled");

        let mut min_slack = f64::INFINITY;
        for e in core.edges() {
            let slack = ledger.y(e.u) + ledger.y(e.v) - e.weight;
            if slack < -TOLERANCE * e.weight.max(1.0) {
                ledger.audit.feasibility_violations += 1;
            }
            min_slack = min_slack.min(slack);
        }
        ledger.audit.min_dual_slack = min_slack;

        let weight_at = |i: usize, x: VertexId| core.matching(i).mate(x).map_or(0.0, |f| core.edge(f).weight);
        for x in 0..core.guard().n_vertices() {
            let need = ((1.0 + g1) * weight_at(0, x)).min((1.0 + g2) * weight_at(1, x));
            if ledger.y(x) < need - TOLERANCE * need.max(1.0) {
                ledger.audit.obs3_violations += 1;
            }
        }

        let primal: f64 = core.edges().iter().map(|e| e.weight * ledger.x(e.id)).sum();
        let expected = p * core.matching(0).weight(core.edges()) + (1.0 - p) * core.matching(1).weight(core.edges());
        if (primal - expected).abs() > TOLERANCE * expected.abs().max(1.0) {
            ledger.audit.primal_mismatches += 1;
        }
    }

    pub fn run(mut self, edges: &[Edge]) -> Result<Self> {
        for e in edges {
            self.process_edge(e)?;
        }
        Ok(self)
    }

    pub fn weights(&self) -> [f64; 2] {
        [self.core.matching(0).weight(self.core.edges()), self.core.matching(1).weight(self.core.edges())]
    }

    /// `p·w(M_1) + (1−p)·w(M_2)`.
    pub fn expected_weight(&self) -> f64 {
        let [a, b] = self.weights();
        self.params.p * a + (1.0 - self.params.p) * b
    }

    pub fn output_weight(&self) -> f64 {
        match self.sampled {
            Some(j) => self.weights()[j],
            None => self.expected_weight(),
        }
    }

    pub fn dual_total(&self) -> Option<f64> {
        self.ledger.as_ref().map(|l| l.y.iter().sum())
    }
}

/// Deterministic single-matching preemptive rule.
#[derive(Clone, Debug)]
pub struct McGregor {
    core: MultiMatchingState,
    gamma: f64,
}

impl McGregor {
    pub fn new(gamma: f64, flags: Flags) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(McGregor { core: MultiMatchingState::new(1, Mode::Mwm, flags), gamma })
    }

    pub fn core(&self) -> &MultiMatchingState {
        &self.core
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Returns whether the edge was accepted.
    pub fn process_edge(&mut self, e: &Edge) -> Result<bool> {
        self.core.reveal(e)?;
        let x = self.core.conflicts(0, e);
        let wx: f64 = x.iter().map(|&f| self.core.edge(f).weight).sum();
        if accepts(e.weight, self.gamma, wx) {
            self.core.apply_switch(0, &x, e.id)?;
            return Ok(true);
        }
        Ok(false)
    }

    pub fn run(mut self, edges: &[Edge]) -> Result<Self> {
        for e in edges {
            self.process_edge(e)?;
        }
        Ok(self)
    }

    pub fn weight(&self) -> f64 {
        self.core.matching(0).weight(self.core.edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn growing(weights: &[(usize, usize, f64)]) -> Vec<Edge> {
        weights.iter().enumerate().map(|(i, &(u, v, w))| Edge::new(i, u, v, w)).collect()
    }

    #[test]
    fn bound_at_three_competitive_params() {
        assert_eq!(ratio_bound(&MwmParams::three_competitive()).unwrap(), 3.0);
        let exact =
            ratio_bound_exact(Rational::new(1, 3), Rational::from_integer(0), Rational::from_integer(1)).unwrap();
        assert_eq!(exact, Rational::from_integer(3));
    }

    #[test]
    fn bound_symmetric_point() {
        let g = std::f64::consts::FRAC_1_SQRT_2;
        let b = ratio_bound(&MwmParams::new(0.5, g, g).unwrap()).unwrap();
        // Oracle: the three terms evaluated independently.
        let t1 = 2.0 * (1.0 + g);
        let t3 = (1.0 + g).powi(2) * (1.0 + 2.0 * g) / (g + g * g);
        assert!((b - t1.max(t3)).abs() < 1e-12);
        assert!((b - 5.82842712474619).abs() < 1e-9);
    }

    #[test]
    fn bound_diverges_and_domain() {
        let near = ratio_bound(&MwmParams::new(1.0 - 1e-9, 0.0, 1.0).unwrap()).unwrap();
        assert!(near > 1e8);
        assert!(ratio_bound(&MwmParams::new(1.0, 0.0, 1.0).unwrap()).is_err());
        assert!(ratio_bound(&MwmParams::new(0.5, 0.0, 0.0).unwrap()).is_err());
        assert!(MwmParams::new(1.5, 0.0, 0.0).is_err());
        assert!(MwmParams::new(0.5, -1.0, 0.0).is_err());
    }

    #[test]
    fn first_edge_and_ties() {
        let params = MwmParams::three_competitive();
        let mut s = RandomizedMwm::new(params, Flags::growing_tree()).with_duals().unwrap();
        let o = s.process_edge(&Edge::new(0, 0, 1, 1.0)).unwrap();
        assert_eq!(o.accepted, [true, true]);
        let l = s.ledger().unwrap();
        assert_eq!((l.y(0), l.y(1), l.x(EdgeId(0))), (1.0, 1.0, 1.0));

        // Equal weight: rejected by both (1 > 1 fails, 1 > 2 fails).
        let o = s.process_edge(&Edge::new(1, 1, 2, 1.0)).unwrap();
        assert_eq!(o.accepted, [false, false]);
        let l = s.ledger().unwrap();
        assert_eq!((l.y(1), l.y(2), l.x(EdgeId(1))), (1.0, 0.0, 0.0));

        // 2 + δ: accepted by both, evicting edge 0.
        let o = s.process_edge(&Edge::new(2, 0, 3, 2.0 + 1e-6)).unwrap();
        assert_eq!(o.accepted, [true, true]);
        assert_eq!(o.evicted, [vec![EdgeId(0)], vec![EdgeId(0)]]);
        let l = s.ledger().unwrap();
        assert!(l.x(EdgeId(0)).abs() < 1e-15);
        assert!(l.audit().clean(), "{:?}", l.audit());
    }

    #[test]
    fn eviction_from_m1_only_drops_x_by_p() {
        let params = MwmParams::new(0.25, 0.0, 1.0).unwrap();
        let mut s = RandomizedMwm::new(params, Flags::growing_tree()).with_duals().unwrap();
        s.process_edge(&Edge::new(0, 0, 1, 1.0)).unwrap();
        let y_before: Vec<f64> = (0..2).map(|v| s.ledger().unwrap().y(v)).collect();
        let o = s.process_edge(&Edge::new(1, 1, 2, 1.5)).unwrap();
        assert_eq!(o.accepted, [true, false]);
        let l = s.ledger().unwrap();
        assert!((l.x(EdgeId(0)) - 0.75).abs() < 1e-15);
        assert!((l.x(EdgeId(1)) - 0.25).abs() < 1e-15);
        assert_eq!(l.y(0), y_before[0]);
        assert!(l.audit().clean(), "{:?}", l.audit());
    }

    #[test]
    fn expected_weight_cases() {
        let s = RandomizedMwm::new(MwmParams::new(0.3, 0.0, 1.0).unwrap(), Flags::default())
            .run(&[Edge::new(0, 0, 1, 5.0)])
            .unwrap();
        assert!((s.expected_weight() - 5.0).abs() < 1e-12);

        let edges = growing(&[(0, 1, 1.0), (1, 2, 1.5)]);
        let s = RandomizedMwm::new(MwmParams::new(0.0, 0.0, 1.0).unwrap(), Flags::default()).run(&edges).unwrap();
        assert_eq!(s.expected_weight(), s.weights()[1]);
    }

    #[test]
    fn duals_require_growing_tree() {
        let s = RandomizedMwm::new(MwmParams::three_competitive(), Flags::tree());
        assert!(matches!(s.with_duals(), Err(Error::Domain(_))));
    }

    #[test]
    fn mcgregor_rule() {
        let mut m = McGregor::new(1.0, Flags::default()).unwrap();
        assert!(m.process_edge(&Edge::new(0, 0, 1, 1.0)).unwrap());
        assert!(!m.process_edge(&Edge::new(1, 1, 2, 2.0)).unwrap());
        assert!(m.process_edge(&Edge::new(2, 0, 3, 2.5)).unwrap());
        assert_eq!(m.weight(), 2.5);
        assert!(McGregor::new(0.0, Flags::default()).is_err());
    }

    #[test]
    fn sampling_respects_degenerate_p() {
        let s = RandomizedMwm::new(MwmParams::new(1.0, 0.0, 1.0).unwrap(), Flags::default()).with_sample(3);
        assert_eq!(s.sampled_index(), Some(0));
        let s = RandomizedMwm::new(MwmParams::new(0.0, 0.0, 1.0).unwrap(), Flags::default()).with_sample(3);
        assert_eq!(s.sampled_index(), Some(1));
    }
}
