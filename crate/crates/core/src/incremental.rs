//! Incremental (insert-only) MCM.
//!
//! [`IncrementalRand`] keeps three matchings and outputs one uniformly at
//! random; each insertion does a bounded amount of work. Edges evicted by a
//! switch can pull neighbouring edges from the other matchings back in
//! ("re-add"), which keeps all three matchings maximal.
//!
//! [`IncrementalDet`] is the deterministic variant: single-conflict switches
//! only, a support matching `M_4` that parks rejected edges, and a current
//! output index `c` that is moved to the largest matching whenever `M_c`
//! falls behind the other two by more than a `1 + ε` factor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{Action, EventLog};
use crate::graph::{Edge, EdgeId, Flags, Matching, Mode, MultiMatchingState, VertexId};
use crate::rng::SplitMix64;
use crate::Rational;

#[derive(Copy, Clone, Debug, Default, PartialEq, Serialize)]
pub struct WorkProfile {
    pub updates: u64,
    pub max_per_update: u64,
    pub total: u64,
    pub amortized: f64,
}

#[derive(Clone, Debug, Default)]
struct WorkMeter {
    updates: u64,
    max: u64,
    total: u64,
}

impl WorkMeter {
    fn record(&mut self, units: u64) {
        self.updates += 1;
        self.max = self.max.max(units);
        self.total += units;
    }

    fn profile(&self) -> WorkProfile {
        let amortized = if self.updates == 0 { 0.0 } else { self.total as f64 / self.updates as f64 };
        WorkProfile { updates: self.updates, max_per_update: self.max, total: self.total, amortized }
    }
}

/// For an edge `out` evicted from `M_i` by `incoming`, offer `M_i` the edges
/// matched at the far endpoint of `out` in the donor matchings. Returns the
/// edges actually added.
fn readd_from_far_end(
    core: &mut MultiMatchingState,
    i: usize,
    out: EdgeId,
    incoming: &Edge,
    donors: usize,
) -> Result<Vec<(EdgeId, usize)>> {
    let o = *core.edge(out);
    let far: VertexId = if incoming.touches(o.u) { o.v } else { o.u };
    let mut seen: arrayvec::ArrayVec<EdgeId, 4> = arrayvec::ArrayVec::new();
    let mut added = Vec::new();
    for j in 0..donors {
        if j == i {
            continue;
        }
        let Some(f) = core.mate(j, far) else { continue };
        if seen.contains(&f) {
            continue;
        }
        seen.push(f);
        let fe = *core.edge(f);
        if !core.contains(i, f) && core.conflicts(i, &fe).is_empty() {
            core.add(i, f)?;
            added.push((f, j));
        }
    }
    Ok(added)
}

#[derive(Clone, Debug)]
pub struct IncrementalRand {
    core: MultiMatchingState,
    log: EventLog,
    step: usize,
    meter: WorkMeter,
    sampled: Option<usize>,
}

impl Default for IncrementalRand {
    fn default() -> Self {
        IncrementalRand::new(Flags::default())
    }
}

impl IncrementalRand {
    pub const K: usize = 3;

    pub fn new(flags: Flags) -> Self {
        IncrementalRand {
            core: MultiMatchingState::new(Self::K, Mode::Mcm, flags),
            log: EventLog::new(),
            step: 0,
            meter: WorkMeter::default(),
            sampled: None,
        }
    }

    pub fn with_sample(mut self, seed: u64) -> Self {
        self.sampled = Some(SplitMix64::new(seed).below(Self::K as u64) as usize);
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
        let start = self.core.work();
        let step = self.step;
        self.step += 1;
        let k = Self::K;

        for i in 0..k {
            if self.core.conflicts(i, e).is_empty() {
                self.core.add(i, e.id)?;
                self.log.push(e.id, i, Action::AugmentAdd, step);
            }
        }

        for i in 1..k {
            if self.core.contains(i, e.id) {
                continue;
            }
            let out = self.core.conflicts(i, e);
            let before = self.core.overlap(i, e, k, true);
            self.core.apply_switch(i, &out, e.id)?;
            let after = self.core.overlap(i, e, k, true);
            if after >= before {
                self.core.undo_switch(i, &out, e.id)?;
                continue;
            }
            for &o in &out {
                self.log.push(o, i, Action::SwitchOut, step);
            }
            self.log.push(e.id, i, Action::SwitchIn, step);
            for &o in &out {
                for (f, _) in readd_from_far_end(&mut self.core, i, o, e, k)? {
                    self.log.push(f, i, Action::Readd, step);
                }
            }
        }
        self.meter.record(self.core.work() - start);
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

    pub fn expected_size(&self) -> Rational {
        let total: usize = self.core.sizes().iter().sum();
        Rational::new(total as i64, Self::K as i64)
    }

    pub fn output_size(&self) -> Rational {
        match self.sampled {
            Some(l) => Rational::from_integer(self.core.matching(l).len() as i64),
            None => self.expected_size(),
        }
    }

    /// Zero-cost query: the sampled matching, or `M_1` when not sampling.
    pub fn query(&self) -> &Matching {
        self.core.matching(self.sampled.unwrap_or(0))
    }

    pub fn work_profile(&self) -> WorkProfile {
        self.meter.profile()
    }

    pub fn all_maximal(&self) -> bool {
        (0..Self::K).all(|i| self.core.is_maximal(i))
    }
}

#[derive(Clone, Debug)]
pub struct IncrementalDet {
    core: MultiMatchingState,
    log: EventLog,
    step: usize,
    epsilon: Rational,
    current: usize,
    meter: WorkMeter,
    changes: u64,
}

impl IncrementalDet {
    /// Index of the support matching.
    pub const SUPPORT: usize = 3;

    pub fn new(epsilon: Rational, flags: Flags) -> Result<Self> {
        if epsilon <= Rational::from_integer(0) || epsilon > Rational::new(1, 2) {
            return Err(Error::Domain(format!("epsilon {epsilon} not in (0, 1/2]")));
        }
        Ok(IncrementalDet {
            core: MultiMatchingState::new(4, Mode::Mcm, flags),
            log: EventLog::new(),
            step: 0,
            epsilon,
            current: 0,
            meter: WorkMeter::default(),
            changes: 0,
        })
    }

    pub fn core(&self) -> &MultiMatchingState {
        &self.core
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    /// Zero-based index of the output matching.
    pub fn current(&self) -> usize {
        self.current
    }

    pub fn query(&self) -> &Matching {
        self.core.matching(self.current)
    }

    pub fn current_size(&self) -> usize {
        self.query().len()
    }

    /// How many times the output index was recomputed.
    pub fn index_changes(&self) -> u64 {
        self.changes
    }

    pub fn process_edge(&mut self, e: &Edge) -> Result<()> {
        self.core.reveal(e)?;
        let start = self.core.work();
        let step = self.step;
        self.step += 1;
        let mut placed = false;

        for i in 0..3 {
            if self.core.conflicts(i, e).is_empty() {
                self.core.add(i, e.id)?;
                self.log.push(e.id, i, Action::AugmentAdd, step);
                placed = true;
            }
        }

        for i in 1..3 {
            if self.core.contains(i, e.id) {
                continue;
            }
            let out = self.core.conflicts(i, e);
            if out.len() != 1 {
                continue;
            }
            let before = self.core.overlap(i, e, 3, false);
            self.core.apply_switch(i, &out, e.id)?;
            let after = self.core.overlap(i, e, 3, false);
            if after >= before {
                self.core.undo_switch(i, &out, e.id)?;
                continue;
            }
            placed = true;
            self.log.push(out[0], i, Action::SwitchOut, step);
            self.log.push(e.id, i, Action::SwitchIn, step);
            for (f, _) in readd_from_far_end(&mut self.core, i, out[0], e, 4)? {
                self.log.push(f, i, Action::Readd, step);
                if self.core.remove(Self::SUPPORT, f) {
                    self.log.push(f, Self::SUPPORT, Action::SwitchOut, step);
                }
            }
        }

        if !placed && self.core.conflicts(Self::SUPPORT, e).is_empty() {
            self.core.add(Self::SUPPORT, e.id)?;
            self.log.push(e.id, Self::SUPPORT, Action::SupportAdd, step);
        }

        let mut units = self.core.work() - start;
        units += 3;
        if !self.output_invariant_holds() {
            let sizes = [0, 1, 2].map(|i| self.core.matching(i).len());
            units += sizes.iter().sum::<usize>() as u64;
            self.current = (0..3).fold(0, |best, i| if sizes[i] > sizes[best] { i } else { best });
            self.changes += 1;
        }
        self.meter.record(units);
        Ok(())
    }

    pub fn run(mut self, edges: &[Edge]) -> Result<Self> {
        for e in edges {
            self.process_edge(e)?;
        }
        Ok(self)
    }

    /// `2(1+ε)|M_c| ≥ |M_i| + |M_j|` for the two non-current indices.
    pub fn output_invariant_holds(&self) -> bool {
        let c = self.current;
        let others: i64 = (0..3).filter(|&i| i != c).map(|i| self.core.matching(i).len() as i64).sum();
        let lhs =
            Rational::from_integer(2 * self.core.matching(c).len() as i64) * (Rational::from_integer(1) + self.epsilon);
        lhs >= Rational::from_integer(others)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.core.sizes()
    }

    /// Mean size of `M_1..M_3`.
    pub fn mean_size(&self) -> Rational {
        let s = self.core.sizes();
        Rational::new((s[0] + s[1] + s[2]) as i64, 3)
    }

    pub fn work_profile(&self) -> WorkProfile {
        self.meter.profile()
    }
}
