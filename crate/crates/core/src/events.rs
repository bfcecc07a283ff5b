use serde::Serialize;

use crate::error::Result;
use crate::graph::{Edge, EdgeId, Flags, Mode, MultiMatchingState};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    AugmentAdd,
    SwitchIn,
    SwitchOut,
    SupportAdd,
    Readd,
}

impl Action {
    fn adds(self) -> bool {
        !matches!(self, Action::SwitchOut)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub edge: EdgeId,
    /// Zero-based matching index (`M_1` is 0).
    pub matching: usize,
    pub action: Action,
    /// Zero-based arrival step at which the event happened.
    pub step: usize,
}

/// Append-only record of committed membership changes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        EventLog::default()
    }

    pub fn push(&mut self, edge: EdgeId, matching: usize, action: Action, step: usize) {
        self.events.push(Event { edge, matching, action, step });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn for_edge(&self, id: EdgeId) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |ev| ev.edge == id)
    }

    /// Rebuilds a `k`-matching state from scratch by replaying the log over
    /// `edges` (revealed in order as the log reaches them).
    pub fn replay(&self, k: usize, mode: Mode, edges: &[Edge]) -> Result<MultiMatchingState> {
        let mut s = MultiMatchingState::new(k, mode, Flags::default());
        let mut revealed = 0usize;
        let mut evs = self.events.iter().peekable();
        for (step, e) in edges.iter().enumerate() {
            s.reveal(e)?;
            revealed += 1;
            while let Some(ev) = evs.next_if(|ev| ev.step == step) {
                debug_assert!(ev.edge.0 < revealed);
                if ev.action.adds() {
                    s.add(ev.matching, ev.edge)?;
                } else {
                    s.remove(ev.matching, ev.edge);
                }
            }
        }
        Ok(s)
    }
}
