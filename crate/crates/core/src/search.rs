//! Budgets and results shared by the enumeration engines.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::net::{PetriNet, PlaceSet};

/// Resource limits for one enumeration: a conflict count and a wall-clock cap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_conflicts: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_time_limit(limit: Duration) -> Self {
        Budget {
            max_conflicts: None,
            time_limit: Some(limit),
        }
    }

    pub fn with_max_conflicts(max: u64) -> Self {
        Budget {
            max_conflicts: Some(max),
            time_limit: None,
        }
    }

    pub(crate) fn start(&self) -> Limits {
        let started = Instant::now();
        Limits {
            started,
            deadline: self.time_limit.map(|d| started + d),
            max_conflicts: self.max_conflicts,
        }
    }
}

/// A started [`Budget`].
#[derive(Clone, Copy, Debug)]
pub(crate) struct Limits {
    pub started: Instant,
    pub deadline: Option<Instant>,
    pub max_conflicts: Option<u64>,
}

impl Limits {
    pub fn none() -> Self {
        Budget::unlimited().start()
    }

    pub fn exceeded(&self, conflicts: u64) -> bool {
        self.max_conflicts.is_some_and(|m| conflicts >= m)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Top-level satisfiability calls (SAT engine) or restarts + 1 (branch-and-bound).
    pub solve_calls: u64,
    /// Solver calls spent shrinking models to minimal ones.
    pub minimize_calls: u64,
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    /// Branch-and-bound: leaves reached (solutions and failures).
    pub leaves: u64,
    #[serde(rename = "elapsed_ms", serialize_with = "as_millis")]
    pub elapsed: Duration,
    pub timed_out: bool,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

/// Minimal place sets in discovery order, plus statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumerationResult {
    pub sets: Vec<PlaceSet>,
    pub stats: SearchStats,
}

impl EnumerationResult {
    /// False when the budget ran out before the enumeration finished.
    pub fn is_complete(&self) -> bool {
        !self.stats.timed_out
    }

    /// Sets ordered by size, then lexicographically by index.
    pub fn canonical(&self) -> Vec<PlaceSet> {
        canonical_order(self.sets.clone())
    }

    /// Sets ordered by size, then lexicographically by place names.
    pub fn named(&self, net: &PetriNet) -> Vec<Vec<String>> {
        named_order(net, &self.sets)
    }
}

pub fn canonical_order(mut sets: Vec<PlaceSet>) -> Vec<PlaceSet> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets
}

pub fn named_order(net: &PetriNet, sets: &[PlaceSet]) -> Vec<Vec<String>> {
    let mut named: Vec<Vec<String>> = sets
        .iter()
        .map(|s| {
            let mut v: Vec<String> = s.names(net).into_iter().map(str::to_string).collect();
            v.sort();
            v
        })
        .collect();
    named.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    named
}
