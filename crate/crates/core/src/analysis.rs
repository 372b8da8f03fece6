//! Engine dispatch, traps by duality, post-filtering, the marked-trap
//! report, and an exhaustive oracle for small nets.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::bb::{enumerate_minimal_bb, Strategy};
use crate::error::{Error, Result};
use crate::net::{Marking, PetriNet, PlaceSet};
use crate::sat::enumerate_minimal_sat;
use crate::search::{canonical_order, Budget, EnumerationResult, SearchStats};

/// Largest net the exhaustive oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Sat,
    Bb(Strategy),
    Oracle,
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sat" => Ok(Engine::Sat),
            "bb" => Ok(Engine::Bb(Strategy::FixedIndex)),
            "oracle" => Ok(Engine::Oracle),
            other => Err(Error::usage(format!("unknown engine `{other}` (expected sat, bb or oracle)"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Sat => "sat",
            Engine::Bb(_) => "bb",
            Engine::Oracle => "oracle",
        })
    }
}

pub fn enumerate_minimal_siphons(net: &PetriNet, engine: Engine, budget: Budget) -> Result<EnumerationResult> {
    match engine {
        Engine::Sat => enumerate_minimal_sat(net, budget),
        Engine::Bb(strategy) => enumerate_minimal_bb(net, strategy, budget),
        Engine::Oracle => {
            let started = Instant::now();
            let sets = brute_force_minimal_siphons(net)?;
            Ok(EnumerationResult {
                sets,
                stats: SearchStats {
                    solve_calls: 1,
                    elapsed: started.elapsed(),
                    ..SearchStats::default()
                },
            })
        }
    }
}

/// Minimal traps are the minimal siphons of the dual net.
pub fn enumerate_minimal_traps(net: &PetriNet, engine: Engine, budget: Budget) -> Result<EnumerationResult> {
    enumerate_minimal_siphons(&net.dual(), engine, budget)
}

/// The sets that include every place of `required`.
pub fn filter_containing(sets: &[PlaceSet], required: &PlaceSet) -> Vec<PlaceSet> {
    sets.iter().filter(|s| s.is_superset(required)).cloned().collect()
}

/// The largest trap contained in `s`, or the empty set if there is none.
///
/// Places with an output transition that does not feed back into the
/// current set are removed until nothing changes.
pub fn max_trap_within(net: &PetriNet, s: &PlaceSet) -> Result<PlaceSet> {
    let mut current = s.clone();
    net.pre_set(&current)?;
    loop {
        let mut feeds = vec![false; net.num_transitions()];
        for t in net.pre_set(&current)? {
            feeds[t.0] = true;
        }
        let leaking: Vec<_> = current
            .iter()
            .filter(|&p| net.consumers(p).iter().any(|t| !feeds[t.0]))
            .collect();
        if leaking.is_empty() {
            return Ok(current);
        }
        for p in leaking {
            current.remove(p);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiphonRow {
    pub siphon: Vec<String>,
    pub proper: bool,
    /// Largest trap inside the siphon; empty when there is none.
    pub max_trap: Vec<String>,
    pub trap_marked: bool,
}

/// Whether each minimal siphon contains a trap marked under the initial
/// marking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkingReport {
    pub rows: Vec<SiphonRow>,
    pub all_contain_marked_trap: bool,
    /// False if the enumeration ran out of budget; rows are then partial.
    pub complete: bool,
}

pub fn siphon_trap_report(net: &PetriNet, m0: &Marking, engine: Engine, budget: Budget) -> Result<MarkingReport> {
    if m0.len() != net.num_places() {
        return Err(Error::usage("marking does not match the net"));
    }
    let result = enumerate_minimal_siphons(net, engine, budget)?;
    let names = |s: &PlaceSet| s.names(net).into_iter().map(String::from).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for s in canonical_order(result.sets.clone()) {
        let trap = max_trap_within(net, &s)?;
        rows.push(SiphonRow {
            siphon: names(&s),
            proper: net.is_proper_siphon(&s)?,
            trap_marked: m0.tokens_in(&trap) >= 1,
            max_trap: names(&trap),
        });
    }
    Ok(MarkingReport {
        all_contain_marked_trap: rows.iter().all(|r| r.trap_marked),
        complete: result.is_complete(),
        rows,
    })
}

impl fmt::Display for MarkingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let braces = |v: &[String]| format!("{{{}}}", v.join(", "));
        for r in &self.rows {
            let trap = if r.max_trap.is_empty() { "{}".to_string() } else { braces(&r.max_trap) };
            writeln!(
                f,
                "siphon {}  proper={}  max-trap={}  marked={}",
                braces(&r.siphon),
                r.proper,
                trap,
                r.trap_marked
            )?;
        }
        let verdict = if self.all_contain_marked_trap {
            "every minimal siphon contains an initially marked trap"
        } else {
            "some minimal siphon contains no initially marked trap"
        };
        write!(f, "summary: {verdict}")?;
        if !self.complete {
            write!(f, " (partial: budget exhausted)")?;
        }
        writeln!(f)
    }
}

/// Bit masks of the input and output places of every transition.
fn masks(net: &PetriNet, cap: usize) -> Result<(Vec<u32>, Vec<u32>)> {
    let n = net.num_places();
    if n > cap.min(31) {
        return Err(Error::usage(format!("exhaustive search limited to {} places, net has {n}", cap.min(31))));
    }
    let mask = |arcs: &[(crate::net::PlaceId, u64)]| arcs.iter().fold(0u32, |m, &(p, _)| m | 1 << p.0);
    let ins = net.transitions().map(|t| mask(net.inputs(t))).collect();
    let outs = net.transitions().map(|t| mask(net.outputs(t))).collect();
    Ok((ins, outs))
}

fn to_set(mask: u32) -> PlaceSet {
    PlaceSet::from_indices((0..32).filter(|i| mask >> i & 1 == 1))
}

fn siphon_masks(net: &PetriNet, cap: usize) -> Result<Vec<u32>> {
    let (ins, outs) = masks(net, cap)?;
    let n = net.num_places();
    let mut found = Vec::new();
    for s in 1u32..(1u32 << n) {
        // Every transition that produces into s must also consume from s.
        if ins.iter().zip(&outs).all(|(&i, &o)| o & s == 0 || i & s != 0) {
            found.push(s);
        }
    }
    Ok(found)
}

fn minimal_masks(mut all: Vec<u32>) -> Vec<u32> {
    all.sort_by_key(|m| m.count_ones());
    let mut minimal: Vec<u32> = Vec::new();
    for s in all {
        if !minimal.iter().any(|&m| m & !s == 0) {
            minimal.push(s);
        }
    }
    minimal
}

/// Every siphon of `net`, in canonical order.
pub fn brute_force_siphons(net: &PetriNet) -> Result<Vec<PlaceSet>> {
    Ok(canonical_order(siphon_masks(net, DEFAULT_ORACLE_CAP)?.into_iter().map(to_set).collect()))
}

pub fn brute_force_minimal_siphons(net: &PetriNet) -> Result<Vec<PlaceSet>> {
    brute_force_minimal_siphons_capped(net, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_minimal_siphons_capped(net: &PetriNet, cap: usize) -> Result<Vec<PlaceSet>> {
    let minimal = minimal_masks(siphon_masks(net, cap)?);
    Ok(canonical_order(minimal.into_iter().map(to_set).collect()))
}

/// Every trap of `net`, in canonical order, checked directly with
/// [`PetriNet::is_trap`] rather than through the dual.
pub fn brute_force_traps(net: &PetriNet) -> Result<Vec<PlaceSet>> {
    masks(net, DEFAULT_ORACLE_CAP)?;
    let mut out = Vec::new();
    for s in 1u32..(1u32 << net.num_places()) {
        let set = to_set(s);
        if net.is_trap(&set)? {
            out.push(set);
        }
    }
    Ok(canonical_order(out))
}

pub fn brute_force_minimal_traps(net: &PetriNet) -> Result<Vec<PlaceSet>> {
    let all: Vec<u32> = brute_force_traps(net)?
        .iter()
        .map(|s| s.iter().fold(0u32, |m, p| m | 1 << p.0))
        .collect();
    Ok(canonical_order(minimal_masks(all).into_iter().map(to_set).collect()))
}
