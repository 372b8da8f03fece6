//! The token game: seeded random firing sequences and checks that traps
//! stay marked and siphons stay empty along them.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::net::{Marking, PetriNet, PlaceSet, TransitionId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    /// `markings[0]` is the initial marking; `markings[i + 1]` follows
    /// from firing `fired[i]`.
    pub markings: Vec<Marking>,
    pub fired: Vec<TransitionId>,
    /// The walk stopped early because nothing was enabled.
    pub deadlocked: bool,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.markings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markings.is_empty()
    }

    pub fn last(&self) -> &Marking {
        self.markings.last().expect("a walk holds at least the initial marking")
    }
}

/// Fires up to `steps` uniformly chosen enabled transitions.
pub fn random_walk(net: &PetriNet, m0: &Marking, steps: usize, seed: u64) -> Result<Walk> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walk = Walk {
        markings: vec![m0.clone()],
        fired: Vec::new(),
        deadlocked: false,
    };
    let mut m = m0.clone();
    for _ in 0..steps {
        let enabled = net.enabled_transitions(&m)?;
        let Some(&t) = enabled.choose(&mut rng) else {
            walk.deadlocked = true;
            break;
        };
        m = net.fire(&m, t)?;
        walk.fired.push(t);
        walk.markings.push(m.clone());
    }
    if !walk.deadlocked && net.enabled_transitions(&m)?.is_empty() {
        walk.deadlocked = true;
    }
    Ok(walk)
}

/// True iff the trap, once it holds a token, holds one at every later step.
pub fn check_trap_persistence(net: &PetriNet, trap: &PlaceSet, walk: &Walk) -> Result<bool> {
    if !net.is_trap(trap)? {
        return Err(Error::usage(format!("{} is not a trap", trap.display(net))));
    }
    let mut marked = false;
    for m in &walk.markings {
        let now = m.tokens_in(trap) > 0;
        if marked && !now {
            return Ok(false);
        }
        marked |= now;
    }
    Ok(true)
}

/// True iff the siphon, once empty, stays empty for the rest of the walk.
pub fn check_siphon_emptiness(net: &PetriNet, siphon: &PlaceSet, walk: &Walk) -> Result<bool> {
    if !net.is_siphon(siphon)? {
        return Err(Error::usage(format!("{} is not a siphon", siphon.display(net))));
    }
    let mut emptied = false;
    for m in &walk.markings {
        let empty = m.tokens_in(siphon) == 0;
        if emptied && !empty {
            return Ok(false);
        }
        emptied |= empty;
    }
    Ok(true)
}

/// At a dead marking of an ordinary net (all weights 1) every transition
/// has an unmarked input place, so the unmarked places form a siphon. Returns
/// that set when `m` is dead and some place is unmarked, `None` otherwise.
pub fn deadlock_siphon(net: &PetriNet, m: &Marking) -> Result<Option<PlaceSet>> {
    if !net.enabled_transitions(m)?.is_empty() {
        return Ok(None);
    }
    let unmarked = m.unmarked();
    Ok((!unmarked.is_empty()).then_some(unmarked))
}

/// Whether the net has unit weights and no transition without input places,
/// the setting in which [`deadlock_siphon`] always returns a siphon.
pub fn is_ordinary_without_sources(net: &PetriNet) -> bool {
    net.transitions().all(|t| {
        !net.inputs(t).is_empty()
            && net.inputs(t).iter().chain(net.outputs(t)).all(|&(_, w)| w == 1)
    })
}

/// One line per step: index, fired transition (`-` for the start) and the
/// non-zero entries of the marking.
pub fn write_walk_trace(net: &PetriNet, walk: &Walk, out: &mut dyn Write) -> io::Result<()> {
    for (i, m) in walk.markings.iter().enumerate() {
        let fired = if i == 0 { "-" } else { net.transition_name(walk.fired[i - 1]) };
        let tokens: Vec<String> = net
            .places()
            .filter(|&p| m[p] > 0)
            .map(|p| format!("{}:{}", net.place_name(p), m[p]))
            .collect();
        writeln!(out, "{i} {fired} {{{}}}", tokens.join(", "))?;
    }
    if walk.deadlocked {
        writeln!(out, "deadlock after {} steps", walk.fired.len())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn set(net: &PetriNet, names: &[&str]) -> PlaceSet {
        PlaceSet::from_names(net, names).unwrap()
    }

    #[test]
    fn dead_start() {
        let (net, _) = corpus::example2();
        let w = random_walk(&net, &Marking::zero(&net), 10, 0).unwrap();
        assert_eq!(w.len(), 1);
        assert!(w.deadlocked);
    }

    #[test]
    fn enzyme_conserves_the_enzyme() {
        let (net, m0) = corpus::enzyme();
        let e = set(&net, &["E", "AE"]);
        let w = random_walk(&net, &m0, 1000, 5).unwrap();
        assert!(w.markings.iter().all(|m| m.tokens_in(&e) == 2));
        assert!(check_trap_persistence(&net, &e, &w).unwrap());
    }

    #[test]
    fn walks_are_reproducible() {
        let (net, m0) = corpus::enzyme();
        assert_eq!(random_walk(&net, &m0, 50, 3).unwrap(), random_walk(&net, &m0, 50, 3).unwrap());
    }

    #[test]
    fn example2_trap_stays_marked() {
        let (net, _) = corpus::example2();
        let m0 = Marking::from_names(&net, &[("C", 1), ("A", 2)]).unwrap();
        let cd = set(&net, &["C", "D"]);
        for seed in 0..20 {
            let w = random_walk(&net, &m0, 200, seed).unwrap();
            assert!(check_trap_persistence(&net, &cd, &w).unwrap());
        }
        let single = Walk { markings: vec![m0], fired: vec![], deadlocked: false };
        assert!(check_trap_persistence(&net, &cd, &single).unwrap());
        assert!(check_trap_persistence(&net, &set(&net, &["A", "B"]), &single).is_err());
    }

    #[test]
    fn potato_growth_trap() {
        let (net, m0) = corpus::potato_growth();
        let w = random_walk(&net, &m0, 300, 1).unwrap();
        assert!(check_trap_persistence(&net, &set(&net, &["S2", "S3"]), &w).unwrap());
    }

    #[test]
    fn potato_harvest_siphon_empties_for_good() {
        let (net, m0) = corpus::potato_harvest();
        let s = set(&net, &["S3", "S4"]);
        let w = random_walk(&net, &m0, 300, 2).unwrap();
        assert!(check_siphon_emptiness(&net, &s, &w).unwrap());
        assert_eq!(w.last().tokens_in(&s), 0);
        let mut start = m0.clone();
        start.set(net.place_id("S3").unwrap(), 0);
        let w = random_walk(&net, &start, 100, 3).unwrap();
        assert!(w.markings.iter().all(|m| m.tokens_in(&s) == 0));
        assert!(check_siphon_emptiness(&net, &set(&net, &["P1", "S1"]), &w).is_err());
    }

    #[test]
    fn dead_markings_leave_an_unmarked_siphon() {
        let (net, _) = corpus::example2();
        let m = Marking::from_names(&net, &[("D", 0)]).unwrap();
        let s = deadlock_siphon(&net, &m).unwrap().unwrap();
        assert!(net.is_siphon(&s).unwrap());
        let (enz, m0) = corpus::enzyme();
        assert_eq!(deadlock_siphon(&enz, &m0).unwrap(), None);
        assert!(is_ordinary_without_sources(&enz));
    }

    #[test]
    fn trace_format() {
        let (net, m0) = corpus::enzyme();
        let w = random_walk(&net, &m0, 2, 0).unwrap();
        let mut out = Vec::new();
        write_walk_trace(&net, &w, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("0 - {E:2, A:3}\n1 r1_f {E:1, A:2, AE:1}\n"));
    }
}
