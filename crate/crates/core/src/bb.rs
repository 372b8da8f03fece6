//! Branch-and-bound enumeration of minimal siphons.
//!
//! A depth-first search over the siphon encoding that always tries `0`
//! before `1`. With that value order a set is never reached before any of
//! its subsets, so the first solution is minimal. After each solution the
//! search is unwound to the root, a non-superset clause is posted once into
//! the persistent clause store, and the decision path that led to the
//! solution is replayed to resume where the search left off.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cnf::{blocking_clause, encode_siphon, CnfFormula, Literal, VarMap};
use crate::error::{Error, Result};
use crate::net::{PetriNet, PlaceSet};
use crate::search::{Budget, EnumerationResult, Limits, SearchStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagation {
    Consistent,
    Conflict,
}

/// Partial assignment plus a clause store with two watched literals per
/// clause. Assignments are undone by truncating the trail.
#[derive(Clone, Debug)]
pub struct BbState {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
    watches: Vec<Vec<usize>>,
    values: Vec<i8>,
    position: Vec<usize>,
    trail: Vec<Literal>,
    qhead: usize,
    // Trail length at which a clause added while already falsified fails.
    broken_at: Option<usize>,
    propagations: u64,
}

fn code(l: Literal) -> usize {
    2 * (l.unsigned_abs() as usize - 1) + usize::from(l < 0)
}

impl BbState {
    pub fn new(num_vars: usize) -> Self {
        BbState {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            values: vec![0; num_vars],
            position: vec![0; num_vars],
            trail: Vec::new(),
            qhead: 0,
            broken_at: None,
            propagations: 0,
        }
    }

    pub fn from_formula(f: &CnfFormula) -> Self {
        let mut s = BbState::new(f.num_vars());
        for c in f.clauses() {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn lit_value(&self, l: Literal) -> i8 {
        let v = self.values[l.unsigned_abs() as usize - 1];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    /// Value of variable `var` (1-based), if assigned.
    pub fn value(&self, var: usize) -> Option<bool> {
        match self.values[var - 1] {
            0 => None,
            v => Some(v > 0),
        }
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    /// Assigns `var := value`. Returns `false` (and changes nothing) if the
    /// variable already holds the opposite value.
    pub fn assign(&mut self, var: usize, value: bool) -> bool {
        match self.value(var) {
            Some(v) => v == value,
            None => {
                let lit = if value { var as Literal } else { -(var as Literal) };
                self.push(lit);
                true
            }
        }
    }

    fn push(&mut self, lit: Literal) {
        let v = lit.unsigned_abs() as usize - 1;
        self.values[v] = if lit > 0 { 1 } else { -1 };
        self.position[v] = self.trail.len();
        self.trail.push(lit);
    }

    /// Unassigns everything assigned after the first `len` trail entries.
    pub fn undo_to(&mut self, len: usize) {
        for &l in &self.trail[len.min(self.trail.len())..] {
            self.values[l.unsigned_abs() as usize - 1] = 0;
        }
        self.trail.truncate(len);
        self.qhead = self.qhead.min(len);
        if self.broken_at.is_some_and(|b| b > len) {
            self.broken_at = None;
        }
    }

    /// Adds a clause that survives every later [`undo_to`](Self::undo_to).
    /// A clause that is unit under the current assignment gets its last
    /// literal queued; one that is already falsified makes the next
    /// [`propagate`](Self::propagate) report a conflict.
    pub fn add_clause(&mut self, lits: &[Literal]) {
        let mut c: Vec<Literal> = Vec::with_capacity(lits.len());
        for &l in lits {
            assert!(l != 0 && l.unsigned_abs() as usize <= self.num_vars, "literal {l} out of range");
            if !c.contains(&l) {
                c.push(l);
            }
        }
        if c.is_empty() {
            self.broken_at = Some(0);
            return;
        }
        // Non-false literals first, then false ones latest-assigned first,
        // so the watches stay valid when the trail is cut back.
        c.sort_by_key(|&l| match self.lit_value(l) {
            -1 => (1, usize::MAX - self.position[l.unsigned_abs() as usize - 1]),
            _ => (0, 0),
        });
        let first = self.lit_value(c[0]);
        if c.len() == 1 {
            match first {
                0 => self.push(c[0]),
                -1 => self.mark_broken(c[0]),
                _ => {}
            }
            // Unit clauses are re-asserted at the root by storing them too.
            self.clauses.push(c);
            return;
        }
        let second = self.lit_value(c[1]);
        if first == -1 {
            self.mark_broken(c[0]);
        } else if first == 0 && second == -1 {
            self.push(c[0]);
        }
        let idx = self.clauses.len();
        self.watches[code(c[0])].push(idx);
        self.watches[code(c[1])].push(idx);
        self.clauses.push(c);
    }

    fn mark_broken(&mut self, latest_false: Literal) {
        let at = self.position[latest_false.unsigned_abs() as usize - 1] + 1;
        self.broken_at = Some(self.broken_at.map_or(at, |b| b.min(at)));
    }

    /// Re-queues unit clauses after an undo back to the root.
    fn assert_units(&mut self) {
        for i in 0..self.clauses.len() {
            if self.clauses[i].len() == 1 {
                let l = self.clauses[i][0];
                match self.lit_value(l) {
                    0 => self.push(l),
                    -1 => self.mark_broken(l),
                    _ => {}
                }
            }
        }
    }

    /// Unit propagation to fixpoint.
    pub fn propagate(&mut self) -> Propagation {
        if self.broken_at.is_some() {
            return Propagation::Conflict;
        }
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = -p;
            let mut ws = std::mem::take(&mut self.watches[code(false_lit)]);
            let mut keep = 0;
            let mut conflict = false;
            let mut i = 0;
            'next: while i < ws.len() {
                let ci = ws[i];
                i += 1;
                if conflict {
                    ws[keep] = ci;
                    keep += 1;
                    continue;
                }
                if self.clauses[ci][0] == false_lit {
                    self.clauses[ci].swap(0, 1);
                }
                let other = self.clauses[ci][0];
                if self.lit_value(other) == 1 {
                    ws[keep] = ci;
                    keep += 1;
                    continue;
                }
                for k in 2..self.clauses[ci].len() {
                    let l = self.clauses[ci][k];
                    if self.lit_value(l) != -1 {
                        self.clauses[ci].swap(1, k);
                        self.watches[code(l)].push(ci);
                        continue 'next;
                    }
                }
                ws[keep] = ci;
                keep += 1;
                if self.lit_value(other) == -1 {
                    conflict = true;
                } else {
                    self.push(other);
                }
            }
            ws.truncate(keep);
            self.watches[code(false_lit)] = ws;
            if conflict {
                self.qhead = self.trail.len();
                return Propagation::Conflict;
            }
        }
        Propagation::Consistent
    }
}

/// Variable-selection rule; values are always tried `0` then `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Lowest place index first.
    #[default]
    FixedIndex,
    /// A seeded random permutation of the places.
    Random(u64),
    /// Places occurring most often in the siphons found so far first, ties
    /// broken by index. Re-ranked after every solution.
    SiphonFrequency,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    /// `fixed`, `frequency`, `random` or `random:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" | "fixed-index" => Ok(Strategy::FixedIndex),
            "frequency" | "siphon-frequency" => Ok(Strategy::SiphonFrequency),
            "random" => Ok(Strategy::Random(0)),
            _ => match s.strip_prefix("random:").map(str::parse) {
                Some(Ok(seed)) => Ok(Strategy::Random(seed)),
                _ => Err(Error::usage(format!("unknown strategy `{s}`"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BbOptions {
    pub strategy: Strategy,
    /// Restart from the root after each solution instead of replaying the
    /// path. Random orders are reshuffled at every restart.
    pub restart: bool,
}

#[derive(Clone, Copy, Debug)]
struct Frame {
    var: usize,
    value: bool,
    trail_len: usize,
    flipped: bool,
}

struct Search<'a> {
    net: &'a PetriNet,
    vm: VarMap,
    state: BbState,
    options: BbOptions,
    order: Vec<usize>,
    rng: ChaCha8Rng,
    frequency: Vec<u64>,
    stack: Vec<Frame>,
    sets: Vec<PlaceSet>,
    stats: SearchStats,
    last_leaf: Option<Vec<bool>>,
    trace: Option<&'a mut dyn Write>,
}

impl<'a> Search<'a> {
    fn new(net: &'a PetriNet, options: BbOptions, trace: Option<&'a mut dyn Write>) -> Result<Self> {
        let (f, vm) = encode_siphon(net)?;
        let n = f.num_vars();
        let seed = match options.strategy {
            Strategy::Random(seed) => seed,
            _ => 0,
        };
        let mut s = Search {
            net,
            vm,
            state: BbState::from_formula(&f),
            options,
            order: (1..=n).collect(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            frequency: vec![0; n],
            stack: Vec::new(),
            sets: Vec::new(),
            stats: SearchStats::default(),
            last_leaf: None,
            trace,
        };
        s.rank();
        Ok(s)
    }

    fn rank(&mut self) {
        match self.options.strategy {
            Strategy::FixedIndex => {}
            Strategy::Random(_) => self.order.shuffle(&mut self.rng),
            Strategy::SiphonFrequency => {
                let freq = &self.frequency;
                self.order.sort_by_key(|&v| (std::cmp::Reverse(freq[v - 1]), v));
            }
        }
    }

    fn emit(&mut self, line: std::fmt::Arguments) {
        if let Some(w) = self.trace.as_mut() {
            let _ = writeln!(w, "{line}");
        }
    }

    fn decide(&mut self, var: usize, value: bool, flipped: bool) -> Propagation {
        let trail_len = self.state.trail_len();
        self.stack.push(Frame { var, value, trail_len, flipped });
        self.stats.decisions += 1;
        if self.trace.is_some() {
            let name = self.vm.name(var as Literal).to_string();
            let depth = self.stack.len();
            self.emit(format_args!("D {name}={} {depth}", u8::from(value)));
        }
        self.state.assign(var, value);
        self.state.propagate()
    }

    /// Pops exhausted decisions and flips the deepest open one. Returns
    /// `None` when the whole tree is exhausted.
    fn backtrack(&mut self) -> Option<Propagation> {
        self.stats.conflicts += 1;
        while let Some(top) = self.stack.pop() {
            self.state.undo_to(top.trail_len);
            let depth = self.stack.len() + 1;
            self.emit(format_args!("B {depth}"));
            if !top.flipped {
                return Some(self.decide(top.var, true, true));
            }
        }
        None
    }

    fn next_var(&self) -> Option<usize> {
        self.order.iter().copied().find(|&v| self.state.value(v).is_none())
    }

    /// Position of the current leaf in the fixed-index tree: the assignment
    /// read as a binary word in variable order.
    fn leaf_word(&self) -> Vec<bool> {
        (1..=self.vm.len()).map(|v| self.state.value(v) == Some(true)).collect()
    }

    fn record_solution(&mut self) -> Result<Propagation> {
        let values: Vec<bool> = self.leaf_word();
        let set = self.vm.true_set(&values);
        self.stats.leaves += 1;
        debug_assert!(self.net.is_siphon(&set).unwrap_or(false));
        debug_assert!(
            self.sets.iter().all(|s| !set.is_subset(s)),
            "a later solution is a subset of an earlier one"
        );
        if self.options.strategy == Strategy::FixedIndex && !self.options.restart {
            debug_assert!(self.last_leaf.as_ref().is_none_or(|prev| *prev < values));
            self.last_leaf = Some(values);
        }
        if self.trace.is_some() {
            let shown = set.display(self.net).to_string();
            self.emit(format_args!("S {shown}"));
        }
        for p in set.iter() {
            self.frequency[p.0] += 1;
        }
        let block = blocking_clause(&set, &self.vm)?;
        self.sets.push(set);

        let path: Vec<Frame> = std::mem::take(&mut self.stack);
        self.state.undo_to(0);
        self.state.add_clause(&block);
        self.state.assert_units();
        if self.options.strategy == Strategy::SiphonFrequency || self.options.restart {
            self.rank();
        }
        let status = self.state.propagate();
        if self.options.restart {
            self.stats.solve_calls += 1;
            return Ok(status);
        }
        if status == Propagation::Conflict {
            return Ok(status);
        }
        Ok(self.replay(&path))
    }

    /// Re-enters the memorized path under the new clause store, stopping at
    /// the first point where it no longer applies.
    fn replay(&mut self, path: &[Frame]) -> Propagation {
        for f in path {
            match self.state.value(f.var) {
                Some(v) if v == f.value => continue,
                // The 0-branch is now pruned; continue in its 1-branch.
                Some(_) if !f.flipped => return Propagation::Consistent,
                // Both branches at this node are done.
                Some(_) => return Propagation::Conflict,
                None => {
                    if self.decide(f.var, f.value, f.flipped) == Propagation::Conflict {
                        return Propagation::Conflict;
                    }
                }
            }
        }
        // The blocking clause falsifies the full path, so replay never
        // reaches this point with every variable set; stay safe anyway.
        Propagation::Consistent
    }

    fn run(&mut self, limits: &Limits) -> Result<()> {
        self.stats.solve_calls = 1;
        let mut status = self.state.propagate();
        let mut steps: u64 = 0;
        loop {
            steps += 1;
            if steps.is_multiple_of(64) && limits.exceeded(self.stats.conflicts) {
                self.stats.timed_out = true;
                break;
            }
            if status == Propagation::Conflict {
                self.stats.leaves += 1;
                match self.backtrack() {
                    Some(s) => status = s,
                    None => break,
                }
                continue;
            }
            match self.next_var() {
                Some(v) => status = self.decide(v, false, false),
                None => status = self.record_solution()?,
            }
        }
        self.stats.propagations = self.state.propagations;
        self.stats.elapsed = limits.started.elapsed();
        Ok(())
    }
}

/// All inclusion-minimal siphons by branch-and-bound without restarts.
pub fn enumerate_minimal_bb(net: &PetriNet, strategy: Strategy, budget: Budget) -> Result<EnumerationResult> {
    enumerate_minimal_bb_with(net, BbOptions { strategy, restart: false }, budget, None)
}

/// Full-control entry point. When `trace` is given, one line is written per
/// decision (`D <place>=<bit> <depth>`), per undone decision (`B <depth>`)
/// and per solution (`S {places}`).
pub fn enumerate_minimal_bb_with<'a>(
    net: &'a PetriNet,
    options: BbOptions,
    budget: Budget,
    trace: Option<&'a mut dyn Write>,
) -> Result<EnumerationResult> {
    let limits = budget.start();
    let mut search = Search::new(net, options, trace)?;
    search.run(&limits)?;
    Ok(EnumerationResult {
        sets: search.sets,
        stats: search.stats,
    })
}

/// The first leaf reached by the 0-first search, before any blocking
/// clause exists.
pub fn first_solution(net: &PetriNet) -> Result<Option<PlaceSet>> {
    let mut search = Search::new(net, BbOptions::default(), None)?;
    let mut status = search.state.propagate();
    loop {
        if status == Propagation::Conflict {
            match search.backtrack() {
                Some(s) => status = s,
                None => return Ok(None),
            }
            continue;
        }
        match search.next_var() {
            Some(v) => status = search.decide(v, false, false),
            None => return Ok(Some(search.vm.true_set(&search.leaf_word()))),
        }
    }
}

/// Checks by exhaustive subset search that the first 0-first solution is
/// inclusion-minimal. Nets without siphons pass vacuously.
pub fn first_solution_is_minimal_check(net: &PetriNet) -> Result<bool> {
    let Some(first) = first_solution(net)? else {
        return Ok(true);
    };
    let members: Vec<_> = first.iter().collect();
    if members.len() > 24 {
        return Err(Error::usage("first solution too large for an exhaustive check"));
    }
    let full = (1u32 << members.len()) - 1;
    for mask in 1..full {
        let sub: PlaceSet = (0..members.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| members[i])
            .collect();
        if net.is_siphon(&sub)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::generators::gen_chain;

    fn enzyme_state() -> BbState {
        BbState::from_formula(&encode_siphon(&corpus::enzyme().0).unwrap().0)
    }

    #[test]
    fn propagation_on_the_enzyme_encoding() {
        // Variables: 1 = E, 2 = A, 3 = AE, 4 = B.
        let mut s = enzyme_state();
        assert_eq!(s.propagate(), Propagation::Consistent);
        s.assign(3, true);
        assert_eq!(s.propagate(), Propagation::Consistent);
        assert_eq!(s.value(2), None);
        s.assign(1, false);
        assert_eq!(s.propagate(), Propagation::Consistent);
        assert_eq!(s.value(2), Some(true));
    }

    #[test]
    fn all_zero_conflicts() {
        let mut s = enzyme_state();
        for v in 1..=4 {
            s.assign(v, false);
        }
        assert_eq!(s.propagate(), Propagation::Conflict);
    }

    #[test]
    fn blocking_clause_alone_forces_the_other_variable() {
        let mut s = BbState::new(4);
        s.add_clause(&[-2, -3]);
        s.assign(2, true);
        assert_eq!(s.propagate(), Propagation::Consistent);
        assert_eq!(s.value(3), Some(false));
    }

    #[test]
    fn blocking_clause_with_the_full_encoding_conflicts() {
        // A = 1 forces AE = 1 through (-2 3), which the blocking clause forbids.
        let mut s = enzyme_state();
        s.add_clause(&[-2, -3]);
        s.assign(2, true);
        assert_eq!(s.propagate(), Propagation::Conflict);
    }

    #[test]
    fn undo_restores_watches() {
        let mut s = enzyme_state();
        s.assign(4, true);
        assert_eq!(s.propagate(), Propagation::Consistent);
        assert_eq!(s.value(3), Some(true));
        s.undo_to(0);
        assert_eq!(s.value(3), None);
        s.add_clause(&[-4]);
        assert_eq!(s.propagate(), Propagation::Consistent);
        assert_eq!(s.value(4), Some(false));
        assert_eq!(s.value(3), None);
        s.assign(3, false);
        assert_eq!(s.propagate(), Propagation::Conflict);
        s.undo_to(0);
        s.add_clause(&[-3]);
        // Without AE nothing remains: every other place implies AE.
        assert_eq!(s.propagate(), Propagation::Conflict);
    }

    #[test]
    fn enzyme() {
        let (net, _) = corpus::enzyme();
        let r = enumerate_minimal_bb(&net, Strategy::FixedIndex, Budget::unlimited()).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.named(&net), vec![vec!["A", "AE"], vec!["AE", "E"]]);
    }

    #[test]
    fn chain_with_every_strategy_and_mode() {
        let net = gen_chain(4).unwrap();
        for strategy in [Strategy::FixedIndex, Strategy::Random(3), Strategy::SiphonFrequency] {
            for restart in [false, true] {
                let r = enumerate_minimal_bb_with(&net, BbOptions { strategy, restart }, Budget::unlimited(), None)
                    .unwrap();
                assert_eq!(r.sets.len(), 16, "{strategy:?} restart={restart}");
            }
        }
    }

    #[test]
    fn restart_counts_solve_calls() {
        let net = gen_chain(3).unwrap();
        let opts = BbOptions { strategy: Strategy::FixedIndex, restart: true };
        let r = enumerate_minimal_bb_with(&net, opts, Budget::unlimited(), None).unwrap();
        assert_eq!(r.stats.solve_calls, 9);
    }

    #[test]
    fn trace_lines() {
        let (net, _) = corpus::enzyme();
        let mut out = Vec::new();
        enumerate_minimal_bb_with(&net, BbOptions::default(), Budget::unlimited(), Some(&mut out)).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "D E=0 1");
        let solutions: Vec<&str> = lines.iter().copied().filter(|l| l.starts_with('S')).collect();
        assert_eq!(solutions, vec!["S {A, AE}", "S {E, AE}"]);
        assert!(lines.iter().all(|l| l.starts_with("D ") || l.starts_with("B ") || l.starts_with("S {")));
    }

    #[test]
    fn first_solutions_are_minimal() {
        assert!(first_solution_is_minimal_check(&corpus::enzyme().0).unwrap());
        let (net, _) = corpus::example2();
        assert!(first_solution_is_minimal_check(&net).unwrap());
        let first = first_solution(&net).unwrap().unwrap();
        assert_eq!(first.names(&net), vec!["A", "B"]);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("fixed".parse::<Strategy>().unwrap(), Strategy::FixedIndex);
        assert_eq!("random:9".parse::<Strategy>().unwrap(), Strategy::Random(9));
        assert_eq!("frequency".parse::<Strategy>().unwrap(), Strategy::SiphonFrequency);
        assert!("best".parse::<Strategy>().is_err());
    }

    #[test]
    fn zero_budget_is_partial() {
        let net = gen_chain(9).unwrap();
        let r = enumerate_minimal_bb(&net, Strategy::FixedIndex, Budget::with_time_limit(std::time::Duration::ZERO))
            .unwrap();
        assert!(!r.is_complete());
    }
}
