//! Conflict-driven SAT solver and the iterated minimal-siphon enumeration.
//!
//! The solver is a small CDCL engine: two watched literals, first-UIP
//! learning, non-chronological backjumping and MiniSat-style assumptions. It
//! has no restarts and never deletes learnt clauses. Decisions pick the
//! lowest-numbered unassigned variable and try `false` first, which biases
//! the first model towards small place sets.
//!
//! Enumeration repeats: find a model, shrink it to an inclusion-minimal one,
//! record it and add its blocking clause permanently.

use std::ops::Not;

use crate::cnf::{blocking_clause, encode_siphon, CnfFormula, Literal};
use crate::error::{Error, Result};
use crate::net::PetriNet;
use crate::search::{Budget, EnumerationResult, Limits, SearchStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: Literal) -> Lit {
        debug_assert!(l != 0);
        let var = l.unsigned_abs() - 1;
        Lit(var * 2 + u32::from(l < 0))
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const NO_REASON: u32 = u32::MAX;

/// A total assignment; `values[k - 1]` is the value of variable `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// From DIMACS literals, e.g. `[-1, 2, 3, -4]`.
    pub fn from_literals(lits: &[Literal]) -> Self {
        let n = lits.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        let mut values = vec![false; n];
        for &l in lits {
            values[l.unsigned_abs() as usize - 1] = l > 0;
        }
        Assignment { values }
    }

    pub fn value(&self, var: Literal) -> bool {
        self.values[var.unsigned_abs() as usize - 1]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.values
    }

    pub fn to_literals(&self) -> Vec<Literal> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as Literal + 1 } else { -(i as Literal + 1) })
            .collect()
    }

    pub fn true_vars(&self) -> Vec<Literal> {
        (0..self.values.len())
            .filter(|&i| self.values[i])
            .map(|i| i as Literal + 1)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Assignment),
    Unsat,
    /// The conflict or time budget ran out.
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
}

pub struct Solver {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    // Every variable below this index is assigned.
    next_var: usize,
    ok: bool,
    stats: SolverStats,
}

impl Solver {
    pub fn new(num_vars: usize) -> Self {
        Solver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            assigns: vec![0; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; num_vars],
            next_var: 0,
            ok: true,
            stats: SolverStats::default(),
        }
    }

    pub fn from_formula(f: &CnfFormula) -> Self {
        let mut s = Solver::new(f.num_vars());
        for c in f.clauses() {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Adds a fresh variable and returns it as a positive literal.
    pub fn new_var(&mut self) -> Literal {
        self.num_vars += 1;
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.assigns.push(0);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.seen.push(false);
        self.num_vars as Literal
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var()];
        if l.is_neg() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        debug_assert_eq!(self.assigns[v], 0);
        self.assigns[v] = if l.is_neg() { -1 } else { 1 };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.trail_lim[level];
        for &l in &self.trail[keep..] {
            let v = l.var();
            self.assigns[v] = 0;
            self.reason[v] = NO_REASON;
            self.next_var = self.next_var.min(v);
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(level);
        self.qhead = keep;
    }

    fn attach(&mut self, lits: Vec<Lit>) -> u32 {
        let cr = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(cr);
        self.watches[lits[1].code()].push(cr);
        self.clauses.push(lits);
        cr
    }

    /// Adds a clause permanently. Must not be called during a search (the
    /// solver is always back at level 0 between calls). Returns `false` once
    /// the clause set is known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Literal]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut clause: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            assert!(l != 0 && l.unsigned_abs() as usize <= self.num_vars, "literal {l} out of range");
            let lit = Lit::from_dimacs(l);
            match self.value(lit) {
                1 => return true,
                -1 => {}
                _ => {
                    if clause.contains(&!lit) {
                        return true;
                    }
                    if !clause.contains(&lit) {
                        clause.push(lit);
                    }
                }
            }
        }
        match clause.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(clause[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.attach(clause);
            }
        }
        self.ok
    }

    /// Unit propagation over the watched literals; returns a falsified clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            'clauses: while i < ws.len() {
                let cr = ws[i];
                i += 1;
                let clause = &mut self.clauses[cr as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.assigns[first.var()] != 0 && (self.assigns[first.var()] == 1) != first.is_neg() {
                    ws[j] = cr;
                    j += 1;
                    continue;
                }
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.assigns[l.var()];
                    let lv = if l.is_neg() { -v } else { v };
                    if lv != -1 {
                        clause.swap(1, k);
                        self.watches[clause[1].code()].push(cr);
                        continue 'clauses;
                    }
                }
                ws[j] = cr;
                j += 1;
                if self.value(first) == -1 {
                    conflict = Some(cr);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, cr);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut idx = self.trail.len();
        let mut implied: Option<Lit> = None;
        loop {
            let clause = &self.clauses[confl as usize];
            let start = usize::from(implied.is_some());
            for &q in &clause[start..] {
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var()] = false;
            pending -= 1;
            implied = Some(p);
            if pending == 0 {
                break;
            }
            confl = self.reason[p.var()];
            debug_assert_ne!(confl, NO_REASON);
        }
        learnt[0] = !implied.expect("conflict analysis visits at least one literal");
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut backjump = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[best].var()] {
                    best = k;
                }
            }
            learnt.swap(1, best);
            backjump = self.level[learnt[1].var()] as usize;
        }
        (learnt, backjump)
    }

    fn model(&self) -> Assignment {
        Assignment::new(self.assigns.iter().map(|&v| v == 1).collect())
    }

    /// Solves under `assumptions` with no resource limit.
    pub fn solve(&mut self, assumptions: &[Literal]) -> SolveOutcome {
        self.solve_limited(assumptions, &Limits::none())
    }

    pub fn solve_with_budget(&mut self, assumptions: &[Literal], budget: Budget) -> SolveOutcome {
        self.solve_limited(assumptions, &budget.start())
    }

    pub(crate) fn solve_limited(&mut self, assumptions: &[Literal], limits: &Limits) -> SolveOutcome {
        if !self.ok {
            return SolveOutcome::Unsat;
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&l| Lit::from_dimacs(l)).collect();
        let outcome = self.search(&assumptions, limits);
        self.cancel_until(0);
        outcome
    }

    fn search(&mut self, assumptions: &[Lit], limits: &Limits) -> SolveOutcome {
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveOutcome::Unsat;
                }
                let (learnt, backjump) = self.analyze(confl);
                self.cancel_until(backjump);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let asserting = learnt[0];
                    let cr = self.attach(learnt);
                    self.enqueue(asserting, cr);
                }
                if limits.exceeded(self.stats.conflicts) {
                    return SolveOutcome::Unknown;
                }
                continue;
            }

            if self.stats.decisions.is_multiple_of(256) && limits.exceeded(self.stats.conflicts) {
                return SolveOutcome::Unknown;
            }
            let next = if self.decision_level() < assumptions.len() {
                let p = assumptions[self.decision_level()];
                match self.value(p) {
                    1 => {
                        // Already holds: open an empty level to keep levels aligned.
                        self.trail_lim.push(self.trail.len());
                        continue;
                    }
                    -1 => return SolveOutcome::Unsat,
                    _ => p,
                }
            } else {
                while self.next_var < self.num_vars && self.assigns[self.next_var] != 0 {
                    self.next_var += 1;
                }
                if self.next_var == self.num_vars {
                    return SolveOutcome::Sat(self.model());
                }
                Lit(self.next_var as u32 * 2 + 1)
            };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }
}

/// Decides `f` under `assumptions`.
pub fn solve(f: &CnfFormula, assumptions: &[Literal]) -> SolveOutcome {
    Solver::from_formula(f).solve(assumptions)
}

pub fn solve_with_budget(f: &CnfFormula, assumptions: &[Literal], budget: Budget) -> SolveOutcome {
    Solver::from_formula(f).solve_with_budget(assumptions, budget)
}

/// Shrinks `model` (over the first `n` variables) to an inclusion-minimal
/// model. Each round asks for a model that keeps every false variable false
/// and drops at least one true variable; the extra clause is guarded by a
/// fresh activation variable that is disabled afterwards.
fn shrink(
    solver: &mut Solver,
    n: usize,
    mut model: Vec<bool>,
    limits: &Limits,
    calls: &mut u64,
) -> Option<Vec<bool>> {
    model.truncate(n);
    loop {
        let act = solver.new_var();
        let mut smaller: Vec<Literal> = vec![-act];
        let mut assumptions: Vec<Literal> = vec![act];
        for (i, &b) in model.iter().enumerate() {
            let var = i as Literal + 1;
            if b {
                smaller.push(-var);
            } else {
                assumptions.push(-var);
            }
        }
        solver.add_clause(&smaller);
        *calls += 1;
        let outcome = solver.solve_limited(&assumptions, limits);
        solver.add_clause(&[-act]);
        match outcome {
            SolveOutcome::Sat(m) => {
                debug_assert!((0..n).all(|i| model[i] || !m.values[i]));
                model = m.values[..n].to_vec();
            }
            SolveOutcome::Unsat => return Some(model),
            SolveOutcome::Unknown => return None,
        }
    }
}

/// Returns a model of `f` whose true variables form an inclusion-minimal
/// subset of those of `m`. `m` must satisfy `f`.
pub fn minimize_model(f: &CnfFormula, m: &Assignment, budget: Budget) -> Result<Assignment> {
    if m.values.len() != f.num_vars() || !f.is_satisfied_by(&m.values) {
        return Err(Error::usage("assignment is not a model of the formula"));
    }
    let mut solver = Solver::from_formula(f);
    let mut calls = 0;
    shrink(&mut solver, f.num_vars(), m.values.clone(), &budget.start(), &mut calls)
        .map(Assignment::new)
        .ok_or(Error::BudgetExceeded)
}

/// All inclusion-minimal siphons of `net` by iterated SAT solving.
pub fn enumerate_minimal_sat(net: &PetriNet, budget: Budget) -> Result<EnumerationResult> {
    let (f, vm) = encode_siphon(net)?;
    let limits = budget.start();
    let n = f.num_vars();
    let mut solver = Solver::from_formula(&f);
    let mut result = EnumerationResult::default();
    let mut stats = SearchStats::default();
    loop {
        stats.solve_calls += 1;
        match solver.solve_limited(&[], &limits) {
            SolveOutcome::Unsat => break,
            SolveOutcome::Unknown => {
                stats.timed_out = true;
                break;
            }
            SolveOutcome::Sat(m) => {
                let Some(minimal) = shrink(&mut solver, n, m.values, &limits, &mut stats.minimize_calls) else {
                    stats.timed_out = true;
                    break;
                };
                let set = vm.true_set(&minimal);
                debug_assert!(net.is_siphon(&set).unwrap_or(false));
                debug_assert!(result.sets.iter().all(|s| !s.is_subset(&set) && !set.is_subset(s)));
                solver.add_clause(&blocking_clause(&set, &vm)?);
                result.sets.push(set);
            }
        }
    }
    let s = solver.stats();
    stats.decisions = s.decisions;
    stats.conflicts = s.conflicts;
    stats.propagations = s.propagations;
    stats.elapsed = limits.started.elapsed();
    result.stats = stats;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{encode_siphon, VarMap};
    use crate::corpus;
    use crate::generators::gen_chain;
    use crate::net::PlaceSet;

    fn enzyme_formula() -> (CnfFormula, VarMap) {
        encode_siphon(&corpus::enzyme().0).unwrap()
    }

    #[test]
    fn enzyme_first_model() {
        let (f, _) = enzyme_formula();
        match solve(&f, &[]) {
            SolveOutcome::Sat(m) => assert_eq!(m.to_literals(), vec![-1, 2, 3, -4]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradictory_units() {
        let mut f = CnfFormula::new(1);
        f.add_clause([1]);
        f.add_clause([-1]);
        assert_eq!(solve(&f, &[]), SolveOutcome::Unsat);
    }

    #[test]
    fn enzyme_blocked_twice_is_unsat() {
        let (mut f, _) = enzyme_formula();
        f.add_clause([-2, -3]);
        match solve(&f, &[]) {
            SolveOutcome::Sat(m) => assert_eq!(m.to_literals(), vec![1, -2, 3, -4]),
            other => panic!("{other:?}"),
        }
        f.add_clause([-1, -3]);
        assert_eq!(solve(&f, &[]), SolveOutcome::Unsat);
    }

    #[test]
    fn assumptions() {
        let (f, _) = enzyme_formula();
        // B forces AE, AE forces E or A.
        match solve(&f, &[4, -2]) {
            SolveOutcome::Sat(m) => assert_eq!(m.to_literals(), vec![1, -2, 3, 4]),
            other => panic!("{other:?}"),
        }
        assert_eq!(solve(&f, &[-3]), SolveOutcome::Unsat);
        // The formula itself stays satisfiable after a failed assumption call.
        let mut s = Solver::from_formula(&f);
        assert_eq!(s.solve(&[-3]), SolveOutcome::Unsat);
        assert!(matches!(s.solve(&[]), SolveOutcome::Sat(_)));
    }

    #[test]
    fn conflict_budget_reports_unknown() {
        // Pigeonhole 5 -> 4 needs many conflicts.
        let holes = 4;
        let pigeons = 5;
        let var = |p: usize, h: usize| (p * holes + h + 1) as Literal;
        let mut f = CnfFormula::new(pigeons * holes);
        for p in 0..pigeons {
            f.add_clause((0..holes).map(|h| var(p, h)));
        }
        for h in 0..holes {
            for p in 0..pigeons {
                for q in p + 1..pigeons {
                    f.add_clause([-var(p, h), -var(q, h)]);
                }
            }
        }
        assert_eq!(solve_with_budget(&f, &[], Budget::with_max_conflicts(3)), SolveOutcome::Unknown);
        assert_eq!(solve(&f, &[]), SolveOutcome::Unsat);
    }

    #[test]
    fn minimize_enzyme_model() {
        let (f, vm) = enzyme_formula();
        let m = Assignment::from_literals(&[1, 2, 3, -4]);
        let min = minimize_model(&f, &m, Budget::unlimited()).unwrap();
        let set = vm.true_set(min.as_slice());
        let net = corpus::enzyme().0;
        let a_ae = PlaceSet::from_names(&net, &["A", "AE"]).unwrap();
        let e_ae = PlaceSet::from_names(&net, &["E", "AE"]).unwrap();
        assert!(set == a_ae || set == e_ae, "{set:?}");
    }

    #[test]
    fn minimize_keeps_minimal_models() {
        let (f, _) = enzyme_formula();
        let m = Assignment::from_literals(&[-1, 2, 3, -4]);
        assert_eq!(minimize_model(&f, &m, Budget::unlimited()).unwrap(), m);
        let not_a_model = Assignment::from_literals(&[-1, -2, -3, -4]);
        assert!(minimize_model(&f, &not_a_model, Budget::unlimited()).is_err());
    }

    #[test]
    fn minimize_chain_model() {
        let net = gen_chain(2).unwrap();
        let (f, vm) = encode_siphon(&net).unwrap();
        let all = Assignment::new(vec![true; 4]);
        let min = vm.true_set(minimize_model(&f, &all, Budget::unlimited()).unwrap().as_slice());
        assert_eq!(min.len(), 2);
        for i in 1..=2 {
            let a = net.place_id(&format!("A{i}")).unwrap();
            let b = net.place_id(&format!("B{i}")).unwrap();
            assert!(min.contains(a) ^ min.contains(b));
        }
    }

    #[test]
    fn enumerates_enzyme_siphons() {
        let (net, _) = corpus::enzyme();
        let r = enumerate_minimal_sat(&net, Budget::unlimited()).unwrap();
        assert!(r.is_complete());
        assert_eq!(r.named(&net), vec![vec!["A", "AE"], vec!["AE", "E"]]);
        assert_eq!(r.stats.solve_calls, 3);
    }

    #[test]
    fn example2_has_one_minimal_siphon() {
        let (net, _) = corpus::example2();
        let r = enumerate_minimal_sat(&net, Budget::unlimited()).unwrap();
        assert_eq!(r.named(&net), vec![vec!["A", "B"]]);
    }

    #[test]
    fn solve_call_accounting() {
        let net = gen_chain(5).unwrap();
        let r = enumerate_minimal_sat(&net, Budget::unlimited()).unwrap();
        assert_eq!(r.sets.len(), 32);
        assert_eq!(r.stats.solve_calls, 32 + 1);
        assert!(r.stats.minimize_calls <= 32 * (net.num_places() as u64 + 1));
    }

    #[test]
    fn zero_time_budget_gives_a_partial_result() {
        let net = gen_chain(8).unwrap();
        let r = enumerate_minimal_sat(&net, Budget::with_time_limit(std::time::Duration::ZERO)).unwrap();
        assert!(!r.is_complete());
        assert!(r.sets.len() < 256);
    }
}
