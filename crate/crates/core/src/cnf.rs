//! CNF encoding of the siphon constraint and DIMACS I/O.
//!
//! Variable `k` (1-based) is true iff place `k - 1` belongs to the siphon.
//! For every place `p` and every transition `t` feeding `p`, the encoding
//! requires some input place of `t` to be in the set as well:
//!
//! ```text
//! V_p  =>  OR { V_q | q is an input place of t }      for every t in •p
//! ```
//!
//! plus one clause over all variables excluding the empty set.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::net::{PetriNet, PlaceId, PlaceSet};

/// DIMACS-style literal: `k` is variable `k`, `-k` its negation.
pub type Literal = i32;
pub type Clause = Vec<Literal>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    seen: HashSet<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Adds a clause, dropping repeated literals. Tautologies and clauses
    /// already present (as literal sets) are skipped; returns whether the
    /// clause was added. Panics on literal 0 or a variable out of range.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Literal>) -> bool {
        let mut clause: Clause = Vec::new();
        for l in lits {
            assert!(l != 0 && l.unsigned_abs() as usize <= self.num_vars, "literal {l} out of range");
            if !clause.contains(&l) {
                clause.push(l);
            }
        }
        if clause.iter().any(|&l| clause.contains(&-l)) {
            return false;
        }
        let mut key = clause.clone();
        key.sort_unstable();
        if !self.seen.insert(key) {
            return false;
        }
        self.clauses.push(clause);
        true
    }

    /// Whether `values[k - 1]` (the value of variable `k`) satisfies every clause.
    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| values[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// Bijection between places and Boolean variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    names: Vec<String>,
}

impl VarMap {
    pub fn for_net(net: &PetriNet) -> Self {
        VarMap {
            names: net.places().map(|p| net.place_name(p).to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn var(&self, p: PlaceId) -> Literal {
        assert!(p.0 < self.names.len());
        p.0 as Literal + 1
    }

    pub fn place(&self, var: Literal) -> PlaceId {
        let v = var.unsigned_abs() as usize;
        assert!(v >= 1 && v <= self.names.len());
        PlaceId(v - 1)
    }

    pub fn name(&self, var: Literal) -> &str {
        &self.names[self.place(var).0]
    }

    /// The places whose variable is true; `values[k - 1]` is variable `k`.
    pub fn true_set(&self, values: &[bool]) -> PlaceSet {
        PlaceSet::from_indices((0..self.names.len()).filter(|&i| values[i]))
    }
}

pub fn encode_siphon(net: &PetriNet) -> Result<(CnfFormula, VarMap)> {
    if net.num_places() == 0 {
        return Err(Error::usage("cannot encode a net without places"));
    }
    let vm = VarMap::for_net(net);
    let mut f = CnfFormula::new(net.num_places());
    for p in net.places() {
        for &t in net.producers(p) {
            let clause = std::iter::once(-vm.var(p)).chain(net.inputs(t).iter().map(|&(q, _)| vm.var(q)));
            f.add_clause(clause);
        }
    }
    f.add_clause(net.places().map(|p| vm.var(p)));
    Ok((f, vm))
}

/// `OR { not V_p | p in s }`: forbids `s` and all of its supersets.
pub fn blocking_clause(s: &PlaceSet, vm: &VarMap) -> Result<Clause> {
    if s.is_empty() {
        return Err(Error::usage("blocking clause of an empty set"));
    }
    Ok(s.iter().map(|p| -vm.var(p)).collect())
}

pub fn export_dimacs(f: &CnfFormula, vm: &VarMap) -> String {
    let mut out = String::new();
    for k in 1..=vm.len() {
        let _ = writeln!(out, "c var {k} = {}", vm.name(k as Literal));
    }
    write_dimacs_body(&mut out, f.num_vars(), f.clauses());
    out
}

pub(crate) fn write_dimacs_body(out: &mut String, num_vars: usize, clauses: &[Clause]) {
    let _ = writeln!(out, "p cnf {num_vars} {}", clauses.len());
    for c in clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        let _ = writeln!(out, "0");
    }
}

/// Reads DIMACS CNF. Clauses go through [`CnfFormula::add_clause`], so
/// duplicates and tautologies are dropped.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut formula: Option<CnfFormula> = None;
    let mut current: Clause = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match fields.as_slice() {
                ["p", "cnf", vars, _clauses] => {
                    let vars = vars
                        .parse()
                        .map_err(|_| Error::syntax(lineno, 1, "bad variable count in header"))?;
                    formula = Some(CnfFormula::new(vars));
                }
                _ => return Err(Error::syntax(lineno, 1, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let f = formula
            .as_mut()
            .ok_or_else(|| Error::syntax(lineno, 1, "clause before the `p cnf` header"))?;
        let mut col = 1;
        for tok in line.split_whitespace() {
            col = line[col - 1..].find(tok).map_or(col, |off| col + off);
            let lit: Literal = tok
                .parse()
                .map_err(|_| Error::syntax(lineno, col, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                f.add_clause(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > f.num_vars() {
                return Err(Error::syntax(lineno, col, format!("literal {lit} exceeds the declared variables")));
            } else {
                current.push(lit);
            }
            col += tok.len();
        }
    }
    let mut f = formula.ok_or_else(|| Error::syntax(1, 1, "missing `p cnf` header"))?;
    if !current.is_empty() {
        f.add_clause(current);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::net::NetBuilder;

    fn sorted(f: &CnfFormula) -> Vec<Clause> {
        let mut v: Vec<Clause> = f
            .clauses()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn enzyme_encoding_matches_the_worked_example() {
        let (net, _) = corpus::enzyme();
        let (f, vm) = encode_siphon(&net).unwrap();
        assert_eq!(vm.name(1), "E");
        assert_eq!(vm.name(4), "B");
        // The worked listing has -2 3 / -3 1 2 / -1 3 / -1 3 / -4 3; the
        // repeated clause is merged and the non-emptiness clause added.
        let mut expected = vec![vec![-2, 3], vec![-3, 1, 2], vec![-1, 3], vec![-4, 3], vec![1, 2, 3, 4]];
        for c in &mut expected {
            c.sort_unstable();
        }
        expected.sort();
        assert_eq!(sorted(&f), expected);
    }

    #[test]
    fn single_place_without_transitions() {
        let mut b = NetBuilder::new();
        b.add_place("p").unwrap();
        let (f, _) = encode_siphon(&b.build()).unwrap();
        assert_eq!(f.clauses(), &[vec![1]]);
    }

    #[test]
    fn self_loop_tautology_is_dropped() {
        let mut b = NetBuilder::new();
        let p = b.add_place("p").unwrap();
        let t = b.add_transition("t").unwrap();
        b.add_input(p, t, 1).unwrap();
        b.add_output(t, p, 1).unwrap();
        let (f, _) = encode_siphon(&b.build()).unwrap();
        assert_eq!(f.clauses(), &[vec![1]]);
    }

    #[test]
    fn empty_net_is_rejected() {
        assert!(matches!(encode_siphon(&NetBuilder::new().build()), Err(Error::Usage(_))));
    }

    #[test]
    fn blocking_clauses() {
        let (net, _) = corpus::enzyme();
        let vm = VarMap::for_net(&net);
        let s = PlaceSet::from_names(&net, &["A", "AE"]).unwrap();
        assert_eq!(blocking_clause(&s, &vm).unwrap(), vec![-2, -3]);
        let s = PlaceSet::from_names(&net, &["E", "AE"]).unwrap();
        assert_eq!(blocking_clause(&s, &vm).unwrap(), vec![-1, -3]);
        assert_eq!(blocking_clause(&PlaceSet::from_indices([0]), &vm).unwrap(), vec![-1]);
        assert!(blocking_clause(&PlaceSet::new(), &vm).is_err());
    }

    #[test]
    fn dimacs_header_and_round_trip() {
        let (net, _) = corpus::enzyme();
        let (f, vm) = encode_siphon(&net).unwrap();
        let text = export_dimacs(&f, &vm);
        assert!(text.lines().any(|l| l == "p cnf 4 5"));
        assert!(text.starts_with("c var 1 = E\n"));
        let back = parse_dimacs(&text).unwrap();
        assert_eq!(back.num_vars(), 4);
        assert_eq!(sorted(&back), sorted(&f));
    }

    #[test]
    fn empty_clause_list() {
        let f = CnfFormula::new(3);
        let mut text = String::new();
        write_dimacs_body(&mut text, f.num_vars(), f.clauses());
        assert_eq!(text, "p cnf 3 0\n");
    }

    #[test]
    fn dimacs_errors() {
        assert!(parse_dimacs("1 2 0").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 5 0").is_err());
        match parse_dimacs("p cnf 2 1\n1 x 0") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }
}
