//! Instance families: the exponential chain, nets reducing 3-SAT to siphon
//! existence, random 3-SAT formulas and bounded-degree random nets.
//!
//! Every generator is a pure function of its parameters and seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cnf::{write_dimacs_body, CnfFormula, Literal};
use crate::error::{Error, Result};
use crate::net::{NetBuilder, PetriNet};

/// `n` transitions `Ti: Ai + Bi => A(i+1) + B(i+1)` arranged in a cycle.
/// Every minimal siphon picks exactly one of `Ai`, `Bi` for each `i`, so
/// there are `2^n` of them.
pub fn gen_chain(n: usize) -> Result<PetriNet> {
    if n == 0 {
        return Err(Error::usage("chain length must be at least 1"));
    }
    let mut b = NetBuilder::new();
    let mut places = Vec::with_capacity(n);
    for i in 1..=n {
        places.push((b.add_place(format!("A{i}"))?, b.add_place(format!("B{i}"))?));
    }
    for i in 0..n {
        let t = b.add_transition(format!("T{}", i + 1))?;
        let (a, bb) = places[i];
        let (a2, b2) = places[(i + 1) % n];
        b.add_input(a, t, 1)?;
        b.add_input(bb, t, 1)?;
        b.add_output(t, a2, 1)?;
        b.add_output(t, b2, 1)?;
    }
    Ok(b.build())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeSatInstance {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl ThreeSatInstance {
    /// Checks that every literal is in range and no clause mentions a
    /// variable twice.
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for c in &clauses {
            for (k, &l) in c.iter().enumerate() {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(Error::usage(format!("literal {l} out of range 1..={num_vars}")));
                }
                if c[..k].iter().any(|&o| o.unsigned_abs() == l.unsigned_abs()) {
                    return Err(Error::usage(format!("clause {c:?} repeats a variable")));
                }
            }
        }
        Ok(ThreeSatInstance { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Clause-to-variable ratio.
    pub fn alpha(&self) -> f64 {
        self.clauses.len() as f64 / self.num_vars as f64
    }

    pub fn to_formula(&self) -> CnfFormula {
        let mut f = CnfFormula::new(self.num_vars);
        for c in &self.clauses {
            f.add_clause(c.iter().copied());
        }
        f
    }

    /// DIMACS text with every clause, repeated ones included.
    pub fn to_dimacs(&self) -> String {
        let clauses: Vec<Vec<Literal>> = self.clauses.iter().map(|c| c.to_vec()).collect();
        let mut out = format!("c random 3-SAT, alpha = {:.2}\n", self.alpha());
        write_dimacs_body(&mut out, self.num_vars, &clauses);
        out
    }

    /// Exhaustive satisfiability check; for tests on small instances.
    pub fn is_satisfiable_brute(&self) -> bool {
        assert!(self.num_vars <= 24, "too many variables for exhaustive search");
        (0u32..1 << self.num_vars).any(|a| {
            self.clauses.iter().all(|c| {
                c.iter()
                    .any(|&l| (a >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))
            })
        })
    }
}

/// The net whose siphons encode the satisfying assignments of `inst`.
///
/// Places `q0` and, per variable `i`, `s<i>`, `sbar<i>`, `r<i>`, `rbar<i>`.
/// `t0` moves `q0` to every `r<i>`/`rbar<i>`; `y<i>: r<i> + sbar<i> => s<i>`
/// and `ybar<i>: rbar<i> + s<i> => sbar<i>`; clause `k` becomes `u<k>`
/// consuming its three literal places and producing `q0`.
pub fn gen_3sat_reduction(inst: &ThreeSatInstance) -> Result<PetriNet> {
    let n = inst.num_vars;
    let mut b = NetBuilder::new();
    let q0 = b.add_place("q0")?;
    let mut s = Vec::with_capacity(n);
    let mut sbar = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut rbar = Vec::with_capacity(n);
    for i in 1..=n {
        s.push(b.add_place(format!("s{i}"))?);
        sbar.push(b.add_place(format!("sbar{i}"))?);
        r.push(b.add_place(format!("r{i}"))?);
        rbar.push(b.add_place(format!("rbar{i}"))?);
    }
    let t0 = b.add_transition("t0")?;
    b.add_input(q0, t0, 1)?;
    for i in 0..n {
        b.add_output(t0, r[i], 1)?;
        b.add_output(t0, rbar[i], 1)?;
    }
    for i in 0..n {
        let y = b.add_transition(format!("y{}", i + 1))?;
        b.add_input(r[i], y, 1)?;
        b.add_input(sbar[i], y, 1)?;
        b.add_output(y, s[i], 1)?;
        let ybar = b.add_transition(format!("ybar{}", i + 1))?;
        b.add_input(rbar[i], ybar, 1)?;
        b.add_input(s[i], ybar, 1)?;
        b.add_output(ybar, sbar[i], 1)?;
    }
    for (k, c) in inst.clauses.iter().enumerate() {
        let u = b.add_transition(format!("u{}", k + 1))?;
        for &l in c {
            let i = l.unsigned_abs() as usize - 1;
            b.add_input(if l > 0 { s[i] } else { sbar[i] }, u, 1)?;
        }
        b.add_output(u, q0, 1)?;
    }
    Ok(b.build())
}

/// `m` clauses over `n` variables: three distinct variables per clause,
/// each negated with probability one half.
pub fn gen_random_3sat(n: usize, m: usize, seed: u64) -> Result<ThreeSatInstance> {
    if n < 3 {
        return Err(Error::usage("random 3-SAT needs at least 3 variables"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..m)
        .map(|_| {
            let vars = sample(&mut rng, n, 3);
            let mut c = [0; 3];
            for (slot, v) in c.iter_mut().zip(vars.iter()) {
                let lit = v as Literal + 1;
                *slot = if rng.gen_bool(0.5) { -lit } else { lit };
            }
            c
        })
        .collect();
    Ok(ThreeSatInstance { num_vars: n, clauses })
}

/// Each transition gets between 1 and `d` distinct input places and,
/// independently, between 1 and `d` distinct output places. Places are
/// `p1..`, transitions `t1..`, all weights 1. Place degrees are whatever
/// the sampling produces.
pub fn gen_random_net(n_places: usize, n_transitions: usize, d: usize, seed: u64) -> Result<PetriNet> {
    if d == 0 {
        return Err(Error::usage("degree bound must be at least 1"));
    }
    if n_places == 0 {
        return Err(Error::usage("a random net needs at least one place"));
    }
    if d > n_places {
        return Err(Error::usage(format!("degree bound {d} exceeds the {n_places} places")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetBuilder::new();
    let places: Vec<_> = (1..=n_places)
        .map(|i| b.add_place(format!("p{i}")))
        .collect::<Result<_>>()?;
    for j in 1..=n_transitions {
        let t = b.add_transition(format!("t{j}"))?;
        let k = rng.gen_range(1..=d);
        for i in sample(&mut rng, n_places, k) {
            b.add_input(places[i], t, 1)?;
        }
        let k = rng.gen_range(1..=d);
        for i in sample(&mut rng, n_places, k) {
            b.add_output(t, places[i], 1)?;
        }
    }
    Ok(b.build())
}
