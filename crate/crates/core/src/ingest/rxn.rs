//! Reaction-network text format.
//!
//! ```text
//! # Michaelis-Menten
//! E + A <=> AE => B + E
//! decay: 2*B => _
//! init A 3
//! ```
//!
//! Each `=>` arrow gives one transition and each `<=>` gives two (suffixed
//! `_f` and `_b`). Arrows may be chained on one line. Unnamed reactions are
//! numbered `r1`, `r2`, ... in order of appearance; a named line with several
//! arrows yields `name_1`, `name_2`, .... `_` stands for an empty side.
//! Species become places in order of first appearance, `init` lines included.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::net::{Marking, NetBuilder, PetriNet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub name: Option<String>,
    /// `(species, multiplicity)`, multiplicities are at least 1.
    pub reactants: Vec<(String, u64)>,
    pub products: Vec<(String, u64)>,
    pub reversible: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReactionModel {
    /// In order of first appearance.
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
    pub initial: HashMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Plus,
    Star,
    Arrow { reversible: bool },
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '[' | ']' | '-')
}

/// Whether `name` can be written back as a single identifier.
pub fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name != "_" && name.chars().all(is_ident_char)
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            ':' => {
                out.push((Tok::Colon, col));
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow { reversible: false }, col));
                i += 2;
            }
            '<' if chars.get(i + 1) == Some(&'=') && chars.get(i + 2) == Some(&'>') => {
                out.push((Tok::Arrow { reversible: true }, col));
                i += 3;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => return Err(Error::syntax(lineno, col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl LineParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |&(_, c)| c)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.line, self.col(), msg)
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn side(&mut self, species: &mut Vec<String>, seen: &mut HashSet<String>) -> Result<Vec<(String, u64)>> {
        if self.peek() == Some(&Tok::Ident("_".into())) {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut terms: Vec<(String, u64)> = Vec::new();
        loop {
            let first = self.ident("species")?;
            let (name, mult) = if self.peek() == Some(&Tok::Star) {
                let mult = first
                    .parse::<u64>()
                    .map_err(|_| Error::syntax(self.line, self.toks[self.pos - 1].1, "expected a natural number before `*`"))?;
                self.pos += 1;
                (self.ident("species after `*`")?, mult)
            } else {
                (first, 1)
            };
            if name == "_" {
                return Err(Error::syntax(self.line, self.toks[self.pos - 1].1, "`_` must stand alone"));
            }
            if seen.insert(name.clone()) {
                species.push(name.clone());
            }
            if mult > 0 {
                match terms.iter_mut().find(|(s, _)| *s == name) {
                    Some(t) => t.1 += mult,
                    None => terms.push((name, mult)),
                }
            }
            if self.peek() == Some(&Tok::Plus) {
                self.pos += 1;
            } else {
                return Ok(terms);
            }
        }
    }
}

impl ReactionModel {
    pub fn parse(text: &str) -> Result<Self> {
        let mut model = ReactionModel::default();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("");
            let toks = tokenize(line, lineno)?;
            if toks.is_empty() {
                continue;
            }
            let has_arrow = toks.iter().any(|(t, _)| matches!(t, Tok::Arrow { .. }));
            let mut p = LineParser {
                toks: &toks,
                pos: 0,
                line: lineno,
                end_col: line.chars().count() + 1,
            };
            if !has_arrow {
                match (&toks[0].0, toks.get(1)) {
                    (Tok::Ident(kw), Some(_)) if kw == "init" => {
                        p.pos = 1;
                        let sp = p.ident("species name")?;
                        let count_col = p.col();
                        let count = p.ident("token count")?;
                        let count: u64 = count
                            .parse()
                            .map_err(|_| Error::syntax(lineno, count_col, "expected a natural number"))?;
                        if p.peek().is_some() {
                            return Err(p.err("unexpected trailing input"));
                        }
                        if model.initial.contains_key(&sp) {
                            return Err(Error::syntax(lineno, toks[1].1, format!("duplicate init for `{sp}`")));
                        }
                        if seen.insert(sp.clone()) {
                            model.species.push(sp.clone());
                        }
                        model.initial.insert(sp, count);
                        continue;
                    }
                    (Tok::Ident(kw), Some((Tok::Ident(_), _))) => {
                        return Err(Error::syntax(lineno, toks[0].1, format!("unknown directive `{kw}`")));
                    }
                    _ => {}
                }
            }

            let mut name = None;
            if let (Some((Tok::Ident(n), _)), Some((Tok::Colon, _))) = (toks.first(), toks.get(1)) {
                name = Some(n.clone());
                p.pos = 2;
            }
            let mut lhs = p.side(&mut model.species, &mut seen)?;
            let mut arrows = Vec::new();
            while let Some(&Tok::Arrow { reversible }) = p.peek() {
                p.pos += 1;
                let rhs = p.side(&mut model.species, &mut seen)?;
                arrows.push((std::mem::take(&mut lhs), rhs.clone(), reversible));
                lhs = rhs;
            }
            if arrows.is_empty() {
                return Err(p.err("expected `=>` or `<=>`"));
            }
            if p.peek().is_some() {
                return Err(p.err("unexpected token"));
            }
            let many = arrows.len() > 1;
            for (k, (reactants, products, reversible)) in arrows.into_iter().enumerate() {
                model.reactions.push(Reaction {
                    name: name.as_ref().map(|n| if many { format!("{n}_{}", k + 1) } else { n.clone() }),
                    reactants,
                    products,
                    reversible,
                });
            }
        }
        Ok(model)
    }

    /// Expands reversible reactions and assigns automatic names.
    pub fn to_net(&self) -> Result<(PetriNet, Marking)> {
        let mut b = NetBuilder::new();
        for s in &self.species {
            b.add_place(s.as_str())?;
        }
        let mut taken: HashSet<String> = self.species.iter().cloned().collect();
        for r in &self.reactions {
            if let Some(n) = &r.name {
                for full in expanded_names(n, r.reversible) {
                    if !taken.insert(full.clone()) {
                        return Err(Error::DuplicateName(full));
                    }
                }
            }
        }
        for (k, r) in self.reactions.iter().enumerate() {
            let base = match &r.name {
                Some(n) => n.clone(),
                None => {
                    let mut candidate = format!("r{}", k + 1);
                    let mut j = 0;
                    while expanded_names(&candidate, r.reversible).iter().any(|n| taken.contains(n)) {
                        j += 1;
                        candidate = format!("r{}.{j}", k + 1);
                    }
                    taken.extend(expanded_names(&candidate, r.reversible));
                    candidate
                }
            };
            let mut add = |name: String, from: &[(String, u64)], to: &[(String, u64)]| -> Result<()> {
                let t = b.add_transition(name)?;
                for (s, w) in from {
                    let p = b.place(s)?;
                    b.add_input(p, t, *w)?;
                }
                for (s, w) in to {
                    let p = b.place(s)?;
                    b.add_output(t, p, *w)?;
                }
                Ok(())
            };
            if r.reversible {
                add(format!("{base}_f"), &r.reactants, &r.products)?;
                add(format!("{base}_b"), &r.products, &r.reactants)?;
            } else {
                add(base, &r.reactants, &r.products)?;
            }
        }
        let net = b.build();
        let mut m = Marking::zero(&net);
        for (s, &k) in &self.initial {
            let p = net.place_id(s).expect("species registered during parsing");
            m.set(p, k);
        }
        Ok((net, m))
    }

    /// One named irreversible reaction per transition, preceded by an `init`
    /// line for every place so that place order and isolated places survive.
    pub fn from_net(net: &PetriNet, marking: &Marking) -> Result<Self> {
        for name in net.places().map(|p| net.place_name(p)).chain(net.transitions().map(|t| net.transition_name(t))) {
            if !is_identifier(name) {
                return Err(Error::usage(format!("`{name}` is not a valid reaction-format identifier")));
            }
        }
        let side = |arcs: &[(crate::net::PlaceId, u64)]| {
            arcs.iter().map(|&(p, w)| (net.place_name(p).to_string(), w)).collect()
        };
        Ok(ReactionModel {
            species: net.places().map(|p| net.place_name(p).to_string()).collect(),
            reactions: net
                .transitions()
                .map(|t| Reaction {
                    name: Some(net.transition_name(t).to_string()),
                    reactants: side(net.inputs(t)),
                    products: side(net.outputs(t)),
                    reversible: false,
                })
                .collect(),
            initial: net
                .places()
                .map(|p| (net.place_name(p).to_string(), marking[p]))
                .collect(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.species {
            let _ = writeln!(out, "init {s} {}", self.initial.get(s).copied().unwrap_or(0));
        }
        for r in &self.reactions {
            if let Some(n) = &r.name {
                let _ = write!(out, "{n}: ");
            }
            let arrow = if r.reversible { "<=>" } else { "=>" };
            let _ = writeln!(out, "{} {arrow} {}", side_text(&r.reactants), side_text(&r.products));
        }
        out
    }
}

fn expanded_names(base: &str, reversible: bool) -> Vec<String> {
    if reversible {
        vec![format!("{base}_f"), format!("{base}_b")]
    } else {
        vec![base.to_string()]
    }
}

fn side_text(terms: &[(String, u64)]) -> String {
    if terms.is_empty() {
        return "_".into();
    }
    terms
        .iter()
        .map(|(s, w)| if *w == 1 { s.clone() } else { format!("{w}*{s}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn parse_rxn(text: &str) -> Result<(PetriNet, Marking)> {
    ReactionModel::parse(text)?.to_net()
}

pub fn export_rxn(net: &PetriNet, marking: &Marking) -> Result<String> {
    Ok(ReactionModel::from_net(net, marking)?.to_text())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::PlaceId;

    #[test]
    fn michaelis_menten_line() {
        let (net, m) = parse_rxn("A + E <=> AE => B + E").unwrap();
        let names: Vec<_> = net.places().map(|p| net.place_name(p)).collect();
        assert_eq!(names, ["A", "E", "AE", "B"]);
        let ts: Vec<_> = net.transitions().map(|t| net.transition_name(t)).collect();
        assert_eq!(ts, ["r1_f", "r1_b", "r2"]);
        // Three arcs per transition.
        assert_eq!(net.num_arcs(), 9);
        assert_eq!(m, Marking::zero(&net));
    }

    #[test]
    fn multiplicities() {
        let (net, _) = parse_rxn("2*A => B").unwrap();
        let t = net.transition_id("r1").unwrap();
        assert_eq!(net.weight_pt(PlaceId(0), t), 2);
        assert_eq!(net.weight_tp(t, PlaceId(1)), 1);
        let (net, _) = parse_rxn("A + A => B").unwrap();
        assert_eq!(net.weight_pt(PlaceId(0), crate::net::TransitionId(0)), 2);
    }

    #[test]
    fn chain_of_two() {
        let (net, _) = parse_rxn("A1 + B1 => A2 + B2\nA2 + B2 => A1 + B1\n").unwrap();
        let chain = crate::generators::gen_chain(2).unwrap();
        assert_eq!(net.num_places(), chain.num_places());
        for (t, u) in net.transitions().zip(chain.transitions()) {
            let names = |n: &PetriNet, arcs: &[(PlaceId, u64)]| -> Vec<String> {
                arcs.iter().map(|&(p, _)| n.place_name(p).to_string()).collect()
            };
            assert_eq!(names(&net, net.inputs(t)), names(&chain, chain.inputs(u)));
            assert_eq!(names(&net, net.outputs(t)), names(&chain, chain.outputs(u)));
        }
    }

    #[test]
    fn init_lines_and_comments() {
        let (net, m) = parse_rxn("# comment\ninit E 2\nE + A => AE # trailing\ninit A 3\n").unwrap();
        assert_eq!(net.place_name(PlaceId(0)), "E");
        assert_eq!(m.as_slice(), &[2, 3, 0]);
    }

    #[test]
    fn named_reactions() {
        let (net, _) = parse_rxn("bind: A + E <=> AE\ncat: AE => B + E\nX => Y => Z").unwrap();
        let ts: Vec<_> = net.transitions().map(|t| net.transition_name(t)).collect();
        assert_eq!(ts, ["bind_f", "bind_b", "cat", "r3", "r4"]);
        let (net, _) = parse_rxn("step: X => Y => Z").unwrap();
        assert!(net.transition_id("step_1").is_some() && net.transition_id("step_2").is_some());
    }

    #[test]
    fn auto_names_avoid_clashes() {
        let (net, _) = parse_rxn("r2: A => B\nB => A").unwrap();
        assert_eq!(net.transition_name(crate::net::TransitionId(1)), "r2.1");
    }

    #[test]
    fn empty_side() {
        let (net, _) = parse_rxn("_ => A\nA => _").unwrap();
        assert!(net.inputs(crate::net::TransitionId(0)).is_empty());
        assert!(net.outputs(crate::net::TransitionId(1)).is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_rxn("A => B\nA + => B") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_rxn("A B") {
            Err(Error::Syntax { message, .. }) => assert!(message.contains("unknown directive")),
            other => panic!("unexpected {other:?}"),
        }
        match parse_rxn("init A 1\ninit A 2") {
            Err(Error::Syntax { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("duplicate init"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_rxn("A => B;").is_err());
        assert!(parse_rxn("A").is_err());
        assert!(parse_rxn("init A x").is_err());
        assert!(matches!(parse_rxn("A: A => B"), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn export_round_trip_keeps_isolated_places() {
        let text = "init lonely 4\nA + E <=> AE => B + E\ninit A 3";
        let (net, m) = parse_rxn(text).unwrap();
        let exported = export_rxn(&net, &m).unwrap();
        let (back, m2) = parse_rxn(&exported).unwrap();
        assert_eq!(back, net);
        assert_eq!(m2, m);
    }
}
