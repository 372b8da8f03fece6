//! Place/transition nets, markings and place sets.
//!
//! A [`PetriNet`] is immutable once built; use [`NetBuilder`] to construct
//! one. Arc weights are kept for firing, but every structural query in this
//! crate (pre/post sets, siphons, traps) only looks at arc presence.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionId(pub usize);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl TransitionId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A set of places, kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlaceSet(Vec<PlaceId>);

impl PlaceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().map(PlaceId).collect()
    }

    /// Looks up every name in `net`.
    pub fn from_names<S: AsRef<str>>(net: &PetriNet, names: &[S]) -> Result<Self> {
        names
            .iter()
            .map(|n| {
                net.place_id(n.as_ref())
                    .ok_or_else(|| Error::usage(format!("unknown place `{}`", n.as_ref())))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PlaceId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn insert(&mut self, p: PlaceId) -> bool {
        match self.0.binary_search(&p) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, p);
                true
            }
        }
    }

    pub fn remove(&mut self, p: PlaceId) -> bool {
        match self.0.binary_search(&p) {
            Ok(at) => {
                self.0.remove(at);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PlaceId] {
        &self.0
    }

    pub fn is_subset(&self, other: &PlaceSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut theirs = other.0.iter().peekable();
        'outer: for p in &self.0 {
            for q in theirs.by_ref() {
                if q == p {
                    continue 'outer;
                }
                if q > p {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_superset(&self, other: &PlaceSet) -> bool {
        other.is_subset(self)
    }

    pub fn union(&self, other: &PlaceSet) -> PlaceSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn names<'a>(&self, net: &'a PetriNet) -> Vec<&'a str> {
        self.iter().map(|p| net.place_name(p)).collect()
    }

    /// `{A, AE}` style rendering using place names.
    pub fn display<'a>(&'a self, net: &'a PetriNet) -> impl fmt::Display + 'a {
        DisplaySet { set: self, net }
    }
}

impl FromIterator<PlaceId> for PlaceSet {
    fn from_iter<I: IntoIterator<Item = PlaceId>>(iter: I) -> Self {
        let mut v: Vec<PlaceId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PlaceSet(v)
    }
}

struct DisplaySet<'a> {
    set: &'a PlaceSet,
    net: &'a PetriNet,
}

impl fmt::Display for DisplaySet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.set.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.net.place_name(p))?;
        }
        write!(f, "}}")
    }
}

/// Token count per place, indexed like the owning net.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Marking(Vec<u64>);

impl Marking {
    pub fn zero(net: &PetriNet) -> Self {
        Marking(vec![0; net.num_places()])
    }

    pub fn from_vec(tokens: Vec<u64>) -> Self {
        Marking(tokens)
    }

    /// Builds a marking from `(place name, tokens)` pairs; other places get 0.
    pub fn from_names(net: &PetriNet, tokens: &[(&str, u64)]) -> Result<Self> {
        let mut m = Marking::zero(net);
        for &(name, count) in tokens {
            let p = net
                .place_id(name)
                .ok_or_else(|| Error::usage(format!("unknown place `{name}`")))?;
            m.0[p.0] = count;
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn set(&mut self, p: PlaceId, tokens: u64) {
        self.0[p.0] = tokens;
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Total number of tokens on the places of `s`.
    pub fn tokens_in(&self, s: &PlaceSet) -> u64 {
        s.iter().map(|p| self.0[p.0]).sum()
    }

    /// Places holding no token.
    pub fn unmarked(&self) -> PlaceSet {
        PlaceSet::from_indices(self.0.iter().enumerate().filter(|(_, &k)| k == 0).map(|(i, _)| i))
    }
}

impl Index<PlaceId> for Marking {
    type Output = u64;

    fn index(&self, p: PlaceId) -> &u64 {
        &self.0[p.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Place(PlaceId),
    Transition(TransitionId),
}

/// A place/transition net `(P, T, W)`.
///
/// Names are unique across places and transitions together, so that a net
/// can always be written to PNML with names as element ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<String>,
    // Per transition, sorted by place: W(p, t) and W(t, p).
    inputs: Vec<Vec<(PlaceId, u64)>>,
    outputs: Vec<Vec<(PlaceId, u64)>>,
    // Per place, sorted: transitions producing into it and consuming from it.
    producers: Vec<Vec<TransitionId>>,
    consumers: Vec<Vec<TransitionId>>,
}

impl PetriNet {
    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.inputs.iter().chain(&self.outputs).map(Vec::len).sum()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransitionId> + '_ {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn all_places(&self) -> PlaceSet {
        self.places().collect()
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.0]
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.transitions[t.0]
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|n| n == name).map(PlaceId)
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transitions.iter().position(|n| n == name).map(TransitionId)
    }

    /// Input places of `t` with their weights `W(p, t)`.
    pub fn inputs(&self, t: TransitionId) -> &[(PlaceId, u64)] {
        &self.inputs[t.0]
    }

    /// Output places of `t` with their weights `W(t, p)`.
    pub fn outputs(&self, t: TransitionId) -> &[(PlaceId, u64)] {
        &self.outputs[t.0]
    }

    pub fn weight_pt(&self, p: PlaceId, t: TransitionId) -> u64 {
        lookup(&self.inputs[t.0], p)
    }

    pub fn weight_tp(&self, t: TransitionId, p: PlaceId) -> u64 {
        lookup(&self.outputs[t.0], p)
    }

    /// Transitions with an arc into `p`.
    pub fn pre_transitions(&self, p: PlaceId) -> Result<&[TransitionId]> {
        self.check_place(p)?;
        Ok(&self.producers[p.0])
    }

    /// Transitions with an arc out of `p`.
    pub fn post_transitions(&self, p: PlaceId) -> Result<&[TransitionId]> {
        self.check_place(p)?;
        Ok(&self.consumers[p.0])
    }

    pub(crate) fn producers(&self, p: PlaceId) -> &[TransitionId] {
        &self.producers[p.0]
    }

    pub(crate) fn consumers(&self, p: PlaceId) -> &[TransitionId] {
        &self.consumers[p.0]
    }

    fn check_place(&self, p: PlaceId) -> Result<()> {
        if p.0 < self.places.len() {
            Ok(())
        } else {
            Err(Error::InvalidPlace(p.0))
        }
    }

    fn check_set(&self, s: &PlaceSet) -> Result<()> {
        s.iter().try_for_each(|p| self.check_place(p))
    }

    fn transition_mask<'a>(&self, s: &PlaceSet, adj: impl Fn(PlaceId) -> &'a [TransitionId]) -> Vec<bool> {
        let mut mask = vec![false; self.transitions.len()];
        for p in s.iter() {
            for t in adj(p) {
                mask[t.0] = true;
            }
        }
        mask
    }

    /// `•S`: transitions producing into some place of `s`.
    pub fn pre_set(&self, s: &PlaceSet) -> Result<Vec<TransitionId>> {
        self.check_set(s)?;
        Ok(mask_to_ids(&self.transition_mask(s, |p| &self.producers[p.0])))
    }

    /// `S•`: transitions consuming from some place of `s`.
    pub fn post_set(&self, s: &PlaceSet) -> Result<Vec<TransitionId>> {
        self.check_set(s)?;
        Ok(mask_to_ids(&self.transition_mask(s, |p| &self.consumers[p.0])))
    }

    /// A siphon is a non-empty set with `•S ⊆ S•`.
    pub fn is_siphon(&self, s: &PlaceSet) -> Result<bool> {
        self.check_set(s)?;
        if s.is_empty() {
            return Ok(false);
        }
        let post = self.transition_mask(s, |p| &self.consumers[p.0]);
        Ok(s.iter().all(|p| self.producers[p.0].iter().all(|t| post[t.0])))
    }

    /// A trap is a non-empty set with `S• ⊆ •S`.
    pub fn is_trap(&self, s: &PlaceSet) -> Result<bool> {
        self.check_set(s)?;
        if s.is_empty() {
            return Ok(false);
        }
        let pre = self.transition_mask(s, |p| &self.producers[p.0]);
        Ok(s.iter().all(|p| self.consumers[p.0].iter().all(|t| pre[t.0])))
    }

    /// A siphon whose pre-set is strictly included in its post-set.
    /// Returns `false` for sets that are not siphons.
    pub fn is_proper_siphon(&self, s: &PlaceSet) -> Result<bool> {
        if !self.is_siphon(s)? {
            return Ok(false);
        }
        let pre = self.pre_set(s)?;
        let post = self.post_set(s)?;
        Ok(pre.len() < post.len())
    }

    /// The net with every arc reversed. Traps of `self` are the siphons of
    /// the dual and vice versa.
    pub fn dual(&self) -> PetriNet {
        PetriNet {
            places: self.places.clone(),
            transitions: self.transitions.clone(),
            inputs: self.outputs.clone(),
            outputs: self.inputs.clone(),
            producers: self.consumers.clone(),
            consumers: self.producers.clone(),
        }
    }

    fn check_marking(&self, m: &Marking) -> Result<()> {
        if m.len() == self.num_places() {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "marking has {} entries but the net has {} places",
                m.len(),
                self.num_places()
            )))
        }
    }

    pub fn is_enabled(&self, m: &Marking, t: TransitionId) -> Result<bool> {
        self.check_marking(m)?;
        if t.0 >= self.transitions.len() {
            return Err(Error::InvalidTransition(t.0));
        }
        Ok(self.inputs[t.0].iter().all(|&(p, w)| m.0[p.0] >= w))
    }

    pub fn enabled_transitions(&self, m: &Marking) -> Result<Vec<TransitionId>> {
        self.check_marking(m)?;
        Ok(self
            .transitions()
            .filter(|t| self.inputs[t.0].iter().all(|&(p, w)| m.0[p.0] >= w))
            .collect())
    }

    /// Fires `t` from `m`: `m'(p) = m(p) - W(p, t) + W(t, p)`.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking> {
        if !self.is_enabled(m, t)? {
            return Err(Error::NotEnabled(self.transitions[t.0].clone()));
        }
        let mut next = m.clone();
        for &(p, w) in &self.inputs[t.0] {
            next.0[p.0] -= w;
        }
        for &(p, w) in &self.outputs[t.0] {
            next.0[p.0] += w;
        }
        Ok(next)
    }
}

fn lookup(arcs: &[(PlaceId, u64)], p: PlaceId) -> u64 {
    arcs.binary_search_by_key(&p, |&(q, _)| q)
        .map(|i| arcs[i].1)
        .unwrap_or(0)
}

fn mask_to_ids(mask: &[bool]) -> Vec<TransitionId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| TransitionId(i))
        .collect()
}

/// Incremental construction of a [`PetriNet`].
#[derive(Debug, Default)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<String>,
    names: HashMap<String, Node>,
    weight_pt: BTreeMap<(usize, usize), u64>,
    weight_tp: BTreeMap<(usize, usize), u64>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(&mut self, name: impl Into<String>) -> Result<PlaceId> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        let id = PlaceId(self.places.len());
        self.names.insert(name.clone(), Node::Place(id));
        self.places.push(name);
        Ok(id)
    }

    /// Returns the existing place called `name`, or adds it.
    pub fn place(&mut self, name: &str) -> Result<PlaceId> {
        match self.names.get(name) {
            Some(Node::Place(p)) => Ok(*p),
            Some(Node::Transition(_)) => Err(Error::DuplicateName(name.to_string())),
            None => self.add_place(name),
        }
    }

    pub fn add_transition(&mut self, name: impl Into<String>) -> Result<TransitionId> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        let id = TransitionId(self.transitions.len());
        self.names.insert(name.clone(), Node::Transition(id));
        self.transitions.push(name);
        Ok(id)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    fn check(&self, p: PlaceId, t: TransitionId) -> Result<()> {
        if p.0 >= self.places.len() {
            return Err(Error::InvalidPlace(p.0));
        }
        if t.0 >= self.transitions.len() {
            return Err(Error::InvalidTransition(t.0));
        }
        Ok(())
    }

    /// Adds `weight` to the arc `p -> t`. A zero weight adds nothing.
    pub fn add_input(&mut self, p: PlaceId, t: TransitionId, weight: u64) -> Result<()> {
        self.check(p, t)?;
        if weight > 0 {
            *self.weight_pt.entry((p.0, t.0)).or_insert(0) += weight;
        }
        Ok(())
    }

    /// Adds `weight` to the arc `t -> p`. A zero weight adds nothing.
    pub fn add_output(&mut self, t: TransitionId, p: PlaceId, weight: u64) -> Result<()> {
        self.check(p, t)?;
        if weight > 0 {
            *self.weight_tp.entry((p.0, t.0)).or_insert(0) += weight;
        }
        Ok(())
    }

    pub fn build(self) -> PetriNet {
        let np = self.places.len();
        let nt = self.transitions.len();
        let mut inputs = vec![Vec::new(); nt];
        let mut outputs = vec![Vec::new(); nt];
        let mut producers = vec![Vec::new(); np];
        let mut consumers = vec![Vec::new(); np];
        // BTreeMap order is (place, transition), so every list comes out sorted.
        for (&(p, t), &w) in &self.weight_pt {
            inputs[t].push((PlaceId(p), w));
            consumers[p].push(TransitionId(t));
        }
        for (&(p, t), &w) in &self.weight_tp {
            outputs[t].push((PlaceId(p), w));
            producers[p].push(TransitionId(t));
        }
        PetriNet {
            places: self.places,
            transitions: self.transitions,
            inputs,
            outputs,
            producers,
            consumers,
        }
    }
}
