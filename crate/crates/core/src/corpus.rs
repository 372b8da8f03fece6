//! Small nets bundled with the crate, parsed from the reaction files under
//! `corpus/`.

use crate::ingest::parse_rxn;
use crate::net::{Marking, PetriNet};

pub const ENZYME: &str = include_str!("../corpus/enzyme.rxn");
pub const EXAMPLE2: &str = include_str!("../corpus/example2.rxn");
pub const POTATO: &str = include_str!("../corpus/potato.rxn");
pub const POTATO_GROWTH: &str = include_str!("../corpus/potato_growth.rxn");
pub const POTATO_HARVEST: &str = include_str!("../corpus/potato_harvest.rxn");

fn load(text: &str) -> (PetriNet, Marking) {
    parse_rxn(text).expect("bundled model parses")
}

/// `E + A <=> AE => B + E` with two enzymes and three substrate molecules.
/// Places are numbered E, A, AE, B.
pub fn enzyme() -> (PetriNet, Marking) {
    load(ENZYME)
}

/// Cycles A/B and C/D joined by `r3: B => C`.
pub fn example2() -> (PetriNet, Marking) {
    load(EXAMPLE2)
}

/// The starch network with both the storing and the consuming branch.
pub fn potato() -> (PetriNet, Marking) {
    load(POTATO)
}

pub fn potato_growth() -> (PetriNet, Marking) {
    load(POTATO_GROWTH)
}

pub fn potato_harvest() -> (PetriNet, Marking) {
    load(POTATO_HARVEST)
}

/// Every bundled reaction model with its name.
pub fn all() -> Vec<(&'static str, PetriNet, Marking)> {
    [
        ("enzyme", ENZYME),
        ("example2", EXAMPLE2),
        ("potato", POTATO),
        ("potato_growth", POTATO_GROWTH),
        ("potato_harvest", POTATO_HARVEST),
    ]
    .into_iter()
    .map(|(name, text)| {
        let (net, m) = load(text);
        (name, net, m)
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let sizes: Vec<_> = all().iter().map(|(n, net, _)| (*n, net.num_places(), net.num_transitions())).collect();
        assert_eq!(
            sizes,
            [
                ("enzyme", 4, 3),
                ("example2", 4, 5),
                ("potato", 6, 6),
                ("potato_growth", 5, 4),
                ("potato_harvest", 5, 4)
            ]
        );
    }

    #[test]
    fn harvest_siphon() {
        let (net, _) = potato_harvest();
        let s = crate::net::PlaceSet::from_names(&net, &["S3", "S4"]).unwrap();
        assert!(net.is_siphon(&s).unwrap());
    }
}
