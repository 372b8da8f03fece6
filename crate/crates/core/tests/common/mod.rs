#![allow(dead_code)]

use siphons::generators::gen_random_net;
use siphons::{Marking, PetriNet};

/// A fixed corpus of small random nets: 2 to 12 places, 1 to 14
/// transitions, pre- and post-sets of at most 4 places.
pub fn random_corpus(count: usize, base_seed: u64) -> Vec<(u64, PetriNet)> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed + i;
            let places = 2 + (i as usize % 11);
            let transitions = 1 + ((i as usize * 7) % 14);
            let degree = places.min(1 + (i as usize % 4));
            (seed, gen_random_net(places, transitions, degree, seed).expect("valid parameters"))
        })
        .collect()
}

/// Deterministic pseudo-random marking with 0 to 3 tokens per place.
pub fn random_marking(net: &PetriNet, seed: u64) -> Marking {
    let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let tokens = (0..net.num_places())
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            x % 4
        })
        .collect();
    Marking::from_vec(tokens)
}
