//! A net with two siphons, only one of them minimal. Its minimal trap
//! {C, D} fits inside the larger siphon but not the minimal one.

use siphons::analysis::{brute_force_siphons, enumerate_minimal_siphons, enumerate_minimal_traps, max_trap_within};
use siphons::{corpus, Budget, Engine};

fn main() -> siphons::Result<()> {
    let (net, _) = corpus::example2();
    let show = |sets: &[siphons::PlaceSet]| sets.iter().map(|s| s.display(&net).to_string()).collect::<Vec<_>>();
    println!("all siphons:     {:?}", show(&brute_force_siphons(&net)?));
    println!("minimal siphons: {:?}", show(&enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited())?.sets));
    println!("minimal traps:   {:?}", show(&enumerate_minimal_traps(&net, Engine::Sat, Budget::unlimited())?.sets));
    let all = net.all_places();
    println!("largest trap in {}: {}", all.display(&net), max_trap_within(&net, &all)?.display(&net));
    Ok(())
}
