use siphons::analysis::{enumerate_minimal_siphons, enumerate_minimal_traps};
use siphons::{corpus, Budget, Engine};

/// Traps of a net are the siphons of its dual, where every arc is reversed.
fn main() -> siphons::Result<()> {
    let (net, _) = corpus::potato();
    let dual = net.dual();
    let traps = enumerate_minimal_traps(&net, Engine::Sat, Budget::unlimited())?;
    let dual_siphons = enumerate_minimal_siphons(&dual, Engine::Sat, Budget::unlimited())?;
    println!("traps of the potato net:     {:?}", traps.named(&net));
    println!("siphons of the reversed net: {:?}", dual_siphons.named(&dual));
    assert_eq!(traps.canonical(), dual_siphons.canonical());
    Ok(())
}
