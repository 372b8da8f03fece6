//! Minimal siphons and traps of the enzyme mechanism `E + A <=> AE => B + E`
//! with both engines, and the CNF formula behind the search.

use siphons::analysis::{enumerate_minimal_siphons, enumerate_minimal_traps};
use siphons::cnf::{encode_siphon, export_dimacs};
use siphons::{corpus, Budget, Engine, Strategy};

fn main() -> siphons::Result<()> {
    let (net, _) = corpus::enzyme();
    for engine in [Engine::Sat, Engine::Bb(Strategy::FixedIndex)] {
        let s = enumerate_minimal_siphons(&net, engine, Budget::unlimited())?;
        let t = enumerate_minimal_traps(&net, engine, Budget::unlimited())?;
        println!("{engine:>3}: siphons {:?}  traps {:?}  ({:?})", s.named(&net), t.named(&net), s.stats.elapsed);
    }
    let (formula, vars) = encode_siphon(&net)?;
    print!("\n{}", export_dimacs(&formula, &vars));
    Ok(())
}
