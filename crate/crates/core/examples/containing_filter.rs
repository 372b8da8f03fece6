//! In a 3-SAT reduction net the minimal siphons through `q0` correspond to
//! partial assignments satisfying every clause; the others are the
//! `{s_i, sbar_i}` pairs.

use siphons::analysis::{enumerate_minimal_siphons, filter_containing};
use siphons::generators::{gen_3sat_reduction, gen_random_3sat};
use siphons::{Budget, Engine, PlaceSet};

fn main() -> siphons::Result<()> {
    for (m, seed) in [(6, 1), (30, 0)] {
        let inst = gen_random_3sat(3, m, seed)?;
        let net = gen_3sat_reduction(&inst)?;
        let all = enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited())?;
        let q0 = PlaceSet::from_names(&net, &["q0"])?;
        let through = filter_containing(&all.sets, &q0);
        println!("3 vars, {m} clauses, satisfiable: {}", inst.is_satisfiable_brute());
        for s in &through {
            println!("  {}", s.display(&net));
        }
        println!("  {} of {} minimal siphons contain q0", through.len(), all.sets.len());
    }
    Ok(())
}
