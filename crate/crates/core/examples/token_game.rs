//! Plays the token game on the enzyme net until it deadlocks, then shows
//! that the empty places form a siphon and that marked traps never drain.

use siphons::analysis::enumerate_minimal_traps;
use siphons::dynamics::{check_trap_persistence, deadlock_siphon, random_walk, write_walk_trace};
use siphons::{corpus, Budget, Engine};

fn main() -> siphons::Result<()> {
    let (net, m0) = corpus::enzyme();
    let walk = random_walk(&net, &m0, 100, 3)?;
    write_walk_trace(&net, &walk, &mut std::io::stdout())?;
    if let Some(s) = deadlock_siphon(&net, walk.last())? {
        println!("empty places at the deadlock: {} (siphon: {})", s.display(&net), net.is_siphon(&s)?);
    }
    for t in enumerate_minimal_traps(&net, Engine::Sat, Budget::unlimited())?.sets {
        println!("trap {} stays marked: {}", t.display(&net), check_trap_persistence(&net, &t, &walk)?);
    }
    Ok(())
}
