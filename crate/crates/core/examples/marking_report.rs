//! For every minimal siphon: is it proper, what is the largest trap inside
//! it, and is that trap marked initially.

use siphons::analysis::siphon_trap_report;
use siphons::{corpus, Budget, Engine};

fn main() -> siphons::Result<()> {
    for (name, net, m0) in corpus::all() {
        println!("== {name}");
        print!("{}", siphon_trap_report(&net, &m0, Engine::Sat, Budget::unlimited())?);
    }
    Ok(())
}
