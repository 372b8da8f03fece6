//! The cyclic chain with n stages has 2^n minimal siphons. Pass n as the
//! first argument (default 12).

use siphons::analysis::enumerate_minimal_siphons;
use siphons::generators::gen_chain;
use siphons::{Budget, Engine, Strategy};

fn main() -> siphons::Result<()> {
    let max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    println!("{:>3} {:>7} {:>10} {:>10}", "n", "sets", "sat", "bb");
    for n in 1..=max {
        let net = gen_chain(n)?;
        let sat = enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited())?;
        let bb = enumerate_minimal_siphons(&net, Engine::Bb(Strategy::FixedIndex), Budget::unlimited())?;
        assert_eq!(sat.canonical(), bb.canonical());
        println!("{n:>3} {:>7} {:>10.2?} {:>10.2?}", sat.sets.len(), sat.stats.elapsed, bb.stats.elapsed);
    }
    Ok(())
}
