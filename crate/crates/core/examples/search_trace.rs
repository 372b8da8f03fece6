//! Branch-and-bound decisions (`D place=bit depth`), backtracks (`B depth`)
//! and solutions (`S {...}`) on the enzyme net, once per strategy.

use siphons::bb::{enumerate_minimal_bb_with, BbOptions};
use siphons::{corpus, Budget, Strategy};

fn main() -> siphons::Result<()> {
    let (net, _) = corpus::enzyme();
    for strategy in [Strategy::FixedIndex, Strategy::SiphonFrequency, Strategy::Random(7)] {
        for restart in [false, true] {
            println!("== {strategy:?}, restart {restart}");
            let mut out = std::io::stdout();
            let r = enumerate_minimal_bb_with(&net, BbOptions { strategy, restart }, Budget::unlimited(), Some(&mut out))?;
            println!("   {} decisions, {} conflicts", r.stats.decisions, r.stats.conflicts);
        }
    }
    Ok(())
}
