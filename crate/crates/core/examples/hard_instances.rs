//! One reduction net per density, enumerated under a short time limit, to
//! show where the search blows up.

use std::time::Duration;

use siphons::analysis::enumerate_minimal_siphons;
use siphons::bench::clause_count;
use siphons::generators::{gen_3sat_reduction, gen_random_3sat};
use siphons::{Budget, Engine};

fn main() -> siphons::Result<()> {
    let n = 30;
    for alpha in [0.0, 1.0, 2.0, 3.0, 4.0, 4.26, 5.0, 6.0, 8.0] {
        let inst = gen_random_3sat(n, clause_count(n, alpha), 42)?;
        let net = gen_3sat_reduction(&inst)?;
        let r = enumerate_minimal_siphons(&net, Engine::Sat, Budget::with_time_limit(Duration::from_millis(500)))?;
        println!(
            "alpha {alpha:>5}: {:>4} places, {:>5} sets{} in {:.0?}",
            net.num_places(),
            r.sets.len(),
            if r.stats.timed_out { "+ (timeout)" } else { "" },
            r.stats.elapsed
        );
    }
    Ok(())
}
