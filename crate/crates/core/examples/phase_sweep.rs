//! A scaled-down density sweep printed as CSV. Arguments: vars trials
//! timeout_ms (defaults 20 3 500).

use siphons::bench::{cmd_sweep_with, OutputFormat, SweepOptions};

fn main() -> siphons::Result<()> {
    let arg = |i: usize, d: u64| std::env::args().nth(i).and_then(|a| a.parse().ok()).unwrap_or(d);
    let opts = SweepOptions {
        vars: arg(1, 20) as usize,
        trials: arg(2, 3) as usize,
        timeout_ms: arg(3, 500),
        ..SweepOptions::default()
    };
    let report = cmd_sweep_with(&opts, |t| eprintln!("alpha {} trial {}: {:.1} ms", t.alpha, t.trial, t.time_ms))?;
    print!("{}", report.render(OutputFormat::Csv, false)?);
    Ok(())
}
