//! Converts each bundled reaction model to PNML and back, and prints the
//! PNML of the smallest one.

use siphons::corpus;
use siphons::ingest::pnml::{export_pnml, parse_pnml};
use siphons::ingest::rxn::{export_rxn, parse_rxn};

fn main() -> siphons::Result<()> {
    for (name, net, m0) in corpus::all() {
        let (from_pnml, m1) = parse_pnml(&export_pnml(&net, &m0))?;
        let (from_rxn, m2) = parse_rxn(&export_rxn(&net, &m0)?)?;
        let same = from_pnml == net && from_rxn == net && m1 == m0 && m2 == m0;
        println!("{name:<16} {} places {} arcs  round-trip ok: {same}", net.num_places(), net.num_arcs());
    }
    let (net, m0) = corpus::enzyme();
    print!("\n{}", export_pnml(&net, &m0));
    Ok(())
}
