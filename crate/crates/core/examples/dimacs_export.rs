//! Writes the siphon formula of a model as DIMACS, ready for an external
//! solver. Usage: `dimacs_export [model.rxn|model.pnml]`.

use std::path::PathBuf;

use siphons::cnf::{encode_siphon, export_dimacs};
use siphons::ingest::read_model;

fn main() -> siphons::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/potato.rxn"));
    let (net, _) = read_model(&path, None)?;
    let (formula, vars) = encode_siphon(&net)?;
    print!("{}", export_dimacs(&formula, &vars));
    Ok(())
}
