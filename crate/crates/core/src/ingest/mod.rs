//! Reading and writing nets: the reaction text format and PNML.

pub mod pnml;
pub mod rxn;

use std::path::Path;

pub use pnml::{export_pnml, parse_pnml};
pub use rxn::{export_rxn, parse_rxn, Reaction, ReactionModel};

use crate::error::{Error, Result};
use crate::net::{Marking, PetriNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Rxn,
    Pnml,
}

impl Format {
    /// `.pnml` and `.xml` are PNML, anything else is the reaction format.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(ext) if ext == "pnml" || ext == "xml" => Format::Pnml,
            _ => Format::Rxn,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rxn" => Ok(Format::Rxn),
            "pnml" => Ok(Format::Pnml),
            other => Err(Error::Usage(format!("unknown format `{other}`"))),
        }
    }
}

pub fn parse(text: &str, format: Format) -> Result<(PetriNet, Marking)> {
    match format {
        Format::Rxn => parse_rxn(text),
        Format::Pnml => parse_pnml(text),
    }
}

pub fn read_model(path: &Path, format: Option<Format>) -> Result<(PetriNet, Marking)> {
    let text = std::fs::read_to_string(path)?;
    parse(&text, format.unwrap_or_else(|| Format::from_path(path)))
}
