//! Minimal siphon and trap enumeration for place/transition Petri nets.
//!
//! A siphon is a non-empty set of places whose input transitions all also
//! consume from it, so once it is empty it stays empty. A trap is the dual
//! notion: once marked it stays marked. This crate enumerates the
//! inclusion-minimal ones with two engines:
//!
//! * [`sat`]: an iterated SAT loop (find a model, shrink it, block it),
//! * [`bb`]: a 0-first branch-and-bound that replays its decision path
//!   after every solution instead of restarting,
//!
//! plus an exhaustive oracle for small nets. Traps come from the dual net.
//!
//! ```
//! use siphons::{corpus, analysis::{enumerate_minimal_siphons, Engine}, Budget};
//!
//! let (net, _) = corpus::enzyme();
//! let result = enumerate_minimal_siphons(&net, Engine::Sat, Budget::unlimited()).unwrap();
//! assert_eq!(result.named(&net), vec![vec!["A", "AE"], vec!["AE", "E"]]);
//! ```

pub mod analysis;
pub mod bb;
pub mod bench;
pub mod cnf;
pub mod corpus;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod ingest;
pub mod net;
pub mod sat;
pub mod search;

pub use analysis::Engine;
pub use bb::Strategy;
pub use cnf::{CnfFormula, VarMap};
pub use error::{Error, Result};
pub use net::{Marking, NetBuilder, PetriNet, PlaceId, PlaceSet, TransitionId};
pub use search::{Budget, EnumerationResult, SearchStats};
