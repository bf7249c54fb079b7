//! Certification of faithful entanglement: deciding whether a bipartite
//! state is detected by some fidelity-based entanglement witness.

pub mod cli;
pub mod error;
pub mod harness;
pub mod criteria;
pub mod linalg;
pub mod seesaw;
pub mod solver;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
