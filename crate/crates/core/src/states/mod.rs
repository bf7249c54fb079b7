//! Bipartite density matrices, named families and random ensembles.

pub mod families;
pub mod io;
pub mod random;
mod state;

pub use families::{bell_diagonal, isotropic, max_entangled, singlet, werner_qubit};
pub use io::{load_pure_state, load_state, save_pure_state, save_state};
pub use random::{
    ginibre, haar_pure_state, haar_unitary, sample_bures, sample_hs, Measure, SampleRng,
    SamplerConfig,
};
pub use state::{BipartiteState, POSITIVITY_TOLERANCE, TRACE_TOLERANCE};
