//! Dense complex linear algebra: Hermitian eigensolver, SVD, and the
//! bipartite reshuffles (partial trace, partial transpose, realignment,
//! Schmidt decomposition) used by every other module.

mod bipartite;
mod eigh;
mod matrix;
mod svd;

pub use bipartite::{
    partial_trace, partial_transpose, realign, schmidt_decompose, schmidt_form_state, unrealign,
    Dims, SchmidtDecomposition, Subsystem, SCHMIDT_CUTOFF,
};
pub use eigh::{eigh, eigh_warm, eigvalsh, max_eigenvalue, min_eigenvalue, HermitianEig, HERMITIAN_TOLERANCE};
pub use matrix::{c64, vec_inner, vec_norm, ComplexMatrix};
pub use svd::{singular_values, svd, trace_norm, Svd};

/// Unitary polar factor of a square matrix.
pub fn polar_unitary(m: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
    Ok(svd(m)?.polar_unitary())
}
