use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    min_eigenvalue, partial_trace, vec_norm, ComplexMatrix, Dims, Subsystem, HERMITIAN_TOLERANCE,
};

/// Allowed deviation of the trace from one.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// Density matrix of a bipartite system with local dimensions `(d_A, d_B)`.
///
/// Construction checks Hermiticity, unit trace and positivity; the stored
/// matrix is the exact Hermitian part of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    rho: ComplexMatrix,
    dims: Dims,
}

impl BipartiteState {
    pub fn new(rho: ComplexMatrix, dims: Dims) -> Result<Self> {
        Self::validate(&rho, dims)?;
        Ok(Self {
            rho: rho.hermitian_part(),
            dims,
        })
    }

    /// Divides by the trace before validating. Used by the samplers.
    pub fn from_unnormalized(m: ComplexMatrix, dims: Dims) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::Normalization { trace: tr });
        }
        Self::new(m.scale_real(1.0 / tr), dims)
    }

    /// `|ψ><ψ|` for a (normalized on the fly) state vector.
    pub fn pure(psi: &[Complex64], dims: Dims) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "state vector has length {}, expected {}",
                psi.len(),
                dims.total()
            )));
        }
        let norm = vec_norm(psi);
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v), dims)
    }

    /// `identity / (d_A d_B)`.
    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            rho: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            dims,
        }
    }

    fn validate(rho: &ComplexMatrix, dims: Dims) -> Result<()> {
        let n = dims.total();
        if dims.a == 0 || dims.b == 0 || rho.rows() != n || rho.cols() != n {
            return Err(Error::Dimension(format!(
                "density matrix is {}x{}, local dimensions {}x{}",
                rho.rows(),
                rho.cols(),
                dims.a,
                dims.b
            )));
        }
        if !rho.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = rho.hermiticity_defect();
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: HERMITIAN_TOLERANCE,
            });
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Normalization { trace });
        }
        let min_eigenvalue = min_eigenvalue(rho)?;
        if min_eigenvalue < -POSITIVITY_TOLERANCE {
            return Err(Error::Positivity { min_eigenvalue });
        }
        Ok(())
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Common local dimension `d` of a two-qudit state.
    pub fn local_dim(&self) -> Result<usize> {
        self.dims.local()
    }

    pub fn marginal(&self, keep: Subsystem) -> ComplexMatrix {
        let traced = match keep {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        };
        partial_trace(&self.rho, self.dims, traced).expect("dimensions checked at construction")
    }

    /// Fidelity `<ψ|ρ|ψ>` with a normalized pure state.
    pub fn fidelity(&self, psi: &[Complex64]) -> f64 {
        self.rho.expectation(psi).re
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
    pub fn local_rotation(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        if ua.rows() != self.dims.a || ub.rows() != self.dims.b {
            return Err(Error::Dimension("local unitary has the wrong size".into()));
        }
        let u = ua.kron(ub);
        Self::new(self.rho.conjugate_by(&u), self.dims)
    }

    /// `U ρ U†` for a global unitary.
    pub fn global_rotation(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.rho.conjugate_by(u), self.dims)
    }

    /// `p ρ + (1 - p) identity / (d_A d_B)`.
    pub fn with_white_noise(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0, 1]")));
        }
        let mixed = Self::maximally_mixed(self.dims);
        Self::new(
            &self.rho.scale_real(p) + &mixed.rho.scale_real(1.0 - p),
            self.dims,
        )
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }
}
