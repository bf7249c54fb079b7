//! Named state families used throughout the tests and examples.

use num_complex::Complex64;

use super::state::BipartiteState;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, Dims};

/// `|φ⁺> = Σ_i |ii> / √d`.
pub fn max_entangled(d: usize) -> Result<Vec<Complex64>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("local dimension {d} < 2")));
    }
    let amp = 1.0 / (d as f64).sqrt();
    let mut psi = vec![c64(0.0, 0.0); d * d];
    for i in 0..d {
        psi[i * d + i] = c64(amp, 0.0);
    }
    Ok(psi)
}

/// Singlet `(|01> - |10>)/√2`.
pub fn singlet() -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![c64(0.0, 0.0), c64(h, 0.0), c64(-h, 0.0), c64(0.0, 0.0)]
}

/// Bell basis in the order φ⁺, φ⁻, ψ⁺, ψ⁻.
pub fn bell_basis() -> [Vec<Complex64>; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c64(0.0, 0.0);
    [
        vec![c64(h, 0.0), z, z, c64(h, 0.0)],
        vec![c64(h, 0.0), z, z, c64(-h, 0.0)],
        vec![z, c64(h, 0.0), c64(h, 0.0), z],
        singlet(),
    ]
}

fn check_weight(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0, 1]")));
    }
    Ok(())
}

/// `p |φ⁺><φ⁺| + (1 - p) identity / d²`.
pub fn isotropic(d: usize, p: f64) -> Result<BipartiteState> {
    check_weight(p)?;
    let phi = BipartiteState::pure(&max_entangled(d)?, Dims::square(d))?;
    phi.with_white_noise(p)
}

/// Two-qubit Werner state `p |ψ⁻><ψ⁻| + (1 - p) identity / 4`.
pub fn werner_qubit(p: f64) -> Result<BipartiteState> {
    check_weight(p)?;
    BipartiteState::pure(&singlet(), Dims::square(2))?.with_white_noise(p)
}

/// Mixture of Bell states with the given weights (order as [`bell_basis`]).
pub fn bell_diagonal(weights: [f64; 4]) -> Result<BipartiteState> {
    let mut rho = ComplexMatrix::zeros(4, 4);
    for (w, v) in weights.iter().zip(bell_basis().iter()) {
        if *w < 0.0 {
            return Err(Error::InvalidArgument("negative Bell weight".into()));
        }
        rho = &rho + &ComplexMatrix::outer(v).scale_real(*w);
    }
    BipartiteState::new(rho, Dims::square(2))
}

/// Computational basis product state `|i>|j>`.
pub fn product_basis_state(dims: Dims, i: usize, j: usize) -> Result<BipartiteState> {
    if i >= dims.a || j >= dims.b {
        return Err(Error::InvalidArgument("basis index out of range".into()));
    }
    let mut psi = vec![c64(0.0, 0.0); dims.total()];
    psi[i * dims.b + j] = c64(1.0, 0.0);
    BipartiteState::pure(&psi, dims)
}
