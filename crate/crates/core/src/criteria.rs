//! Closed-form entanglement and faithfulness criteria.
//!
//! All threshold comparisons share one boundary margin: a statistic within
//! [`BOUNDARY_MARGIN`] of its threshold is reported as [`Verdict::Boundary`]
//! instead of being forced to either side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, eigh, eigvalsh, max_eigenvalue, partial_transpose, realign, trace_norm, ComplexMatrix, Subsystem,
};
use crate::states::BipartiteState;

/// Width of the undecided band around every threshold.
pub const BOUNDARY_MARGIN: f64 = 1e-7;

/// Outcome of comparing a criterion statistic with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The statistic crossed the threshold in the detecting direction.
    Violated,
    /// The statistic stayed on the non-detecting side.
    Satisfied,
    /// Within the margin of the threshold.
    Boundary,
}

/// Statistic, threshold and verdict of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

impl CriterionResult {
    /// Detection when the statistic exceeds the threshold.
    fn above(name: &str, value: f64, threshold: f64) -> Self {
        let verdict = if value > threshold + BOUNDARY_MARGIN {
            Verdict::Violated
        } else if value < threshold - BOUNDARY_MARGIN {
            Verdict::Satisfied
        } else {
            Verdict::Boundary
        };
        Self {
            name: name.to_string(),
            value,
            threshold,
            verdict,
        }
    }

    /// Detection when the statistic falls below the threshold.
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        let mut r = Self::above(name, -value, -threshold);
        r.value = value;
        r.threshold = threshold;
        r
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    pub fn is_satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }

    pub fn is_boundary(&self) -> bool {
        self.verdict == Verdict::Boundary
    }
}

fn local_dim(state: &BipartiteState) -> Result<usize> {
    state.local_dim()
}

/// `X_d(ρ) = ρ - (ρ_A ⊗ 1 + 1 ⊗ ρ_B)/d + 2·1/d²`: the state with its
/// marginal components removed.
pub fn x_operator(state: &BipartiteState) -> Result<ComplexMatrix> {
    let d = local_dim(state)?;
    let rho_a = state.marginal(Subsystem::A);
    let rho_b = state.marginal(Subsystem::B);
    let id = ComplexMatrix::identity(d);
    let marginals = &rho_a.kron(&id) + &id.kron(&rho_b);
    let mut x = state.rho() - &marginals.scale_real(1.0 / d as f64);
    let shift = 2.0 / (d * d) as f64;
    for i in 0..d * d {
        x[(i, i)] += c64(shift, 0.0);
    }
    Ok(x.hermitian_part())
}

/// Largest eigenvalue of `X_d(ρ)`.
pub fn x_operator_max_eigenvalue(state: &BipartiteState) -> Result<f64> {
    Ok(max_eigenvalue(&x_operator(state)?)?)
}

/// Exact two-qubit test: faithful iff `λ_max(X_2) > 1/2`.
///
/// `Violated` means faithful, `Satisfied` means unfaithful.
pub fn obs2_qubit_faithful(state: &BipartiteState) -> Result<CriterionResult> {
    if state.dims().a != 2 || state.dims().b != 2 {
        return Err(Error::Dimension(format!(
            "two-qubit criterion needs 2x2, got {}x{}",
            state.dims().a,
            state.dims().b
        )));
    }
    let lmax = x_operator_max_eigenvalue(state)?;
    Ok(CriterionResult::above("qubit-x2-max-eigenvalue", lmax, 0.5))
}

/// Sufficient test for unfaithfulness: `λ_max(X_d) ≤ 1/d`.
///
/// `Satisfied` means unfaithful; `Violated` means the bound is inconclusive.
pub fn obs3a_bound(state: &BipartiteState) -> Result<CriterionResult> {
    let d = local_dim(state)?;
    let lmax = x_operator_max_eigenvalue(state)?;
    Ok(CriterionResult::above("xd-max-eigenvalue", lmax, 1.0 / d as f64))
}

/// Spectrum of the partial transpose on B, descending.
pub fn partial_transpose_spectrum(state: &BipartiteState) -> Result<Vec<f64>> {
    let pt = partial_transpose(state.rho(), state.dims(), Subsystem::B)?;
    eigvalsh(&pt)
}

/// PPT test on the minimum eigenvalue of the partial transpose.
/// `Violated` means NPT (entangled).
pub fn ppt_check(state: &BipartiteState) -> Result<CriterionResult> {
    let spec = partial_transpose_spectrum(state)?;
    let min = *spec.last().expect("nonempty spectrum");
    Ok(CriterionResult::below("partial-transpose-min-eigenvalue", min, 0.0))
}

/// Realignment (CCNR) test; `Violated` when the realigned trace norm exceeds 1.
pub fn ccnr_check(state: &BipartiteState) -> Result<CriterionResult> {
    let r = realign(state.rho(), state.dims())?;
    Ok(CriterionResult::above("realignment-trace-norm", trace_norm(&r)?, 1.0))
}

/// Pauli matrices `σ_0 = 1, σ_x, σ_y, σ_z`.
pub fn pauli(i: usize) -> ComplexMatrix {
    let z = c64(0.0, 0.0);
    let o = c64(1.0, 0.0);
    let data = match i {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, c64(0.0, -1.0), c64(0.0, 1.0), z],
        3 => [o, z, z, -o],
        _ => panic!("Pauli index {i} out of range"),
    };
    ComplexMatrix::from_vec(2, 2, data.to_vec()).expect("2x2")
}

/// Correlation tensor `λ_ij = Tr(ρ σ_i ⊗ σ_j)` of a two-qubit state.
pub fn bloch_correlation(state: &BipartiteState) -> Result<[[f64; 4]; 4]> {
    if state.dims().a != 2 || state.dims().b != 2 {
        return Err(Error::Dimension("Bloch decomposition needs two qubits".into()));
    }
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = state.rho().trace_product(&pauli(i).kron(&pauli(j))).re;
        }
    }
    Ok(out)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence_qubit(state: &BipartiteState) -> Result<f64> {
    if state.dims().a != 2 || state.dims().b != 2 {
        return Err(Error::Dimension("concurrence is defined here for two qubits".into()));
    }
    let yy = pauli(2).kron(&pauli(2));
    let rho = state.rho();
    let flipped = yy.matmul(&rho.conj()).matmul(&yy);
    // R = ρ ρ̃ shares its spectrum with the Hermitian √ρ ρ̃ √ρ.
    let root = eigh(rho)?.reconstruct_with(|l| l.max(0.0).sqrt());
    let m = root.matmul(&flipped).matmul(&root).hermitian_part();
    let mut mu: Vec<f64> = eigvalsh(&m)?.into_iter().map(|l| l.max(0.0).sqrt()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Absolute sum of the negative partial-transpose eigenvalues.
pub fn negativity(state: &BipartiteState) -> Result<f64> {
    Ok(partial_transpose_spectrum(state)?
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(f64::abs)
        .sum())
}

/// Orthonormal Hermitian operator basis on `C^d`: `1/√d` followed by the
/// generalized Gell-Mann matrices scaled to unit Frobenius norm.
pub fn orthonormal_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis = vec![ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = c64(h, 0.0);
            sym[(k, j)] = c64(h, 0.0);
            basis.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = c64(0.0, -h);
            anti[(k, j)] = c64(0.0, h);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            diag[(i, i)] = c64(norm, 0.0);
        }
        diag[(l, l)] = c64(-(l as f64) * norm, 0.0);
        basis.push(diag);
    }
    basis
}
