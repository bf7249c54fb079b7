//! Maximal overlap of a state with operators whose marginals are maximally mixed:
//!
//! ```text
//! max Tr(ρ χ)  s.t.  χ ⪰ 0,  Tr χ = 1,  Tr_A χ = Tr_B χ = 1/d
//! ```
//!
//! Solved by ADMM: an affine projection onto the marginal constraints
//! alternates with eigenvalue clipping onto the PSD cone. Every few
//! iterations two certified bounds are computed: a lower bound from a
//! repaired, exactly feasible point and an upper bound from the dual
//! `min_K λ_max(ρ - K) + Tr(K)/d²` over marginal-type operators `K`.

use serde::{Deserialize, Serialize};

use crate::criteria::BOUNDARY_MARGIN;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, eigh, eigh_warm, partial_trace, svd, ComplexMatrix, Dims, Subsystem,
};
use crate::states::BipartiteState;

/// Purity above which an optimal χ counts as a pure state.
pub const PURITY_THRESHOLD: f64 = 1.0 - 1e-6;

const BOUND_CHECK_EVERY: usize = 10;
const BALANCE_EVERY: usize = 10;
const MAX_LOCAL_DIM: usize = 8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Certified duality gap at which the solve counts as converged.
    pub tolerance: f64,
    /// Residual level below which bounds are checked on every iteration;
    /// a gap within ten times `tolerance` is then accepted.
    pub residual_tolerance: f64,
    pub max_iterations: usize,
    /// Stop early once the certified bounds put the optimum strictly on one
    /// side of this value: below it, or above it with a pure iterate.
    pub decision_threshold: Option<f64>,
    /// Keep the objective at the feasible repair of every iterate.
    pub record_history: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            residual_tolerance: 1e-9,
            max_iterations: 50_000,
            decision_threshold: None,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdpStatus {
    /// Certified duality gap below tolerance.
    Converged,
    /// Stopped early: the certified bounds already settle the decision threshold.
    Decided,
    /// Iteration budget exhausted.
    Unconverged,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Objective at the exactly feasible point `chi`.
    pub optimum: f64,
    pub chi: ComplexMatrix,
    /// `Tr(χ²)`.
    pub purity: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Certified lower bound (equals `optimum`).
    pub lower_bound: f64,
    /// Certified upper bound from the dual.
    pub upper_bound: f64,
    pub status: SdpStatus,
    pub local_dim: usize,
    /// Objective at the feasible repair of each iterate, when requested.
    pub history: Vec<f64>,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.lower_bound
    }

    pub fn is_converged(&self) -> bool {
        self.status == SdpStatus::Converged
    }

    /// Largest deviation of a marginal of `chi` from identity/d (Frobenius).
    pub fn marginal_deviation(&self) -> f64 {
        let d = self.local_dim;
        let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        let dims = Dims::square(d);
        [Subsystem::A, Subsystem::B]
            .into_iter()
            .map(|s| {
                (&partial_trace(&self.chi, dims, s).expect("square") - &target).frobenius_norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Orthogonal projection onto `{Tr_A χ = Tr_B χ = 1/d}` (which fixes the trace too).
///
/// Splits off the marginal components `a ⊗ 1`, `1 ⊗ b` and the identity, then
/// adds back `1/d²`.
pub fn project_marginals(v: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = d * d;
    let dims = Dims::square(d);
    let tb = partial_trace(v, dims, Subsystem::B).expect("square operator");
    let ta = partial_trace(v, dims, Subsystem::A).expect("square operator");
    let tr = v.trace();
    let inv_d = 1.0 / d as f64;
    let inv_d2 = inv_d * inv_d;
    let mut out = v.clone();
    for r in 0..n {
        let (i, j) = (r / d, r % d);
        for c in 0..n {
            let (k, l) = (c / d, c % d);
            let mut delta = c64(0.0, 0.0);
            if j == l {
                delta -= tb[(i, k)] * inv_d;
            }
            if i == k {
                delta -= ta[(j, l)] * inv_d;
            }
            if r == c {
                delta += tr * inv_d2 + inv_d2;
            }
            out[(r, c)] += delta;
        }
    }
    out
}

/// Marginal-type part `(Tr_B K ⊗ 1 + 1 ⊗ Tr_A K)/d - Tr(K)/d²` of an operator.
fn marginal_component(k: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let centered = project_marginals(k, d);
    let mut out = k - &centered;
    let inv_d2 = 1.0 / (d * d) as f64;
    for i in 0..d * d {
        out[(i, i)] += c64(inv_d2, 0.0);
    }
    out
}

/// Exactly feasible point near `chi`: project onto the marginal constraints,
/// then mix with identity/d² just enough to remove negative eigenvalues.
fn repair(chi: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    let projected = project_marginals(chi, d).hermitian_part();
    let min = eigh(&projected)?.min();
    if min >= 0.0 {
        return Ok(projected);
    }
    let eps = -min;
    let n = d * d;
    let mut out = projected;
    for i in 0..n {
        out[(i, i)] += c64(eps, 0.0);
    }
    Ok(out.scale_real(1.0 / (1.0 + eps * n as f64)))
}

struct Bounds {
    lower: f64,
    upper: f64,
    chi: ComplexMatrix,
}

fn certified_bounds(
    objective: &ComplexMatrix,
    z: &ComplexMatrix,
    dual_candidate: &ComplexMatrix,
    d: usize,
) -> Result<Bounds> {
    let chi = repair(z, d)?;
    let lower = objective.trace_product(&chi).re;
    let km = marginal_component(dual_candidate, d);
    let lmax = eigh(&(objective - &km).hermitian_part())?.max();
    let upper = lmax + km.trace().re / (d * d) as f64;
    Ok(Bounds { lower, upper, chi })
}

fn local_dim_of(objective: &ComplexMatrix) -> Result<usize> {
    let n = objective.rows();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n || !objective.is_square() {
        return Err(Error::Dimension(format!(
            "objective must be d²xd², got {}x{}",
            objective.rows(),
            objective.cols()
        )));
    }
    if !(2..=MAX_LOCAL_DIM).contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "local dimension {d} outside 2..={MAX_LOCAL_DIM}"
        )));
    }
    Ok(d)
}

/// Solves the overlap problem for a state.
pub fn sdp_max_overlap(state: &BipartiteState, options: &SdpOptions) -> Result<SdpSolution> {
    state.local_dim()?;
    max_overlap_operator(state.rho(), options)
}

/// Solves the overlap problem for an arbitrary Hermitian objective on `C^d ⊗ C^d`.
pub fn max_overlap_operator(objective: &ComplexMatrix, options: &SdpOptions) -> Result<SdpSolution> {
    let d = local_dim_of(objective)?;
    if objective.hermiticity_defect() > 1e-9 {
        return Err(Error::NotHermitian {
            deviation: objective.hermiticity_defect(),
            tolerance: 1e-9,
        });
    }
    if !(options.tolerance > 0.0) || !(options.residual_tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let c = objective.hermitian_part();
    let n = d * d;
    let inv_n = 1.0 / n as f64;

    let mut sigma = 1.0;
    let mut z = ComplexMatrix::identity(n).scale_real(inv_n);
    let mut u = ComplexMatrix::zeros(n, n);
    let mut basis = ComplexMatrix::identity(n);
    let mut history = Vec::new();
    let mut primal_residual = f64::INFINITY;
    let mut dual_residual = f64::INFINITY;
    let mut best: Option<Bounds> = None;
    let mut best_upper = f64::INFINITY;

    let finish = |status: SdpStatus,
                  iterations: usize,
                  bounds: Bounds,
                  upper: f64,
                  primal_residual: f64,
                  dual_residual: f64,
                  history: Vec<f64>| {
        let purity = bounds.chi.trace_product(&bounds.chi).re;
        SdpSolution {
            optimum: bounds.lower,
            purity,
            chi: bounds.chi,
            iterations,
            primal_residual,
            dual_residual,
            lower_bound: bounds.lower,
            upper_bound: upper.max(bounds.lower),
            status,
            local_dim: d,
            history,
        }
    };

    for it in 1..=options.max_iterations {
        let v = &(&z - &u) + &c.scale_real(1.0 / sigma);
        let x = project_marginals(&v, d);
        let w = (&x + &u).hermitian_part();
        let eig = eigh_warm(&w, &basis)?;
        let z_new = eig.reconstruct_with(|l| l.max(0.0));
        basis = eig.vectors;
        u = &w - &z_new;
        primal_residual = (&x - &z_new).frobenius_norm();
        dual_residual = sigma * (&z_new - &z).frobenius_norm();
        z = z_new;
        if options.record_history {
            history.push(c.trace_product(&repair(&z, d)?).re);
        }

        let small = primal_residual <= options.residual_tolerance
            && dual_residual <= options.residual_tolerance;
        if it % BOUND_CHECK_EVERY == 0 || small || it == options.max_iterations {
            // At a fixed point ρ - σU lies in the marginal span plus the
            // PSD multiplier, which makes it a dual candidate.
            let candidate = &c - &u.scale_real(sigma);
            let bounds = certified_bounds(&c, &z, &candidate, d)?;
            best_upper = best_upper.min(bounds.upper);
            let gap = best_upper - bounds.lower;
            let keep = best.as_ref().is_none_or(|b| bounds.lower >= b.lower || small);
            if keep {
                best = Some(bounds);
            }
            let current = best.as_ref().expect("set above");

            if gap <= options.tolerance || (small && gap <= 10.0 * options.tolerance) {
                let b = best.take().expect("set above");
                return Ok(finish(
                    SdpStatus::Converged,
                    it,
                    b,
                    best_upper,
                    primal_residual,
                    dual_residual,
                    history,
                ));
            }
            if let Some(t) = options.decision_threshold {
                let pure = current.chi.trace_product(&current.chi).re >= PURITY_THRESHOLD;
                let below = best_upper < t - BOUNDARY_MARGIN;
                let above_pure = current.lower > t + BOUNDARY_MARGIN
                    && pure
                    && primal_residual <= 1e-7
                    && dual_residual <= 1e-7;
                if below || above_pure {
                    let b = best.take().expect("set above");
                    return Ok(finish(
                        SdpStatus::Decided,
                        it,
                        b,
                        best_upper,
                        primal_residual,
                        dual_residual,
                        history,
                    ));
                }
            }
        }

        if it % BALANCE_EVERY == 0 && !small {
            if primal_residual > 10.0 * dual_residual && sigma < 1e4 {
                sigma *= 2.0;
                u = u.scale_real(0.5);
            } else if dual_residual > 10.0 * primal_residual && sigma > 1e-4 {
                sigma /= 2.0;
                u = u.scale_real(2.0);
            }
        }
    }

    let b = best.take().expect("bounds computed on the last iteration");
    Ok(finish(
        SdpStatus::Unconverged,
        options.max_iterations,
        b,
        best_upper,
        primal_residual,
        dual_residual,
        history,
    ))
}

/// Faithfulness conclusion drawn from the overlap SDP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapVerdict {
    /// Optimum not larger than 1/d: unfaithful.
    Unfaithful,
    /// Optimum above 1/d with a pure (maximally entangled) optimizer: faithful.
    Faithful,
    /// Optimum above 1/d but the optimizer is mixed: hand off to see-saw.
    Inconclusive,
    /// Optimum within the boundary margin of 1/d.
    Boundary,
}

/// Verdict plus the evidence behind it.
#[derive(Debug, Clone)]
pub struct OverlapConclusion {
    pub verdict: OverlapVerdict,
    pub threshold: f64,
    pub optimum: f64,
    pub upper_bound: f64,
    pub purity: f64,
    /// Maximally entangled state closest to the dominant eigenvector of χ.
    pub certificate: Option<Vec<num_complex::Complex64>>,
    /// Fidelity of the state with `certificate`.
    pub certificate_fidelity: Option<f64>,
}

/// Nearest maximally entangled state to `psi`: `(1 ⊗ W)|φ⁺>`-type vector built
/// from the unitary polar factor of the coefficient matrix.
pub fn nearest_max_entangled(psi: &[num_complex::Complex64], d: usize) -> Result<Vec<num_complex::Complex64>> {
    let coef = ComplexMatrix::from_fn(d, d, |i, j| psi[i * d + j]);
    let w = svd(&coef)?.polar_unitary();
    let s = 1.0 / (d as f64).sqrt();
    Ok(w.into_vec().into_iter().map(|z| z * s).collect())
}

/// Reads unfaithful / faithful / inconclusive off a solved overlap problem.
pub fn obs3_verdict(state: &BipartiteState, solution: &SdpSolution) -> Result<OverlapConclusion> {
    let d = state.local_dim()?;
    if d != solution.local_dim {
        return Err(Error::Dimension("solution belongs to another dimension".into()));
    }
    if solution.status == SdpStatus::Unconverged {
        return Err(Error::Unconverged {
            iterations: solution.iterations,
            primal_residual: solution.primal_residual,
            dual_residual: solution.dual_residual,
        });
    }
    let threshold = 1.0 / d as f64;
    let mut out = OverlapConclusion {
        verdict: OverlapVerdict::Boundary,
        threshold,
        optimum: solution.optimum,
        upper_bound: solution.upper_bound,
        purity: solution.purity,
        certificate: None,
        certificate_fidelity: None,
    };
    if solution.upper_bound < threshold - BOUNDARY_MARGIN {
        out.verdict = OverlapVerdict::Unfaithful;
        return Ok(out);
    }
    if solution.lower_bound <= threshold + BOUNDARY_MARGIN {
        return Ok(out);
    }
    if solution.purity >= PURITY_THRESHOLD {
        let top = eigh(&solution.chi)?.vector(0);
        let phi = nearest_max_entangled(&top, d)?;
        let f = state.fidelity(&phi);
        out.certificate_fidelity = Some(f);
        out.certificate = Some(phi);
        if f > threshold + BOUNDARY_MARGIN {
            out.verdict = OverlapVerdict::Faithful;
            return Ok(out);
        }
    }
    out.verdict = OverlapVerdict::Inconclusive;
    Ok(out)
}
