//! See-saw ascent over unitaries.
//!
//! Since `(U_A ⊗ U_B)|φ⁺> = (1 ⊗ U_B U_Aᵀ)|φ⁺>`, the fidelity with maximally
//! entangled states is a Hermitian quadratic form in one unitary `V`:
//! `F(V) = Φ_V† ρ Φ_V / d` with `Φ_V[i·d + k] = V[k][i]`. Each step replaces
//! `V` by the unitary polar factor of the gradient, which never decreases a
//! convex (PSD) form. Unitary quadratic minimization uses the same ascent on
//! a shifted, negated form.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::BOUNDARY_MARGIN;
use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, max_eigenvalue, svd, ComplexMatrix};
use crate::states::io::matrix_from_parts;
use crate::states::random::{haar_unitary, SampleRng};
use crate::states::BipartiteState;

const DEFAULT_SEED: u64 = 0x5ee5_a11d;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeesawOptions {
    /// Number of starting points; the first is the identity.
    pub restarts: usize,
    /// Stop a restart once one step gains less than this.
    pub inner_tol: f64,
    pub max_inner_iterations: usize,
    /// Key of the Haar restart streams.
    pub seed: u64,
}

impl SeesawOptions {
    /// Defaults for local dimension `d`: 50 restarts up to d = 4, 200 beyond.
    pub fn for_dim(d: usize) -> Self {
        Self {
            restarts: if d <= 4 { 50 } else { 200 },
            ..Self::default()
        }
    }
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            inner_tol: 1e-12,
            max_inner_iterations: 5_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Outcome of one ascent from one starting unitary.
#[derive(Debug, Clone)]
pub struct Ascent {
    pub value: f64,
    pub unitary: ComplexMatrix,
    /// Objective after every step, starting with the initial point.
    pub trajectory: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SeesawResult {
    /// Best singlet fraction found.
    pub best_value: f64,
    /// Effective local unitary `V = U_B U_Aᵀ`.
    pub unitary: ComplexMatrix,
    pub restarts: usize,
    pub values: Vec<f64>,
    pub best_restart: usize,
}

/// `Φ_U[i·n + k] = U[k][i]`, so that `<Φ_A|Φ_U> = Tr(A† U)`.
pub fn phi(u: &ComplexMatrix) -> Vec<Complex64> {
    let n = u.rows();
    (0..n * n).map(|idx| u[(idx % n, idx / n)]).collect()
}

/// Inverse of [`phi`].
pub fn unphi(v: &[Complex64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |k, i| v[i * n + k])
}

/// `(1 ⊗ V)|φ⁺>`.
pub fn max_entangled_with(v: &ComplexMatrix) -> Vec<Complex64> {
    let n = v.rows();
    let s = 1.0 / (n as f64).sqrt();
    phi(v).into_iter().map(|z| z * s).collect()
}

fn polar_step(g: &ComplexMatrix, previous: &ComplexMatrix) -> Result<ComplexMatrix> {
    let norm = g.frobenius_norm();
    if norm == 0.0 || !norm.is_finite() {
        return Ok(previous.clone());
    }
    let dec = svd(g)?;
    let smallest = dec.values.last().copied().unwrap_or(0.0);
    if smallest <= 1e-14 * norm {
        // Null directions are free; lean on the previous unitary to fix them.
        return Ok(svd(&(g + &previous.scale_real(1e-12 * norm)))?.polar_unitary());
    }
    Ok(dec.polar_unitary())
}

/// Maximizes `Φ_U† Y Φ_U` over `n x n` unitaries from `start`. `Y` must be
/// positive semidefinite for the steps to be monotone.
pub fn ascend(y: &ComplexMatrix, start: ComplexMatrix, inner_tol: f64, max_iterations: usize) -> Result<Ascent> {
    let n = start.rows();
    if y.rows() != n * n || !y.is_square() {
        return Err(Error::Dimension(format!(
            "quadratic form must be {0}x{0} for {n}x{n} unitaries",
            n * n
        )));
    }
    let mut u = start;
    let x = phi(&u);
    let mut yx = y.matvec(&x);
    let mut value = dot(&x, &yx);
    let mut trajectory = vec![value];
    for _ in 0..max_iterations {
        let next = polar_step(&unphi(&yx, n), &u)?;
        let nx = phi(&next);
        let nyx = y.matvec(&nx);
        let nv = dot(&nx, &nyx);
        if nv < value {
            break;
        }
        let gain = nv - value;
        u = next;
        yx = nyx;
        value = nv;
        trajectory.push(value);
        if gain < inner_tol {
            break;
        }
    }
    Ok(Ascent {
        value,
        unitary: u,
        trajectory,
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}

fn starting_point(n: usize, restart: usize, seed: u64) -> ComplexMatrix {
    if restart == 0 {
        ComplexMatrix::identity(n)
    } else {
        haar_unitary(n, &mut SampleRng::stream(seed, restart as u64))
    }
}

/// Runs all restarts of [`ascend`] and keeps the best (lowest index on ties).
fn multi_start(y: &ComplexMatrix, n: usize, options: &SeesawOptions) -> Result<(Vec<Ascent>, usize)> {
    if options.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let runs: Vec<Ascent> = (0..options.restarts)
        .into_par_iter()
        .map(|r| {
            ascend(
                y,
                starting_point(n, r, options.seed),
                options.inner_tol,
                options.max_inner_iterations,
            )
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, a) in runs.iter().enumerate() {
        if a.value > runs[best].value {
            best = i;
        }
    }
    Ok((runs, best))
}

/// Largest fidelity with a maximally entangled state found by see-saw.
pub fn max_singlet_fraction(state: &BipartiteState, options: &SeesawOptions) -> Result<SeesawResult> {
    let d = state.local_dim()?;
    let (runs, best) = multi_start(state.rho(), d, options)?;
    let scale = 1.0 / d as f64;
    let values: Vec<f64> = runs.iter().map(|a| (a.value * scale).clamp(0.0, 1.0)).collect();
    Ok(SeesawResult {
        best_value: values[best],
        unitary: runs[best].unitary.clone(),
        restarts: options.restarts,
        values,
        best_restart: best,
    })
}

/// Faithfulness conclusion from a see-saw run; never claims unfaithful.
#[derive(Debug, Clone)]
pub struct SeesawConclusion {
    pub faithful: bool,
    pub value: f64,
    pub threshold: f64,
    /// `(1 ⊗ V)|φ⁺>` attaining `value`, when faithful.
    pub certificate: Option<Vec<Complex64>>,
}

pub fn faithful_via_seesaw(state: &BipartiteState, result: &SeesawResult) -> Result<SeesawConclusion> {
    let d = state.local_dim()?;
    if result.unitary.rows() != d {
        return Err(Error::Dimension("see-saw result belongs to another dimension".into()));
    }
    let threshold = 1.0 / d as f64;
    let faithful = result.best_value > threshold + BOUNDARY_MARGIN;
    Ok(SeesawConclusion {
        faithful,
        value: result.best_value,
        threshold,
        certificate: faithful.then(|| max_entangled_with(&result.unitary)),
    })
}

/// `S(ρ) = max(d·F, 1)` with `F` the see-saw singlet fraction.
pub fn s_quantity(state: &BipartiteState, options: &SeesawOptions) -> Result<f64> {
    let d = state.local_dim()?;
    let r = max_singlet_fraction(state, options)?;
    Ok((d as f64 * r.best_value).max(1.0))
}

/// `min_U Σ_j |Tr(A_j† U)|²` over `n x n` unitaries.
#[derive(Debug, Clone)]
pub struct UqmInstance {
    pub n: usize,
    pub matrices: Vec<ComplexMatrix>,
}

#[derive(Debug, Deserialize)]
struct UqmMatrixDoc {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
struct UqmDoc {
    n: usize,
    matrices: Vec<UqmMatrixDoc>,
}

impl UqmInstance {
    /// Validates shapes and the norm bound `Tr(A_j† A_j) ≤ 1`.
    pub fn new(n: usize, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        for (index, a) in matrices.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::Dimension(format!(
                    "matrix {index} is {}x{}, expected {n}x{n}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            let norm_sqr = a.frobenius_norm().powi(2);
            if norm_sqr > 1.0 + 1e-9 {
                return Err(Error::NormBound { index, norm_sqr });
            }
        }
        Ok(Self { n, matrices })
    }

    /// Parses `{"n": int, "matrices": [{"re": [[...]], "im": [[...]]}]}`.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: UqmDoc = serde_json::from_slice(bytes)?;
        let matrices = doc
            .matrices
            .iter()
            .map(|m| matrix_from_parts(&m.re, m.im.as_deref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.n, matrices)
    }

    /// `f(U) = Σ_j |Tr(A_j† U)|²`.
    pub fn objective(&self, u: &ComplexMatrix) -> f64 {
        self.matrices.iter().map(|a| a.inner(u).norm_sqr()).sum()
    }

    /// `X = Σ_j |Φ_{A_j}><Φ_{A_j}|`, so that `f(U) = Φ_U† X Φ_U`.
    pub fn form(&self) -> ComplexMatrix {
        let m = self.n * self.n;
        let mut x = ComplexMatrix::zeros(m, m);
        for a in &self.matrices {
            x = &x + &ComplexMatrix::outer(&phi(a));
        }
        x
    }
}

#[derive(Debug, Clone)]
pub struct UqmResult {
    /// Certified: no unitary does better.
    pub lower_bound: f64,
    /// Attained by `unitary`.
    pub upper_bound: f64,
    pub unitary: ComplexMatrix,
}

/// Brackets the UQM minimum: see-saw on `c·1 - X` for the upper bound,
/// `n·λ_min(X)` for the lower bound (zero when `X` is rank deficient).
pub fn uqm_minimize(instance: &UqmInstance, options: &SeesawOptions) -> Result<UqmResult> {
    let n = instance.n;
    let x = instance.form();
    let m = n * n;
    if instance.matrices.is_empty() {
        return Ok(UqmResult {
            lower_bound: 0.0,
            upper_bound: 0.0,
            unitary: ComplexMatrix::identity(n),
        });
    }
    let c = max_eigenvalue(&x)?.max(0.0);
    let mut y = x.scale_real(-1.0);
    for i in 0..m {
        y[(i, i)] += c64(c, 0.0);
    }
    let (runs, best) = multi_start(&y, n, options)?;
    let unitary = runs[best].unitary.clone();
    let upper_bound = instance.objective(&unitary).max(0.0);
    let lower_bound = if instance.matrices.len() < m {
        0.0
    } else {
        (n as f64 * eigh(&x)?.min()).max(0.0)
    };
    Ok(UqmResult {
        lower_bound: lower_bound.min(upper_bound),
        upper_bound,
        unitary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{schmidt_form_state, Dims};
    use crate::states::{isotropic, max_entangled, werner_qubit};

    fn quick() -> SeesawOptions {
        SeesawOptions {
            restarts: 8,
            ..SeesawOptions::default()
        }
    }

    #[test]
    fn phi_matches_trace_inner_product() {
        let mut rng = SampleRng::stream(1, 1);
        let a = haar_unitary(3, &mut rng);
        let b = haar_unitary(3, &mut rng);
        let lhs: Complex64 = phi(&a).iter().zip(phi(&b)).map(|(x, y)| x.conj() * y).sum();
        assert!((lhs - a.inner(&b)).norm() < 1e-12);
        assert!(unphi(&phi(&a), 3).max_abs_diff(&a) == 0.0);
    }

    #[test]
    fn local_unitaries_collapse_to_one() {
        let mut rng = SampleRng::stream(2, 0);
        let ua = haar_unitary(3, &mut rng);
        let ub = haar_unitary(3, &mut rng);
        let phi_plus = max_entangled(3).unwrap();
        let lhs = ua.kron(&ub).matvec(&phi_plus);
        let rhs = max_entangled_with(&ub.matmul(&ua.transpose()));
        assert!(lhs.iter().zip(&rhs).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn examples() {
        let s = BipartiteState::pure(&max_entangled(3).unwrap(), Dims::square(3)).unwrap();
        assert!((max_singlet_fraction(&s, &quick()).unwrap().best_value - 1.0).abs() < 1e-12);
        let s = BipartiteState::pure(&schmidt_form_state(&[1.0], 3), Dims::square(3)).unwrap();
        assert!((max_singlet_fraction(&s, &quick()).unwrap().best_value - 1.0 / 3.0).abs() < 1e-9);
        let s = BipartiteState::pure(&schmidt_form_state(&[0.8, 0.6], 2), Dims::square(2)).unwrap();
        assert!((max_singlet_fraction(&s, &quick()).unwrap().best_value - 0.98).abs() < 1e-9);
    }

    #[test]
    fn verdicts() {
        let s = isotropic(3, 0.5).unwrap();
        let r = max_singlet_fraction(&s, &quick()).unwrap();
        let c = faithful_via_seesaw(&s, &r).unwrap();
        assert!(c.faithful && (c.value - (0.5 + 0.5 / 9.0)).abs() < 1e-9);
        assert!((s.fidelity(&c.certificate.unwrap()) - c.value).abs() < 1e-12);

        let s = BipartiteState::maximally_mixed(Dims::square(3));
        let r = max_singlet_fraction(&s, &quick()).unwrap();
        assert!((r.best_value - 1.0 / 9.0).abs() < 1e-12);
        assert!(!faithful_via_seesaw(&s, &r).unwrap().faithful);

        let s = werner_qubit(0.8).unwrap();
        let r = max_singlet_fraction(&s, &quick()).unwrap();
        assert!(faithful_via_seesaw(&s, &r).unwrap().faithful);
        assert!((r.best_value - 0.85).abs() < 1e-9);
    }

    #[test]
    fn s_quantity_examples() {
        let prod = BipartiteState::pure(&schmidt_form_state(&[1.0], 2), Dims::square(2)).unwrap();
        assert!((s_quantity(&prod, &quick()).unwrap() - 1.0).abs() < 1e-9);
        let phi2 = BipartiteState::pure(&max_entangled(2).unwrap(), Dims::square(2)).unwrap();
        assert!((s_quantity(&phi2, &quick()).unwrap() - 2.0).abs() < 1e-12);
        let iso = isotropic(3, 0.5).unwrap();
        assert!((s_quantity(&iso, &quick()).unwrap() - 3.0 * (0.5 + 0.5 / 9.0)).abs() < 1e-8);
    }

    #[test]
    fn trajectories_never_decrease() {
        let cfg = crate::states::SamplerConfig::new(crate::states::Measure::Bures, 3, 4).unwrap();
        let s = cfg.sample(0).unwrap();
        let start = haar_unitary(3, &mut SampleRng::stream(8, 8));
        let a = ascend(s.rho(), start, 1e-12, 5000).unwrap();
        assert!(a.trajectory.windows(2).all(|w| w[1] >= w[0]));
        assert!(a.unitary.adjoint_mul(&a.unitary).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn uqm_examples() {
        let u0 = haar_unitary(2, &mut SampleRng::stream(5, 5));
        let inst = UqmInstance::new(2, vec![u0.scale_real(1.0 / 2f64.sqrt())]).unwrap();
        let r = uqm_minimize(&inst, &quick()).unwrap();
        assert!(r.upper_bound <= 1e-9, "{}", r.upper_bound);
        assert_eq!(r.lower_bound, 0.0);

        let inst = UqmInstance::new(2, vec![ComplexMatrix::zeros(2, 2); 3]).unwrap();
        assert_eq!(uqm_minimize(&inst, &quick()).unwrap().upper_bound, 0.0);

        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let r = uqm_minimize(&UqmInstance::new(2, vec![a]).unwrap(), &quick()).unwrap();
        assert!(r.upper_bound <= 1e-9);
        assert!(r.unitary[(0, 0)].norm() < 1e-4);
    }

    #[test]
    fn uqm_full_rank_brackets() {
        // An orthonormal operator basis: f(U) = Tr(U†U) = 2 for every U.
        let inst = UqmInstance::new(2, crate::criteria::orthonormal_hermitian_basis(2)).unwrap();
        let r = uqm_minimize(&inst, &quick()).unwrap();
        assert!((r.lower_bound - 2.0).abs() < 1e-9 && (r.upper_bound - 2.0).abs() < 1e-9);
    }

    #[test]
    fn uqm_json_and_norm_bound() {
        let doc = br#"{"n": 2, "matrices": [{"re": [[1, 0], [0, 0]]}]}"#;
        assert_eq!(UqmInstance::from_json(doc).unwrap().matrices.len(), 1);
        let doc = br#"{"n": 2, "matrices": [{"re": [[1, 0], [0, 1]]}]}"#;
        assert!(matches!(UqmInstance::from_json(doc), Err(Error::NormBound { index: 0, .. })));
    }
}
