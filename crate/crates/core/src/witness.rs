//! Fidelity witnesses `α·1 - |ψ><ψ|`, the relevant fidelity witnesses with
//! maximally entangled sign-state targets, their convex decomposition with
//! product-form weights, and Schmidt-number witnesses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, eigh, schmidt_decompose, svd, vec_norm, ComplexMatrix, Dims, SCHMIDT_CUTOFF,
};
use crate::states::io::{format_f64, matrix_from_parts, write_real_rows, write_real_vec};
use crate::states::BipartiteState;

/// Largest local dimension for which all `2^(d-1)` sign witnesses are built.
pub const MAX_RFW_DIM: usize = 12;

const RECONSTRUCTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Witness {
    /// `threshold·1 - |target><target|`.
    pub observable: ComplexMatrix,
    pub threshold: f64,
    pub target: Vec<Complex64>,
    pub dims: Dims,
    /// Schmidt level ℓ; 1 for entanglement witnesses.
    pub level: usize,
}

impl Witness {
    /// Builds `threshold·1 - |target><target|` for a normalized target.
    pub fn from_target(target: Vec<Complex64>, dims: Dims, threshold: f64, level: usize) -> Result<Self> {
        if target.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "target has {} entries, expected {}",
                target.len(),
                dims.total()
            )));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!("threshold {threshold} outside (0, 1]")));
        }
        if (vec_norm(&target) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("witness target must be normalized".into()));
        }
        let mut observable = ComplexMatrix::outer(&target).scale_real(-1.0);
        for i in 0..dims.total() {
            observable[(i, i)] += c64(threshold, 0.0);
        }
        Ok(Self {
            observable,
            threshold,
            target,
            dims,
            level,
        })
    }

    /// `Tr(W ρ)`; negative means detected.
    pub fn expectation(&self, state: &BipartiteState) -> f64 {
        self.observable.trace_product(state.rho()).re
    }

    pub fn detects(&self, state: &BipartiteState) -> bool {
        self.expectation(state) < 0.0
    }
}

/// Fidelity witness of `psi` at Schmidt level ℓ: threshold is the sum of the ℓ
/// largest squared Schmidt coefficients.
pub fn fidelity_witness(psi: &[Complex64], dims: Dims, level: usize) -> Result<Witness> {
    if level == 0 {
        return Err(Error::InvalidArgument("Schmidt level must be at least 1".into()));
    }
    let dec = schmidt_decompose(psi, dims)?;
    if level >= dec.rank() {
        return Err(Error::InvalidArgument(format!(
            "level {level} is not below the Schmidt rank {}; the witness would be trivial",
            dec.rank()
        )));
    }
    let threshold = dec.coefficients[..level].iter().map(|s| s * s).sum();
    let norm = vec_norm(psi);
    let target = psi.iter().map(|z| z / norm).collect();
    Witness::from_target(target, dims, threshold, level)
}

/// Sign vectors `(+1, a_1, ..., a_{d-1})` in binary order, first sign fixed.
fn sign_vectors(d: usize) -> Vec<Vec<i8>> {
    (0..1usize << (d - 1))
        .map(|mask| {
            (0..d - 1)
                .map(|j| if mask >> (d - 2 - j) & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

/// The `2^(d-1)` relevant fidelity witnesses `1/d - |ψ_a><ψ_a|` with
/// `|ψ_a> = (|00> + Σ_j a_j |jj>)/√d`.
pub fn rfw_set(d: usize) -> Result<Vec<Witness>> {
    if !(2..=MAX_RFW_DIM).contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "RFW enumeration needs 2 <= d <= {MAX_RFW_DIM}, got {d}"
        )));
    }
    let identity = ComplexMatrix::identity(d);
    sign_vectors(d)
        .into_iter()
        .map(|a| sign_witness(&a, &identity, &identity))
        .collect()
}

fn sign_witness(signs: &[i8], left: &ComplexMatrix, right: &ComplexMatrix) -> Result<Witness> {
    let d = left.rows();
    let amp = 1.0 / (d as f64).sqrt();
    let mut target = vec![c64(0.0, 0.0); d * d];
    for k in 0..d {
        let sign = if k == 0 { 1.0 } else { f64::from(signs[k - 1]) };
        for i in 0..d {
            for j in 0..d {
                target[i * d + j] += left[(i, k)] * right[(j, k)] * (sign * amp);
            }
        }
    }
    Witness::from_target(target, Dims::square(d), 1.0 / d as f64, 1)
}

/// Product distribution over sign vectors reproducing `<a_j> = α_j` and
/// `<a_i a_j> = α_i α_j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LhvWeights {
    /// `α_j = s_{j+1}/s_1` for `j = 1..d-1`.
    pub alphas: Vec<f64>,
    pub signs: Vec<Vec<i8>>,
    pub probabilities: Vec<f64>,
}

impl LhvWeights {
    /// `Σ_a p_a a_j`.
    pub fn marginal(&self, j: usize) -> f64 {
        self.signs
            .iter()
            .zip(&self.probabilities)
            .map(|(a, p)| p * f64::from(a[j]))
            .sum()
    }

    /// `Σ_a p_a a_i a_j`.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        self.signs
            .iter()
            .zip(&self.probabilities)
            .map(|(a, p)| p * f64::from(a[i] * a[j]))
            .sum()
    }
}

/// `p_a = Π_j (1 + a_j α_j)/2` for descending Schmidt coefficients `s`.
pub fn lhv_weights(s: &[f64]) -> Result<LhvWeights> {
    if s.is_empty() || !(s[0] > 0.0) {
        return Err(Error::InvalidArgument("leading Schmidt coefficient must be positive".into()));
    }
    if s.iter().any(|x| *x < 0.0 || !x.is_finite()) || s.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument(
            "Schmidt coefficients must be finite, non-negative and descending".into(),
        ));
    }
    if s.len() > MAX_RFW_DIM {
        return Err(Error::InvalidArgument(format!("at most {MAX_RFW_DIM} coefficients")));
    }
    let alphas: Vec<f64> = s[1..].iter().map(|x| x / s[0]).collect();
    if s.len() == 1 {
        return Ok(LhvWeights {
            alphas,
            signs: vec![vec![]],
            probabilities: vec![1.0],
        });
    }
    let signs = sign_vectors(s.len());
    let probabilities = signs
        .iter()
        .map(|a| {
            a.iter()
                .zip(&alphas)
                .map(|(&aj, al)| (1.0 + f64::from(aj) * al) / 2.0)
                .product()
        })
        .collect();
    Ok(LhvWeights {
        alphas,
        signs,
        probabilities,
    })
}

/// Remainder of the fidelity witness after subtracting the weighted RFWs.
#[derive(Debug, Clone)]
pub struct RfwDecomposition {
    /// `Z = W - d s_1² Σ_a p_a W_a` in the computational basis.
    pub z: ComplexMatrix,
    /// `Z` in the product of the local Schmidt bases.
    pub z_schmidt: ComplexMatrix,
    pub weights: LhvWeights,
    /// RFWs written in the Schmidt bases of the target, ordered like `weights.signs`.
    pub components: Vec<Witness>,
    pub coefficients: Vec<f64>,
    pub off_diagonal_mass: f64,
    pub min_eigenvalue: f64,
    /// Diagonal entries not in `{0} ∪ {s_1² - s_j²}`, max deviation.
    pub diagonal_value_error: f64,
    pub diagonal: bool,
    pub psd: bool,
}

/// Writes the fidelity witness of `psi` as a positive combination of RFWs
/// plus a positive semidefinite remainder, and checks the remainder.
pub fn verify_rfw_decomposition(psi: &[Complex64], dims: Dims) -> Result<RfwDecomposition> {
    let d = dims.local()?;
    if d > 10 {
        return Err(Error::InvalidArgument(format!("decomposition check needs d <= 10, got {d}")));
    }
    if psi.len() != dims.total() {
        return Err(Error::Dimension("state vector length does not match dims".into()));
    }
    let norm = vec_norm(psi);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidArgument("cannot decompose the zero vector".into()));
    }
    let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
    let dec = svd(&ComplexMatrix::from_fn(d, d, |i, j| psi[i * d + j]))?;
    let s: Vec<f64> = dec
        .values
        .iter()
        .map(|&x| if x <= SCHMIDT_CUTOFF { 0.0 } else { x })
        .collect();
    let left = dec.left.clone();
    let right = dec.right.conj();

    let s1sq = s[0] * s[0];
    let w = Witness::from_target(psi.clone(), dims, s1sq.min(1.0), 1)?;
    let weights = lhv_weights(&s)?;
    let components: Vec<Witness> = weights
        .signs
        .iter()
        .map(|a| sign_witness(a, &left, &right))
        .collect::<Result<_>>()?;
    let mut z = w.observable.clone();
    for (wa, p) in components.iter().zip(&weights.probabilities) {
        z = &z - &wa.observable.scale_real(d as f64 * s1sq * p);
    }
    let basis = left.kron(&right);
    let z_schmidt = basis.adjoint_mul(&z).matmul(&basis);

    let n = d * d;
    let mut off = 0.0;
    let mut value_error: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                off += z_schmidt[(r, c)].norm_sqr();
            }
        }
        let (i, j) = (r / d, r % d);
        let expect = if i == j { s1sq - s[i] * s[i] } else { 0.0 };
        value_error = value_error.max((z_schmidt[(r, r)] - expect).norm());
    }
    let off_diagonal_mass = off.sqrt();
    let min_eigenvalue = eigh(&z.hermitian_part())?.min();
    Ok(RfwDecomposition {
        diagonal: off_diagonal_mass <= 1e-10 && value_error <= 1e-10,
        psd: min_eigenvalue >= -1e-10,
        z,
        z_schmidt,
        weights,
        components,
        coefficients: s,
        off_diagonal_mass,
        min_eigenvalue,
        diagonal_value_error: value_error,
    })
}

fn normalized_schmidt_vector(s: &[f64]) -> Result<Vec<f64>> {
    if s.is_empty() || s.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidArgument(
            "Schmidt coefficients must be finite and non-negative".into(),
        ));
    }
    let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("Schmidt vector is zero".into()));
    }
    let mut out: Vec<f64> = s.iter().map(|x| x / norm).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obs4Outcome {
    pub detectable: bool,
    /// `Σ s_i - √ℓ`.
    pub margin: f64,
    /// Best overlap with a maximally entangled state, `(Σ s_i)²/d`.
    pub max_overlap: f64,
}

/// Is the pure state with Schmidt coefficients `s` detected by some
/// Schmidt-level-ℓ witness built on a maximally entangled state?
/// Coefficients are normalized and sorted first.
pub fn obs4_detectable(s: &[f64], level: usize) -> Result<Obs4Outcome> {
    let s = normalized_schmidt_vector(s)?;
    if level == 0 || s.get(level).is_none_or(|x| *x <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need s_{} > 0: the state must have Schmidt number above {level}",
            level + 1
        )));
    }
    let sum: f64 = s.iter().sum();
    let margin = sum - (level as f64).sqrt();
    Ok(Obs4Outcome {
        detectable: margin > 0.0,
        margin,
        max_overlap: sum * sum / s.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obs5Counterexample {
    pub epsilon: f64,
    /// Schmidt coefficients of `|x> = Σ_{i≤ℓ+1} x_i |ii>`.
    pub x: Vec<f64>,
    /// `|<ψ|x>|²`.
    pub overlap: f64,
    /// `β(ℓ) = Σ_{i≤ℓ} s_i²`.
    pub beta: f64,
    /// `|<ψ|x>|² ≥ β + ε²`: detected by the Schmidt witness of `ψ`.
    pub detected_by_target: bool,
    /// `Σ x_i ≤ √ℓ`: missed by every maximally entangled Schmidt witness.
    pub undetected_by_max_entangled: bool,
}

fn obs5_ratio(head_sum: f64, head_sq: f64, eps: f64) -> f64 {
    (head_sum + eps) / (head_sq + eps * eps).sqrt()
}

/// State detected by the Schmidt witness of `s` at level ℓ but by no
/// Schmidt-level-ℓ witness with a maximally entangled target.
pub fn obs5_counterexample(s: &[f64], level: usize) -> Result<Obs5Counterexample> {
    let s = normalized_schmidt_vector(s)?;
    if level == 0 || s.get(level).is_none_or(|x| *x <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need s_{} > 0 for a level-{level} counterexample",
            level + 1
        )));
    }
    let head = &s[..level];
    if head.iter().all(|x| (x - head[0]).abs() <= 1e-12 * head[0].max(1.0)) {
        return Err(Error::NoCounterexample(format!(
            "the {level} largest Schmidt coefficients are equal"
        )));
    }
    let head_sum: f64 = head.iter().sum();
    let head_sq: f64 = head.iter().map(|x| x * x).sum();
    let bound = (level as f64).sqrt();
    let next = s[level];
    let epsilon = if obs5_ratio(head_sum, head_sq, next) <= bound {
        next
    } else {
        // Ratio is increasing on (0, s_{ℓ+1}]; find its last point below √ℓ.
        let (mut lo, mut hi) = (0.0, next);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if obs5_ratio(head_sum, head_sq, mid) <= bound {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if epsilon <= 0.0 {
        return Err(Error::NoCounterexample("no admissible epsilon found".into()));
    }
    let norm = (head_sq + epsilon * epsilon).sqrt();
    let mut x: Vec<f64> = head.iter().map(|v| v / norm).collect();
    x.push(epsilon / norm);
    let overlap = s.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().powi(2);
    let beta = head_sq;
    let x_sum: f64 = x.iter().sum();
    Ok(Obs5Counterexample {
        epsilon,
        detected_by_target: overlap >= beta + epsilon * epsilon - 1e-12,
        undetected_by_max_entangled: x_sum <= bound + 1e-12,
        x,
        overlap,
        beta,
    })
}

#[derive(Debug, Deserialize)]
struct VectorParts {
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
struct MatrixParts {
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
struct WitnessDoc {
    d_a: usize,
    d_b: usize,
    threshold: f64,
    #[serde(default = "default_level")]
    level: usize,
    target: VectorParts,
    #[serde(default)]
    observable: Option<MatrixParts>,
}

fn default_level() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum WitnessSetDoc {
    Wrapped { witnesses: Vec<WitnessDoc> },
    Bare(Vec<WitnessDoc>),
}

fn witness_from_doc(doc: WitnessDoc) -> Result<Witness> {
    let n = doc.d_a * doc.d_b;
    if doc.target.re.len() != n || doc.target.im.as_ref().is_some_and(|v| v.len() != n) {
        return Err(Error::Dimension(format!("witness target must have {n} entries")));
    }
    let target = (0..n)
        .map(|i| c64(doc.target.re[i], doc.target.im.as_ref().map_or(0.0, |v| v[i])))
        .collect();
    let w = Witness::from_target(target, Dims::new(doc.d_a, doc.d_b), doc.threshold, doc.level)?;
    if let Some(obs) = doc.observable {
        let m = matrix_from_parts(&obs.re, obs.im.as_deref())?;
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension("observable shape does not match d_a * d_b".into()));
        }
        let dev = m.max_abs_diff(&w.observable);
        if dev > RECONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "observable differs from threshold*1 - |target><target| by {dev:e}"
            )));
        }
    }
    Ok(w)
}

/// Parses one witness document.
pub fn load_witness(bytes: &[u8]) -> Result<Witness> {
    witness_from_doc(serde_json::from_slice(bytes)?)
}

/// Parses `{"witnesses": [...]}` or a bare array of witness documents.
pub fn load_witness_set(bytes: &[u8]) -> Result<Vec<Witness>> {
    let docs = match serde_json::from_slice(bytes)? {
        WitnessSetDoc::Wrapped { witnesses } => witnesses,
        WitnessSetDoc::Bare(v) => v,
    };
    docs.into_iter().map(witness_from_doc).collect()
}

fn witness_json(w: &Witness) -> String {
    let mut out = format!(
        "{{\"d_a\": {}, \"d_b\": {}, \"threshold\": {}, \"level\": {}, \"target\": {{\"re\": ",
        w.dims.a,
        w.dims.b,
        format_f64(w.threshold),
        w.level
    );
    write_real_vec(&mut out, &w.target.iter().map(|z| z.re).collect::<Vec<_>>());
    out.push_str(", \"im\": ");
    write_real_vec(&mut out, &w.target.iter().map(|z| z.im).collect::<Vec<_>>());
    out.push_str("}, \"observable\": {\"re\": ");
    write_real_rows(&mut out, &w.observable, |z| z.re);
    out.push_str(", \"im\": ");
    write_real_rows(&mut out, &w.observable, |z| z.im);
    out.push_str("}}");
    out
}

/// Serializes a witness: threshold, level, target and dense observable.
pub fn save_witness(w: &Witness) -> Vec<u8> {
    let mut s = witness_json(w);
    s.push('\n');
    s.into_bytes()
}

/// Serializes a list as `{"witnesses": [...]}`.
pub fn save_witness_set(ws: &[Witness]) -> Vec<u8> {
    let body: Vec<String> = ws.iter().map(witness_json).collect();
    format!("{{\"witnesses\": [{}]}}\n", body.join(", ")).into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::orthonormal_hermitian_basis;
    use crate::linalg::{partial_trace, schmidt_form_state, Subsystem};
    use crate::states::random::{haar_pure_state, haar_unitary, SampleRng};
    use crate::states::max_entangled;

    #[test]
    fn thresholds() {
        let w = fidelity_witness(&max_entangled(2).unwrap(), Dims::square(2), 1).unwrap();
        assert!((w.threshold - 0.5).abs() < 1e-15);
        let w = fidelity_witness(&schmidt_form_state(&[0.8, 0.6], 2), Dims::square(2), 1).unwrap();
        assert!((w.threshold - 0.64).abs() < 1e-12);
        let psi = schmidt_form_state(&[0.8, 0.4, 0.4, 0.2], 4);
        let w = fidelity_witness(&psi, Dims::square(4), 2).unwrap();
        assert!((w.threshold - 0.80).abs() < 1e-12);
        assert!(fidelity_witness(&psi, Dims::square(4), 4).is_err());
        let product = schmidt_form_state(&[1.0], 2);
        assert!(fidelity_witness(&product, Dims::square(2), 1).is_err());
    }

    #[test]
    fn observable_reconstructs() {
        let w = fidelity_witness(&schmidt_form_state(&[0.8, 0.6], 2), Dims::square(2), 1).unwrap();
        let mut expect = ComplexMatrix::outer(&w.target).scale_real(-1.0);
        for i in 0..4 {
            expect[(i, i)] += c64(w.threshold, 0.0);
        }
        assert_eq!(w.observable.as_slice(), expect.as_slice());
    }

    #[test]
    fn rfw_counts_and_targets() {
        assert_eq!(rfw_set(2).unwrap().len(), 2);
        assert_eq!(rfw_set(4).unwrap().len(), 8);
        assert!(rfw_set(1).is_err() && rfw_set(13).is_err());
        let set = rfw_set(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((set[0].target[0].re - h).abs() < 1e-15 && (set[0].target[3].re - h).abs() < 1e-15);
        assert!((set[1].target[3].re + h).abs() < 1e-15);
        for w in rfw_set(3).unwrap() {
            assert!((w.threshold - 1.0 / 3.0).abs() < 1e-15);
            let rho = ComplexMatrix::outer(&w.target);
            let m = partial_trace(&rho, Dims::square(3), Subsystem::B).unwrap();
            assert!(m.max_abs_diff(&ComplexMatrix::identity(3).scale_real(1.0 / 3.0)) < 1e-14);
        }
    }

    #[test]
    fn rfw_matches_operator_basis_form() {
        for d in 2..=4 {
            let w = &rfw_set(d).unwrap()[0];
            let mut sum = ComplexMatrix::zeros(d * d, d * d);
            for g in orthonormal_hermitian_basis(d) {
                sum = &sum + &g.kron(&g.transpose());
            }
            let mut expect = sum.scale_real(-1.0 / d as f64);
            for i in 0..d * d {
                expect[(i, i)] += c64(1.0 / d as f64, 0.0);
            }
            assert!(w.observable.max_abs_diff(&expect) < 1e-12);
        }
    }

    #[test]
    fn lhv_weight_examples() {
        let p = lhv_weights(&[1.0, 0.5]).unwrap();
        assert!((p.probabilities[0] - 0.75).abs() < 1e-15);
        assert!((p.probabilities[1] - 0.25).abs() < 1e-15);
        let p = lhv_weights(&[0.6, 0.6, 0.6]).unwrap();
        assert_eq!(p.probabilities[0], 1.0);
        assert!(p.probabilities[1..].iter().all(|x| *x == 0.0));
        let p = lhv_weights(&[1.0, 0.5, 0.5, 0.25]).unwrap();
        assert!((p.probabilities[0] - 0.75 * 0.75 * 0.625).abs() < 1e-15);
        assert!((p.probabilities[0] - 0.3516).abs() < 1e-4);
        assert!(lhv_weights(&[0.0, 0.0]).is_err());
        assert!(lhv_weights(&[0.5, 0.8]).is_err());
    }

    #[test]
    fn lhv_moments_are_exact() {
        let s = [0.7, 0.5, 0.4, 0.3, 0.1];
        let p = lhv_weights(&s).unwrap();
        assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..4 {
            assert!((p.marginal(i) - p.alphas[i]).abs() < 1e-12);
            for j in 0..4 {
                if i != j {
                    assert!((p.correlation(i, j) - p.alphas[i] * p.alphas[j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let dec = verify_rfw_decomposition(&max_entangled(2).unwrap(), Dims::square(2)).unwrap();
        assert!(dec.z.frobenius_norm() < 1e-12);
        let dec = verify_rfw_decomposition(&schmidt_form_state(&[0.8, 0.6], 2), Dims::square(2)).unwrap();
        assert!(dec.diagonal && dec.psd);
        assert!((dec.z_schmidt[(3, 3)].re - 0.28).abs() < 1e-12);
        assert!(dec.z_schmidt[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn decomposition_in_rotated_bases() {
        let mut rng = SampleRng::stream(3, 0);
        for d in 2..=5 {
            let psi = haar_pure_state(d * d, &mut rng);
            let dec = verify_rfw_decomposition(&psi, Dims::square(d)).unwrap();
            assert!(dec.diagonal, "d={d} off={} val={}", dec.off_diagonal_mass, dec.diagonal_value_error);
            assert!(dec.psd);
            // Components are RFWs up to local unitaries: threshold 1/d, mixed marginals.
            for c in &dec.components {
                let m = partial_trace(&ComplexMatrix::outer(&c.target), Dims::square(d), Subsystem::A).unwrap();
                assert!(m.max_abs_diff(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64)) < 1e-10);
            }
        }
    }

    #[test]
    fn witnesses_are_nonnegative_on_product_states() {
        let mut rng = SampleRng::stream(5, 1);
        let psi = haar_pure_state(9, &mut rng);
        let w = fidelity_witness(&psi, Dims::square(3), 1).unwrap();
        for _ in 0..200 {
            let a = haar_pure_state(3, &mut rng);
            let b = haar_pure_state(3, &mut rng);
            let prod: Vec<Complex64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
            let v = w.observable.expectation(&prod).re;
            assert!(v >= -1e-9, "{v}");
        }
        let u = haar_unitary(3, &mut rng);
        assert!(u.rows() == 3);
    }

    #[test]
    fn obs4_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let o = obs4_detectable(&[h, 0.5, 0.5], 2).unwrap();
        assert!(o.detectable);
        assert!((o.margin - (h + 1.0 - 2f64.sqrt())).abs() < 1e-12);
        let o = obs4_detectable(&[0.98, 0.141, 0.141], 2).unwrap();
        assert!(!o.detectable);
        assert!(obs4_detectable(&[0.6, 0.8], 1).unwrap().detectable);
        assert!(obs4_detectable(&[1.0, 0.0, 0.0], 1).is_err());
    }

    #[test]
    fn obs5_examples() {
        let c = obs5_counterexample(&[0.9, 0.3, 0.316], 2).unwrap();
        assert!(c.detected_by_target && c.undetected_by_max_entangled);
        assert!(c.epsilon > 0.0 && c.epsilon <= 0.316 / (0.81f64 + 0.09 + 0.316 * 0.316).sqrt() + 1e-15);
        assert!(matches!(obs5_counterexample(&[0.6, 0.6, 0.52], 2), Err(Error::NoCounterexample(_))));
    }

    #[test]
    fn witness_json_round_trip() {
        let set = rfw_set(3).unwrap();
        let back = load_witness_set(&save_witness_set(&set)).unwrap();
        assert_eq!(back.len(), 4);
        for (a, b) in set.iter().zip(&back) {
            assert_eq!(a.observable.as_slice(), b.observable.as_slice());
            assert_eq!(a.threshold, b.threshold);
        }
        let one = load_witness(&save_witness(&set[1])).unwrap();
        assert_eq!(one.target, set[1].target);
        let bad = br#"{"d_a": 2, "d_b": 2, "threshold": 0.5, "target": {"re": [1, 0, 0, 0]},
            "observable": {"re": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}}"#;
        assert!(load_witness(bad).is_err());
    }
}
