#![allow(dead_code)]

use faithful::linalg::{c64, ComplexMatrix};
use faithful::seesaw::max_entangled_with;
use faithful::states::{haar_pure_state, haar_unitary, BipartiteState, Measure, SampleRng, SamplerConfig};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn matrix_from(n: usize, m: usize, parts: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, m, |i, j| {
        let k = 2 * (i * m + j);
        c64(parts[k], parts[k + 1])
    })
}

/// Random `n x m` complex matrix with entries in the unit box.
pub fn complex_matrix(n: usize, m: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * m).prop_map(move |v| matrix_from(n, m, &v))
}

pub fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_matrix(n, n).prop_map(|m| m.hermitian_part())
}

pub fn bures(d: usize, seed: u64, index: u64) -> BipartiteState {
    SamplerConfig::new(Measure::Bures, d, seed).unwrap().sample(index).unwrap()
}

pub fn pure(d: usize, seed: u64) -> Vec<Complex64> {
    haar_pure_state(d * d, &mut SampleRng::stream(seed, 0))
}

pub fn unitary(n: usize, seed: u64, index: u64) -> ComplexMatrix {
    haar_unitary(n, &mut SampleRng::stream(seed, index))
}

/// Mixture of `k` random maximally entangled projectors: unit trace, PSD,
/// both marginals identity/d.
pub fn feasible_chi(d: usize, k: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SampleRng::stream(seed, 99);
    let weights: Vec<f64> = (0..k).map(|_| rng.uniform() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let mut chi = ComplexMatrix::zeros(d * d, d * d);
    for (i, w) in weights.iter().enumerate() {
        let v = max_entangled_with(&unitary(d, seed, i as u64));
        chi = &chi + &ComplexMatrix::outer(&v).scale_real(w / total);
    }
    chi
}
