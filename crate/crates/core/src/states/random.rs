//! Random matrices and random density matrices.
//!
//! Every draw comes from a [`SampleRng`] whose stream is a pure function of
//! `(seed, index)`, so Monte Carlo runs do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::state::BipartiteState;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, Dims};

/// ChaCha8 generator positioned on the stream for one sample index.
#[derive(Debug, Clone)]
pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    /// Stream `index` of the generator keyed by `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals (Box-Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Complex number with independent standard normal real and imaginary parts.
    pub fn complex_normal(&mut self) -> Complex64 {
        let (re, im) = self.normal_pair();
        c64(re, im)
    }
}

/// `n x n` Ginibre matrix: i.i.d. entries with standard normal real and imaginary parts.
pub fn ginibre(n: usize, rng: &mut SampleRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| rng.complex_normal())
}

/// Haar-distributed unitary: Gram-Schmidt on the columns of a Ginibre
/// matrix, which fixes the phases of the triangular factor to be positive.
pub fn haar_unitary(n: usize, rng: &mut SampleRng) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let coef: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= coef * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random normalized pure state, Haar on the full space.
pub fn haar_pure_state(n: usize, rng: &mut SampleRng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Hilbert-Schmidt random two-qudit state, `G G† / Tr(G G†)` with square Ginibre `G`.
pub fn sample_hs(d: usize, rng: &mut SampleRng) -> Result<BipartiteState> {
    check_dim(d)?;
    let g = ginibre(d * d, rng);
    BipartiteState::from_unnormalized(g.mul_adjoint(&g), Dims::square(d))
}

/// Bures random two-qudit state, `(1 + U) G G† (1 + U)†` normalized, with
/// full-size Ginibre `G` and Haar `U`.
pub fn sample_bures(d: usize, rng: &mut SampleRng) -> Result<BipartiteState> {
    check_dim(d)?;
    let n = d * d;
    let g = ginibre(n, rng);
    let mut u = haar_unitary(n, rng);
    for i in 0..n {
        u[(i, i)] += c64(1.0, 0.0);
    }
    let a = u.matmul(&g);
    BipartiteState::from_unnormalized(a.mul_adjoint(&a), Dims::square(d))
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("local dimension {d} < 2")));
    }
    Ok(())
}

/// Probability measure on density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Bures,
    #[serde(rename = "hs")]
    HilbertSchmidt,
}

impl Measure {
    pub fn label(&self) -> &'static str {
        match self {
            Measure::Bures => "bures",
            Measure::HilbertSchmidt => "hs",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bures" => Ok(Measure::Bures),
            "hs" | "hilbert-schmidt" | "hilbertschmidt" => Ok(Measure::HilbertSchmidt),
            other => Err(Error::InvalidArgument(format!(
                "unknown measure '{other}' (expected bures or hs)"
            ))),
        }
    }
}

/// Which ensemble to draw from, for which local dimension, under which seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub measure: Measure,
    pub d: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(measure: Measure, d: usize, seed: u64) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { measure, d, seed })
    }

    /// Sample number `index`; identical for any caller and thread.
    pub fn sample(&self, index: u64) -> Result<BipartiteState> {
        let mut rng = SampleRng::stream(self.seed, index);
        match self.measure {
            Measure::Bures => sample_bures(self.d, &mut rng),
            Measure::HilbertSchmidt => sample_hs(self.d, &mut rng),
        }
    }
}
