//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{c64, ComplexMatrix};
use crate::error::{Error, Result};

/// Largest tolerated deviation from Hermiticity, relative to the largest entry.
/// Inputs within it are symmetrized before decomposition.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// Spectrum of a Hermitian matrix, eigenvalues sorted descending and
/// eigenvectors stored as the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }

    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.column(i)
    }

    /// Rebuilds `Σ f(λ_i) |v_i><v_i|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = c64(0.0, 0.0);
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * w;
                }
            }
            acc
        })
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = m
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITIAN_TOLERANCE * scale,
        });
    }
    Ok(())
}

/// Full spectrum of a Hermitian matrix.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(m)?;
    Ok(jacobi(m.hermitian_part(), Some(ComplexMatrix::identity(m.rows()))))
}

/// Like [`eigh`], but first rotates into the columns of `guess` (a unitary).
/// When `guess` nearly diagonalizes `m` this needs only one or two sweeps.
pub fn eigh_warm(m: &ComplexMatrix, guess: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(m)?;
    if guess.rows() != m.rows() || !guess.is_square() {
        return Err(Error::Dimension("warm-start basis has the wrong shape".into()));
    }
    let rotated = guess.adjoint_mul(&m.hermitian_part()).matmul(guess);
    Ok(jacobi(rotated.hermitian_part(), Some(guess.clone())))
}

/// Eigenvalues only, descending.
pub fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    Ok(jacobi(m.hermitian_part(), None).values)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    eigvalsh(m).map(|v| v[0])
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    eigvalsh(m).map(|v| v[v.len() - 1])
}

fn off_diagonal_sqr(a: &[Complex64], n: usize) -> f64 {
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += a[i * n + j].norm_sqr();
            }
        }
    }
    off
}

fn jacobi(mut m: ComplexMatrix, basis: Option<ComplexMatrix>) -> HermitianEig {
    let n = m.rows();
    let mut v = basis;
    let frob_sqr = m.frobenius_norm().powi(2);
    let a = m.as_mut_slice();
    let target = (f64::EPSILON * 1e-2) * (f64::EPSILON * 1e-2) * frob_sqr.max(f64::MIN_POSITIVE);

    let mut previous = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_sqr(a, n);
        if off <= target || off >= previous {
            break;
        }
        previous = off;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // e^{-i arg(a_pq)}
                let e = apq.conj() / g;
                let jqp = -e * s;
                let jqq = e * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * jqp;
                    a[k * n + q] = akp * s + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * jqp.conj();
                    a[q * n + k] = apk * s + aqk * jqq.conj();
                }
                a[p * n + q] = c64(0.0, 0.0);
                a[q * n + p] = c64(0.0, 0.0);
                a[p * n + p] = c64(app - t * g, 0.0);
                a[q * n + q] = c64(aqq + t * g, 0.0);

                if let Some(v) = v.as_mut() {
                    let vd = v.as_mut_slice();
                    for k in 0..n {
                        let vkp = vd[k * n + p];
                        let vkq = vd[k * n + q];
                        vd[k * n + p] = vkp * c + vkq * jqp;
                        vd[k * n + q] = vkp * s + vkq * jqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = match v {
        Some(v) => ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]),
        None => ComplexMatrix::zeros(0, 0),
    };
    HermitianEig { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vec_inner;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn residual(m: &ComplexMatrix, e: &HermitianEig) -> f64 {
        (0..m.rows())
            .map(|i| {
                let v = e.vector(i);
                let mv = m.matvec(&v);
                mv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * e.values[i]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_spectrum() {
        let e = eigh(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_with_standard_basis() {
        let e = eigh(&ComplexMatrix::diag_real(&[-1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![3.0, -1.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let m = pauli_x();
        let e = eigh(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        assert!(residual(&m, &e) < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let overlap = vec_inner(&e.vector(0), &[c64(h, 0.0), c64(h, 0.0)]);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_residual() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| {
            let re = ((i + 2 * j) as f64).sin() + ((j + 2 * i) as f64).sin();
            let im = if i == j {
                0.0
            } else {
                ((i * j) as f64 + 0.5).cos() * if i < j { 1.0 } else { -1.0 }
            };
            c64(re, im)
        });
        let e = eigh(&m).unwrap();
        assert!(residual(&m, &e) < 1e-12);
        let gram = e.vectors.adjoint_mul(&e.vectors);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);
        assert!(e.reconstruct_with(|l| l).max_abs_diff(&m) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn warm_start_matches_cold() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| {
            c64((i + j) as f64, if i == j { 0.0 } else { i as f64 - j as f64 })
        });
        let cold = eigh(&m).unwrap();
        let warm = eigh_warm(&m, &cold.vectors).unwrap();
        for (a, b) in cold.values.iter().zip(&warm.values) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(residual(&m, &warm) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eigh(&rect), Err(Error::Dimension(_))));
    }

    #[test]
    fn small_asymmetry_is_symmetrized() {
        let mut m = pauli_x();
        m[(0, 1)] = c64(1.0 + 1e-12, 0.0);
        let e = eigh(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-11);
    }
}
