//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{c64, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `m = left · diag(values) · right†`, singular values descending.
///
/// `left` is `rows x rows` and `right` is `cols x cols`; both are unitary.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

impl Svd {
    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        ComplexMatrix::from_fn(m, n, |i, j| {
            self.values
                .iter()
                .enumerate()
                .map(|(k, &s)| self.left[(i, k)] * self.right[(j, k)].conj() * s)
                .sum()
        })
    }

    /// Unitary polar factor `left · right†` (square input only).
    pub fn polar_unitary(&self) -> ComplexMatrix {
        let k = self.values.len();
        let (m, n) = (self.left.rows(), self.right.rows());
        ComplexMatrix::from_fn(m, n, |i, j| {
            (0..k)
                .map(|c| self.left[(i, c)] * self.right[(j, c)].conj())
                .sum()
        })
    }
}

/// SVD of an arbitrary rectangular matrix.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.rows() >= m.cols() {
        Ok(hestenes(m))
    } else {
        let t = hestenes(&m.adjoint());
        Ok(Svd {
            values: t.values,
            left: t.right,
            right: t.left,
        })
    }
}

/// Singular values only, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    svd(m).map(|s| s.values)
}

/// Trace norm `Σ σ_i`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    singular_values(m).map(|s| s.iter().sum())
}

fn column_dot(a: &[Complex64], n: usize, p: usize, q: usize, rows: usize) -> Complex64 {
    (0..rows).map(|k| a[k * n + p].conj() * a[k * n + q]).sum()
}

fn column_norm_sqr(a: &[Complex64], n: usize, p: usize, rows: usize) -> f64 {
    (0..rows).map(|k| a[k * n + p].norm_sqr()).sum()
}

fn rotate_columns(
    a: &mut [Complex64],
    n: usize,
    rows: usize,
    p: usize,
    q: usize,
    (c, s, jqp, jqq): (f64, f64, Complex64, Complex64),
) {
    for k in 0..rows {
        let x = a[k * n + p];
        let y = a[k * n + q];
        a[k * n + p] = x * c + y * jqp;
        a[k * n + q] = x * s + y * jqq;
    }
}

// Requires rows >= cols.
fn hestenes(m: &ComplexMatrix) -> Svd {
    let (rows, n) = (m.rows(), m.cols());
    let mut work = m.clone();
    let mut right = ComplexMatrix::identity(n);
    {
        let a = work.as_mut_slice();
        let v = right.as_mut_slice();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha = column_norm_sqr(a, n, p, rows);
                    let beta = column_norm_sqr(a, n, q, rows);
                    let gamma = column_dot(a, n, p, q, rows);
                    let g = gamma.norm();
                    if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                    } else {
                        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    let e = gamma.conj() / g;
                    let rot = (c, s, -e * s, e * c);
                    rotate_columns(a, n, rows, p, q, rot);
                    rotate_columns(v, n, n, p, q, rot);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| column_norm_sqr(work.as_slice(), n, j, rows).sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = values.first().copied().unwrap_or(0.0);

    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(rows);
    for (&j, &s) in order.iter().zip(&values) {
        if s > sigma_max * 1e-13 && s > f64::MIN_POSITIVE {
            let col: Vec<Complex64> = (0..rows).map(|k| work[(k, j)] / s).collect();
            left_cols.push(col);
        } else {
            left_cols.push(vec![c64(0.0, 0.0); rows]);
        }
    }
    let left = orthonormal_completion(left_cols, rows);
    let right = ComplexMatrix::from_fn(n, n, |i, c| right[(i, order[c])]);
    Svd {
        values,
        left,
        right,
    }
}

/// Re-orthonormalizes the given columns in order (modified Gram-Schmidt, two
/// passes) and fills degenerate or missing columns from the standard basis.
fn orthonormal_completion(mut cols: Vec<Vec<Complex64>>, dim: usize) -> ComplexMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    let mut pending: Vec<usize> = Vec::new();
    for (idx, col) in cols.iter_mut().enumerate() {
        if project_out(col, &basis) {
            basis.push(col.clone());
        } else {
            basis.push(vec![c64(0.0, 0.0); dim]);
            pending.push(idx);
        }
    }
    while basis.len() < dim {
        pending.push(basis.len());
        basis.push(vec![c64(0.0, 0.0); dim]);
    }
    let mut unit = 0;
    for idx in pending {
        loop {
            let mut cand = vec![c64(0.0, 0.0); dim];
            cand[unit] = c64(1.0, 0.0);
            unit += 1;
            let others: Vec<Vec<Complex64>> = basis
                .iter()
                .filter(|b| b.iter().any(|z| z.norm_sqr() > 0.0))
                .cloned()
                .collect();
            if project_out(&mut cand, &others) {
                basis[idx] = cand;
                break;
            }
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| basis[j][i])
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) -> bool {
    let start = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if start == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let coef: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= coef * y;
            }
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 1e-8 * start {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}
