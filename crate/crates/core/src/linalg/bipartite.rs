//! Operations that act on one factor of a bipartite operator.
//!
//! A composite index `(i, j)` with `i` on A and `j` on B maps to `i * d_b + j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{vec_norm, ComplexMatrix};
use super::svd::svd;
use crate::error::{Error, Result};

/// Local dimensions `(d_A, d_B)` of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }

    pub fn square(d: usize) -> Self {
        Self { a: d, b: d }
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn is_square(&self) -> bool {
        self.a == self.b
    }

    /// Common local dimension, or an error for `d_A != d_B`.
    pub fn local(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.a)
        } else {
            Err(Error::Dimension(format!(
                "equal local dimensions required, got {}x{}",
                self.a, self.b
            )))
        }
    }

    fn check_operator(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, local dimensions {}x{} need {n}x{n}",
                m.rows(),
                m.cols(),
                self.a,
                self.b
            )));
        }
        Ok(())
    }
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out `which`, returning the reduced operator on the other factor.
pub fn partial_trace(m: &ComplexMatrix, dims: Dims, which: Subsystem) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    let (da, db) = (dims.a, dims.b);
    Ok(match which {
        Subsystem::B => ComplexMatrix::from_fn(da, da, |i, k| {
            (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()
        }),
        Subsystem::A => ComplexMatrix::from_fn(db, db, |j, l| {
            (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()
        }),
    })
}

/// Transposes the indices of subsystem `which`.
pub fn partial_transpose(m: &ComplexMatrix, dims: Dims, which: Subsystem) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    let db = dims.b;
    let n = dims.total();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        match which {
            Subsystem::B => m[(i * db + l, k * db + j)],
            Subsystem::A => m[(k * db + j, i * db + l)],
        }
    }))
}

/// Realignment `R(m)_{(ij),(kl)} = m_{(ik),(jl)}`, shape `d_A² x d_B²`.
pub fn realign(m: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    let (da, db) = (dims.a, dims.b);
    Ok(ComplexMatrix::from_fn(da * da, db * db, |r, c| {
        let (i, j) = (r / da, r % da);
        let (k, l) = (c / db, c % db);
        m[(i * db + k, j * db + l)]
    }))
}

/// Inverse of [`realign`].
pub fn unrealign(r: &ComplexMatrix, dims: Dims) -> Result<ComplexMatrix> {
    let (da, db) = (dims.a, dims.b);
    if r.rows() != da * da || r.cols() != db * db {
        return Err(Error::Dimension(format!(
            "realigned operator is {}x{}, expected {}x{}",
            r.rows(),
            r.cols(),
            da * da,
            db * db
        )));
    }
    let n = dims.total();
    Ok(ComplexMatrix::from_fn(n, n, |row, col| {
        let (i, k) = (row / db, row % db);
        let (j, l) = (col / db, col % db);
        r[(i * da + j, k * db + l)]
    }))
}

/// Schmidt form `|ψ> = Σ_k s_k |a_k>|b_k>` of a bipartite pure state.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonzero coefficients, descending, with unit two-norm.
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<Complex64>>,
    pub right: Vec<Vec<Complex64>>,
    pub dims: Dims,
}

/// Coefficients at or below this value are dropped from the Schmidt rank.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Coefficients padded with zeros to length `min(d_A, d_B)`.
    pub fn padded_coefficients(&self) -> Vec<f64> {
        let mut s = self.coefficients.clone();
        s.resize(self.dims.a.min(self.dims.b), 0.0);
        s
    }

    pub fn reconstruct(&self) -> Vec<Complex64> {
        let db = self.dims.b;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dims.total()];
        for (k, &s) in self.coefficients.iter().enumerate() {
            for (i, a) in self.left[k].iter().enumerate() {
                for (j, b) in self.right[k].iter().enumerate() {
                    out[i * db + j] += a * b * s;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition through the SVD of the coefficient matrix.
/// The input is normalized first; the zero vector is rejected.
pub fn schmidt_decompose(psi: &[Complex64], dims: Dims) -> Result<SchmidtDecomposition> {
    if psi.len() != dims.total() {
        return Err(Error::Dimension(format!(
            "state vector has length {}, expected {}",
            psi.len(),
            dims.total()
        )));
    }
    let norm = vec_norm(psi);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidArgument("cannot decompose the zero vector".into()));
    }
    let coef = ComplexMatrix::from_fn(dims.a, dims.b, |i, j| psi[i * dims.b + j] / norm);
    let dec = svd(&coef)?;
    let mut coefficients = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (k, &s) in dec.values.iter().enumerate() {
        if s <= SCHMIDT_CUTOFF {
            break;
        }
        coefficients.push(s);
        left.push(dec.left.column(k));
        right.push(dec.right.column(k).iter().map(|z| z.conj()).collect());
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
        dims,
    })
}

/// `Σ_i s_i |ii>` for the given coefficients (zero-based product basis).
pub fn schmidt_form_state(coefficients: &[f64], d: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, &s) in coefficients.iter().enumerate().take(d) {
        psi[i * d + i] = Complex64::new(s, 0.0);
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh::eigvalsh;
    use crate::linalg::matrix::c64;
    use crate::linalg::svd::trace_norm;

    fn phi_plus(d: usize) -> ComplexMatrix {
        let v = schmidt_form_state(&vec![1.0 / (d as f64).sqrt(); d], d);
        ComplexMatrix::outer(&v)
    }

    fn basis_projector(d: usize, idx: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(idx, idx)] = c64(1.0, 0.0);
        m
    }

    #[test]
    fn marginal_of_phi_plus_is_maximally_mixed() {
        let rho = phi_plus(2);
        let red = partial_trace(&rho, Dims::square(2), Subsystem::B).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn trace_of_product_structure() {
        let ra = ComplexMatrix::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]).scale_real(2.0);
        let rb = ComplexMatrix::from_fn(3, 3, |i, j| if i == j { c64(1.0 / 3.0, 0.0) } else { c64(0.0, 0.05 * (j as f64 - i as f64)) });
        let m = ra.kron(&rb);
        let red = partial_trace(&m, Dims::new(2, 3), Subsystem::A).unwrap();
        assert!(red.max_abs_diff(&rb.scale_real(2.0)) < 1e-14);
        let red_a = partial_trace(&m, Dims::new(2, 3), Subsystem::B).unwrap();
        assert!(red_a.max_abs_diff(&ra) < 1e-14);
    }

    #[test]
    fn trace_of_basis_product() {
        // |01><01|
        let m = basis_projector(4, 1);
        let red = partial_trace(&m, Dims::square(2), Subsystem::B).unwrap();
        assert!(red.max_abs_diff(&basis_projector(2, 0)) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = ComplexMatrix::identity(5);
        assert!(partial_trace(&m, Dims::square(2), Subsystem::A).is_err());
        assert!(partial_transpose(&m, Dims::square(2), Subsystem::B).is_err());
        assert!(realign(&m, Dims::square(2)).is_err());
    }

    #[test]
    fn partial_transpose_of_phi_plus() {
        let pt = partial_transpose(&phi_plus(2), Dims::square(2), Subsystem::B).unwrap();
        let ev = eigvalsh(&pt).unwrap();
        assert!((ev[3] + 0.5).abs() < 1e-14);
        let back = partial_transpose(&pt, Dims::square(2), Subsystem::B).unwrap();
        assert_eq!(back, phi_plus(2));
    }

    #[test]
    fn partial_transpose_keeps_maximally_mixed() {
        let m = ComplexMatrix::identity(9).scale_real(1.0 / 9.0);
        assert_eq!(partial_transpose(&m, Dims::square(3), Subsystem::A).unwrap(), m);
    }

    #[test]
    fn realignment_trace_norms() {
        // Oracle values from explicit rearrangement: phi+ -> 2, I/4 -> 1/2, |00> -> 1.
        let d2 = Dims::square(2);
        assert!((trace_norm(&realign(&phi_plus(2), d2).unwrap()).unwrap() - 2.0).abs() < 1e-13);
        let mm = ComplexMatrix::identity(4).scale_real(0.25);
        assert!((trace_norm(&realign(&mm, d2).unwrap()).unwrap() - 0.5).abs() < 1e-13);
        let p00 = basis_projector(4, 0);
        assert!((trace_norm(&realign(&p00, d2).unwrap()).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn realign_index_rule_and_inverse() {
        let dims = Dims::new(2, 3);
        let m = ComplexMatrix::from_fn(6, 6, |r, c| c64(r as f64, c as f64 * 0.1));
        let r = realign(&m, dims).unwrap();
        assert_eq!((r.rows(), r.cols()), (4, 9));
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(r[(i * 2 + j, k * 3 + l)], m[(i * 3 + k, j * 3 + l)]);
                    }
                }
            }
        }
        assert_eq!(unrealign(&r, dims).unwrap(), m);
    }

    #[test]
    fn schmidt_examples() {
        let zero_zero = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
        let s = schmidt_decompose(&zero_zero, Dims::square(2)).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)];
        let s = schmidt_decompose(&phi, Dims::square(2)).unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.coefficients[0] - h).abs() < 1e-14 && (s.coefficients[1] - h).abs() < 1e-14);

        // SVD oracle on [[1,1],[1,0]]/sqrt3.
        let r = 1.0 / 3f64.sqrt();
        let psi = [c64(r, 0.0), c64(r, 0.0), c64(r, 0.0), c64(0.0, 0.0)];
        let s = schmidt_decompose(&psi, Dims::square(2)).unwrap();
        assert!((s.coefficients[0] - ((3.0 + 5f64.sqrt()) / 6.0).sqrt()).abs() < 1e-13);
        assert!((s.coefficients[1] - ((3.0 - 5f64.sqrt()) / 6.0).sqrt()).abs() < 1e-13);
        let back = s.reconstruct();
        for (a, b) in back.iter().zip(&psi) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn schmidt_rejects_zero_vector() {
        let z = [c64(0.0, 0.0); 4];
        assert!(schmidt_decompose(&z, Dims::square(2)).is_err());
    }
}
