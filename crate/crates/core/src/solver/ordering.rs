//! Is a witness weaker than a set of witnesses?
//!
//! ```text
//! min Tr(W ρ)  s.t.  ρ ⪰ 0,  Tr ρ = 1,  Tr(W_k ρ) ≥ 0  for all k
//! ```
//!
//! `W` is weaker than `{W_k}` when the minimum is non-negative: every state
//! it detects is detected by some member of the set. ADMM splits the
//! problem into an affine part over `(ρ, s)` with `s_k = Tr(W_k ρ)` and a
//! cone part `ρ ⪰ 0, s ≥ 0`. Dual multipliers give a certified lower bound
//! `λ_min(W - Σ y_k W_k)` for any `y ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, eigh_warm, ComplexMatrix};
use crate::witness::Witness;

/// Minimum value at or above which the witness counts as weaker.
pub const ORDERING_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderingOptions {
    pub max_iterations: usize,
    /// Gap between certified bounds at which the solve stops regardless.
    pub gap_tolerance: f64,
}

impl Default for OrderingOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            gap_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrderingVerdict {
    pub weaker: bool,
    /// Best feasible value found (upper bound on the minimum).
    pub worst_value: f64,
    /// Certified lower bound on the minimum.
    pub lower_bound: f64,
    /// Feasible state attaining `worst_value`; a counterexample when not weaker.
    pub certificate: ComplexMatrix,
    pub iterations: usize,
    pub note: Option<String>,
}

/// Dense Cholesky factor of a small SPD matrix, row-major lower triangle.
struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    fn new(a: &[f64], n: usize) -> Result<Self> {
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::InvalidArgument(
                            "constraint Gram matrix is not positive definite".into(),
                        ));
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[i * n + k] * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] -= self.l[k * n + i] * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        y
    }
}

struct AffineSet<'a> {
    ws: &'a [ComplexMatrix],
    chol: Cholesky,
}

impl<'a> AffineSet<'a> {
    fn new(ws: &'a [ComplexMatrix], n: usize) -> Result<Self> {
        let m = ws.len() + 1;
        let mut gram = vec![0.0; m * m];
        gram[0] = n as f64;
        for (k, w) in ws.iter().enumerate() {
            let t = w.trace().re;
            gram[k + 1] = t;
            gram[(k + 1) * m] = t;
            for (j, v) in ws.iter().enumerate().skip(k) {
                let g = w.inner(v).re + if j == k { 1.0 } else { 0.0 };
                gram[(k + 1) * m + j + 1] = g;
                gram[(j + 1) * m + k + 1] = g;
            }
        }
        Ok(Self {
            ws,
            chol: Cholesky::new(&gram, m)?,
        })
    }

    /// Projects `(x, s)` onto `{Tr x = 1, Tr(W_k x) = s_k}`.
    fn project(&self, x: &ComplexMatrix, s: &[f64]) -> (ComplexMatrix, Vec<f64>) {
        let mut resid = Vec::with_capacity(self.ws.len() + 1);
        resid.push(x.trace().re - 1.0);
        for (w, sk) in self.ws.iter().zip(s) {
            resid.push(w.inner(x).re - sk);
        }
        let mu = self.chol.solve(&resid);
        let mut out = x.clone();
        let n = x.rows();
        for i in 0..n {
            out[(i, i)] -= c64(mu[0], 0.0);
        }
        for (w, m) in self.ws.iter().zip(&mu[1..]) {
            for (o, v) in out.as_mut_slice().iter_mut().zip(w.as_slice()) {
                *o -= v * m;
            }
        }
        let s_out = s.iter().zip(&mu[1..]).map(|(sk, m)| sk + m).collect();
        (out, s_out)
    }
}

/// Nearest-feasible repair: normalize, then mix with identity/n until every
/// constraint holds. `None` when some violated constraint is also violated
/// by the maximally mixed state.
fn feasible_point(z: &ComplexMatrix, ws: &[ComplexMatrix]) -> Option<ComplexMatrix> {
    let n = z.rows();
    let tr = z.trace().re;
    if tr <= 0.0 {
        return None;
    }
    let rho = z.scale_real(1.0 / tr);
    let mut lambda: f64 = 0.0;
    for w in ws {
        let a = w.inner(&rho).re;
        if a >= 0.0 {
            continue;
        }
        let b = w.trace().re / n as f64;
        if b <= 0.0 {
            return None;
        }
        lambda = lambda.max(-a / (b - a));
    }
    let mixed = ComplexMatrix::identity(n).scale_real(lambda / n as f64);
    Some(&rho.scale_real(1.0 - lambda) + &mixed)
}

/// Ordering SDP on bare Hermitian observables.
pub fn ordering_sdp(
    w: &ComplexMatrix,
    ws: &[ComplexMatrix],
    options: &OrderingOptions,
) -> Result<OrderingVerdict> {
    let n = w.rows();
    if !w.is_square() || ws.iter().any(|v| v.rows() != n || !v.is_square()) {
        return Err(Error::Dimension("witnesses must share one square shape".into()));
    }
    for m in std::iter::once(w).chain(ws) {
        if m.hermiticity_defect() > 1e-9 {
            return Err(Error::NotHermitian {
                deviation: m.hermiticity_defect(),
                tolerance: 1e-9,
            });
        }
    }
    let mixed = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
    let scale = w.frobenius_norm().max(1.0);
    let c = w.hermitian_part().scale_real(1.0 / scale);
    let ws_h: Vec<ComplexMatrix> = ws.iter().map(|v| v.hermitian_part()).collect();
    let affine = AffineSet::new(&ws_h, n)?;
    let m = ws_h.len();

    let mut sigma = 1.0;
    let mut z = mixed.clone();
    let mut t: Vec<f64> = ws_h.iter().map(|v| v.inner(&mixed).re).collect();
    let mut u = ComplexMatrix::zeros(n, n);
    let mut uv = vec![0.0; m];
    let mut basis = ComplexMatrix::identity(n);
    let mixed_feasible = ws.iter().all(|v| v.inner(&mixed).re >= 0.0);
    let mut best_upper = if mixed_feasible {
        w.inner(&mixed).re
    } else {
        f64::INFINITY
    };
    let mut best_rho = mixed.clone();
    let mut best_lower = f64::NEG_INFINITY;

    for it in 1..=options.max_iterations {
        let vx = &(&z - &u) - &c.scale_real(1.0 / sigma);
        let vs: Vec<f64> = t.iter().zip(&uv).map(|(a, b)| a - b).collect();
        let (x, s) = affine.project(&vx, &vs);

        let wx = (&x + &u).hermitian_part();
        let eig = eigh_warm(&wx, &basis)?;
        let z_new = eig.reconstruct_with(|l| l.max(0.0));
        basis = eig.vectors;
        let t_new: Vec<f64> = s.iter().zip(&uv).map(|(a, b)| (a + b).max(0.0)).collect();

        u = &wx - &z_new;
        for k in 0..m {
            uv[k] += s[k] - t_new[k];
        }
        let mut rp = (&x - &z_new).frobenius_norm().powi(2);
        let mut rd = (&z_new - &z).frobenius_norm().powi(2);
        for k in 0..m {
            rp += (s[k] - t_new[k]).powi(2);
            rd += (t_new[k] - t[k]).powi(2);
        }
        let (rp, rd) = (rp.sqrt(), sigma * rd.sqrt());
        z = z_new;
        t = t_new;

        if it % 10 == 0 || it == options.max_iterations {
            // Multipliers of the slack constraints: y_k = -σ u_k ≥ 0.
            let mut k_op = w.hermitian_part();
            for (v, uk) in ws_h.iter().zip(&uv) {
                let y = (-sigma * uk * scale).max(0.0);
                if y > 0.0 {
                    k_op = &k_op - &v.scale_real(y);
                }
            }
            best_lower = best_lower.max(eigh(&k_op)?.min());
            if let Some(rho) = feasible_point(&z, &ws_h) {
                let val = w.inner(&rho).re;
                if val < best_upper {
                    best_upper = val;
                    best_rho = rho;
                }
            }
            let decided = best_lower >= -ORDERING_TOLERANCE || best_upper < -ORDERING_TOLERANCE;
            if decided || best_upper - best_lower <= options.gap_tolerance {
                return Ok(OrderingVerdict {
                    weaker: best_upper >= -ORDERING_TOLERANCE,
                    worst_value: best_upper,
                    lower_bound: best_lower,
                    certificate: best_rho,
                    iterations: it,
                    note: (!best_upper.is_finite())
                        .then(|| "no feasible state found; constraint set may be empty".to_string()),
                });
            }
        }

        if it % 10 == 0 {
            if rp > 10.0 * rd && sigma < 1e4 {
                sigma *= 2.0;
                u = u.scale_real(0.5);
                uv.iter_mut().for_each(|x| *x *= 0.5);
            } else if rd > 10.0 * rp && sigma > 1e-4 {
                sigma /= 2.0;
                u = u.scale_real(2.0);
                uv.iter_mut().for_each(|x| *x *= 2.0);
            }
        }
    }
    Err(Error::Unconverged {
        iterations: options.max_iterations,
        primal_residual: best_upper,
        dual_residual: best_lower,
    })
}

/// Decides whether `w` is weaker than the set `ws`.
pub fn witness_weaker_than(w: &Witness, ws: &[Witness]) -> Result<OrderingVerdict> {
    let set: Vec<ComplexMatrix> = ws.iter().map(|x| x.observable.clone()).collect();
    ordering_sdp(&w.observable, &set, &OrderingOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::max_entangled;
    use crate::witness::{fidelity_witness, rfw_set};

    #[test]
    fn cholesky_solves() {
        let a = [4.0, 2.0, 2.0, 3.0];
        let x = Cholesky::new(&a, 2).unwrap().solve(&[2.0, 1.0]);
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn self_membership_is_weaker() {
        let w = fidelity_witness(&max_entangled(3).unwrap(), crate::linalg::Dims::square(3), 1).unwrap();
        let v = witness_weaker_than(&w, std::slice::from_ref(&w)).unwrap();
        assert!(v.weaker, "{v:?}");
        assert!(v.lower_bound >= -1e-7);
    }

    #[test]
    fn phi_plus_witness_weaker_than_rfws() {
        let w = fidelity_witness(&max_entangled(2).unwrap(), crate::linalg::Dims::square(2), 1).unwrap();
        let set = rfw_set(2).unwrap();
        let v = witness_weaker_than(&w, &set).unwrap();
        assert!(v.weaker);
    }

    #[test]
    fn unconstrained_witness_is_not_weaker_than_empty_set() {
        let w = fidelity_witness(&max_entangled(2).unwrap(), crate::linalg::Dims::square(2), 1).unwrap();
        let v = witness_weaker_than(&w, &[]).unwrap();
        assert!(!v.weaker);
        // Oracle: min over states of Tr(Wρ) = λ_min(W) = 1/2 - 1.
        assert!((v.worst_value + 0.5).abs() < 1e-6);
        assert!(v.lower_bound <= v.worst_value + 1e-12);
        assert!((v.certificate.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rfw_not_weaker_than_another_rfw() {
        let set = rfw_set(3).unwrap();
        let v = witness_weaker_than(&set[0], &set[1..2]).unwrap();
        assert!(!v.weaker);
        // The counterexample is detected by set[0] only.
        assert!(set[0].observable.inner(&v.certificate).re < -1e-7);
        assert!(set[1].observable.inner(&v.certificate).re >= -1e-9);
    }

    #[test]
    fn schmidt_witness_not_weaker_than_sampled_max_entangled_set() {
        use crate::linalg::{schmidt_form_state, Dims};
        use crate::states::random::{haar_unitary, SampleRng};
        use crate::witness::Witness;

        let d = 3;
        let dims = Dims::square(d);
        let s2 = fidelity_witness(&schmidt_form_state(&[0.9, 0.3, 0.316], d), dims, 2).unwrap();
        let phi = max_entangled(d).unwrap();
        let set: Vec<Witness> = (0..64)
            .map(|k| {
                let u = haar_unitary(d, &mut SampleRng::stream(99, k));
                let rotated = ComplexMatrix::identity(d).kron(&u).matvec(&phi);
                Witness::from_target(rotated, dims, 2.0 / d as f64, 2).unwrap()
            })
            .collect();
        let v = witness_weaker_than(&s2, &set).unwrap();
        assert!(!v.weaker);
        assert!(s2.observable.inner(&v.certificate).re < -1e-7);
        for w in &set {
            assert!(w.observable.inner(&v.certificate).re >= -1e-9);
        }
    }
}
