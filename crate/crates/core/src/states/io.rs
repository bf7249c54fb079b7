//! JSON documents for density matrices and pure states.
//!
//! State file: `{"d_a": int, "d_b": int, "re": [[...]], "im": [[...]]}` with
//! row-major square arrays. Numbers are written with 17 significant digits.

use num_complex::Complex64;
use serde::Deserialize;

use super::state::BipartiteState;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, Dims};

#[derive(Debug, Deserialize)]
struct StateDoc {
    d_a: usize,
    d_b: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
struct VectorDoc {
    d_a: usize,
    d_b: usize,
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

/// Formats a float with 17 significant digits as a JSON number.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    format!("{x:.16e}")
}

pub(crate) fn write_real_rows(out: &mut String, m: &ComplexMatrix, part: impl Fn(Complex64) -> f64) {
    out.push('[');
    for i in 0..m.rows() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for j in 0..m.cols() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format_f64(part(m[(i, j)])));
        }
        out.push(']');
    }
    out.push(']');
}

pub(crate) fn write_real_vec(out: &mut String, v: &[f64]) {
    out.push('[');
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format_f64(*x));
    }
    out.push(']');
}

/// Builds a complex matrix from nested real and (optional) imaginary rows.
pub(crate) fn matrix_from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<ComplexMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, |r| r.len());
    if re.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged 're' array".into()));
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("'im' array does not match 're'".into()));
        }
    }
    let data = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| c64(re[i][j], im.map_or(0.0, |m| m[i][j])))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data)
}

/// Parses a state document and checks every density-matrix invariant.
pub fn load_state(bytes: &[u8]) -> Result<BipartiteState> {
    let doc: StateDoc = serde_json::from_slice(bytes)?;
    let n = doc.d_a * doc.d_b;
    if doc.re.len() != n {
        return Err(Error::Dimension(format!(
            "d_a * d_b = {n} but 're' has {} rows",
            doc.re.len()
        )));
    }
    let m = matrix_from_parts(&doc.re, doc.im.as_deref())?;
    if m.cols() != n {
        return Err(Error::Dimension(format!("'re' rows have {} columns, expected {n}", m.cols())));
    }
    BipartiteState::new(m, Dims::new(doc.d_a, doc.d_b))
}

/// Serializes a state to its JSON document.
pub fn save_state(state: &BipartiteState) -> Vec<u8> {
    let dims = state.dims();
    let mut out = String::new();
    out.push_str(&format!("{{\"d_a\": {}, \"d_b\": {}, \"re\": ", dims.a, dims.b));
    write_real_rows(&mut out, state.rho(), |z| z.re);
    out.push_str(", \"im\": ");
    write_real_rows(&mut out, state.rho(), |z| z.im);
    out.push_str("}\n");
    out.into_bytes()
}

/// Parses a pure-state document `{"d_a", "d_b", "re": [...], "im": [...]}`.
pub fn load_pure_state(bytes: &[u8]) -> Result<(Vec<Complex64>, Dims)> {
    let doc: VectorDoc = serde_json::from_slice(bytes)?;
    let n = doc.d_a * doc.d_b;
    if doc.re.len() != n || doc.im.as_ref().is_some_and(|im| im.len() != n) {
        return Err(Error::Dimension(format!("state vector must have {n} entries")));
    }
    let psi: Vec<Complex64> = (0..n)
        .map(|i| c64(doc.re[i], doc.im.as_ref().map_or(0.0, |im| im[i])))
        .collect();
    if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok((psi, Dims::new(doc.d_a, doc.d_b)))
}

/// Serializes a pure state vector.
pub fn save_pure_state(psi: &[Complex64], dims: Dims) -> Vec<u8> {
    let mut out = format!("{{\"d_a\": {}, \"d_b\": {}, \"re\": ", dims.a, dims.b);
    write_real_vec(&mut out, &psi.iter().map(|z| z.re).collect::<Vec<_>>());
    out.push_str(", \"im\": ");
    write_real_vec(&mut out, &psi.iter().map(|z| z.im).collect::<Vec<_>>());
    out.push_str("}\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{families, random::SamplerConfig, Measure};

    #[test]
    fn round_trip_is_exact() {
        let cfg = SamplerConfig::new(Measure::Bures, 3, 42).unwrap();
        for idx in 0..5 {
            let s = cfg.sample(idx).unwrap();
            let back = load_state(&save_state(&s)).unwrap();
            assert_eq!(back.rho().as_slice(), s.rho().as_slice());
        }
    }

    #[test]
    fn writer_uses_seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(-0.25), "-2.5000000000000000e-1");
        let text = String::from_utf8(save_state(&families::werner_qubit(0.3).unwrap())).unwrap();
        assert!(text.contains("\"re\": [["));
    }

    #[test]
    fn reports_bad_trace() {
        let doc = br#"{"d_a": 1, "d_b": 2, "re": [[0.7, 0], [0, 0.7]], "im": [[0, 0], [0, 0]]}"#;
        let err = load_state(doc).unwrap_err();
        match err {
            Error::Normalization { trace } => assert!((trace - 1.4).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_text(doc).contains("1.4"));
    }

    fn err_text(doc: &[u8]) -> String {
        load_state(doc).unwrap_err().to_string()
    }

    #[test]
    fn reports_negative_eigenvalue() {
        let doc = br#"{"d_a": 2, "d_b": 1, "re": [[1.001, 0], [0, -0.001]]}"#;
        assert!(matches!(load_state(doc), Err(Error::Positivity { .. })));
        assert!(err_text(doc).contains("positivity"));
    }

    #[test]
    fn reports_malformed_documents() {
        assert!(matches!(load_state(b"{not json"), Err(Error::Parse(_))));
        let doc = br#"{"d_a": 2, "d_b": 2, "re": [[1.0]]}"#;
        assert!(matches!(load_state(doc), Err(Error::Dimension(_))));
    }

    #[test]
    fn pure_state_round_trip() {
        let psi = families::max_entangled(3).unwrap();
        let (back, dims) = load_pure_state(&save_pure_state(&psi, Dims::square(3))).unwrap();
        assert_eq!(dims, Dims::square(3));
        assert_eq!(back, psi);
    }
}
