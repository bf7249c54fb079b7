//! Classification cascade and Monte Carlo tables.
//!
//! Cheapest test first: partial transpose, then the exact qubit test (d = 2)
//! or the `X_d` eigenvalue bound, then the overlap SDP, then see-saw.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{ccnr_check, obs2_qubit_faithful, obs3a_bound, ppt_check, Verdict as Side};
use crate::error::{Error, Result};
use crate::seesaw::{faithful_via_seesaw, max_singlet_fraction, SeesawOptions};
use crate::solver::{obs3_verdict, sdp_max_overlap, OverlapVerdict, SdpOptions, SdpStatus};
use crate::states::{BipartiteState, Measure, SamplerConfig};

/// Slack allowed in the chain `see-saw ≤ SDP ≤ λ_max(X_d)`.
pub const BOUND_CHAIN_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaithfulnessVerdict {
    PptUnfaithful,
    #[serde(rename = "unfaithful-3a")]
    Unfaithful3a,
    #[serde(rename = "unfaithful-3b")]
    Unfaithful3b,
    #[serde(rename = "faithful-3c")]
    Faithful3c,
    FaithfulSeesaw,
    Undecided,
}

impl FaithfulnessVerdict {
    pub const ALL: [FaithfulnessVerdict; 6] = [
        Self::PptUnfaithful,
        Self::Unfaithful3a,
        Self::Unfaithful3b,
        Self::Faithful3c,
        Self::FaithfulSeesaw,
        Self::Undecided,
    ];

    pub fn is_faithful(self) -> bool {
        matches!(self, Self::Faithful3c | Self::FaithfulSeesaw)
    }

    pub fn is_unfaithful(self) -> bool {
        matches!(self, Self::PptUnfaithful | Self::Unfaithful3a | Self::Unfaithful3b)
    }

    /// CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Self::PptUnfaithful => "ppt",
            Self::Unfaithful3a => "uff3a",
            Self::Unfaithful3b => "uff3b",
            Self::Faithful3c => "ff3c",
            Self::FaithfulSeesaw => "ffseesaw",
            Self::Undecided => "undecided",
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|v| *v == self).expect("listed")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub sdp: SdpOptions,
    pub seesaw: SeesawOptions,
    /// Try see-saw on states the SDP leaves open.
    pub use_seesaw: bool,
    /// Evaluate every certificate (CCNR, full SDP, see-saw) instead of
    /// stopping at the first conclusive test.
    pub full_certificates: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            sdp: SdpOptions::default(),
            seesaw: SeesawOptions::default(),
            use_seesaw: true,
            full_certificates: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&[Complex64]> for ComplexVector {
    fn from(v: &[Complex64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpCertificate {
    pub optimum: f64,
    pub upper_bound: f64,
    pub purity: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub status: SdpStatus,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Certificates {
    pub ppt_min_eigenvalue: Option<f64>,
    pub ccnr_norm: Option<f64>,
    /// `λ_max(X_d)`.
    pub x_max_eigenvalue: Option<f64>,
    pub sdp: Option<SdpCertificate>,
    /// Best singlet fraction from see-saw.
    pub seesaw_value: Option<f64>,
    pub seesaw_restarts: Option<usize>,
    /// Maximally entangled state with fidelity above 1/d, when faithful.
    pub witness_target: Option<ComplexVector>,
    /// Fidelity of the state with `witness_target`.
    pub witness_fidelity: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    /// Singlet fraction above 1/d: teleportation beats the classical bound.
    pub teleportation_advantage: bool,
    /// Enough copies violate a Bell inequality.
    pub multi_copy_nonlocality: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Some criterion landed within the boundary margin.
    pub boundary: bool,
    pub unconverged: bool,
    /// SDP says more than 1/d but no maximally entangled state reaches it.
    pub undetected_candidate: bool,
    pub bound_chain_violation: bool,
    /// Faithful verdict without NPT and CCNR violation.
    pub consistency_exception: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub verdict: FaithfulnessVerdict,
    pub d: usize,
    pub certificates: Certificates,
    pub annotations: Annotations,
    pub flags: Flags,
    pub notes: Vec<String>,
    pub elapsed_ms: f64,
}

fn side_is_boundary(s: Side) -> bool {
    s == Side::Boundary
}

/// Runs the cascade on one state.
pub fn classify(state: &BipartiteState, config: &ClassifyConfig) -> Result<FaithfulnessReport> {
    let started = Instant::now();
    let d = state.local_dim()?;
    let threshold = 1.0 / d as f64;
    let mut cert = Certificates::default();
    let mut flags = Flags::default();
    let mut notes = Vec::new();

    let ppt = ppt_check(state)?;
    cert.ppt_min_eigenvalue = Some(ppt.value);
    flags.boundary |= side_is_boundary(ppt.verdict);

    let mut verdict = None;
    if ppt.is_satisfied() {
        verdict = Some(FaithfulnessVerdict::PptUnfaithful);
    }

    if verdict.is_none() || config.full_certificates {
        let x = if d == 2 {
            obs2_qubit_faithful(state)?
        } else {
            obs3a_bound(state)?
        };
        cert.x_max_eigenvalue = Some(x.value);
        flags.boundary |= side_is_boundary(x.verdict);
        if verdict.is_none() {
            if x.is_satisfied() {
                verdict = Some(FaithfulnessVerdict::Unfaithful3a);
            } else if d == 2 && x.is_violated() {
                verdict = Some(FaithfulnessVerdict::Faithful3c);
                // The optimal maximally entangled state is the top eigenvector of X_2.
                let top = crate::linalg::eigh(&crate::criteria::x_operator(state)?)?.vector(0);
                let phi = crate::solver::nearest_max_entangled(&top, d)?;
                cert.witness_fidelity = Some(state.fidelity(&phi));
                cert.witness_target = Some(ComplexVector::from(phi.as_slice()));
            } else if d == 2 {
                verdict = Some(FaithfulnessVerdict::Undecided);
                notes.push("qubit test within the boundary margin".into());
            }
        }
    }

    let mut sdp_open = false;
    if (verdict.is_none() && d > 2) || config.full_certificates {
        let mut opts = config.sdp.clone();
        if !config.full_certificates {
            opts.decision_threshold = Some(threshold);
        }
        let sol = sdp_max_overlap(state, &opts)?;
        cert.sdp = Some(SdpCertificate {
            optimum: sol.optimum,
            upper_bound: sol.upper_bound,
            purity: sol.purity,
            iterations: sol.iterations,
            primal_residual: sol.primal_residual,
            dual_residual: sol.dual_residual,
            status: sol.status,
        });
        if sol.status == SdpStatus::Unconverged {
            flags.unconverged = true;
            notes.push(format!("overlap SDP unconverged after {} iterations", sol.iterations));
            sdp_open = verdict.is_none();
        } else {
            let c = obs3_verdict(state, &sol)?;
            if verdict.is_none() {
                match c.verdict {
                    OverlapVerdict::Unfaithful => verdict = Some(FaithfulnessVerdict::Unfaithful3b),
                    OverlapVerdict::Faithful => {
                        verdict = Some(FaithfulnessVerdict::Faithful3c);
                        cert.witness_fidelity = c.certificate_fidelity;
                        cert.witness_target = c.certificate.as_deref().map(ComplexVector::from);
                    }
                    OverlapVerdict::Inconclusive => {
                        flags.undetected_candidate = true;
                        sdp_open = true;
                    }
                    OverlapVerdict::Boundary => {
                        flags.boundary = true;
                        sdp_open = true;
                    }
                }
            }
        }
    }

    if (sdp_open && config.use_seesaw) || config.full_certificates {
        let r = max_singlet_fraction(state, &config.seesaw)?;
        cert.seesaw_value = Some(r.best_value);
        cert.seesaw_restarts = Some(r.restarts);
        let c = faithful_via_seesaw(state, &r)?;
        if verdict.is_none() && c.faithful {
            verdict = Some(FaithfulnessVerdict::FaithfulSeesaw);
            flags.undetected_candidate = false;
            cert.witness_fidelity = Some(c.value);
            cert.witness_target = c.certificate.as_deref().map(ComplexVector::from);
        }
    }
    let verdict = verdict.unwrap_or(FaithfulnessVerdict::Undecided);
    if verdict == FaithfulnessVerdict::Undecided && flags.undetected_candidate {
        notes.push("SDP optimum above 1/d with a mixed optimizer; possibly unfaithful".into());
    }

    if verdict.is_faithful() {
        let ccnr = ccnr_check(state)?;
        cert.ccnr_norm = Some(ccnr.value);
        if !(ppt.is_violated() && ccnr.is_violated()) {
            flags.consistency_exception = true;
            notes.push("faithful verdict without NPT and CCNR violation".into());
        }
        if cert.witness_fidelity.is_none_or(|f| f <= threshold) {
            flags.consistency_exception = true;
            notes.push("faithful verdict without a certificate above 1/d".into());
        }
    } else if config.full_certificates {
        cert.ccnr_norm = Some(ccnr_check(state)?.value);
    }
    if !bound_chain_holds(&cert) {
        flags.bound_chain_violation = true;
        notes.push("see-saw <= SDP <= lambda_max(X_d) violated".into());
    }

    let faithful = verdict.is_faithful();
    Ok(FaithfulnessReport {
        verdict,
        d,
        certificates: cert,
        annotations: Annotations {
            teleportation_advantage: faithful,
            multi_copy_nonlocality: faithful,
        },
        flags,
        notes,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// `lower ≤ SDP ≤ λ_max(X_d)` on whichever values were computed, with every
/// fidelity of an explicit maximally entangled state counting as a lower value.
pub fn bound_chain_holds(cert: &Certificates) -> bool {
    let lows = [cert.seesaw_value, cert.witness_fidelity];
    let sdp = cert.sdp.as_ref().filter(|s| s.status != SdpStatus::Unconverged);
    let mid = sdp.map(|s| s.upper_bound);
    let top = cert.x_max_eigenvalue;
    for low in lows.into_iter().flatten() {
        if let Some(m) = mid {
            if low > m + BOUND_CHAIN_SLACK {
                return false;
            }
        }
        if let Some(t) = top {
            if low > t + BOUND_CHAIN_SLACK {
                return false;
            }
        }
    }
    if let (Some(s), Some(t)) = (sdp, top) {
        if s.optimum > t + BOUND_CHAIN_SLACK {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableConfig {
    pub measure: Measure,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub workers: usize,
    pub classify: ClassifyConfig,
    /// Also evaluate the full bound chain on every k-th sample (0: never).
    pub audit_every: usize,
}

impl TableConfig {
    pub fn new(measure: Measure, d: usize, n: usize, seed: u64) -> Self {
        Self {
            measure,
            d,
            n,
            seed,
            workers: 1,
            classify: ClassifyConfig::default(),
            audit_every: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableDiagnostics {
    pub boundary: usize,
    pub unconverged: usize,
    pub undetected_candidates: usize,
    pub bound_chain_violations: usize,
    pub consistency_exceptions: usize,
    /// Samples whose full chain was evaluated.
    pub audited: usize,
    /// Smallest margin `λ_max(X_d) - see-saw` seen in audits.
    pub min_audit_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: usize,
    pub measure: Measure,
    pub n: usize,
    pub seed: u64,
    pub counts: [usize; 6],
    pub fractions: [f64; 6],
    pub stderr: [f64; 6],
    pub diagnostics: TableDiagnostics,
}

impl TableRow {
    pub fn count(&self, v: FaithfulnessVerdict) -> usize {
        self.counts[v.index()]
    }

    pub fn fraction(&self, v: FaithfulnessVerdict) -> f64 {
        self.fractions[v.index()]
    }

    pub fn stderr_of(&self, v: FaithfulnessVerdict) -> f64 {
        self.stderr[v.index()]
    }

    pub fn unfaithful_fraction(&self) -> f64 {
        FaithfulnessVerdict::ALL
            .iter()
            .filter(|v| v.is_unfaithful())
            .map(|v| self.fraction(*v))
            .sum()
    }

    pub fn faithful_fraction(&self) -> f64 {
        self.fraction(FaithfulnessVerdict::Faithful3c) + self.fraction(FaithfulnessVerdict::FaithfulSeesaw)
    }

    pub fn csv_header() -> String {
        let cols: Vec<&str> = FaithfulnessVerdict::ALL.iter().map(|v| v.column()).collect();
        let errs: Vec<String> = cols.iter().map(|c| format!("{c}_stderr")).collect();
        format!("d,measure,n,{},{}", cols.join(","), errs.join(","))
    }

    pub fn csv_line(&self) -> String {
        let f: Vec<String> = self.fractions.iter().map(|x| x.to_string()).collect();
        let e: Vec<String> = self.stderr.iter().map(|x| x.to_string()).collect();
        format!("{},{},{},{},{}", self.d, self.measure, self.n, f.join(","), e.join(","))
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", Self::csv_header(), self.csv_line())
    }
}

struct SampleOutcome {
    verdict: FaithfulnessVerdict,
    flags: Flags,
    audit_margin: Option<f64>,
}

fn audit(state: &BipartiteState, config: &ClassifyConfig) -> Result<(bool, f64)> {
    let full = ClassifyConfig {
        full_certificates: true,
        ..config.clone()
    };
    let r = classify(state, &full)?;
    let c = &r.certificates;
    let margin = c.x_max_eigenvalue.unwrap_or(f64::NAN) - c.seesaw_value.unwrap_or(f64::NAN);
    Ok((bound_chain_holds(c), margin))
}

fn run_sample(cfg: &TableConfig, sampler: &SamplerConfig, index: usize) -> Result<SampleOutcome> {
    let state = sampler.sample(index as u64)?;
    let report = classify(&state, &cfg.classify)?;
    let mut flags = report.flags;
    let mut audit_margin = None;
    if cfg.audit_every > 0 && index % cfg.audit_every == 0 {
        let (ok, margin) = audit(&state, &cfg.classify)?;
        flags.bound_chain_violation |= !ok;
        audit_margin = Some(margin);
    }
    Ok(SampleOutcome {
        verdict: report.verdict,
        flags,
        audit_margin,
    })
}

/// Classifies `n` samples; the result depends only on `(measure, d, n, seed)`
/// and the classifier settings, never on the worker count.
pub fn run_table(cfg: &TableConfig) -> Result<TableRow> {
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let sampler = SamplerConfig::new(cfg.measure, cfg.d, cfg.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcomes: Vec<SampleOutcome> = pool.install(|| {
        (0..cfg.n)
            .into_par_iter()
            .map(|i| run_sample(cfg, &sampler, i))
            .collect::<Result<_>>()
    })?;

    let mut counts = [0usize; 6];
    let mut diag = TableDiagnostics::default();
    let mut min_margin: Option<f64> = None;
    for o in &outcomes {
        counts[o.verdict.index()] += 1;
        diag.boundary += o.flags.boundary as usize;
        diag.unconverged += o.flags.unconverged as usize;
        diag.undetected_candidates += o.flags.undetected_candidate as usize;
        diag.bound_chain_violations += o.flags.bound_chain_violation as usize;
        diag.consistency_exceptions += o.flags.consistency_exception as usize;
        if let Some(m) = o.audit_margin {
            diag.audited += 1;
            min_margin = Some(min_margin.map_or(m, |x: f64| x.min(m)));
        }
    }
    diag.min_audit_margin = min_margin;
    let n = cfg.n as f64;
    let fractions = counts.map(|c| c as f64 / n);
    let stderr = fractions.map(|f| (f * (1.0 - f) / n).sqrt());
    Ok(TableRow {
        d: cfg.d,
        measure: cfg.measure,
        n: cfg.n,
        seed: cfg.seed,
        counts,
        fractions,
        stderr,
        diagnostics: diag,
    })
}
