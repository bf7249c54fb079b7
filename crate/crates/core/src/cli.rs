//! Command-line front end: argument parsing, config files, and execution.
//!
//! Precedence is flags, then the `--config` JSON file, then defaults.
//! Exit codes: 0 success, 2 input error, 3 solver non-convergence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::harness::{classify, run_table, ClassifyConfig, FaithfulnessVerdict, TableConfig};
use crate::linalg::ComplexMatrix;
use crate::seesaw::{uqm_minimize, SeesawOptions, UqmInstance};
use crate::solver::{witness_weaker_than, SdpOptions};
use crate::states::{load_pure_state, load_state, Measure};
use crate::witness::{
    load_witness, load_witness_set, obs4_detectable, obs5_counterexample, verify_rfw_decomposition,
};

const DEFAULT_TOL: f64 = 1e-7;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_N: usize = 10_000;
const DEFAULT_TABLE_RESTARTS: usize = 50;
const DEFAULT_UQM_RESTARTS: usize = 50;

#[derive(Debug, Parser)]
#[command(
    name = "faithful",
    version,
    about = "Decide whether bipartite quantum states are detectable by fidelity-based entanglement witnesses",
    arg_required_else_help = true
)]
pub struct Cli {
    /// JSON file with default values for any flag (flags take precedence)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one state: PPT, X_d eigenvalue bound (exact qubit test for d=2),
    /// maximally-mixed-marginal overlap SDP, then see-saw over local unitaries
    Analyze(AnalyzeArgs),
    /// Monte Carlo fractions of each verdict for random states
    Table(TableArgs),
    /// Fidelity witness algebra
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Schmidt-number witnesses built on maximally entangled states
    #[command(subcommand)]
    Schmidt(SchmidtCommand),
    /// Bracket min_U sum_j |Tr(A_j^dag U)|^2 over unitaries
    Uqm(UqmArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// State file {"d_a", "d_b", "re": [[...]], "im": [[...]]}
    pub state: PathBuf,
    /// See-saw restarts [default: 50 for d <= 4, 200 above]
    #[arg(long, value_parser = positive_usize)]
    pub seesaw_restarts: Option<usize>,
    /// Certified SDP accuracy [default: 1e-7]
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Also write the report to this file
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Sampling measure: bures or hs [default: bures]
    #[arg(long)]
    pub measure: Option<Measure>,
    /// Local dimension, at least 2 (required here or in the config file)
    #[arg(long, value_parser = dimension)]
    pub d: Option<usize>,
    /// Number of samples [default: 10000]
    #[arg(long, value_parser = positive_usize)]
    pub n: Option<usize>,
    /// Seed of the per-sample random streams [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it [default: available cores]
    #[arg(long, value_parser = positive_usize)]
    pub workers: Option<usize>,
    /// See-saw restarts for states the SDP leaves open [default: 50]
    #[arg(long, value_parser = positive_usize)]
    pub seesaw_restarts: Option<usize>,
    /// Certified SDP accuracy [default: 1e-7]
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Evaluate the full bound chain on every k-th sample, 0 to disable [default: 0]
    #[arg(long)]
    pub audit_every: Option<usize>,
    /// Write the row as CSV
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Write the row as JSON
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Split the fidelity witness of a pure state into weighted relevant
    /// witnesses plus a positive remainder, and check the remainder
    Decompose {
        /// Pure state file {"d_a", "d_b", "re": [...], "im": [...]}
        psi: PathBuf,
        /// Also write the result to this file
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Is a witness weaker than a set, i.e. does the set detect everything it detects?
    Order {
        /// Witness file
        witness: PathBuf,
        /// Witness set file {"witnesses": [...]} or a JSON array
        set: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SchmidtArgs {
    /// Schmidt coefficients, comma or space separated (normalized and sorted)
    #[arg(long, value_parser = coefficient_list)]
    pub s: Option<Coefficients>,
    /// Schmidt level l (required here or in the config file)
    #[arg(long, value_parser = positive_usize)]
    pub l: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum SchmidtCommand {
    /// Detectable by some maximally entangled level-l witness iff sum(s) > sqrt(l)
    Obs4(SchmidtArgs),
    /// State detected by the level-l witness of s but by no maximally entangled one
    Obs5(SchmidtArgs),
}

#[derive(Debug, Args)]
pub struct UqmArgs {
    /// Instance file {"n": int, "matrices": [{"re": [[...]], "im": [[...]]}]}
    pub instance: PathBuf,
    /// See-saw restarts [default: 50]
    #[arg(long, value_parser = positive_usize)]
    pub restarts: Option<usize>,
}

/// Parsed coefficient list (newtype so clap keeps it a single value).
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients(pub Vec<f64>);

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn dimension(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 2 => Ok(v),
        Ok(v) => Err(format!("local dimension must be at least 2, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be a positive number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_coefficients(s: &str) -> std::result::Result<Vec<f64>, String> {
    let v: std::result::Result<Vec<f64>, _> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let v = v.map_err(|e| e.to_string())?;
    if v.is_empty() {
        return Err("empty coefficient list".into());
    }
    Ok(v)
}

fn coefficient_list(s: &str) -> std::result::Result<Coefficients, String> {
    parse_coefficients(s).map(Coefficients)
}

/// Values a config file may supply; same names as the flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub measure: Option<Measure>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub seesaw_restarts: Option<usize>,
    pub restarts: Option<usize>,
    pub tol: Option<f64>,
    pub audit_every: Option<usize>,
    pub s: Option<Vec<f64>>,
    pub l: Option<usize>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

/// Fully resolved invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Analyze {
        state: PathBuf,
        /// `None`: dimension-dependent default.
        seesaw_restarts: Option<usize>,
        tol: f64,
        json: Option<PathBuf>,
    },
    Table {
        measure: Measure,
        d: usize,
        n: usize,
        seed: u64,
        workers: usize,
        seesaw_restarts: usize,
        tol: f64,
        audit_every: usize,
        csv: Option<PathBuf>,
        json: Option<PathBuf>,
    },
    WitnessDecompose {
        psi: PathBuf,
        json: Option<PathBuf>,
    },
    WitnessOrder {
        witness: PathBuf,
        set: PathBuf,
    },
    SchmidtObs4 {
        s: Vec<f64>,
        l: usize,
    },
    SchmidtObs5 {
        s: Vec<f64>,
        l: usize,
    },
    Uqm {
        instance: PathBuf,
        restarts: usize,
    },
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("missing required value --{flag}")))
}

fn check_range(ok: bool, flag: &str, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("--{flag}: {what}")))
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    /// Merges parsed flags with an optional config file and validates ranges.
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let cfg = match cli.command {
            Command::Analyze(a) => RunConfig::Analyze {
                state: a.state,
                seesaw_restarts: a.seesaw_restarts.or(file.seesaw_restarts),
                tol: a.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
                json: a.json.or(file.json),
            },
            Command::Table(t) => RunConfig::Table {
                measure: t.measure.or(file.measure).unwrap_or(Measure::Bures),
                d: require(t.d.or(file.d), "d")?,
                n: t.n.or(file.n).unwrap_or(DEFAULT_N),
                seed: t.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                workers: t.workers.or(file.workers).unwrap_or_else(default_workers),
                seesaw_restarts: t
                    .seesaw_restarts
                    .or(file.seesaw_restarts)
                    .unwrap_or(DEFAULT_TABLE_RESTARTS),
                tol: t.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
                audit_every: t.audit_every.or(file.audit_every).unwrap_or(0),
                csv: t.csv.or(file.csv),
                json: t.json.or(file.json),
            },
            Command::Witness(WitnessCommand::Decompose { psi, json }) => RunConfig::WitnessDecompose {
                psi,
                json: json.or(file.json),
            },
            Command::Witness(WitnessCommand::Order { witness, set }) => {
                RunConfig::WitnessOrder { witness, set }
            }
            Command::Schmidt(SchmidtCommand::Obs4(a)) => RunConfig::SchmidtObs4 {
                s: require(a.s.map(|c| c.0).or(file.s), "s")?,
                l: require(a.l.or(file.l), "l")?,
            },
            Command::Schmidt(SchmidtCommand::Obs5(a)) => RunConfig::SchmidtObs5 {
                s: require(a.s.map(|c| c.0).or(file.s), "s")?,
                l: require(a.l.or(file.l), "l")?,
            },
            Command::Uqm(u) => RunConfig::Uqm {
                instance: u.instance,
                restarts: u.restarts.or(file.restarts).unwrap_or(DEFAULT_UQM_RESTARTS),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks shared by flags and config-file values.
    pub fn validate(&self) -> Result<()> {
        match self {
            RunConfig::Analyze { seesaw_restarts, tol, .. } => {
                check_range(*tol > 0.0 && tol.is_finite(), "tol", "must be positive")?;
                check_range(seesaw_restarts.is_none_or(|r| r >= 1), "seesaw-restarts", "must be at least 1")
            }
            RunConfig::Table {
                d,
                n,
                workers,
                seesaw_restarts,
                tol,
                ..
            } => {
                check_range(*d >= 2, "d", "local dimension must be at least 2")?;
                check_range(*n >= 1, "n", "must be at least 1")?;
                check_range(*workers >= 1, "workers", "must be at least 1")?;
                check_range(*seesaw_restarts >= 1, "seesaw-restarts", "must be at least 1")?;
                check_range(*tol > 0.0 && tol.is_finite(), "tol", "must be positive")
            }
            RunConfig::SchmidtObs4 { l, .. } | RunConfig::SchmidtObs5 { l, .. } => {
                check_range(*l >= 1, "l", "must be at least 1")
            }
            RunConfig::Uqm { restarts, .. } => check_range(*restarts >= 1, "restarts", "must be at least 1"),
            RunConfig::WitnessDecompose { .. } | RunConfig::WitnessOrder { .. } => Ok(()),
        }
    }

    /// Command line that parses back to this configuration.
    pub fn to_args(&self) -> Vec<String> {
        let mut a: Vec<String> = vec!["faithful".into()];
        let mut push = |xs: &[&str]| a.extend(xs.iter().map(|s| s.to_string()));
        let path = |p: &PathBuf| p.to_string_lossy().into_owned();
        match self {
            RunConfig::Analyze {
                state,
                seesaw_restarts,
                tol,
                json,
            } => {
                push(&["analyze", &path(state), "--tol", &tol.to_string()]);
                if let Some(r) = seesaw_restarts {
                    push(&["--seesaw-restarts", &r.to_string()]);
                }
                if let Some(j) = json {
                    push(&["--json", &path(j)]);
                }
            }
            RunConfig::Table {
                measure,
                d,
                n,
                seed,
                workers,
                seesaw_restarts,
                tol,
                audit_every,
                csv,
                json,
            } => {
                push(&[
                    "table",
                    "--measure",
                    measure.label(),
                    "--d",
                    &d.to_string(),
                    "--n",
                    &n.to_string(),
                    "--seed",
                    &seed.to_string(),
                    "--workers",
                    &workers.to_string(),
                    "--seesaw-restarts",
                    &seesaw_restarts.to_string(),
                    "--tol",
                    &tol.to_string(),
                    "--audit-every",
                    &audit_every.to_string(),
                ]);
                if let Some(c) = csv {
                    push(&["--csv", &path(c)]);
                }
                if let Some(j) = json {
                    push(&["--json", &path(j)]);
                }
            }
            RunConfig::WitnessDecompose { psi, json } => {
                push(&["witness", "decompose", &path(psi)]);
                if let Some(j) = json {
                    push(&["--json", &path(j)]);
                }
            }
            RunConfig::WitnessOrder { witness, set } => {
                push(&["witness", "order", &path(witness), &path(set)]);
            }
            RunConfig::SchmidtObs4 { s, l } | RunConfig::SchmidtObs5 { s, l } => {
                let sub = if matches!(self, RunConfig::SchmidtObs4 { .. }) { "obs4" } else { "obs5" };
                let list: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                push(&["schmidt", sub, "--s", &list.join(","), "--l", &l.to_string()]);
            }
            RunConfig::Uqm { instance, restarts } => {
                push(&["uqm", &path(instance), "--restarts", &restarts.to_string()]);
            }
        }
        a
    }
}

/// Parses and resolves `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Usage)?;
    RunConfig::resolve(cli).map_err(CliError::Run)
}

/// Either a clap usage error (help, version, bad flag) or a toolkit error.
#[derive(Debug)]
pub enum CliError {
    Usage(clap::Error),
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) => 2,
            CliError::Run(e) => e.exit_code(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Run(e) => write!(f, "error: {e}"),
        }
    }
}

fn matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    let rows = |part: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| part(&m[(i, j)])).collect()).collect()
    };
    json!({"re": rows(|z| z.re), "im": rows(|z| z.im)})
}

fn write_output(out: &mut dyn Write, value: &serde_json::Value, file: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}")?;
    if let Some(p) = file {
        fs::write(p, format!("{text}\n"))?;
    }
    Ok(())
}

/// Executes a resolved configuration, writing results to `out`.
/// Returns the process exit code.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    match cfg {
        RunConfig::Analyze {
            state,
            seesaw_restarts,
            tol,
            json,
        } => {
            let st = load_state(&fs::read(state)?)?;
            let d = st.local_dim()?;
            let mut seesaw = SeesawOptions::for_dim(d);
            if let Some(r) = seesaw_restarts {
                seesaw.restarts = *r;
            }
            let config = ClassifyConfig {
                sdp: SdpOptions {
                    tolerance: *tol,
                    ..SdpOptions::default()
                },
                seesaw,
                ..ClassifyConfig::default()
            };
            let report = classify(&st, &config)?;
            write_output(out, &serde_json::to_value(&report)?, json.as_ref())?;
            let stuck = report.flags.unconverged && report.verdict == FaithfulnessVerdict::Undecided;
            Ok(if stuck { 3 } else { 0 })
        }
        RunConfig::Table {
            measure,
            d,
            n,
            seed,
            workers,
            seesaw_restarts,
            tol,
            audit_every,
            csv,
            json,
        } => {
            let mut tc = TableConfig::new(*measure, *d, *n, *seed);
            tc.workers = *workers;
            tc.audit_every = *audit_every;
            tc.classify.seesaw.restarts = *seesaw_restarts;
            tc.classify.sdp.tolerance = *tol;
            let row = run_table(&tc)?;
            let text = row.to_csv();
            write!(out, "{text}")?;
            if let Some(p) = csv {
                fs::write(p, &text)?;
            }
            if let Some(p) = json {
                fs::write(p, format!("{}\n", serde_json::to_string_pretty(&row)?))?;
            }
            Ok(0)
        }
        RunConfig::WitnessDecompose { psi, json } => {
            let (v, dims) = load_pure_state(&fs::read(psi)?)?;
            let dec = verify_rfw_decomposition(&v, dims)?;
            let weights: Vec<serde_json::Value> = dec
                .weights
                .signs
                .iter()
                .zip(&dec.weights.probabilities)
                .map(|(a, p)| json!({"signs": a, "p": p}))
                .collect();
            let value = json!({
                "schmidt_coefficients": dec.coefficients,
                "alphas": dec.weights.alphas,
                "weights": weights,
                "diagonal": dec.diagonal,
                "psd": dec.psd,
                "off_diagonal_mass": dec.off_diagonal_mass,
                "min_eigenvalue": dec.min_eigenvalue,
                "remainder_schmidt_basis": matrix_json(&dec.z_schmidt),
            });
            write_output(out, &value, json.as_ref())?;
            Ok(0)
        }
        RunConfig::WitnessOrder { witness, set } => {
            let w = load_witness(&fs::read(witness)?)?;
            let ws = load_witness_set(&fs::read(set)?)?;
            let v = witness_weaker_than(&w, &ws)?;
            let value = json!({
                "weaker": v.weaker,
                "worst_value": v.worst_value,
                "lower_bound": v.lower_bound,
                "iterations": v.iterations,
                "note": v.note,
                "certificate": matrix_json(&v.certificate),
            });
            write_output(out, &value, None)?;
            Ok(0)
        }
        RunConfig::SchmidtObs4 { s, l } => {
            let o = obs4_detectable(s, *l)?;
            write_output(out, &serde_json::to_value(o)?, None)?;
            Ok(0)
        }
        RunConfig::SchmidtObs5 { s, l } => {
            let c = obs5_counterexample(s, *l)?;
            write_output(out, &serde_json::to_value(c)?, None)?;
            Ok(0)
        }
        RunConfig::Uqm { instance, restarts } => {
            let inst = UqmInstance::from_json(&fs::read(instance)?)?;
            let opts = SeesawOptions {
                restarts: *restarts,
                ..SeesawOptions::default()
            };
            let r = uqm_minimize(&inst, &opts)?;
            let value = json!({
                "lower_bound": r.lower_bound,
                "upper_bound": r.upper_bound,
                "unitary": matrix_json(&r.unitary),
            });
            write_output(out, &value, None)?;
            Ok(0)
        }
    }
}

/// Full entry point: parse, execute, report errors. Returns the exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(c) => c,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return e.exit_code();
        }
    };
    match execute(&cfg, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
