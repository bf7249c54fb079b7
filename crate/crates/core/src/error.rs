use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("normalization violated: trace is {trace}")]
    Normalization { trace: f64 },

    #[error("positivity violated: minimum eigenvalue is {min_eigenvalue:.3e}")]
    Positivity { min_eigenvalue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hilbert-Schmidt norm bound violated for matrix {index}: Tr(A^dag A) = {norm_sqr}")]
    NormBound { index: usize, norm_sqr: f64 },

    #[error("no counterexample exists: {0}")]
    NoCounterexample(String),

    #[error(
        "solver did not converge after {iterations} iterations \
         (primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})"
    )]
    Unconverged {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
    },

    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unconverged { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
