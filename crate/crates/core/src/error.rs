use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants are grouped so that the command-line front end can map them onto
/// exit codes: configuration problems, infeasible physics, numerical failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("above threshold: pump parameter sigma = {sigma} must be < 1")]
    AboveThreshold { sigma: f64 },

    #[error("infeasible photon budget: signal photon number {n_signal} (deficit {deficit})")]
    InfeasiblePhotonBudget { n_signal: f64, deficit: f64 },

    #[error("loss exceeds linewidth: kappa_loss = {kappa_loss} >= kappa_s = 1")]
    LossExceedsLinewidth { kappa_loss: f64 },

    #[error("resonant-degenerate system at omega = {omega}")]
    ResonantDegenerate { omega: f64 },

    #[error("unstable system: max eigenvalue real part = {max_real}")]
    Unstable { max_real: f64 },

    #[error("eigenvalue solver did not converge for a {dim}x{dim} drift matrix")]
    EigenNonConvergence { dim: usize },

    #[error("empty feasible range: {0}")]
    EmptyFeasibleRange(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error: 2 config, 3 infeasible physics, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config { .. } | Error::Json(_) => 2,
            Error::AboveThreshold { .. }
            | Error::InfeasiblePhotonBudget { .. }
            | Error::LossExceedsLinewidth { .. }
            | Error::Unstable { .. }
            | Error::EmptyFeasibleRange(_) => 3,
            Error::ResonantDegenerate { .. } | Error::EigenNonConvergence { .. } => 4,
            Error::Io(_) | Error::Csv(_) | Error::Verification(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
