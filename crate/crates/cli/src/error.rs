use std::path::PathBuf;
use std::process::ExitCode;

use locc_recovery::genpairs::GenError;
use locc_recovery::oracle::OracleError;
use locc_recovery::spectra::SpectrumError;
use locc_recovery::RecoveryError;
use thiserror::Error;

/// Process exit statuses. Fixed so scripts can branch on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// Not convertible, or no recovery at the requested point.
    Infeasible = 1,
    Input = 2,
    OpenProblem = 3,
    /// Budgets and search limits.
    Resource = 4,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: malformed JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Spectrum {
        path: PathBuf,
        source: SpectrumError,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            Self::Io { .. } | Self::Json { .. } | Self::Spectrum { .. } | Self::Input(_) => Status::Input,
            Self::Recovery(e) => match e {
                RecoveryError::DimensionMismatch { .. } | RecoveryError::InvalidParameter(_) => Status::Input,
                RecoveryError::SearchExhausted { .. } => Status::Resource,
                RecoveryError::NotConvertible
                | RecoveryError::NotARecovery(_)
                | RecoveryError::NotApplicable { .. }
                | RecoveryError::NotFeasibleAtZero
                | RecoveryError::EmptyRegion => Status::Infeasible,
            },
            Self::Oracle(OracleError::BudgetExceeded { .. }) => Status::Resource,
            Self::Oracle(_) => Status::Input,
            Self::Gen(GenError::PatternInfeasible(_)) => Status::Resource,
            Self::Gen(_) => Status::Input,
            Self::Csv(_) | Self::Output(_) => Status::Resource,
        }
    }
}
