//! Instance generators, experiment runner, the three-row worked example and
//! CSV helpers behind the `sitl1` command-line tool.

mod example31;
mod experiment;
mod generate;
mod io;

pub use example31::{
    example_problem, printed_phi, run_example_3_1, Check, Example31Report, PRINTED_PHI_A, PRINTED_PHI_Y,
};
pub use experiment::{
    per_entry_accuracy, residual_detection, run_experiment, run_experiment_with, run_snbr_sweep, trial_instance,
    ExperimentConfig, ExperimentOutcome, Method, SummaryRow, SweepPoint, TrialRecord,
};
pub use generate::{
    gen_detection_instance, gen_regression_instance, Instance, RegressionKind, REGRESSION_OUTLIERS,
    REGRESSION_OUTLIER_VALUE, REGRESSION_ROWS,
};
pub use io::{read_matrix_csv, read_vector_csv, write_matrix_csv, write_vector_csv};

use thiserror::Error;

use crate::l1solve::SolveError;
use crate::linalg::LinalgError;
use crate::oracle::OracleError;
use crate::sit::SitError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Sit(#[from] SitError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl HarnessError {
    /// Process exit code: 2 for bad input or configuration, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) | HarnessError::Csv(_) => 2,
            HarnessError::Sit(SitError::InvalidProblem(_) | SitError::DimensionMismatch(_))
            | HarnessError::Sit(SitError::PreconditionViolated(_))
            | HarnessError::Solve(SolveError::InvalidInput(_))
            | HarnessError::Oracle(OracleError::EnumerationTooLarge { .. })
            | HarnessError::Linalg(LinalgError::NonFinite | LinalgError::Empty | LinalgError::Ragged) => 2,
            _ => 3,
        }
    }
}
