//! Sparsest error detection through sparsity invariant transformations.
//!
//! For `y = A·x + e` with `A` of full column rank, the search space of error
//! vectors is `span([A, y])`. An [`OrthoFrame`] splits `ℝⁿ` into `span(A)`, the
//! single direction `u_next` toward `y`, and the complement `u_comp`. Each
//! [`CandidateA`] is a unit vector in `span([A, y])`; solving
//!
//! ```text
//!   min ‖e‖₁  s.t.  aᵀe = t,  u_compᵀe = 0
//! ```
//!
//! is ℓ1 minimisation after an orthogonal transformation that fixes the
//! complement and sends `u_next` to `a`. Such transformations leave the set of
//! sparsest error vectors unchanged up to scale, so the sparsest of many
//! randomised solves estimates the ℓ0 solution.

mod candidate;
mod detect;
mod frame;
mod phi;
mod underdetermined;
mod verify;

pub use candidate::{draw_candidate, sample_rng, CandidateA};
pub use detect::{detect, detect_once, detect_samples, recover_x, soft_threshold, sparsest, Detection, Samples};
pub use frame::{build_frame, OrthoFrame};
pub use phi::{build_phi, phi_times_ft};
pub use underdetermined::recover_underdetermined;
pub use verify::{verify_sip, SipReport};

use thiserror::Error;

use crate::l1solve::SolveError;
use crate::linalg::{numerical_rank, DenseMatrix, DenseVector, LinalgError};
use crate::oracle::OracleError;

/// Relative tolerance used when checking that a detection explains the data.
pub const RECOVERY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SitError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("y lies in span(A); the consistent solution has no errors")]
    DegenerateY,
    #[error("sample is degenerate: rescaling factor undefined")]
    DegenerateSample,
    #[error("every sampled candidate was degenerate")]
    AllSamplesDegenerate,
    #[error("rows outside the support do not determine x")]
    RankDeficientComplement,
    #[error("Gram–Schmidt completion broke down")]
    GramSchmidtBreakdown,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("measurement is not in the range of the sensing matrix (residual {residual:.3e})")]
    InfeasibleInput { residual: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Over-determined instance `y = A·x + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    a: DenseMatrix,
    y: DenseVector,
}

impl Problem {
    /// Requires `n > r ≥ 1` and `rank(A) = r`.
    pub fn new(a: DenseMatrix, y: DenseVector) -> Result<Self, SitError> {
        let (n, r) = a.shape();
        if y.dim() != n {
            return Err(SitError::DimensionMismatch(format!("A has {n} rows but y has {} entries", y.dim())));
        }
        if r == 0 || n <= r {
            return Err(SitError::InvalidProblem(format!("need n > r >= 1, got n = {n}, r = {r}")));
        }
        let rank = numerical_rank(&a)?;
        if rank != r {
            return Err(SitError::InvalidProblem(format!("A has rank {rank}, expected full column rank {r}")));
        }
        Ok(Self { a, y })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn y(&self) -> &DenseVector {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn r(&self) -> usize {
        self.a.cols()
    }

    /// The problem after left-multiplying both `A` and `y` by `phi`.
    pub fn transformed(&self, phi: &DenseMatrix) -> Result<Self, SitError> {
        if phi.shape() != (self.n(), self.n()) {
            return Err(SitError::DimensionMismatch(format!(
                "transformation is {:?}, expected {n}x{n}",
                phi.shape(),
                n = self.n()
            )));
        }
        Self::new(phi.matmul(&self.a), phi.matvec(&self.y))
    }
}
