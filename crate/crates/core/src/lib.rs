//! Sparsest error detection for over-determined linear systems `y = A·x + e`
//! by randomised sparsity invariant transformations followed by ℓ1 minimisation.
//!
//! Modules, bottom up:
//! - [`linalg`]: dense matrices, SVD, orthobases, least squares.
//! - [`l1solve`]: basis pursuit, least absolute deviations, BPDN, reweighted ℓ1.
//! - [`sit`]: the randomised detector and the explicit transformations.
//! - [`oracle`]: exact ℓ0 optimum by subset enumeration, for verification.
//! - [`harness`]: instance generators, experiments, CSV IO.

pub mod harness;
pub mod l1solve;
pub mod linalg;
pub mod oracle;
pub mod sit;

pub use l1solve::{solve_bp, solve_bpdn, solve_lad, solve_reweighted_l1, SolveReport, SolveStatus, SolverConfig};
pub use linalg::{DenseMatrix, DenseVector};
pub use oracle::{certify, l0_oracle, Certificate, OracleResult};
pub use sit::{detect, recover_underdetermined, Detection, Problem};
