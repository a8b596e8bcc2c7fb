use super::{detect, Detection, Problem, SitError};
use crate::l1solve::SolverConfig;
use crate::linalg::{numerical_rank, orthobasis_complement, pseudo_inverse_apply, DenseMatrix, DenseVector};

/// Sparsest `e` with `f·e = y_tilde` for a wide, full-row-rank `f`.
///
/// The problem is rewritten as `y = A·x + e` with `y = f⁺·y_tilde` and `A` an
/// orthobasis of `ker f`, then handed to [`detect`]. The returned `x_hat` holds
/// coordinates in that kernel basis.
pub fn recover_underdetermined(
    f: &DenseMatrix,
    y_tilde: &DenseVector,
    snbr: usize,
    eps: f64,
    seed: u64,
    solver: &SolverConfig,
) -> Result<Detection, SitError> {
    let (m, n) = f.shape();
    if y_tilde.dim() != m {
        return Err(SitError::DimensionMismatch(format!("f has {m} rows but y_tilde has {} entries", y_tilde.dim())));
    }
    if m >= n {
        return Err(SitError::InvalidProblem(format!("f must be wide, got {m}x{n}")));
    }
    if numerical_rank(f)? != m {
        return Err(SitError::InvalidProblem("f must have full row rank".into()));
    }
    let y = pseudo_inverse_apply(f, y_tilde)?;
    let residual = f.matvec(&y).sub(y_tilde).norm2();
    if residual > 1e-8 * y_tilde.norm2().max(1.0) {
        return Err(SitError::InfeasibleInput { residual });
    }
    let kernel = orthobasis_complement(&f.transpose())?;
    let p = Problem::new(kernel, y)?;
    detect(&p, snbr, eps, seed, solver, 0.0)
}
