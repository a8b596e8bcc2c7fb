//! ℓ1-minimisation engines: basis pursuit, least absolute deviation,
//! basis pursuit denoising and iteratively reweighted ℓ1 regression.
//!
//! Every solver returns a [`SolveReport`] whose objective, residual and gap are
//! recomputed from the returned solution rather than copied from solver internals.

mod bpdn;
mod ipm;

pub use bpdn::solve_bpdn;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    norm2, numerical_rank, orthobasis_range, pseudo_inverse_apply, DenseMatrix, DenseVector, LinalgError,
};
use ipm::{Coupling, SplitLp};

/// Interior-point stopping tolerance. Tighter than the default report
/// tolerances so the recomputed metrics clear them with margin.
const IPM_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("right-hand side is not in the range of the constraint matrix (residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Residual and duality gap are within the configured tolerances.
    Optimal,
    /// Iteration cap reached before the tolerances were met; the last iterate is returned.
    MaxIter,
    /// Optimal, but the optimal set contains more than one point.
    Degenerate,
}

impl SolveStatus {
    /// True for both `Optimal` and `Degenerate`.
    pub fn is_optimal(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Degenerate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
    pub reweight_delta: f64,
    pub reweight_rounds: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { feas_tol: 1e-8, gap_tol: 1e-8, max_iter: 200, reweight_delta: 1e-3, reweight_rounds: 4 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.feas_tol) || !positive(self.gap_tol) || !positive(self.reweight_delta) {
            return Err(SolveError::InvalidInput("tolerances must be positive and finite".into()));
        }
        if self.max_iter == 0 || self.reweight_rounds == 0 {
            return Err(SolveError::InvalidInput("iteration counts must be at least one".into()));
        }
        Ok(())
    }
}

/// Outcome of an ℓ1 solve.
///
/// `primal_residual` and `duality_gap` are relative: the constraint residual is
/// divided by `max(1, ‖b‖₂)` and the gap between the objective and a feasible
/// dual bound by `max(1, objective)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: DenseVector,
    pub objective: f64,
    pub primal_residual: f64,
    pub duality_gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

fn status_for(cfg: &SolverConfig, residual: f64, gap: f64, degenerate: bool) -> SolveStatus {
    if residual <= cfg.feas_tol && gap <= cfg.gap_tol {
        if degenerate {
            SolveStatus::Degenerate
        } else {
            SolveStatus::Optimal
        }
    } else {
        SolveStatus::MaxIter
    }
}

fn same_signs(a: &[f64], b: &[f64], idx: &[usize]) -> bool {
    idx.iter().all(|&j| a[j].signum() == b[j].signum() && a[j] != 0.0)
}

/// `min ‖e‖₁ s.t. f·e = b` for an under-determined `f`.
pub fn solve_bp(f: &DenseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let (m, n) = f.shape();
    if b.len() != m {
        return Err(SolveError::InvalidInput(format!("rhs has {} entries, matrix has {m} rows", b.len())));
    }
    if m >= n {
        return Err(SolveError::InvalidInput(format!("basis pursuit needs more columns than rows, got {m}x{n}")));
    }
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(SolveReport {
            solution: DenseVector::zeros(n),
            objective: 0.0,
            primal_residual: 0.0,
            duality_gap: 0.0,
            status: SolveStatus::Optimal,
            iterations: 0,
        });
    }
    let ls = pseudo_inverse_apply(f, b)?;
    let ls_residual = norm2(&f.matvec(&ls).sub(b));
    if ls_residual > cfg.feas_tol * b_norm {
        return Err(SolveError::Infeasible { residual: ls_residual });
    }

    let weights = vec![1.0; n];
    let lp = SplitLp { coupling: Coupling::Dense(f), free: None, weights: &weights, rhs: b };
    let sol = ipm::solve(&lp, IPM_TOL, cfg.max_iter);
    let degenerate = ipm::optimal_face_is_degenerate(&lp, &sol);
    let mut e = sol.difference();

    if !degenerate {
        let pos = sol.positive_set();
        if !pos.is_empty() {
            let fp = f.select_columns(&pos);
            if let Ok(ep) = pseudo_inverse_apply(&fp, b) {
                let mut cand = vec![0.0; n];
                for (k, &j) in pos.iter().enumerate() {
                    cand[j] = ep[k];
                }
                let r_old = norm2(&f.matvec(&e).sub(b));
                let r_new = norm2(&f.matvec(&cand).sub(b));
                let o_old: f64 = e.iter().map(|v| v.abs()).sum();
                let o_new: f64 = cand.iter().map(|v| v.abs()).sum();
                if same_signs(&cand, &e, &pos)
                    && r_new <= r_old.max(1e-14 * b_norm)
                    && o_new <= o_old + 1e-9 * o_old.max(1.0)
                {
                    e = cand;
                }
            }
        }
    }

    let e = DenseVector::from_vec(e);
    let objective = e.norm1();
    let residual = norm2(&f.matvec(&e).sub(b)) / b_norm.max(1.0);
    let gt = f.tr_matvec(&sol.lambda);
    let scale = gt.norm_inf().max(1.0);
    let dual = b.iter().zip(&sol.lambda).map(|(x, l)| x * l).sum::<f64>() / scale;
    let gap = (objective - dual) / objective.max(1.0);
    Ok(SolveReport {
        status: status_for(cfg, residual, gap, degenerate),
        solution: e,
        objective,
        primal_residual: residual,
        duality_gap: gap,
        iterations: sol.iterations,
    })
}

/// Least absolute deviation regression `min_x ‖y − a·x‖₁`. The report's
/// `solution` is the coefficient vector `x`.
pub fn solve_lad(a: &DenseMatrix, y: &[f64], cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    weighted_lad(a, y, &vec![1.0; a.rows()], cfg)
}

/// Iteratively reweighted ℓ1 regression: the first round is plain LAD, each
/// further round reweights residual `i` by `1 / (|e_i| + reweight_delta)`.
/// The report's objective is the weighted ℓ1 residual of the final round.
pub fn solve_reweighted_l1(a: &DenseMatrix, y: &[f64], cfg: &SolverConfig) -> Result<SolveReport, SolveError> {
    cfg.validate()?;
    let mut weights = vec![1.0; a.rows()];
    let mut report = weighted_lad(a, y, &weights, cfg)?;
    let mut iterations = report.iterations;
    for _ in 1..cfg.reweight_rounds {
        let resid = a.matvec(&report.solution);
        for (w, (yi, fi)) in weights.iter_mut().zip(y.iter().zip(resid.iter())) {
            *w = 1.0 / ((yi - fi).abs() + cfg.reweight_delta);
        }
        report = weighted_lad(a, y, &weights, cfg)?;
        iterations += report.iterations;
    }
    report.iterations = iterations;
    Ok(report)
}

pub(crate) fn weighted_lad(
    a: &DenseMatrix,
    y: &[f64],
    weights: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport, SolveError> {
    let (n, r) = a.shape();
    if y.len() != n || weights.len() != n {
        return Err(SolveError::InvalidInput("observation length does not match design rows".into()));
    }
    if n <= r {
        return Err(SolveError::InvalidInput(format!("regression needs more rows than columns, got {n}x{r}")));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(SolveError::InvalidInput("weights must be positive and finite".into()));
    }
    if numerical_rank(a)? < r {
        return Err(SolveError::InvalidInput("design matrix is column rank deficient".into()));
    }

    let lp = SplitLp { coupling: Coupling::Identity(n), free: Some(a), weights, rhs: y };
    let sol = ipm::solve(&lp, IPM_TOL, cfg.max_iter);
    let degenerate = ipm::optimal_face_is_degenerate(&lp, &sol);
    let weighted_obj = |x: &[f64]| -> f64 {
        let fit = a.matvec(x);
        y.iter().zip(fit.iter()).zip(weights).map(|((yi, fi), w)| w * (yi - fi).abs()).sum()
    };
    let mut x = sol.z.clone();

    if !degenerate {
        let pos = sol.positive_set();
        let zero_rows: Vec<usize> = (0..n).filter(|i| !pos.contains(i)).collect();
        if zero_rows.len() >= r {
            let az = a.select_rows(&zero_rows);
            let yz: Vec<f64> = zero_rows.iter().map(|&i| y[i]).collect();
            if let Ok(cand) = pseudo_inverse_apply(&az, &yz) {
                let o_old = weighted_obj(&x);
                if weighted_obj(&cand) <= o_old + 1e-12 * o_old.max(1.0) {
                    x = cand.into_vec();
                }
            }
        }
    }

    let objective = weighted_obj(&x);
    // dual certificate: project onto null(aᵀ), then scale into the weighted box
    let q = orthobasis_range(a)?;
    let coeff = q.tr_matvec(&sol.lambda);
    let proj = q.matvec(&coeff);
    let d: Vec<f64> = sol.lambda.iter().zip(proj.iter()).map(|(l, p)| l - p).collect();
    let scale = d.iter().zip(weights).fold(1.0_f64, |m, (di, w)| m.max(di.abs() / w));
    let dual = y.iter().zip(&d).map(|(yi, di)| yi * di).sum::<f64>() / scale;
    let gap = (objective - dual) / objective.max(1.0);
    Ok(SolveReport {
        status: status_for(cfg, 0.0, gap, degenerate),
        solution: DenseVector::from_vec(x),
        objective,
        primal_residual: 0.0,
        duality_gap: gap,
        iterations: sol.iterations,
    })
}
