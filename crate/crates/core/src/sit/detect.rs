use std::cmp::Ordering;

use rayon::prelude::*;

use super::{build_frame, draw_candidate, sample_rng, CandidateA, OrthoFrame, Problem, SitError};
use crate::l1solve::{solve_bp, solve_bpdn, SolveReport, SolveStatus, SolverConfig};
use crate::linalg::{numerical_rank, pseudo_inverse_apply, DenseMatrix, DenseVector};

/// Entries at or below this fraction of `‖ê‖∞` are treated as solver noise,
/// even when `eps = 0`.
const NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub e_raw: DenseVector,
    pub e_scaled: DenseVector,
    pub support: Vec<usize>,
    pub l0_count: usize,
    pub lambda: f64,
    pub x_hat: DenseVector,
    /// `None` only for the zero detection returned when `y ∈ span(A)`.
    pub candidate: Option<CandidateA>,
    pub report: SolveReport,
}

impl Detection {
    fn zero(p: &Problem) -> Result<Self, SitError> {
        let n = p.n();
        let x_hat = pseudo_inverse_apply(p.a(), p.y())?;
        Ok(Self {
            e_raw: DenseVector::zeros(n),
            e_scaled: DenseVector::zeros(n),
            support: Vec::new(),
            l0_count: 0,
            lambda: 1.0,
            x_hat,
            candidate: None,
            report: SolveReport {
                solution: DenseVector::zeros(n),
                objective: 0.0,
                primal_residual: 0.0,
                duality_gap: 0.0,
                status: SolveStatus::Optimal,
                iterations: 0,
            },
        })
    }

    fn seed_index(&self) -> u64 {
        self.candidate.as_ref().map_or(0, |c| c.seed_index)
    }
}

/// `sign(v)·max(|v| − eps, 0)` entrywise.
pub fn soft_threshold(v: &[f64], eps: f64) -> DenseVector {
    DenseVector::new(v.iter().map(|x| x.signum() * (x.abs() - eps).max(0.0)).collect())
        .expect("soft thresholding keeps entries finite")
}

/// Least squares on the rows outside `support`.
pub fn recover_x(p: &Problem, support: &[usize]) -> Result<DenseVector, SitError> {
    let keep: Vec<usize> = (0..p.n()).filter(|i| !support.contains(i)).collect();
    if keep.len() < p.r() {
        return Err(SitError::RankDeficientComplement);
    }
    let a_c = p.a().select_rows(&keep);
    if numerical_rank(&a_c)? < p.r() {
        return Err(SitError::RankDeficientComplement);
    }
    Ok(pseudo_inverse_apply(&a_c, &p.y().select(&keep))?)
}

/// One ℓ1 solve for the candidate `cand`, followed by thresholding and rescaling.
pub fn detect_once(
    p: &Problem,
    frame: &OrthoFrame,
    cand: &CandidateA,
    eps: f64,
    solver: &SolverConfig,
    sigma: f64,
) -> Result<Detection, SitError> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(SitError::PreconditionViolated("eps must be finite and non-negative".into()));
    }
    if frame.t == 0.0 {
        return Err(SitError::DegenerateY);
    }
    let n = frame.n();
    let a_col = DenseMatrix::from_columns(n, &[cand.a.as_slice()]);
    let f = a_col.hstack(&frame.u_comp).transpose();
    let mut rhs = vec![0.0; f.rows()];
    rhs[0] = frame.t;
    let report = if sigma > 0.0 { solve_bpdn(&f, &rhs, sigma, solver)? } else { solve_bp(&f, &rhs, solver)? };
    let e_raw = report.solution.clone();
    // Rescale to the magnitudes of y before thresholding so that eps is in the
    // units of the data rather than of this sample's ℓ1 solution.
    let denom = frame.u_next.dot(&e_raw);
    let raw_norm = e_raw.norm2();
    if raw_norm == 0.0 || denom.abs() <= 1e-10 * raw_norm {
        return Err(SitError::DegenerateSample);
    }
    let lambda = frame.t / denom;
    let rescaled = e_raw.scaled(lambda);
    let floor = NOISE_FLOOR * rescaled.norm_inf();
    let thr = soft_threshold(&rescaled, eps.max(floor));
    if thr.norm_inf() == 0.0 {
        return Err(SitError::DegenerateSample);
    }
    let support = thr.support(0.0);
    // Magnitudes on the support are read off the refit residual, which undoes the
    // shrinkage of soft thresholding. Without a refit the rescaled vector is kept.
    let (x_hat, e_scaled) = match recover_x(p, &support) {
        Ok(x) => {
            let resid = p.y().sub(&p.a().matvec(&x));
            let mut e = DenseVector::zeros(n);
            for &i in &support {
                e[i] = resid[i];
            }
            (x, e)
        }
        Err(SitError::RankDeficientComplement) => (pseudo_inverse_apply(p.a(), &p.y().sub(&thr))?, thr),
        Err(e) => return Err(e),
    };
    Ok(Detection {
        l0_count: support.len(),
        e_raw,
        e_scaled,
        support,
        lambda,
        x_hat,
        candidate: Some(cand.clone()),
        report,
    })
}

fn better(a: &Detection, b: &Detection) -> Ordering {
    a.l0_count
        .cmp(&b.l0_count)
        .then_with(|| a.e_raw.norm1().total_cmp(&b.e_raw.norm1()))
        .then_with(|| a.seed_index().cmp(&b.seed_index()))
}

/// Randomised detection: the direct candidate plus `snbr` Gaussian candidates,
/// keeping the sparsest result.
pub fn detect(
    p: &Problem,
    snbr: usize,
    eps: f64,
    seed: u64,
    solver: &SolverConfig,
    sigma: f64,
) -> Result<Detection, SitError> {
    match detect_samples(p, snbr, eps, seed, solver, sigma)? {
        Samples::Consistent(d) => Ok(d),
        Samples::Drawn(all) => sparsest(&all, snbr as u64).ok_or(SitError::AllSamplesDegenerate),
    }
}

/// Every non-degenerate sample of a [`detect`] run, in seed-index order.
#[derive(Debug, Clone)]
pub enum Samples {
    /// `y ∈ span(A)`; no sampling was needed.
    Consistent(Detection),
    Drawn(Vec<Detection>),
}

pub fn detect_samples(
    p: &Problem,
    snbr: usize,
    eps: f64,
    seed: u64,
    solver: &SolverConfig,
    sigma: f64,
) -> Result<Samples, SitError> {
    if snbr == 0 {
        return Err(SitError::PreconditionViolated("snbr must be at least 1".into()));
    }
    solver.validate()?;
    let frame = match build_frame(p) {
        Ok(f) => f,
        Err(SitError::DegenerateY) => return Ok(Samples::Consistent(Detection::zero(p)?)),
        Err(e) => return Err(e),
    };
    let all = (0..=snbr as u64)
        .into_par_iter()
        .filter_map(|i| {
            let cand =
                if i == 0 { CandidateA::direct(&frame) } else { draw_candidate(&frame, &mut sample_rng(seed, i), i) };
            // samples whose solve was not certified can look sparser than any feasible point
            detect_once(p, &frame, &cand, eps, solver, sigma).ok().filter(|d| d.report.status.is_optimal())
        })
        .collect();
    Ok(Samples::Drawn(all))
}

/// The sparsest detection among samples with seed index at most `snbr`.
pub fn sparsest(samples: &[Detection], snbr: u64) -> Option<Detection> {
    samples.iter().filter(|d| d.seed_index() <= snbr).min_by(|a, b| better(a, b)).cloned()
}
