use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{ExperimentConfig, HarnessError};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::sit::{sample_rng, Problem};

/// Number of rows in the regression design.
pub const REGRESSION_ROWS: usize = 52;
pub const REGRESSION_OUTLIERS: usize = 20;
pub const REGRESSION_OUTLIER_VALUE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionKind {
    /// `α(i) = i`.
    Uniform,
    /// `α(i) = i` up to 32, then `i + 20`.
    Tailored,
}

/// A generated problem with its ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: Problem,
    pub x_true: DenseVector,
    pub e_true: DenseVector,
}

impl Instance {
    pub fn true_support(&self) -> Vec<usize> {
        self.e_true.support(0.0)
    }
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Design `A = [α, 1]` with 20 outliers of value 20 and Gaussian noise.
pub fn gen_regression_instance(kind: RegressionKind, noise_std: f64, seed: u64) -> Result<Instance, HarnessError> {
    gen_regression_with(kind, noise_std, &mut sample_rng(seed, 0))
}

pub(crate) fn gen_regression_with<R: Rng + ?Sized>(
    kind: RegressionKind,
    noise_std: f64,
    rng: &mut R,
) -> Result<Instance, HarnessError> {
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(HarnessError::Config("noise_std must be finite and non-negative".into()));
    }
    let n = REGRESSION_ROWS;
    let mut data = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let alpha = match kind {
            RegressionKind::Tailored if i > 32 => (i + 20) as f64,
            _ => i as f64,
        };
        data.push(alpha);
        data.push(1.0);
    }
    let a = DenseMatrix::new(n, 2, data)?;
    let x_true = DenseVector::new(gaussian_vec(rng, 2))?;
    let mut e = vec![0.0; n];
    for i in sample(rng, n, REGRESSION_OUTLIERS) {
        e[i] = REGRESSION_OUTLIER_VALUE;
    }
    let noise = Normal::new(0.0, noise_std).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut y = a.matvec(&x_true).add(&e);
    for v in y.iter_mut() {
        *v += noise.sample(rng);
    }
    Ok(Instance { problem: Problem::new(a, y)?, x_true, e_true: DenseVector::new(e)? })
}

/// Two-block Gaussian design: the first `n − k` rows are `N(0,1)`, the last `k`
/// rows `N(5,1)`. `round(t·s)` errors fall in the second block, the rest in the
/// first; all have value `error_magnitude`.
pub fn gen_detection_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance, HarnessError> {
    gen_detection_with(cfg, &mut sample_rng(seed, 0))
}

pub(crate) fn gen_detection_with<R: Rng + ?Sized>(
    cfg: &ExperimentConfig,
    rng: &mut R,
) -> Result<Instance, HarnessError> {
    let (n, r, k, s) = (cfg.n, cfg.r, cfg.k, cfg.s);
    if k > n || r == 0 || r >= n || s >= n {
        return Err(HarnessError::Config(format!("invalid sizes n={n}, r={r}, k={k}, s={s}")));
    }
    let tail = ((cfg.t_fraction * s as f64).round() as usize).min(s);
    let head = s - tail;
    if head > n - k || tail > k {
        return Err(HarnessError::Config(format!(
            "{head} errors do not fit in {} leading rows or {tail} in {k} trailing rows",
            n - k
        )));
    }
    let shifted = Normal::new(5.0, 1.0).expect("valid normal");
    let mut data = Vec::with_capacity(n * r);
    for i in 0..n {
        for _ in 0..r {
            data.push(if i < n - k { StandardNormal.sample(rng) } else { shifted.sample(rng) });
        }
    }
    let a = DenseMatrix::new(n, r, data)?;
    let x_true = DenseVector::new(gaussian_vec(rng, r))?;
    let mut e = vec![0.0; n];
    for i in sample(rng, n - k, head) {
        e[i] = cfg.error_magnitude;
    }
    for i in sample(rng, k, tail) {
        e[n - k + i] = cfg.error_magnitude;
    }
    let mut y = a.matvec(&x_true).add(&e);
    if cfg.noise_std > 0.0 {
        let noise = Normal::new(0.0, cfg.noise_std).map_err(|e| HarnessError::Config(e.to_string()))?;
        for v in y.iter_mut() {
            *v += noise.sample(rng);
        }
    }
    Ok(Instance { problem: Problem::new(a, y)?, x_true, e_true: DenseVector::new(e)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_noiseless_has_twenty_outliers() {
        let inst = gen_regression_instance(RegressionKind::Uniform, 0.0, 4).unwrap();
        let p = &inst.problem;
        let resid = p.y().sub(&p.a().matvec(&inst.x_true));
        let nz: Vec<f64> = resid.iter().copied().filter(|v| v.abs() > 1e-9).collect();
        assert_eq!(nz.len(), 20);
        assert!(nz.iter().all(|v| (v - 20.0).abs() < 1e-9));
    }

    #[test]
    fn tailored_design_jumps_after_32() {
        let inst = gen_regression_instance(RegressionKind::Tailored, 0.5, 1).unwrap();
        let a = inst.problem.a();
        assert_eq!(a[(31, 0)], 32.0);
        assert_eq!(a[(32, 0)], 53.0);
        assert_eq!(a[(51, 0)], 72.0);
    }

    #[test]
    fn regression_is_reproducible() {
        let a = gen_regression_instance(RegressionKind::Uniform, 2.0, 9).unwrap();
        let b = gen_regression_instance(RegressionKind::Uniform, 2.0, 9).unwrap();
        assert_eq!(a.problem, b.problem);
        assert_eq!(a.e_true, b.e_true);
    }

    fn cfg(t: f64, k: usize) -> ExperimentConfig {
        ExperimentConfig { n: 64, r: 8, k, s: 9, t_fraction: t, ..ExperimentConfig::default() }
    }

    #[test]
    fn detection_error_placement() {
        let c = cfg(1.0, 14);
        let inst = gen_detection_instance(&c, 3).unwrap();
        let supp = inst.true_support();
        assert_eq!(supp.len(), 9);
        assert!(supp.iter().all(|&i| i >= 50));
        assert!(inst.e_true.iter().all(|&v| v == 0.0 || v == 10.0));
        let c0 = cfg(0.0, 14);
        let inst = gen_detection_instance(&c0, 3).unwrap();
        assert!(inst.true_support().iter().all(|&i| i < 50));
        let mixed = gen_detection_instance(&cfg(0.6, 14), 3).unwrap();
        assert_eq!(mixed.true_support().iter().filter(|&&i| i >= 50).count(), 5);
    }

    #[test]
    fn detection_blocks_have_shifted_means() {
        let inst = gen_detection_instance(&cfg(0.6, 14), 5).unwrap();
        let a = inst.problem.a();
        let mean = |rows: std::ops::Range<usize>| {
            let cnt = (rows.len() * 8) as f64;
            rows.flat_map(|i| a.row(i).to_vec()).sum::<f64>() / cnt
        };
        assert!(mean(0..50).abs() < 0.5);
        assert!((mean(50..64) - 5.0).abs() < 0.5);
    }

    #[test]
    fn errors_that_do_not_fit_are_config_errors() {
        assert!(matches!(gen_detection_instance(&cfg(1.0, 0), 1), Err(HarnessError::Config(_))));
        assert!(matches!(gen_detection_instance(&cfg(0.0, 56), 1), Err(HarnessError::Config(_))));
    }
}
