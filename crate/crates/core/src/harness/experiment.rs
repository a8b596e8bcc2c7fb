use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{gen_detection_with, gen_regression_with, Instance, RegressionKind};
use super::HarnessError;
use crate::l1solve::{solve_lad, solve_reweighted_l1, SolverConfig};
use crate::linalg::DenseVector;
use crate::oracle::{binomial, certify_support, l0_oracle, Certificate, DEFAULT_CAP};
use crate::sit::{detect, detect_samples, recover_x, sample_rng, soft_threshold, sparsest, Problem, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sit,
    Lad,
    Reweighted,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sit => "sit",
            Method::Lad => "lad",
            Method::Reweighted => "reweighted",
        }
    }
}

/// Experiment parameters. `name` also selects the generator: `regression-uniform`
/// and `regression-tailored` use the 52-row regression design (ignoring `n`, `r`,
/// `k`, `s`, `t_fraction`, `error_magnitude`); any other name uses the two-block
/// detection design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub s: usize,
    pub t_fraction: f64,
    pub error_magnitude: f64,
    pub noise_std: f64,
    pub eps: f64,
    /// BPDN radius for the detector; `None` means `√n·noise_std`.
    pub sigma: Option<f64>,
    pub snbr: usize,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Per-trial CSV. `summary.csv` and `<stem>_timing.csv` go next to it.
    pub out_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "detection".into(),
            n: 64,
            r: 8,
            k: 14,
            s: 9,
            t_fraction: 1.0,
            error_magnitude: 10.0,
            noise_std: 0.0,
            eps: 0.2,
            sigma: None,
            snbr: 100,
            trials: 50,
            seed: 0,
            methods: vec![Method::Sit, Method::Lad, Method::Reweighted],
            out_path: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn regression_kind(&self) -> Option<RegressionKind> {
        match self.name.as_str() {
            "regression-uniform" => Some(RegressionKind::Uniform),
            "regression-tailored" => Some(RegressionKind::Tailored),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.regression_kind().is_none() {
            if self.r == 0 || self.r >= self.n {
                return bad("need 1 <= r < n");
            }
            if self.s >= self.n {
                return bad("need s < n");
            }
            if self.k > self.n {
                return bad("need k <= n");
            }
            if !(0.0..=1.0).contains(&self.t_fraction) {
                return bad("t_fraction must lie in [0, 1]");
            }
            if !self.error_magnitude.is_finite() || self.error_magnitude == 0.0 {
                return bad("error_magnitude must be finite and nonzero");
            }
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.methods.is_empty() {
            return bad("at least one method is required");
        }
        if self.methods.contains(&Method::Sit) && self.snbr == 0 {
            return bad("snbr must be at least 1");
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return bad("eps must be finite and non-negative");
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return bad("noise_std must be finite and non-negative");
        }
        if let Some(s) = self.sigma {
            if !(s.is_finite() && s >= 0.0) {
                return bad("sigma must be finite and non-negative");
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        match self.regression_kind() {
            Some(_) => super::generate::REGRESSION_ROWS,
            None => self.n,
        }
    }

    pub fn effective_sigma(&self) -> f64 {
        self.sigma.unwrap_or_else(|| (self.rows() as f64).sqrt() * self.noise_std)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub method: Method,
    pub exact_support_match: bool,
    pub per_entry_accuracy: f64,
    pub l0_detected: usize,
    pub l0_true: usize,
    /// `‖x̂ − x_true‖₂`.
    pub x_error: f64,
    /// Oracle verdict for the detected support, when the enumeration is small enough.
    pub certificate: Option<Certificate>,
    /// Solver or detector failure; the trial then counts as an empty detection.
    pub error: Option<String>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub method: Method,
    pub trials: usize,
    pub exact_rate: f64,
    pub per_entry_accuracy: f64,
    pub mean_x_error: f64,
    pub oracle_exact_rate: Option<f64>,
    pub failures: usize,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentOutcome {
    pub fn summary_for(&self, method: Method) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.method == method)
    }
}

/// `(TP + TN) / n` for a detected support against the true one.
pub fn per_entry_accuracy(n: usize, detected: &[usize], truth: &[usize]) -> f64 {
    let mut det = vec![false; n];
    let mut tru = vec![false; n];
    detected.iter().for_each(|&i| det[i] = true);
    truth.iter().for_each(|&i| tru[i] = true);
    det.iter().zip(&tru).filter(|(a, b)| a == b).count() as f64 / n as f64
}

/// Support of the thresholded residual `y − A·x` and the refit `x` on its complement.
pub fn residual_detection(p: &Problem, x: &DenseVector, eps: f64) -> (Vec<usize>, DenseVector) {
    let resid = p.y().sub(&p.a().matvec(x));
    let floor = 1e-9 * resid.norm_inf();
    let support = soft_threshold(&resid, eps.max(floor)).support(0.0);
    let x_hat = recover_x(p, &support).unwrap_or_else(|_| x.clone());
    (support, x_hat)
}

struct MethodResult {
    support: Vec<usize>,
    x_hat: Option<DenseVector>,
    error: Option<String>,
}

fn run_method(
    method: Method,
    p: &Problem,
    cfg: &ExperimentConfig,
    sit_seed: u64,
    solver: &SolverConfig,
) -> MethodResult {
    let out = match method {
        Method::Sit => detect(p, cfg.snbr, cfg.eps, sit_seed, solver, cfg.effective_sigma())
            .map(|d| (d.support, d.x_hat))
            .map_err(|e| e.to_string()),
        Method::Lad => solve_lad(p.a(), p.y(), solver)
            .map(|r| residual_detection(p, &r.solution, cfg.eps))
            .map_err(|e| e.to_string()),
        Method::Reweighted => solve_reweighted_l1(p.a(), p.y(), solver)
            .map(|r| residual_detection(p, &r.solution, cfg.eps))
            .map_err(|e| e.to_string()),
    };
    match out {
        Ok((support, x)) => MethodResult { support, x_hat: Some(x), error: None },
        Err(e) => MethodResult { support: Vec::new(), x_hat: None, error: Some(e) },
    }
}

/// Instance for `trial_id` and the seed its detector uses. Both depend only on
/// `(cfg.seed, trial_id)`.
pub fn trial_instance(cfg: &ExperimentConfig, trial_id: usize) -> Result<(Instance, u64), HarnessError> {
    let mut rng = sample_rng(cfg.seed, trial_id as u64);
    let inst = match cfg.regression_kind() {
        Some(kind) => gen_regression_with(kind, cfg.noise_std, &mut rng)?,
        None => gen_detection_with(cfg, &mut rng)?,
    };
    let sit_seed = rng.random::<u64>();
    Ok((inst, sit_seed))
}

fn run_trial(cfg: &ExperimentConfig, trial_id: usize, solver: &SolverConfig) -> Result<Vec<TrialRecord>, HarnessError> {
    let (inst, sit_seed) = trial_instance(cfg, trial_id)?;
    let p = &inst.problem;
    let truth = inst.true_support();
    let oracle = match binomial(p.n(), p.r()) {
        Some(c) if c <= DEFAULT_CAP => l0_oracle(p, DEFAULT_CAP).ok(),
        _ => None,
    };
    let records = cfg
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let res = run_method(method, p, cfg, sit_seed, solver);
            let wall_time = start.elapsed();
            let x_error = res.x_hat.as_ref().map_or(f64::NAN, |x| x.sub(&inst.x_true).norm2());
            let certificate = match (&oracle, method, &res.error) {
                (Some(o), Method::Sit, None) => Some(certify_support(o, &res.support)),
                _ => None,
            };
            TrialRecord {
                trial_id,
                method,
                exact_support_match: res.support == truth,
                per_entry_accuracy: per_entry_accuracy(p.n(), &res.support, &truth),
                l0_detected: res.support.len(),
                l0_true: truth.len(),
                x_error,
                certificate,
                error: res.error,
                wall_time,
            }
        })
        .collect();
    Ok(records)
}

fn summarize(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut by_method: BTreeMap<Method, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        by_method.entry(r.method).or_default().push(r);
    }
    cfg.methods
        .iter()
        .filter_map(|m| by_method.get(m).map(|rs| (*m, rs)))
        .map(|(method, rs)| {
            let cnt = rs.len() as f64;
            let mean = |f: &dyn Fn(&TrialRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / cnt;
            let certified: Vec<_> = rs.iter().filter_map(|r| r.certificate).collect();
            SummaryRow {
                experiment: cfg.name.clone(),
                method,
                trials: rs.len(),
                exact_rate: mean(&|r| r.exact_support_match as u8 as f64),
                per_entry_accuracy: mean(&|r| r.per_entry_accuracy),
                mean_x_error: mean(&|r| r.x_error),
                oracle_exact_rate: (!certified.is_empty()).then(|| {
                    certified.iter().filter(|c| **c == Certificate::Exact).count() as f64 / certified.len() as f64
                }),
                failures: rs.iter().filter(|r| r.error.is_some()).count(),
                mean_wall_time_s: mean(&|r| r.wall_time.as_secs_f64()),
            }
        })
        .collect()
}

/// Runs every trial (in parallel) and every requested method, then writes the
/// CSV outputs when `out_path` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    run_experiment_with(cfg, &SolverConfig::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, solver: &SolverConfig) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate()?;
    solver.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
    let per_trial: Vec<Vec<TrialRecord>> =
        (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t, solver)).collect::<Result<_, _>>()?;
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let summary = summarize(cfg, &records);
    let outcome = ExperimentOutcome { records, summary };
    if let Some(path) = &cfg.out_path {
        write_outputs(cfg, &outcome, path)?;
    }
    Ok(outcome)
}

fn cert_label(c: Option<Certificate>) -> String {
    match c {
        None => String::new(),
        Some(Certificate::Exact) => "exact".into(),
        Some(Certificate::SuboptimalBy(k)) => format!("suboptimal_by_{k}"),
        Some(Certificate::Spurious) => "spurious".into(),
        Some(Certificate::OracleTooLarge) => "oracle_too_large".into(),
    }
}

#[derive(Serialize)]
struct TrialRow<'a> {
    trial_id: usize,
    method: &'a str,
    exact_support_match: bool,
    per_entry_accuracy: f64,
    l0_detected: usize,
    l0_true: usize,
    x_error: f64,
    certificate: String,
    error: &'a str,
}

fn write_outputs(cfg: &ExperimentConfig, out: &ExperimentOutcome, path: &Path) -> Result<(), HarnessError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;

    let mut w = csv::Writer::from_path(path)?;
    for r in &out.records {
        w.serialize(TrialRow {
            trial_id: r.trial_id,
            method: r.method.as_str(),
            exact_support_match: r.exact_support_match,
            per_entry_accuracy: r.per_entry_accuracy,
            l0_detected: r.l0_detected,
            l0_true: r.l0_true,
            x_error: r.x_error,
            certificate: cert_label(r.certificate),
            error: r.error.as_deref().unwrap_or(""),
        })?;
    }
    w.flush()?;

    // wall times live in their own file so the per-trial CSV is reproducible
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trials");
    let mut t = File::create(dir.join(format!("{stem}_timing.csv")))?;
    writeln!(t, "trial_id,method,wall_time_s")?;
    for r in &out.records {
        writeln!(t, "{},{},{}", r.trial_id, r.method.as_str(), r.wall_time.as_secs_f64())?;
    }

    write_summary(&dir.join("summary.csv"), &cfg.name, &out.summary)
}

/// Replaces this experiment's rows in `summary.csv`, keeping rows of others.
fn write_summary(path: &Path, name: &str, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    const HEADER: &str =
        "experiment,method,trials,exact_rate,per_entry_accuracy,mean_x_error,oracle_exact_rate,failures,mean_wall_time_s";
    let mut kept: Vec<String> = Vec::new();
    if let Ok(existing) = std::fs::read_to_string(path) {
        let mut lines = existing.lines();
        if lines.next() == Some(HEADER) {
            let prefix = format!("{name},");
            kept.extend(lines.filter(|l| !l.starts_with(&prefix) && !l.is_empty()).map(String::from));
        }
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let fresh =
        String::from_utf8(w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?).expect("csv output is utf-8");
    let mut f = File::create(path)?;
    writeln!(f, "{HEADER}")?;
    for l in kept {
        writeln!(f, "{l}")?;
    }
    write!(f, "{fresh}")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snbr: usize,
    pub exact_rate: f64,
    pub per_entry_accuracy: f64,
}

/// Detector exact-support rate for each sample count in `snbrs`. Each trial
/// draws its samples once; smaller counts use a prefix of the same samples.
pub fn run_snbr_sweep(cfg: &ExperimentConfig, snbrs: &[usize]) -> Result<Vec<SweepPoint>, HarnessError> {
    cfg.validate()?;
    let max = *snbrs.iter().max().ok_or_else(|| HarnessError::Config("no sample counts given".into()))?;
    if snbrs.contains(&0) {
        return Err(HarnessError::Config("sample counts must be positive".into()));
    }
    let solver = SolverConfig::default();
    let sigma = cfg.effective_sigma();
    let per_trial: Vec<Vec<(bool, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<(bool, f64)>, HarnessError> {
            let (inst, sit_seed) = trial_instance(cfg, t)?;
            let p = &inst.problem;
            let truth = inst.true_support();
            let samples = detect_samples(p, max, cfg.eps, sit_seed, &solver, sigma)?;
            Ok(snbrs
                .iter()
                .map(|&sn| {
                    let support = match &samples {
                        Samples::Consistent(d) => d.support.clone(),
                        Samples::Drawn(all) => sparsest(all, sn as u64).map(|d| d.support).unwrap_or_default(),
                    };
                    (support == truth, per_entry_accuracy(p.n(), &support, &truth))
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;
    let trials = per_trial.len() as f64;
    Ok(snbrs
        .iter()
        .enumerate()
        .map(|(j, &snbr)| SweepPoint {
            snbr,
            exact_rate: per_trial.iter().filter(|t| t[j].0).count() as f64 / trials,
            per_entry_accuracy: per_trial.iter().map(|t| t[j].1).sum::<f64>() / trials,
        })
        .collect())
}
