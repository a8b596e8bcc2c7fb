use std::time::{Duration, Instant};

use super::HarnessError;
use crate::l1solve::{solve_lad, SolverConfig};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::oracle::{certify, l0_oracle, Certificate, DEFAULT_CAP};
use crate::sit::{detect, Problem};

/// Tolerance for the printed four-digit values.
pub const PRINTED_TOL: f64 = 1e-3;
pub const SNBR: usize = 50;
pub const SEED: u64 = 1;
pub const EPS: f64 = 1e-3;

/// Three-row instance where ℓ1 on the residual picks two errors but a single
/// error of size 10 explains the data.
pub fn example_problem() -> Problem {
    let a = DenseMatrix::new(3, 1, vec![-1.0, 1.0, -10.0]).expect("static data");
    let y = DenseVector::new(vec![-1.0, 1.0, 0.0]).expect("static data");
    Problem::new(a, y).expect("full column rank")
}

/// The transformation as printed to four digits.
#[allow(clippy::approx_constant)]
pub fn printed_phi() -> DenseMatrix {
    DenseMatrix::from_rows(&[vec![0.5, 0.5, 0.7071], vec![0.5, 0.5, -0.7071], vec![-0.7071, 0.7071, 0.0]])
        .expect("static data")
}

#[allow(clippy::approx_constant)]
pub const PRINTED_PHI_Y: [f64; 3] = [0.0, 0.0, 1.4142];
#[allow(clippy::approx_constant)]
pub const PRINTED_PHI_A: [f64; 3] = [7.0711, -7.0711, 1.4142];

/// One named comparison with its pass/fail verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Example31Report {
    pub lad_residual: DenseVector,
    pub oracle_error: DenseVector,
    pub oracle_supports: Vec<Vec<usize>>,
    pub phi_y: DenseVector,
    pub phi_a: DenseVector,
    pub detected_support: Vec<usize>,
    pub detected_error: DenseVector,
    pub certificate: Certificate,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Example31Report {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn one_based(s: &[usize]) -> Vec<usize> {
    s.iter().map(|i| i + 1).collect()
}

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

pub fn run_example_3_1() -> Result<Example31Report, HarnessError> {
    let start = Instant::now();
    let p = example_problem();
    let solver = SolverConfig::default();
    let mut checks = Vec::new();

    let lad = solve_lad(p.a(), p.y(), &solver)?;
    let lad_residual = p.y().sub(&p.a().matvec(&lad.solution));
    let d = max_diff(&lad_residual, &[-1.0, 1.0, 0.0]);
    checks.push(Check {
        name: "lad residual",
        detail: format!("{} (max diff {d:.1e})", fmt(&lad_residual)),
        pass: d <= 1e-6,
    });

    let oracle = l0_oracle(&p, DEFAULT_CAP)?;
    let oracle_error = oracle.solutions[0].e.clone();
    let oracle_supports = oracle.supports();
    let d = max_diff(&oracle_error, &[0.0, 0.0, 10.0]);
    checks.push(Check {
        name: "oracle sparsest error",
        detail: format!("{} support {:?} (1-based)", fmt(&oracle_error), one_based(&oracle_supports[0])),
        pass: oracle.min_l0 == 1 && oracle_supports == vec![vec![2]] && d <= 1e-9,
    });

    let phi = printed_phi();
    let z = [1.0, 1.0, 0.0];
    let dz = max_diff(&phi.matvec(&z), &z);
    checks.push(Check {
        name: "printed phi fixes z",
        detail: format!("max |phi z - z| = {dz:.1e}"),
        pass: dz <= PRINTED_TOL,
    });
    let orth = phi.orthonormality_defect();
    checks.push(Check {
        name: "printed phi orthogonal",
        detail: format!("max |phi^T phi - I| = {orth:.1e}"),
        pass: orth <= PRINTED_TOL,
    });

    let phi_y = phi.matvec(p.y());
    let d = max_diff(&phi_y, &PRINTED_PHI_Y);
    checks.push(Check {
        name: "phi y matches printed",
        detail: format!("{} vs {}", fmt(&phi_y), fmt(&PRINTED_PHI_Y)),
        pass: d <= PRINTED_TOL,
    });
    let phi_a = phi.matvec(&p.a().column(0));
    let d = max_diff(&phi_a, &PRINTED_PHI_A);
    checks.push(Check {
        name: "phi A matches printed",
        detail: format!("{} vs {}", fmt(&phi_a), fmt(&PRINTED_PHI_A)),
        pass: d <= PRINTED_TOL,
    });

    let det = detect(&p, SNBR, EPS, SEED, &solver, 0.0)?;
    let d = max_diff(&det.e_scaled, &[0.0, 0.0, 10.0]);
    checks.push(Check {
        name: "detection",
        detail: format!("support {:?} (1-based), e {}", one_based(&det.support), fmt(&det.e_scaled)),
        pass: det.support == vec![2] && d <= PRINTED_TOL,
    });
    let certificate = certify(&p, &det, DEFAULT_CAP);
    checks.push(Check {
        name: "certified exact",
        detail: format!("{certificate:?}"),
        pass: certificate == Certificate::Exact,
    });

    let elapsed = start.elapsed();
    Ok(Example31Report {
        lad_residual,
        oracle_error,
        oracle_supports,
        phi_y,
        phi_a,
        detected_support: det.support,
        detected_error: det.e_scaled,
        certificate,
        checks,
        elapsed,
    })
}
