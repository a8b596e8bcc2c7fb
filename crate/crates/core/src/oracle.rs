//! Exact ℓ0 ground truth by enumerating row subsets.
//!
//! Every sparsest residual vanishes on at least `r` rows where `A` has full
//! rank, so solving `A(S,·)·x = y(S)` over all size-`r` subsets `S` finds all of
//! them. Cost is `C(n, r)` small solves; only for desk-scale instances.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{svd, DenseVector, LinalgError};
use crate::sit::{Detection, Problem};

pub const DEFAULT_CAP: u64 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("C({n}, {r}) exceeds the enumeration cap {cap}")]
    EnumerationTooLarge { n: usize, r: usize, cap: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub x: DenseVector,
    pub e: DenseVector,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub min_l0: usize,
    /// One entry per distinct support, sorted lexicographically by support.
    pub solutions: Vec<OracleSolution>,
    /// Number of full-rank subsets solved.
    pub enumerated: u64,
}

impl OracleResult {
    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.solutions.iter().map(|s| s.support.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    Exact,
    SuboptimalBy(usize),
    /// Same count as the optimum but a support the oracle does not list.
    Spurious,
    OracleTooLarge,
}

/// Entries at or below this magnitude count as zero.
pub fn zero_tolerance(y: &[f64]) -> f64 {
    1e-7 * y.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u64)? / (i as u64 + 1);
    }
    Some(acc)
}

/// Advances `idx` to the next size-`k` combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn l0_oracle(p: &Problem, cap: u64) -> Result<OracleResult, OracleError> {
    let (n, r) = (p.n(), p.r());
    match binomial(n, r) {
        Some(c) if c <= cap => {}
        _ => return Err(OracleError::EnumerationTooLarge { n, r, cap }),
    }
    let ztol = zero_tolerance(p.y());
    let mut best = usize::MAX;
    let mut found: BTreeMap<Vec<usize>, OracleSolution> = BTreeMap::new();
    let mut enumerated = 0u64;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let a_s = p.a().select_rows(&idx);
        let dec = svd(&a_s)?;
        if dec.rank() == r {
            enumerated += 1;
            let y_s = p.y().select(&idx);
            let mut x = vec![0.0; r];
            for (j, sigma) in dec.singular_values.iter().enumerate() {
                let c = dec.u.column(j).dot(&y_s) / sigma;
                let vj = dec.v.column(j);
                for (xi, vi) in x.iter_mut().zip(vj.iter()) {
                    *xi += c * vi;
                }
            }
            let x = DenseVector::new(x)?;
            let e = p.y().sub(&p.a().matvec(&x));
            let support = e.support(ztol);
            if support.len() < best {
                best = support.len();
                found.clear();
            }
            if support.len() == best {
                found.entry(support.clone()).or_insert(OracleSolution { x, e, support });
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    if found.is_empty() {
        // unreachable for a full-rank A: some r rows are independent
        return Err(OracleError::Linalg(LinalgError::SolverFailure("no full-rank row subset".into())));
    }
    Ok(OracleResult { min_l0: best, solutions: found.into_values().collect(), enumerated })
}

/// Compares a detection with the exact optimum.
pub fn certify(p: &Problem, det: &Detection, cap: u64) -> Certificate {
    let Ok(res) = l0_oracle(p, cap) else {
        return Certificate::OracleTooLarge;
    };
    certify_against(&res, det)
}

/// [`certify`] against an oracle result that has already been computed.
pub fn certify_against(res: &OracleResult, det: &Detection) -> Certificate {
    certify_support(res, &det.support)
}

/// Verdict for a detected support (sorted ascending).
pub fn certify_support(res: &OracleResult, support: &[usize]) -> Certificate {
    let l0 = support.len();
    if l0 > res.min_l0 {
        return Certificate::SuboptimalBy(l0 - res.min_l0);
    }
    if l0 == res.min_l0 && res.solutions.iter().any(|s| s.support == support) {
        Certificate::Exact
    } else {
        Certificate::Spurious
    }
}
