mod common;

use common::{planted, rng, subsets, support_enumeration};
use proptest::prelude::*;
use rand::Rng;

use sitl1::linalg::{pseudo_inverse_apply, DenseMatrix, DenseVector};
use sitl1::oracle::{binomial, certify, certify_support, l0_oracle, Certificate, DEFAULT_CAP};
use sitl1::sit::{detect, Problem};
use sitl1::SolverConfig;

#[test]
fn row_subsets_and_supports_agree_on_random_instances() {
    let mut r = rng(2024);
    for case in 0..100 {
        let n = r.random_range(6..=12);
        let rank = r.random_range(1..=3);
        let s = r.random_range(0..=3.min(n - rank - 1));
        let inst = planted(&mut r, n, rank, s);
        let res = l0_oracle(&inst.problem, DEFAULT_CAP).unwrap();
        let (k, supports) = support_enumeration(&inst.problem, 3).expect("planted support has size <= 3");
        assert_eq!(res.min_l0, k, "case {case}");
        assert_eq!(res.supports(), supports, "case {case}");
        assert!(res.min_l0 <= s);
    }
}

#[test]
fn planted_support_is_found_when_sparsest() {
    let mut r = rng(7);
    for _ in 0..20 {
        let inst = planted(&mut r, 10, 2, 3);
        let res = l0_oracle(&inst.problem, DEFAULT_CAP).unwrap();
        assert!(res.min_l0 <= 3);
        if res.min_l0 == 3 {
            assert!(res.supports().contains(&inst.support()));
        }
    }
}

#[test]
fn enumeration_count_is_bounded() {
    let mut r = rng(11);
    for _ in 0..20 {
        let n = r.random_range(4..=11);
        let rank = r.random_range(1..=3.min(n - 1));
        let inst = planted(&mut r, n, rank, 1);
        let res = l0_oracle(&inst.problem, DEFAULT_CAP).unwrap();
        assert!(res.enumerated <= binomial(n, rank).unwrap());
    }
    // repeated rows make many subsets singular
    let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let p = Problem::new(a, DenseVector::new(vec![1.0, 2.0, 1.0, 5.0]).unwrap()).unwrap();
    let res = l0_oracle(&p, DEFAULT_CAP).unwrap();
    assert_eq!(res.enumerated, 3);
    assert_eq!(res.min_l0, 1);
    assert_eq!(res.supports(), vec![vec![1]]);
}

/// Normalised residual directions of every full-rank row subset.
fn candidate_directions(p: &Problem) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for s in subsets(p.n(), p.r()) {
        let a_s = p.a().select_rows(&s);
        if sitl1::linalg::numerical_rank(&a_s).unwrap() < p.r() {
            continue;
        }
        let x = pseudo_inverse_apply(&a_s, &p.y().select(&s)).unwrap();
        let e = p.y().sub(&p.a().matvec(&x));
        let l1 = e.norm1();
        if l1 > 0.0 {
            let d: Vec<f64> = e.iter().map(|v| v / l1).collect();
            if !out.iter().any(|o| o.iter().zip(&d).all(|(a, b)| (a - b).abs() < 1e-9)) {
                out.push(d);
            }
        }
    }
    out
}

#[test]
fn sparsest_directions_are_extreme_points() {
    let mut r = rng(31);
    for _ in 0..15 {
        let inst = planted(&mut r, 8, 2, 2);
        let p = &inst.problem;
        let res = l0_oracle(p, DEFAULT_CAP).unwrap();
        let dirs = candidate_directions(p);
        for sol in &res.solutions {
            let l1 = sol.e.norm1();
            let d: Vec<f64> = sol.e.iter().map(|v| v / l1).collect();
            let others: Vec<&Vec<f64>> =
                dirs.iter().filter(|o| o.iter().zip(&d).any(|(a, b)| (a - b).abs() > 1e-9)).collect();
            for (i, p1) in others.iter().enumerate() {
                for p2 in &others[i + 1..] {
                    let diff: Vec<f64> = p1.iter().zip(p2.iter()).map(|(a, b)| a - b).collect();
                    let dd: f64 = diff.iter().map(|v| v * v).sum();
                    if dd < 1e-20 {
                        continue;
                    }
                    let num: f64 = d.iter().zip(p2.iter()).zip(&diff).map(|((a, b), c)| (a - b) * c).sum();
                    let theta = num / dd;
                    if theta <= 1e-9 || theta >= 1.0 - 1e-9 {
                        continue;
                    }
                    let miss: f64 = d
                        .iter()
                        .zip(p1.iter().zip(p2.iter()))
                        .map(|(a, (b, c))| (a - theta * b - (1.0 - theta) * c).abs())
                        .fold(0.0, f64::max);
                    assert!(miss > 1e-9, "sparsest direction is interior to a segment");
                }
            }
        }
    }
}

#[test]
fn certify_worked_example() {
    let a = DenseMatrix::new(3, 1, vec![-1.0, 1.0, -10.0]).unwrap();
    let y = DenseVector::new(vec![-1.0, 1.0, 0.0]).unwrap();
    let p = Problem::new(a, y).unwrap();
    let det = detect(&p, 50, 1e-3, 1, &SolverConfig::default(), 0.0).unwrap();
    assert_eq!(certify(&p, &det, DEFAULT_CAP), Certificate::Exact);
    let res = l0_oracle(&p, DEFAULT_CAP).unwrap();
    // the plain ℓ1 residual (−1, 1, 0)
    assert_eq!(certify_support(&res, &[0, 1]), Certificate::SuboptimalBy(1));
    assert_eq!(certify(&p, &det, 2), Certificate::OracleTooLarge);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn supports_are_distinct_and_residuals_consistent(seed in any::<u64>(), n in 5usize..10, rank in 1usize..3, s in 0usize..3) {
        let mut r = rng(seed);
        let inst = planted(&mut r, n, rank, s.min(n - rank - 1));
        let p = &inst.problem;
        let res = l0_oracle(p, DEFAULT_CAP).unwrap();
        let mut sup = res.supports();
        sup.dedup();
        prop_assert_eq!(sup.len(), res.solutions.len());
        for sol in &res.solutions {
            let resid = p.y().sub(&p.a().matvec(&sol.x));
            prop_assert!(resid.sub(&sol.e).norm_inf() <= 1e-9 * p.y().norm_inf().max(1.0));
            prop_assert_eq!(sol.support.len(), res.min_l0);
        }
    }
}
