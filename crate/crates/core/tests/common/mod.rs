#![allow(dead_code)]

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use sitl1::linalg::{pseudo_inverse_apply, DenseMatrix, DenseVector};
use sitl1::oracle::zero_tolerance;
use sitl1::sit::Problem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    DenseMatrix::new(rows, cols, data).unwrap()
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, len: usize) -> DenseVector {
    DenseVector::new((0..len).map(|_| StandardNormal.sample(rng)).collect()).unwrap()
}

/// Gaussian `A`, Gaussian `x`, and `s` errors with random sign and magnitude in `[1, 10]`.
pub struct Planted {
    pub problem: Problem,
    pub x: DenseVector,
    pub e: DenseVector,
}

impl Planted {
    pub fn support(&self) -> Vec<usize> {
        self.e.support(0.0)
    }
}

pub fn planted<R: Rng>(rng: &mut R, n: usize, r: usize, s: usize) -> Planted {
    let a = gaussian_matrix(rng, n, r);
    let x = gaussian_vector(rng, r);
    let mut e = vec![0.0; n];
    for i in sample(rng, n, s) {
        let mag: f64 = rng.random_range(1.0..10.0);
        e[i] = if rng.random_bool(0.5) { mag } else { -mag };
    }
    let y = a.matvec(&x).add(&e);
    Planted { problem: Problem::new(a, y).unwrap(), x, e: DenseVector::new(e).unwrap() }
}

/// All index subsets of `0..n` with `k` elements, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Second brute force, over candidate supports instead of row subsets: the
/// smallest `k` such that for some `T` with `|T| = k`, the rows outside `T` are
/// consistent. Returns the minimum and every support achieving it, or `None`
/// when nothing of size at most `max_k` works.
pub fn support_enumeration(p: &Problem, max_k: usize) -> Option<(usize, Vec<Vec<usize>>)> {
    let n = p.n();
    let ztol = zero_tolerance(p.y());
    for k in 0..=max_k.min(n - p.r()) {
        let mut found = Vec::new();
        for t in subsets(n, k) {
            let keep: Vec<usize> = (0..n).filter(|i| !t.contains(i)).collect();
            let a_k = p.a().select_rows(&keep);
            let y_k = p.y().select(&keep);
            let x = pseudo_inverse_apply(&a_k, &y_k).unwrap();
            let e = p.y().sub(&p.a().matvec(&x));
            let off: f64 = keep.iter().map(|&i| e[i].abs()).fold(0.0, f64::max);
            if off <= ztol && t.iter().all(|&i| e[i].abs() > ztol) {
                found.push(t);
            }
        }
        if !found.is_empty() {
            return Some((k, found));
        }
    }
    None
}
