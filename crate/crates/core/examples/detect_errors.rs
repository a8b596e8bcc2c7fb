//! Plant sparse errors in a random tall system and detect them.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sitl1::{certify, detect, solve_lad, DenseMatrix, DenseVector, Problem, SolverConfig};

fn main() {
    let (n, r, s) = (40, 5, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut gauss = |len: usize| -> Vec<f64> { (0..len).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let a = DenseMatrix::new(n, r, gauss(n * r)).unwrap();
    let x = gauss(r);
    let mut y = a.matvec(&x);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut truth: Vec<usize> = sample(&mut rng, n, s).into_vec();
    truth.sort_unstable();
    for &i in &truth {
        y[i] += 10.0;
    }
    let p = Problem::new(a, DenseVector::new(y.into_vec()).unwrap()).unwrap();
    let cfg = SolverConfig::default();

    let det = detect(&p, 100, 0.2, 1, &cfg, 0.0).unwrap();
    println!("planted support  {truth:?}");
    println!("detected support {:?}", det.support);
    println!("x error {:.2e}", det.x_hat.sub(&x).norm_inf());
    println!("certificate {:?}", certify(&p, &det, 2_000_000));

    let lad = solve_lad(p.a(), p.y(), &cfg).unwrap();
    let resid = p.y().sub(&p.a().matvec(&lad.solution));
    println!("LAD support      {:?}", resid.support(1e-6));
}
