//! Sparsest solution of a wide system `F·e = b` via the detector on its kernel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sitl1::{recover_underdetermined, DenseMatrix, DenseVector, SolverConfig};

fn main() {
    let (m, n) = (12, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data: Vec<f64> = (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let f = DenseMatrix::new(m, n, data).unwrap();
    let mut e = vec![0.0; n];
    e[2] = 4.0;
    e[11] = -3.0;
    e[17] = 1.5;
    let b = DenseVector::new(f.matvec(&e).into_vec()).unwrap();

    let det = recover_underdetermined(&f, &b, 100, 1e-6, 1, &SolverConfig::default()).unwrap();
    println!("support {:?}", det.support);
    println!("max error {:.2e}", det.e_scaled.sub(&e).norm_inf());
}
