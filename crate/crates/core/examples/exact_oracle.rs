//! Exact minimum-ℓ0 errors by enumeration, compared with plain LAD.

use sitl1::{l0_oracle, solve_lad, DenseMatrix, DenseVector, Problem, SolverConfig};

fn main() {
    let a = DenseMatrix::from_rows(&[
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![1.0, 2.0],
        vec![1.0, 3.0],
        vec![1.0, 4.0],
        vec![1.0, 30.0],
    ])
    .unwrap();
    // line y = 1 + 2α with the high-leverage last point corrupted
    let y = DenseVector::new(vec![1.0, 3.0, 5.0, 7.0, 9.0, 0.0]).unwrap();
    let p = Problem::new(a, y).unwrap();

    let res = l0_oracle(&p, 2_000_000).unwrap();
    println!("min l0 {} over {} subsets", res.min_l0, res.enumerated);
    for s in &res.solutions {
        println!("  support {:?} x {:?}", s.support, s.x.as_slice());
    }
    let lad = solve_lad(p.a(), p.y(), &SolverConfig::default()).unwrap();
    let resid = p.y().sub(&p.a().matvec(&lad.solution));
    println!("LAD x {:?} residual support {:?}", lad.solution.as_slice(), resid.support(1e-6));
}
