//! Build explicit transformations from random candidates and check that they
//! preserve the set of sparsest error supports.

use sitl1::oracle::DEFAULT_CAP;
use sitl1::sit::{build_frame, build_phi, draw_candidate, sample_rng, verify_sip};
use sitl1::{DenseMatrix, DenseVector, Problem};

fn main() {
    let a = DenseMatrix::from_rows(&[
        vec![1.0, 0.5],
        vec![-0.3, 1.0],
        vec![2.0, 0.1],
        vec![0.7, -1.2],
        vec![1.1, 0.9],
        vec![-0.4, 0.3],
    ])
    .unwrap();
    let mut y = a.matvec(&[1.0, -2.0]);
    y[1] += 5.0;
    y[4] -= 3.0;
    let p = Problem::new(a, DenseVector::new(y.into_vec()).unwrap()).unwrap();
    let frame = build_frame(&p).unwrap();
    for k in 1..=5 {
        let cand = draw_candidate(&frame, &mut sample_rng(11, k), k);
        let phi = build_phi(&frame, &cand).unwrap();
        let rep = verify_sip(&phi, &p, DEFAULT_CAP).unwrap();
        println!(
            "sample {k}: complement defect {:.1e}, min sv {:.3}, min l0 {} -> {}, supports {:?} -> {:?}",
            rep.complement_defect,
            rep.min_singular_value,
            rep.min_l0_original,
            rep.min_l0_transformed,
            rep.supports_original,
            rep.supports_transformed
        );
    }
}
