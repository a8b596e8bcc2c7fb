use super::{CandidateA, OrthoFrame, SitError};
use crate::linalg::{orthogonalize, DenseMatrix};

/// Orthogonal `Φ` with `Φ·u_next = a` that fixes the complement of
/// `span([A, y])` pointwise. The remaining directions are completed by
/// Gram–Schmidt over the columns of `u_r` in order, so `a = u_next` gives `Φ = I`.
pub fn build_phi(frame: &OrthoFrame, cand: &CandidateA) -> Result<DenseMatrix, SitError> {
    let n = frame.n();
    if cand.a.dim() != n {
        return Err(SitError::DimensionMismatch(format!("candidate has {} entries, frame has {n}", cand.a.dim())));
    }
    let r1 = frame.r() + 1;
    let mut w: Vec<Vec<f64>> = vec![frame.u_next.clone().into_vec()];
    w.extend((0..frame.r()).map(|j| frame.u_r.column(j).into_vec()));

    let mut w_prime: Vec<Vec<f64>> = Vec::with_capacity(r1);
    let sources = std::iter::once(cand.a.clone().into_vec())
        .chain((0..frame.r()).map(|j| frame.u_r.column(j).into_vec()))
        .chain(std::iter::once(frame.u_next.clone().into_vec()));
    for v in sources {
        if w_prime.len() == r1 {
            break;
        }
        if let Some(q) = orthogonalize(&w_prime, v) {
            w_prime.push(q);
        }
    }
    if w_prime.len() < r1 {
        return Err(SitError::GramSchmidtBreakdown);
    }

    let mut phi = DenseMatrix::zeros(n, n);
    for (wp, wc) in w_prime.iter().zip(&w) {
        for (i, &wi) in wp.iter().enumerate() {
            for (x, &wj) in phi.row_mut(i).iter_mut().zip(wc.iter()) {
                *x += wi * wj;
            }
        }
    }
    let uc = &frame.u_comp;
    for k in 0..uc.cols() {
        let c = uc.column(k);
        for i in 0..n {
            let row = phi.row_mut(i);
            for (j, x) in row.iter_mut().enumerate() {
                *x += c[i] * c[j];
            }
        }
    }
    Ok(phi)
}

/// `Φ·fᵀ` without forming `Φ`: `fᵀ + (a − u_next)(f·u_next)ᵀ`, valid for `f`
/// whose rows are orthogonal to `span(A)`.
pub fn phi_times_ft(frame: &OrthoFrame, cand: &CandidateA, f: &DenseMatrix) -> Result<DenseMatrix, SitError> {
    let n = frame.n();
    if f.cols() != n || cand.a.dim() != n {
        return Err(SitError::DimensionMismatch(format!("f is {}x{}, expected {n} columns", f.rows(), f.cols())));
    }
    let leak = f.matmul(&frame.u_r).max_abs();
    if leak > 1e-8 * f.max_abs().max(1.0) {
        return Err(SitError::PreconditionViolated(format!(
            "rows of f are not orthogonal to span(A) (max component {leak:.3e})"
        )));
    }
    let fu = f.matvec(&frame.u_next);
    let diff = cand.a.sub(&frame.u_next);
    let mut out = f.transpose();
    for i in 0..n {
        let row = out.row_mut(i);
        for (j, x) in row.iter_mut().enumerate() {
            *x += diff[i] * fu[j];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseVector;
    use crate::sit::{build_frame, draw_candidate, sample_rng, Problem};

    fn frame() -> OrthoFrame {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.3],
            vec![0.2, -1.0],
            vec![2.0, 0.5],
            vec![-0.7, 1.1],
            vec![0.4, 0.9],
            vec![1.3, -0.2],
        ])
        .unwrap();
        let y = DenseVector::new(vec![1.0, -2.0, 0.5, 3.0, 0.1, -1.0]).unwrap();
        build_frame(&Problem::new(a, y).unwrap()).unwrap()
    }

    #[test]
    fn direct_candidate_gives_identity() {
        let fr = frame();
        let phi = build_phi(&fr, &CandidateA::direct(&fr)).unwrap();
        assert!(phi.sub(&DenseMatrix::identity(6)).max_abs() < 1e-9);
    }

    #[test]
    fn random_candidate_defining_properties() {
        let fr = frame();
        for i in 1..10 {
            let c = draw_candidate(&fr, &mut sample_rng(5, i), i);
            let phi = build_phi(&fr, &c).unwrap();
            assert!(phi.orthonormality_defect() < 1e-10);
            assert!(phi.matvec(&fr.u_next).sub(&c.a).norm2() < 1e-9);
            let fixed = phi.matmul(&fr.u_comp).sub(&fr.u_comp).max_abs();
            assert!(fixed < 1e-10);
        }
    }

    #[test]
    fn implicit_product_matches_explicit() {
        let fr = frame();
        let f = DenseMatrix::from_columns(6, &[fr.u_next.as_slice()]).hstack(&fr.u_comp).transpose();
        for i in 1..6 {
            let c = draw_candidate(&fr, &mut sample_rng(9, i), i);
            let implicit = phi_times_ft(&fr, &c, &f).unwrap();
            let explicit = build_phi(&fr, &c).unwrap().matmul(&f.transpose());
            assert!(implicit.sub(&explicit).max_abs() < 1e-9);
            let expect = DenseMatrix::from_columns(6, &[c.a.as_slice()]).hstack(&fr.u_comp);
            assert!(implicit.sub(&expect).max_abs() < 1e-9);
        }
        let direct = phi_times_ft(&fr, &CandidateA::direct(&fr), &f).unwrap();
        assert!(direct.sub(&f.transpose()).max_abs() < 1e-15);
    }

    #[test]
    fn rows_inside_span_a_rejected() {
        let fr = frame();
        let f = fr.u_r.transpose();
        assert!(matches!(phi_times_ft(&fr, &CandidateA::direct(&fr), &f), Err(SitError::PreconditionViolated(_))));
    }
}
