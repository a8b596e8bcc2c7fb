//! One-sided Jacobi singular value decomposition.
//!
//! Columns of the working copy are rotated pairwise until mutually orthogonal;
//! the column norms are then the singular values. Accuracy is high relative to
//! each singular value, which matters for the rank decisions made downstream.

use super::dense::{axpy, dot, norm2};
use super::{DenseMatrix, LinalgError};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `m = u · diag(singular_values) · vᵀ` with `k = min(rows, cols)`
/// columns in `u` and `v`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    /// Numerical-rank threshold `max(rows, cols) · ε · σ_max`.
    pub fn rank_tol(&self) -> f64 {
        let dim = self.u.rows().max(self.v.rows()) as f64;
        dim * f64::EPSILON * self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self) -> usize {
        let tol = self.rank_tol();
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.singular_values.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.v.transpose())
    }
}

pub fn svd(m: &DenseMatrix) -> Result<SvdResult, LinalgError> {
    if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        let t = jacobi_tall(&m.transpose())?;
        Ok(SvdResult { u: t.v, singular_values: t.singular_values, v: t.u })
    }
}

fn jacobi_tall(m: &DenseMatrix) -> Result<SvdResult, LinalgError> {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j).into_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    // roundoff in the rotated dot products is of order rows·ε, so a tighter
    // off-diagonal test can cycle forever on well-conditioned input
    let tol = rows as f64 * f64::EPSILON;
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::SolverFailure(format!("Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<(f64, usize)> = a.iter().enumerate().map(|(j, c)| (norm2(c), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let singular_values: Vec<f64> = order.iter().map(|(s, _)| *s).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let dead = rows.max(cols) as f64 * f64::EPSILON * sigma_max;

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut v_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for &(s, j) in &order {
        v_cols.push(v[j].clone());
        if s > dead && s > 0.0 {
            u_cols.push(a[j].iter().map(|x| x / s).collect());
        } else {
            u_cols.push(vec![0.0; rows]);
        }
    }
    // Columns for tiny singular values carry roundoff of order ε‖m‖/σ; re-orthogonalise
    // in order of decreasing σ so the dominant directions are untouched.
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for (idx, col) in u_cols.into_iter().enumerate() {
        let alive = singular_values[idx] > dead && singular_values[idx] > 0.0;
        match alive.then(|| orthogonalize_against(&kept, col)).flatten() {
            Some(q) => kept.push(q),
            None => {
                let q = complete_one(&kept, rows)
                    .ok_or(LinalgError::SolverFailure("could not complete orthonormal basis".into()))?;
                kept.push(q);
            }
        }
    }

    let u_refs: Vec<&[f64]> = kept.iter().map(Vec::as_slice).collect();
    let v_refs: Vec<&[f64]> = v_cols.iter().map(Vec::as_slice).collect();
    Ok(SvdResult {
        u: DenseMatrix::from_columns(rows, &u_refs),
        singular_values,
        v: DenseMatrix::from_columns(cols, &v_refs),
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Two passes of Gram–Schmidt against `basis`; `None` if the remainder collapses.
pub(crate) fn orthogonalize_against(basis: &[Vec<f64>], mut v: Vec<f64>) -> Option<Vec<f64>> {
    let original = norm2(&v);
    if original == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &v);
            axpy(-c, q, &mut v);
        }
    }
    let n = norm2(&v);
    if n <= 1e-8 * original {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= n);
    Some(v)
}

/// Picks the coordinate vector with the largest component outside `basis` and
/// orthonormalises it against `basis`.
pub(crate) fn complete_one(basis: &[Vec<f64>], dim: usize) -> Option<Vec<f64>> {
    let mut best: Option<(f64, usize)> = None;
    for i in 0..dim {
        let inside: f64 = basis.iter().map(|q| q[i] * q[i]).sum();
        let outside = 1.0 - inside;
        if best.is_none_or(|(b, _)| outside > b) {
            best = Some((outside, i));
        }
    }
    let (_, i) = best?;
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    orthogonalize_against(basis, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let data = (0..rows * cols)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let r = svd(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(r.singular_values, vec![1.0, 1.0, 1.0]);
        assert!(r.u.sub(&DenseMatrix::identity(3)).max_abs() < 1e-15);
        assert!(r.v.sub(&DenseMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn column_vector_norm() {
        let a = DenseMatrix::new(3, 1, vec![-1.0, 1.0, -10.0]).unwrap();
        let r = svd(&a).unwrap();
        assert!((r.singular_values[0] - 102f64.sqrt()).abs() < 1e-12);
        let u0 = r.u.column(0);
        let expect: Vec<f64> = [-1.0, 1.0, -10.0].iter().map(|x| x / 102f64.sqrt()).collect();
        let same = u0.sub(&expect).norm_inf();
        let flipped = u0.add(&expect).norm_inf();
        assert!(same.min(flipped) < 1e-12);
    }

    #[test]
    fn reconstructs_tall_and_wide() {
        for (rows, cols, seed) in [(6, 3, 1), (3, 6, 2), (10, 10, 3), (1, 4, 4)] {
            let m = lcg_matrix(rows, cols, seed);
            let r = svd(&m).unwrap();
            assert!(r.reconstruct().sub(&m).max_abs() <= 1e-12);
            assert!(r.u.orthonormality_defect() <= 1e-12);
            assert!(r.v.orthonormality_defect() <= 1e-12);
            assert!(r.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn converges_where_a_machine_epsilon_test_cycles() {
        let m = DenseMatrix::from_rows(&[
            vec![-0.6499864550087331, -1.129279366387792, 1.082047645103045, -0.26975895640289965, 1.5648483752549065],
            vec![
                0.7043258069482039,
                -0.2329116533085044,
                0.17964205586766618,
                -0.6202909011440075,
                -0.01385680755596168,
            ],
            vec![
                -0.2515337518669233,
                -0.09405890130845244,
                -0.9272501910385168,
                0.24543376045967885,
                0.6177105660561915,
            ],
            vec![
                -1.2122969035744693,
                -0.07912693555795877,
                -0.3401198180359332,
                2.2803968196861506,
                0.5405248143519259,
            ],
            vec![0.19364149174773013, -2.131825907105131, 0.48197181750608264, 0.374281078544946, -0.6949182609087013],
        ])
        .unwrap();
        let r = svd(&m).unwrap();
        assert!(r.reconstruct().sub(&m).max_abs() <= 1e-12);
        assert!(r.v.orthonormality_defect() <= 1e-12);
    }

    #[test]
    fn rank_deficient_input_keeps_orthonormal_u() {
        let v = [0.3, -1.2, 0.7, 2.0];
        let m = DenseMatrix::from_columns(4, &[&v, &v.map(|x| 2.0 * x)]);
        let r = svd(&m).unwrap();
        assert_eq!(r.rank(), 1);
        assert!(r.u.orthonormality_defect() <= 1e-12);
        assert!(r.reconstruct().sub(&m).max_abs() <= 1e-12);
    }
}
