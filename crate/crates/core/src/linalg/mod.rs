//! Dense real linear algebra: storage, SVD, orthobases, Cholesky and
//! minimum-norm least squares.

mod dense;
mod svd;

pub use dense::{DenseMatrix, DenseVector};
pub use svd::{svd, SvdResult};

pub(crate) use dense::{axpy, dot, norm2};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix or vector contains a non-finite entry")]
    NonFinite,
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("rows have differing lengths")]
    Ragged,
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("numerical routine failed: {0}")]
    SolverFailure(String),
    #[error("range is the whole space; orthogonal complement is trivial")]
    FullRank,
    #[error("matrix is numerically zero")]
    ZeroMatrix,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

pub fn numerical_rank(m: &DenseMatrix) -> Result<usize, LinalgError> {
    Ok(svd(m)?.rank())
}

/// Orthonormal basis of `range(m)`; one column per numerically nonzero singular value.
pub fn orthobasis_range(m: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    let s = svd(m)?;
    let rank = s.rank();
    if rank == 0 {
        return Err(LinalgError::ZeroMatrix);
    }
    Ok(s.u.select_columns(&(0..rank).collect::<Vec<_>>()))
}

/// Orthonormal basis of `range(m)^⊥`.
pub fn orthobasis_complement(m: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    let s = svd(m)?;
    let rank = s.rank();
    let n = m.rows();
    if rank >= n {
        return Err(LinalgError::FullRank);
    }
    let range: Vec<Vec<f64>> = (0..rank).map(|j| s.u.column(j).into_vec()).collect();
    complete_basis(&range, n)
}

/// Extends the orthonormal columns `basis` (each of length `dim`) to a basis of
/// the whole space and returns only the added columns.
pub(crate) fn complete_basis(basis: &[Vec<f64>], dim: usize) -> Result<DenseMatrix, LinalgError> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut added = Vec::with_capacity(dim.saturating_sub(basis.len()));
    while all.len() < dim {
        let q = svd::complete_one(&all, dim)
            .ok_or_else(|| LinalgError::SolverFailure("basis completion broke down".into()))?;
        all.push(q.clone());
        added.push(q);
    }
    let refs: Vec<&[f64]> = added.iter().map(Vec::as_slice).collect();
    Ok(DenseMatrix::from_columns(dim, &refs))
}

/// Gram–Schmidt (two passes) of `v` against orthonormal `basis`; `None` on collapse.
pub(crate) fn orthogonalize(basis: &[Vec<f64>], v: Vec<f64>) -> Option<Vec<f64>> {
    svd::orthogonalize_against(basis, v)
}

/// Minimum-norm least-squares solution `m⁺ b`.
pub fn pseudo_inverse_apply(m: &DenseMatrix, b: &[f64]) -> Result<DenseVector, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch { expected: (m.rows(), 1), found: (b.len(), 1) });
    }
    let s = svd(m)?;
    let tol = s.rank_tol();
    let mut x = vec![0.0; m.cols()];
    for (j, sigma) in s.singular_values.iter().enumerate() {
        if *sigma <= tol || *sigma == 0.0 {
            continue;
        }
        let coeff = s.u.column(j).dot(b) / sigma;
        axpy(coeff, &s.v.column(j), &mut x);
    }
    Ok(DenseVector::from_vec(x))
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &DenseMatrix) -> Result<Self, LinalgError> {
        let n = m.rows();
        if m.cols() != n {
            return Err(LinalgError::DimensionMismatch { expected: (n, n), found: m.shape() });
        }
        let mut l = m.as_slice().to_vec();
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d.is_nan() || d <= 0.0 {
                return Err(LinalgError::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = l[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                l[i * n + j] = 0.0;
            }
        }
        Ok(Self { n, l })
    }

    // forward then back substitution reads most clearly with explicit indices
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}
