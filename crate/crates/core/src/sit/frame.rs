use super::{Problem, SitError};
use crate::linalg::{complete_basis, orthobasis_range, DenseMatrix, DenseVector};

/// Orthonormal decomposition `ℝⁿ = span(A) ⊕ span(u_next) ⊕ span(u_comp)`
/// with `t = u_nextᵀ y`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoFrame {
    pub u_r: DenseMatrix,
    pub u_next: DenseVector,
    /// `n × (n − r − 1)`; has zero columns when `n = r + 1`.
    pub u_comp: DenseMatrix,
    pub t: f64,
}

impl OrthoFrame {
    pub fn n(&self) -> usize {
        self.u_r.rows()
    }

    pub fn r(&self) -> usize {
        self.u_r.cols()
    }

    /// `[u_r | u_next]`, an orthobasis of `span([A, y])`.
    pub fn span_basis(&self) -> DenseMatrix {
        let un = DenseMatrix::from_columns(self.n(), &[self.u_next.as_slice()]);
        self.u_r.hstack(&un)
    }
}

pub fn build_frame(p: &Problem) -> Result<OrthoFrame, SitError> {
    let n = p.n();
    let u_r = orthobasis_range(p.a())?;
    if u_r.cols() != p.r() {
        return Err(SitError::InvalidProblem("A lost rank while building its orthobasis".into()));
    }
    let y = p.y();
    // two projection passes keep u_next orthogonal to span(A) to working precision
    let mut resid = y.clone();
    for _ in 0..2 {
        let c = u_r.tr_matvec(&resid);
        resid = resid.sub(&u_r.matvec(&c));
    }
    let norm = resid.norm2();
    if norm <= 1e-10 * y.norm2() || norm == 0.0 {
        return Err(SitError::DegenerateY);
    }
    let u_next = resid.scaled(1.0 / norm);
    let mut cols: Vec<Vec<f64>> = (0..u_r.cols()).map(|j| u_r.column(j).into_vec()).collect();
    cols.push(u_next.clone().into_vec());
    let u_comp = if cols.len() < n { complete_basis(&cols, n)? } else { DenseMatrix::zeros(n, 0) };
    let t = u_next.dot(y);
    Ok(OrthoFrame { u_r, u_next, u_comp, t })
}
