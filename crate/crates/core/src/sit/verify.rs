use super::{Problem, SitError};
use crate::linalg::{orthobasis_complement, svd, DenseMatrix, LinalgError};
use crate::oracle::l0_oracle;

/// Outcome of checking that a transformation preserves the sparsest errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SipReport {
    /// `max ‖Φ·z − z‖∞` over an orthobasis of the complement of `span([A, y])`.
    pub complement_defect: f64,
    /// Smallest singular value of `Φ`.
    pub min_singular_value: f64,
    pub min_l0_original: usize,
    pub min_l0_transformed: usize,
    pub supports_original: Vec<Vec<usize>>,
    pub supports_transformed: Vec<Vec<usize>>,
}

impl SipReport {
    pub fn in_family(&self, tol: f64) -> bool {
        self.complement_defect <= tol && self.min_singular_value > tol
    }

    pub fn counts_equal(&self) -> bool {
        self.min_l0_original == self.min_l0_transformed
    }

    pub fn supports_equal(&self) -> bool {
        self.supports_original == self.supports_transformed
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.in_family(tol) && self.counts_equal() && self.supports_equal()
    }
}

pub fn verify_sip(phi: &DenseMatrix, p: &Problem, cap: u64) -> Result<SipReport, SitError> {
    let n = p.n();
    let transformed = p.transformed(phi)?;
    let ay = p.a().hstack(&DenseMatrix::from_columns(n, &[p.y().as_slice()]));
    let complement_defect = match orthobasis_complement(&ay) {
        Ok(z) => phi.matmul(&z).sub(&z).max_abs(),
        Err(LinalgError::FullRank) => 0.0,
        Err(e) => return Err(e.into()),
    };
    let min_singular_value = svd(phi)?.singular_values.last().copied().unwrap_or(0.0);
    let before = l0_oracle(p, cap)?;
    let after = l0_oracle(&transformed, cap)?;
    Ok(SipReport {
        complement_defect,
        min_singular_value,
        min_l0_original: before.min_l0,
        min_l0_transformed: after.min_l0,
        supports_original: before.supports(),
        supports_transformed: after.supports(),
    })
}
