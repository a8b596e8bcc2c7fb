use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{OrthoFrame, SitError};
use crate::linalg::DenseVector;

/// Unit vector in `span([u_r | u_next])`. `seed_index = 0` is reserved for the
/// deterministic candidate `a = u_next`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateA {
    pub a: DenseVector,
    pub seed_index: u64,
}

impl CandidateA {
    /// The candidate `a = u_next`, for which the transformation is the identity.
    pub fn direct(frame: &OrthoFrame) -> Self {
        Self { a: frame.u_next.clone(), seed_index: 0 }
    }

    /// `a = [u_r | u_next]·f/‖f‖₂`.
    pub fn from_coefficients(frame: &OrthoFrame, f: &[f64], seed_index: u64) -> Result<Self, SitError> {
        let r1 = frame.r() + 1;
        if f.len() != r1 {
            return Err(SitError::DimensionMismatch(format!("expected {r1} coefficients, got {}", f.len())));
        }
        let norm = crate::linalg::norm2(f);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SitError::PreconditionViolated("coefficient vector must be nonzero and finite".into()));
        }
        let scaled: Vec<f64> = f.iter().map(|v| v / norm).collect();
        let mut a = frame.span_basis().matvec(&scaled);
        // renormalise to absorb rounding in the basis
        let an = a.norm2();
        a = a.scaled(1.0 / an);
        Ok(Self { a, seed_index })
    }
}

/// RNG for sample `index` of a run seeded with `seed`. Substreams are fixed by
/// `(seed, index)` so a sample does not depend on how many others are drawn.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn draw_candidate<R: rand::Rng + ?Sized>(frame: &OrthoFrame, rng: &mut R, seed_index: u64) -> CandidateA {
    let r1 = frame.r() + 1;
    loop {
        let f: Vec<f64> = (0..r1).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(c) = CandidateA::from_coefficients(frame, &f, seed_index) {
            return c;
        }
    }
}
