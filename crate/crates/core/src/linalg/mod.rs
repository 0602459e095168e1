//! Dense complex linear algebra used by every functional in the crate.

mod eigen;
mod matrix;
mod polar;
mod schur;
mod svd;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, lambda_max, HermitianEigen};
pub(crate) use eigen::ExtremeEigenSolver;
pub use matrix::{block2x2, inner, vec_norm, ComplexMatrix};
pub use polar::{abs_matrix, im_part, polar, polar_with, psd_power, psd_power_with, re_part, PolarDecomposition};
pub(crate) use polar::{partial_isometry, weighted_projector};
pub use schur::{eigenvalues, spectral_radius};
pub use svd::{spectral_norm, svd, SvdResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerances shared by the kernels and the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative tolerance for identities.
    pub rel_eq: f64,
    /// Relative slack allowed on inequality checks.
    pub rel_ineq: f64,
    /// Singular values at or below `rank_cutoff · σ_max` count as zero.
    pub rank_cutoff: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rel_eq: 1e-9,
            rel_ineq: 1e-8,
            rank_cutoff: 1e-12,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rel_eq", self.rel_eq),
            ("rel_ineq", self.rel_ineq),
            ("rank_cutoff", self.rank_cutoff),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Frobenius norm of `a − b`.
pub fn residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}
