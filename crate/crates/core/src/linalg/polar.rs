use num_complex::Complex64;

use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use super::svd::{svd, SvdResult};
use super::ToleranceConfig;
use crate::error::{Error, Result};

/// `X = V|X|` with `V` a partial isometry whose initial space is `range(|X|)`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub isometry: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

/// `Re(X) = (X + X*)/2`.
pub fn re_part(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.require_square()?;
    Ok(x.hermitian_part())
}

/// `Im(X) = (X − X*)/(2i)`.
pub fn im_part(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.require_square()?;
    Ok(x.scale(Complex64::new(0.0, -1.0)).hermitian_part())
}

/// `|X| = (X*X)^{1/2}`.
pub fn abs_matrix(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.require_square()?;
    let s = svd(x)?;
    Ok(weighted_projector(&s.right, &s.singular_values, |v| v))
}

pub fn polar(x: &ComplexMatrix) -> Result<PolarDecomposition> {
    polar_with(x, &ToleranceConfig::default())
}

pub fn polar_with(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PolarDecomposition> {
    let n = x.require_square()?;
    if x.is_zero() {
        return Ok(PolarDecomposition {
            isometry: ComplexMatrix::zeros(n, n),
            modulus: ComplexMatrix::zeros(n, n),
        });
    }
    let s = svd(x)?;
    Ok(PolarDecomposition {
        isometry: partial_isometry(&s, tol.rank_cutoff),
        modulus: weighted_projector(&s.right, &s.singular_values, |v| v),
    })
}

/// `Σ_{σ_k > cutoff·σ_max} u_k v_k*`.
pub(crate) fn partial_isometry(s: &SvdResult, cutoff: f64) -> ComplexMatrix {
    let r = s.rank(cutoff);
    let (m, n) = (s.left.rows(), s.right.rows());
    ComplexMatrix::from_fn(m, n, |i, j| (0..r).map(|k| s.left[(i, k)] * s.right[(j, k)].conj()).sum())
}

/// `Σ_k f(w_k) q_k q_k*` over the columns of `q`.
pub(crate) fn weighted_projector(q: &ComplexMatrix, weights: &[f64], f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = q.rows();
    let vals: Vec<f64> = weights.iter().map(|&w| f(w)).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let acc: Complex64 = vals
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(k, &v)| q[(i, k)] * q[(j, k)].conj() * v)
                .sum();
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
        out[(i, i)].im = 0.0;
    }
    out
}

/// `P^s` for positive semidefinite `P` and `s ∈ [0, 1]`.
///
/// Eigenvalues at or below `rank_cutoff · λ_max` are treated as zero, so
/// `P^0` is the orthogonal projection onto `range(P)`.
pub fn psd_power(p: &ComplexMatrix, s: f64) -> Result<ComplexMatrix> {
    psd_power_with(p, s, &ToleranceConfig::default())
}

pub fn psd_power_with(p: &ComplexMatrix, s: f64, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "[0,1]",
        });
    }
    let n = p.require_square()?;
    let eig = hermitian_eigen(p)?;
    let top = eig.max().max(0.0);
    if top == 0.0 {
        if eig.min() < 0.0 {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: eig.min(),
            });
        }
        return Ok(ComplexMatrix::zeros(n, n));
    }
    if eig.min() < -tol.rel_ineq * top {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: eig.min(),
        });
    }
    let floor = tol.rank_cutoff * top;
    Ok(eig.reconstruct_with(|l| {
        if l <= floor {
            0.0
        } else if s == 0.0 {
            1.0
        } else {
            l.powf(s)
        }
    }))
}
