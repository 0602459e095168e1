//! The two-parameter functional `Δ_(ρ,ν)(X) = w(H)` with
//!
//! ```text
//! H = [[0,       αX     ],
//!      [αμX*,    β(X + μX*)]]
//! ```
//!
//! where `α = √(8/ρ − 4)`, `β = 2/ρ − 2` and `μ = 1 − 2ν`.
//!
//! Note `β = −1` at `ρ = 2`, so `H = [[0, 0], [0, −(X + μX*)]]` there and
//! `Δ_(2,ν)(X) = w(X + μX*)` without any special handling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block2x2, residual, spectral_norm, ComplexMatrix};
use crate::radii::{numerical_radius, validate_rho, AngleSolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoNuParams {
    pub rho: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `1 − 2ν`.
    pub mu: f64,
}

impl RhoNuParams {
    /// Roundoff amplification of the block coefficients: `(1 + α + |β|)²`.
    pub fn coefficient_scale(&self) -> f64 {
        let s = 1.0 + self.alpha + self.beta.abs();
        s * s
    }
}

pub fn validate_nu(nu: f64) -> Result<()> {
    if (0.0..=1.0).contains(&nu) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "nu",
            value: nu,
            range: "[0,1]",
        })
    }
}

pub fn make_params(rho: f64, nu: f64) -> Result<RhoNuParams> {
    validate_rho(rho)?;
    validate_nu(nu)?;
    Ok(RhoNuParams {
        rho,
        nu,
        alpha: (8.0 / rho - 4.0).max(0.0).sqrt(),
        beta: 2.0 / rho - 2.0,
        mu: 1.0 - 2.0 * nu,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBlocks {
    pub h: ComplexMatrix,
    pub g: ComplexMatrix,
}

/// `X + μX*`.
pub fn mixed_sum(x: &ComplexMatrix, mu: f64) -> ComplexMatrix {
    x + &x.adjoint().scale_real(mu)
}

pub fn build_blocks(x: &ComplexMatrix, p: &RhoNuParams) -> Result<DeltaBlocks> {
    let n = x.require_square()?;
    let z = ComplexMatrix::zeros(n, n);
    let ax = x.scale_real(p.alpha);
    let h = block2x2(
        &z,
        &ax,
        &x.adjoint().scale_real(p.alpha * p.mu),
        &mixed_sum(x, p.mu).scale_real(p.beta),
    )?;
    let g = block2x2(&z, &ax, &z, &x.scale_real(p.beta))?;
    Ok(DeltaBlocks { h, g })
}

/// `Δ_(ρ,ν)(X)`.
pub fn delta(x: &ComplexMatrix, rho: f64, nu: f64, cfg: &AngleSolverConfig) -> Result<f64> {
    delta_with(x, &make_params(rho, nu)?, cfg)
}

pub fn delta_with(x: &ComplexMatrix, p: &RhoNuParams, cfg: &AngleSolverConfig) -> Result<f64> {
    if p.rho == 2.0 {
        // w([[0,0],[0,−K]]) = w(K); evaluate on the n×n matrix directly.
        x.require_square()?;
        return numerical_radius(&mixed_sum(x, p.mu), cfg);
    }
    numerical_radius(&build_blocks(x, p)?.h, cfg)
}

/// The n×n blocks appearing in the quadratic bounds on `Δ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremBlockBundle {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
    pub s: ComplexMatrix,
    pub t: ComplexMatrix,
    pub m: ComplexMatrix,
    pub n: ComplexMatrix,
    pub p: ComplexMatrix,
}

impl TheoremBlockBundle {
    /// `[[A, B], [B, C]]`.
    pub fn abc(&self) -> ComplexMatrix {
        block2x2(&self.a, &self.b, &self.b, &self.c).expect("blocks share a size")
    }

    /// `[[Q, R], [T, S]]`.
    pub fn qrts(&self) -> ComplexMatrix {
        block2x2(&self.q, &self.r, &self.t, &self.s).expect("blocks share a size")
    }

    /// `[[M, N], [N*, P]]`.
    pub fn mnp(&self) -> ComplexMatrix {
        block2x2(&self.m, &self.n, &self.n.adjoint(), &self.p).expect("blocks share a size")
    }
}

pub fn build_theorem_blocks(x: &ComplexMatrix, p: &RhoNuParams) -> Result<TheoremBlockBundle> {
    x.require_square()?;
    let (al, be, mu) = (p.alpha, p.beta, p.mu);
    let xs = x.adjoint();
    let abs2 = x.gram(); // |X|² = X*X
    let abs2_adj = x.cogram(); // |X*|² = XX*
    let x2 = x.matmul(x);
    let xs2 = xs.matmul(&xs);
    let k = mixed_sum(x, mu);
    let mix = 1.0 + mu * mu;
    Ok(TheoremBlockBundle {
        a: abs2_adj.scale_real(al * al),
        b: abs2_adj.scale_real(al * be),
        c: &abs2.scale_real(al * al + be * be) + &abs2_adj.scale_real(be * be),
        q: abs2_adj.scale_real(al * al * mu),
        r: (&x2 + &abs2_adj.scale_real(mu)).scale_real(al * be),
        t: (&abs2_adj + &xs2.scale_real(mu)).scale_real(al * be * mu),
        s: &abs2.scale_real(al * al * mu) + &k.matmul(&k).scale_real(be * be),
        m: abs2_adj.scale_real(al * al * mix),
        n: &x2.scale_real(2.0 * al * be * mu) + &abs2_adj.scale_real(al * be * mix),
        p: &abs2.scale_real(al * al * mix) + &(&k.gram() + &k.cogram()).scale_real(be * be),
    })
}

/// Names of the four block identities, in the order returned by
/// [`block_identity_residuals`].
pub const BLOCK_IDENTITIES: [&str; 4] = ["G^2", "|G|^2+|G*|^2", "H^2", "|H|^2+|H*|^2"];

/// Residual of one exact block identity together with its admissible bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockResidual {
    pub name: &'static str,
    pub residual: f64,
    pub bound: f64,
}

/// Frobenius residuals of
/// `G² = β[[0, αX²], [0, βX²]]`, `|G|² + |G*|² = [[A, B], [B, C]]`,
/// `H² = [[Q, R], [T, S]]` and `|H|² + |H*|² = [[M, N], [N*, P]]`,
/// each paired with the bound `1e-10·(1 + ‖X‖²)·(1 + α + |β|)²`.
pub fn block_identity_residuals(x: &ComplexMatrix, p: &RhoNuParams) -> Result<[BlockResidual; 4]> {
    let n = x.require_square()?;
    let blocks = build_blocks(x, p)?;
    let bundle = build_theorem_blocks(x, p)?;
    let (g, h) = (&blocks.g, &blocks.h);
    let z = ComplexMatrix::zeros(n, n);
    let x2 = x.matmul(x);
    let g2_rhs = block2x2(&z, &x2.scale_real(p.alpha), &z, &x2.scale_real(p.beta))?.scale_real(p.beta);
    let nx = spectral_norm(x);
    let bound = 1e-10 * (1.0 + nx * nx) * p.coefficient_scale();
    let res = [
        residual(&g.matmul(g), &g2_rhs),
        residual(&(&g.gram() + &g.cogram()), &bundle.abc()),
        residual(&h.matmul(h), &bundle.qrts()),
        residual(&(&h.gram() + &h.cogram()), &bundle.mnp()),
    ];
    Ok(std::array::from_fn(|i| BlockResidual {
        name: BLOCK_IDENTITIES[i],
        residual: res[i],
        bound,
    }))
}

/// `e^{iφ}X`, used by the unimodular-invariance property at `ν = ½`.
pub fn rotate_phase(x: &ComplexMatrix, phi: f64) -> ComplexMatrix {
    x.scale(Complex64::from_polar(1.0, phi))
}
