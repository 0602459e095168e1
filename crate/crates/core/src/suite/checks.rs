//! Evaluation of individual checks. Each check is written as `lhs ≤ rhs`;
//! identities are emitted as two results, one per direction.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensemble::{CheckSettings, SampleAux};
use super::ids::CheckId;
use crate::delta::{block_identity_residuals, build_blocks, build_theorem_blocks, delta_with, make_params, mixed_sum, RhoNuParams};
use crate::error::{Error, Result};
use crate::linalg::{abs_matrix, block2x2, inner, psd_power_with, spectral_norm, vec_norm, ComplexMatrix};
use crate::radii::{aluthge_with, numerical_radius, operator_radius_rho, range_extent, validate_rho};

/// Multipliers used by the homogeneity check.
pub const T_SET: [f64; 4] = [-2.5, -1.0, 0.5, 3.0];
/// Values of `ρ` at which the small-`ρ` limit envelope is evaluated.
pub const LIMIT_RHOS: [f64; 3] = [0.1, 0.01, 0.001];

/// Enough metadata to regenerate the inputs of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub family: String,
    pub dim: usize,
    pub seed: u64,
    pub rho: Option<f64>,
    pub nu: Option<f64>,
    /// `[re, im]`.
    pub lambda: Option<[f64; 2]>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: CheckId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witness: Witness,
}

impl CheckResult {
    pub fn new(id: CheckId, lhs: f64, rhs: f64, tolerance: f64, mut witness: Witness) -> Self {
        let slack = rhs - lhs;
        witness.slack = slack;
        Self {
            id,
            lhs,
            rhs,
            slack,
            tolerance,
            // NaN fails.
            pass: slack >= -tolerance,
            witness,
        }
    }

    /// `slack + tolerance`; negative exactly when the check fails.
    pub fn margin(&self) -> f64 {
        let m = self.slack + self.tolerance;
        if m.is_nan() {
            f64::NEG_INFINITY
        } else {
            m
        }
    }
}

/// Auxiliary inputs for [`run_check`]. Only the fields a check needs must be
/// present.
#[derive(Debug, Clone, Default)]
pub struct Extras {
    pub second: Option<ComplexMatrix>,
    pub congruence: Option<ComplexMatrix>,
    pub unitary: Option<ComplexMatrix>,
    pub positive: Option<ComplexMatrix>,
    pub positive_alt: Option<ComplexMatrix>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub lambda: Option<Complex64>,
    pub u: Option<Vec<Complex64>>,
    pub v: Option<Vec<Complex64>>,
    pub e: Option<Vec<Complex64>>,
}

impl Extras {
    pub fn from_aux(aux: &SampleAux) -> Self {
        Self {
            second: Some(aux.second.clone()),
            congruence: Some(aux.congruence.clone()),
            unitary: Some(aux.unitary.clone()),
            positive: Some(aux.positive.clone()),
            positive_alt: Some(aux.positive_alt.clone()),
            s: None,
            t: None,
            lambda: None,
            u: Some(aux.u.clone()),
            v: Some(aux.v.clone()),
            e: Some(aux.e.clone()),
        }
    }
}

fn need<'a, T>(v: &'a Option<T>, id: CheckId, extra: &'static str) -> Result<&'a T> {
    v.as_ref().ok_or(Error::MissingExtra {
        check: id.as_str(),
        extra,
    })
}

fn need_copy<T: Copy>(v: Option<T>, id: CheckId, extra: &'static str) -> Result<T> {
    v.ok_or(Error::MissingExtra {
        check: id.as_str(),
        extra,
    })
}

/// Evaluates one check on `x` at `(ρ, ν)`.
///
/// Checks that do not depend on `ρ` or `ν` ignore them; the `ρ = 2` corollaries
/// use `ν` only, and the limit envelope evaluates its own small `ρ` values.
pub fn run_check(
    id: CheckId,
    x: &ComplexMatrix,
    rho: f64,
    nu: f64,
    extras: &Extras,
    settings: &CheckSettings,
) -> Result<Vec<CheckResult>> {
    let n = x.require_square()?;
    let p = make_params(rho, nu)?;
    if let Some(l) = extras.lambda {
        if l.norm() == 0.0 {
            return Err(Error::ZeroLambda);
        }
    }
    let mut ev = Evaluator::new(x, settings, "custom".into(), n, 0)?;
    let mut out = Vec::new();
    use CheckId::*;
    match id {
        TriangleInequality => ev.triangle(&p, need(&extras.second, id, "second")?, &mut out)?,
        RealHomogeneity => ev.homogeneity(&p, need_copy(extras.t, id, "t")?, &mut out)?,
        Positivity => ev.positivity(&p, &mut out)?,
        UnitaryInvariance => ev.unitary_invariance(&p, need(&extras.unitary, id, "unitary")?, &mut out)?,
        CongruenceBound => ev.congruence(&p, need(&extras.congruence, id, "congruence")?, &mut out)?,
        HeinzInterpolation => {
            let z = need(&extras.positive, id, "positive")?;
            ev.heinz_interpolation(&p, z, &[need_copy(extras.s, id, "s")?], &mut out)?
        }
        Symmetry => ev.symmetry(&p, &mut out)?,
        LimitEnvelope => ev.limit_envelope(nu, &mut out)?,
        AluthgeBound => ev.aluthge_bound(&p, &mut out)?,
        AluthgeBoundRhoTwo => ev.aluthge_bound_rho_two(nu, &mut out)?,
        AluthgeBoundNumericalRadius => ev.aluthge_bound_w(&mut out)?,
        SquareRootBound => ev.square_root_bound(&p, &mut out)?,
        LambdaBound => ev.lambda_bound(&p, need_copy(extras.lambda, id, "lambda")?, &mut out)?,
        LambdaTwoBound => ev.lambda_two_bound(&p, &mut out)?,
        MixedSumSquareBound => ev.mixed_sum_square_bound(nu, &mut out)?,
        CartesianSquareBound => ev.cartesian_square_bound(&mut out)?,
        LambdaLimitBound => ev.lambda_limit_bound(&p, &mut out)?,
        QuadraticLower | QuadraticUpper => ev.quadratic_bounds(&p, id == QuadraticLower, id == QuadraticUpper, &mut out)?,
        MixedSumQuadraticLower | MixedSumQuadraticUpper => {
            ev.mixed_sum_quadratic(nu, id == MixedSumQuadraticLower, id == MixedSumQuadraticUpper, &mut out)?
        }
        LemmaHeinz => {
            let b = need(&extras.positive, id, "positive")?;
            let c = need(&extras.positive_alt, id, "positive_alt")?;
            ev.lemma_heinz(b, c, &[need_copy(extras.s, id, "s")?], &mut out)?
        }
        LemmaBuzano => {
            let u = need(&extras.u, id, "u")?;
            let v = need(&extras.v, id, "v")?;
            let e = need(&extras.e, id, "e")?;
            ev.lemma_buzano(u, v, e, &[need_copy(extras.lambda, id, "lambda")?], &mut out)?
        }
        LemmaMixedSchwarz => ev.lemma_mixed_schwarz(need(&extras.e, id, "e")?, &mut out)?,
        LemmaPositiveSquare => {
            let z = need(&extras.positive, id, "positive")?;
            ev.lemma_positive_square(z, need(&extras.e, id, "e")?, &mut out)?
        }
        Sandwich => ev.sandwich(rho, &mut out)?,
        Nilpotent => ev.nilpotent(rho, &mut out)?,
        Normal => ev.normal(rho, &mut out)?,
        BlockIdentities => ev.block_identities(&p, &mut out)?,
    }
    Ok(out)
}

/// Quantities that depend on `ρ` only.
struct RhoData {
    params: RhoNuParams,
    g: ComplexMatrix,
    g_norm: f64,
    g_tilde_w: Option<f64>,
    /// `‖[[0, αX²], [0, βX²]]‖`.
    g_square_norm: Option<f64>,
    abc_norm: Option<f64>,
    w_rho: Option<f64>,
    w_rho_square: Option<f64>,
}

/// Quantities for `K = X + μX*` that depend on `ν` only.
struct MixedData {
    w: f64,
    abs_sum_norm: f64,
    square_w: f64,
    square_c: f64,
}

/// Per-matrix evaluation state. Expensive intermediates are computed on
/// demand and reused across checks and grid cells.
pub(crate) struct Evaluator<'a> {
    x: &'a ComplexMatrix,
    settings: &'a CheckSettings,
    family: String,
    dim: usize,
    seed: u64,
    nx: f64,
    x2: Option<ComplexMatrix>,
    w: Option<f64>,
    w_square: Option<f64>,
    w_aluthge: Option<f64>,
    abs_sum_norm: Option<f64>,
    rho_data: HashMap<u64, RhoData>,
    mixed: HashMap<u64, MixedData>,
    deltas: HashMap<(u64, u64), f64>,
}

/// Whether `Δ_(ρ,ν)` is positive on every nonzero matrix.
pub fn positivity_applies(p: &RhoNuParams) -> bool {
    p.rho < 2.0 || p.mu.abs() < 1.0
}

fn key(v: f64) -> u64 {
    v.to_bits()
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(x: &'a ComplexMatrix, settings: &'a CheckSettings, family: String, dim: usize, seed: u64) -> Result<Self> {
        x.require_square()?;
        Ok(Self {
            x,
            settings,
            family,
            dim,
            seed,
            nx: spectral_norm(x),
            x2: None,
            w: None,
            w_square: None,
            w_aluthge: None,
            abs_sum_norm: None,
            rho_data: HashMap::new(),
            mixed: HashMap::new(),
            deltas: HashMap::new(),
        })
    }

    fn rel(&self) -> f64 {
        self.settings.tolerances.rel_ineq
    }

    /// Tolerance for first-order quantities at `p`.
    fn tol(&self, p: &RhoNuParams) -> f64 {
        self.rel() * (1.0 + self.nx) * p.coefficient_scale()
    }

    /// Tolerance for squared quantities at `p`.
    fn tol_sq(&self, p: &RhoNuParams) -> f64 {
        self.tol(p) * (1.0 + self.nx)
    }

    pub(crate) fn witness(&self, rho: Option<f64>, nu: Option<f64>) -> Witness {
        Witness {
            family: self.family.clone(),
            dim: self.dim,
            seed: self.seed,
            rho,
            nu,
            lambda: None,
            s: None,
            t: None,
            slack: 0.0,
            detail: None,
        }
    }

    fn cell(&self, p: &RhoNuParams) -> Witness {
        self.witness(Some(p.rho), Some(p.nu))
    }

    fn push(out: &mut Vec<CheckResult>, id: CheckId, lhs: f64, rhs: f64, tol: f64, w: Witness) {
        out.push(CheckResult::new(id, lhs, rhs, tol, w));
    }

    /// An identity `a = b`, recorded as `a ≤ b` and `b ≤ a`.
    fn push_eq(out: &mut Vec<CheckResult>, id: CheckId, a: f64, b: f64, tol: f64, w: Witness) {
        out.push(CheckResult::new(id, a, b, tol, w.clone()));
        out.push(CheckResult::new(id, b, a, tol, w));
    }

    fn solver(&self) -> &crate::radii::AngleSolverConfig {
        &self.settings.solver
    }

    fn x2(&mut self) -> &ComplexMatrix {
        let x = self.x;
        self.x2.get_or_insert_with(|| x.matmul(x))
    }

    fn w(&mut self) -> Result<f64> {
        if let Some(v) = self.w {
            return Ok(v);
        }
        let v = numerical_radius(self.x, self.solver())?;
        self.w = Some(v);
        Ok(v)
    }

    fn w_aluthge(&mut self) -> Result<f64> {
        if let Some(v) = self.w_aluthge {
            return Ok(v);
        }
        let t = aluthge_with(self.x, &self.settings.tolerances)?;
        let v = numerical_radius(&t, self.solver())?;
        self.w_aluthge = Some(v);
        Ok(v)
    }

    /// `‖|X|² + |X*|²‖`.
    fn abs_sum_norm(&mut self) -> f64 {
        let x = self.x;
        *self.abs_sum_norm.get_or_insert_with(|| spectral_norm(&(&x.gram() + &x.cogram())))
    }

    fn rho_data(&mut self, rho: f64) -> Result<&mut RhoData> {
        let k = key(rho);
        if !self.rho_data.contains_key(&k) {
            let params = make_params(rho, 0.5)?;
            let g = build_blocks(self.x, &params)?.g;
            let g_norm = spectral_norm(&g);
            self.rho_data.insert(
                k,
                RhoData {
                    params,
                    g,
                    g_norm,
                    g_tilde_w: None,
                    g_square_norm: None,
                    abc_norm: None,
                    w_rho: None,
                    w_rho_square: None,
                },
            );
        }
        Ok(self.rho_data.get_mut(&k).expect("inserted above"))
    }

    fn g_tilde_w(&mut self, rho: f64) -> Result<f64> {
        let settings = self.settings;
        let d = self.rho_data(rho)?;
        if let Some(v) = d.g_tilde_w {
            return Ok(v);
        }
        let t = aluthge_with(&d.g, &settings.tolerances)?;
        let v = numerical_radius(&t, &settings.solver)?;
        d.g_tilde_w = Some(v);
        Ok(v)
    }

    fn g_square_norm(&mut self, rho: f64) -> Result<f64> {
        let n = self.dim;
        let x2 = self.x2().clone();
        let d = self.rho_data(rho)?;
        if let Some(v) = d.g_square_norm {
            return Ok(v);
        }
        let z = ComplexMatrix::zeros(n, n);
        let m = block2x2(&z, &x2.scale_real(d.params.alpha), &z, &x2.scale_real(d.params.beta))?;
        let v = spectral_norm(&m);
        d.g_square_norm = Some(v);
        Ok(v)
    }

    fn abc_norm(&mut self, rho: f64) -> Result<f64> {
        let x = self.x;
        let d = self.rho_data(rho)?;
        if let Some(v) = d.abc_norm {
            return Ok(v);
        }
        let v = spectral_norm(&build_theorem_blocks(x, &d.params)?.abc());
        d.abc_norm = Some(v);
        Ok(v)
    }

    /// `w_ρ(X)` through the operator-radius block, independently of `H`.
    pub(crate) fn w_rho(&mut self, rho: f64) -> Result<f64> {
        let (x, solver) = (self.x, self.settings.solver);
        let d = self.rho_data(rho)?;
        if let Some(v) = d.w_rho {
            return Ok(v);
        }
        let v = operator_radius_rho(x, rho, &solver)?;
        d.w_rho = Some(v);
        Ok(v)
    }

    fn w_rho_square(&mut self, rho: f64) -> Result<f64> {
        let solver = self.settings.solver;
        let x2 = self.x2().clone();
        let d = self.rho_data(rho)?;
        if let Some(v) = d.w_rho_square {
            return Ok(v);
        }
        let v = operator_radius_rho(&x2, rho, &solver)?;
        d.w_rho_square = Some(v);
        Ok(v)
    }

    pub(crate) fn delta(&mut self, p: &RhoNuParams) -> Result<f64> {
        let k = (key(p.rho), key(p.nu));
        if let Some(&v) = self.deltas.get(&k) {
            return Ok(v);
        }
        let v = delta_with(self.x, p, self.solver())?;
        self.deltas.insert(k, v);
        Ok(v)
    }

    fn delta_of(&self, y: &ComplexMatrix, p: &RhoNuParams) -> Result<f64> {
        delta_with(y, p, self.solver())
    }

    fn mixed(&mut self, nu: f64) -> Result<&MixedData> {
        let k = key(nu);
        if !self.mixed.contains_key(&k) {
            let km = mixed_sum(self.x, 1.0 - 2.0 * nu);
            let w = numerical_radius(&km, self.solver())?;
            let abs_sum_norm = spectral_norm(&(&km.gram() + &km.cogram()));
            let sq = range_extent(&km.matmul(&km), self.solver())?;
            self.mixed.insert(
                k,
                MixedData {
                    w,
                    abs_sum_norm,
                    square_w: sq.numerical_radius,
                    square_c: sq.crawford,
                },
            );
        }
        Ok(&self.mixed[&k])
    }

    // ---- Basic properties -------------------------------------------------

    pub(crate) fn triangle(&mut self, p: &RhoNuParams, y: &ComplexMatrix, out: &mut Vec<CheckResult>) -> Result<()> {
        let dx = self.delta(p)?;
        let dy = self.delta_of(y, p)?;
        let dxy = self.delta_of(&(self.x + y), p)?;
        let tol = self.rel() * (1.0 + self.nx + spectral_norm(y)) * p.coefficient_scale();
        Self::push(out, CheckId::TriangleInequality, dxy, dx + dy, tol, self.cell(p));
        Ok(())
    }

    pub(crate) fn homogeneity(&mut self, p: &RhoNuParams, t: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        let dx = self.delta(p)?;
        let dt = self.delta_of(&self.x.scale_real(t), p)?;
        let mut w = self.cell(p);
        w.t = Some(t);
        Self::push_eq(out, CheckId::RealHomogeneity, dt, t.abs() * dx, self.tol(p) * (1.0 + t.abs()), w);
        Ok(())
    }

    /// Strict positivity, asserted as `Δ(X) ≥ tol` for nonzero `X`.
    ///
    /// At `ρ = 2` with `|μ| = 1` the functional is `w(X ± X*)`, which vanishes
    /// on skew-Hermitian (`ν = 0`) or Hermitian (`ν = 1`) matrices, so the
    /// claim only holds off those two cells and nothing is emitted there.
    pub(crate) fn positivity(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        if self.x.is_zero() || !positivity_applies(p) {
            return Ok(());
        }
        let floor = self.tol(p);
        let d = self.delta(p)?;
        Self::push(out, CheckId::Positivity, floor, d, 0.0, self.cell(p));
        Ok(())
    }

    pub(crate) fn unitary_invariance(&mut self, p: &RhoNuParams, u: &ComplexMatrix, out: &mut Vec<CheckResult>) -> Result<()> {
        let dx = self.delta(p)?;
        let du = self.delta_of(&u.adjoint().matmul(self.x).matmul(u), p)?;
        Self::push_eq(out, CheckId::UnitaryInvariance, du, dx, self.tol(p), self.cell(p));
        Ok(())
    }

    pub(crate) fn congruence(&mut self, p: &RhoNuParams, y: &ComplexMatrix, out: &mut Vec<CheckResult>) -> Result<()> {
        let dx = self.delta(p)?;
        let ny = spectral_norm(y);
        let lhs = self.delta_of(&y.adjoint().matmul(self.x).matmul(y), p)?;
        let tol = self.tol(p) * (1.0 + ny * ny);
        Self::push(out, CheckId::CongruenceBound, lhs, ny * ny * dx, tol, self.cell(p));
        Ok(())
    }

    pub(crate) fn heinz_interpolation(&mut self, p: &RhoNuParams, z: &ComplexMatrix, s_set: &[f64], out: &mut Vec<CheckResult>) -> Result<()> {
        let dx = self.delta(p)?;
        let dzxz = self.delta_of(&z.matmul(self.x).matmul(z), p)?;
        let nz = spectral_norm(z);
        let tol = self.tol(p) * (1.0 + nz * nz);
        for &s in s_set {
            let zs = psd_power_with(z, s, &self.settings.tolerances)?;
            let lhs = self.delta_of(&zs.matmul(self.x).matmul(&zs), p)?;
            let rhs = dzxz.powf(s) * dx.powf(1.0 - s);
            let mut w = self.cell(p);
            w.s = Some(s);
            Self::push(out, CheckId::HeinzInterpolation, lhs, rhs, tol, w);
        }
        Ok(())
    }

    /// `(2 − ρ)·Δ_(2−ρ,ν) = ρ·Δ_(ρ,ν)`.
    pub(crate) fn symmetry(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        let mirror = make_params(2.0 - p.rho, p.nu)?;
        let a = (2.0 - p.rho) * self.delta(&mirror)?;
        let b = p.rho * self.delta(p)?;
        let scale = p.coefficient_scale().max(mirror.coefficient_scale());
        let tol = self.rel() * (1.0 + self.nx) * scale;
        Self::push_eq(out, CheckId::Symmetry, a, b, tol, self.cell(p));
        Ok(())
    }

    /// `|ρΔ_ρ − 2w(X + μX*)| ≤ ‖(2−ρ)H_{2−ρ} − 2H_2‖`.
    ///
    /// `ρΔ_ρ = w((2−ρ)H_{2−ρ})` by the symmetry identity and `2w(X + μX*) =
    /// w(2H_2)`, so the right side is the Lipschitz bound for `w`.
    pub(crate) fn limit_envelope(&mut self, nu: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        let target = 2.0 * self.mixed(nu)?.w;
        let h2 = build_blocks(self.x, &make_params(2.0, nu)?)?.h.scale_real(2.0);
        for r in LIMIT_RHOS {
            let p = make_params(r, nu)?;
            let lhs = (r * self.delta(&p)? - target).abs();
            let hm = build_blocks(self.x, &make_params(2.0 - r, nu)?)?.h.scale_real(2.0 - r);
            let rhs = spectral_norm(&(&hm - &h2));
            let amp = 1.0 + r * (1.0 + p.alpha + p.beta.abs());
            let tol = self.rel() * (1.0 + self.nx) * amp * amp;
            Self::push(out, CheckId::LimitEnvelope, lhs, rhs, tol, self.witness(Some(r), Some(nu)));
        }
        Ok(())
    }

    // ---- Upper bounds through the Aluthge transform ---------------------

    pub(crate) fn aluthge_bound(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        let d = self.delta(p)?;
        let g_norm = self.rho_data(p.rho)?.g_norm;
        let rhs = 0.5 * (1.0 + p.mu.abs()) * (g_norm + self.g_tilde_w(p.rho)?);
        Self::push(out, CheckId::AluthgeBound, d, rhs, self.tol(p), self.cell(p));
        Ok(())
    }

    pub(crate) fn aluthge_bound_rho_two(&mut self, nu: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        let p = make_params(2.0, nu)?;
        let lhs = self.mixed(nu)?.w;
        let rhs = 0.5 * (1.0 + p.mu.abs()) * (self.nx + self.w_aluthge()?);
        Self::push(out, CheckId::AluthgeBoundRhoTwo, lhs, rhs, self.tol(&p), self.witness(Some(2.0), Some(nu)));
        Ok(())
    }

    pub(crate) fn aluthge_bound_w(&mut self, out: &mut Vec<CheckResult>) -> Result<()> {
        let lhs = self.w()?;
        let rhs = 0.5 * (self.nx + self.w_aluthge()?);
        let tol = self.rel() * (1.0 + self.nx);
        Self::push(out, CheckId::AluthgeBoundNumericalRadius, lhs, rhs, tol, self.witness(None, None));
        Ok(())
    }

    pub(crate) fn square_root_bound(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        let d = self.delta(p)?;
        let g_norm = self.rho_data(p.rho)?.g_norm;
        let sq = self.g_square_norm(p.rho)?;
        let rhs = 0.5 * (1.0 + p.mu.abs()) * (g_norm + p.beta.abs().sqrt() * sq.sqrt());
        Self::push(out, CheckId::SquareRootBound, d, rhs, self.tol(p), self.cell(p));
        Ok(())
    }

    // ---- Quadratic bounds -------------------------------------------------

    pub(crate) fn lambda_bound(&mut self, p: &RhoNuParams, lambda: Complex64, out: &mut Vec<CheckResult>) -> Result<()> {
        if lambda.norm() == 0.0 {
            return Err(Error::ZeroLambda);
        }
        let d = self.delta(p)?;
        let wr = self.w_rho(p.rho)?;
        let wr2 = self.w_rho_square(p.rho)?;
        let abc = self.abc_norm(p.rho)?;
        let l = lambda.norm();
        let coef = (2.0 * p.mu.abs() * (lambda - 1.0).norm().max(1.0) + l) / (2.0 * l);
        let rhs = p.mu * p.mu * wr * wr + 2.0 * (p.mu * p.beta / l).abs() * wr2 + coef * abc;
        let mut w = self.cell(p);
        w.lambda = Some([lambda.re, lambda.im]);
        Self::push(out, CheckId::LambdaBound, d * d, rhs, self.tol_sq(p), w);
        Ok(())
    }

    pub(crate) fn lambda_two_bound(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        let d = self.delta(p)?;
        let wr = self.w_rho(p.rho)?;
        let wr2 = self.w_rho_square(p.rho)?;
        let abc = self.abc_norm(p.rho)?;
        let rhs = p.mu * p.mu * wr * wr + (p.mu * p.beta).abs() * wr2 + 0.5 * (p.mu.abs() + 1.0) * abc;
        Self::push(out, CheckId::LambdaTwoBound, d * d, rhs, self.tol_sq(p), self.cell(p));
        Ok(())
    }

    pub(crate) fn lambda_limit_bound(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        let d = self.delta(p)?;
        let wr = self.w_rho(p.rho)?;
        let abc = self.abc_norm(p.rho)?;
        let rhs = p.mu * p.mu * wr * wr + 0.5 * (2.0 * p.mu.abs() + 1.0) * abc;
        Self::push(out, CheckId::LambdaLimitBound, d * d, rhs, self.tol_sq(p), self.cell(p));
        Ok(())
    }

    pub(crate) fn mixed_sum_square_bound(&mut self, nu: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        let p = make_params(2.0, nu)?;
        let lhs = self.mixed(nu)?.w.powi(2);
        let w = self.w()?;
        let wx2 = match self.w_square {
            Some(v) => v,
            None => {
                let v = numerical_radius(&self.x2().clone(), self.solver())?;
                self.w_square = Some(v);
                v
            }
        };
        let m = p.mu.abs();
        let rhs = p.mu * p.mu * w * w + m * wx2 + 0.5 * (m + 1.0) * self.abs_sum_norm();
        Self::push(out, CheckId::MixedSumSquareBound, lhs, rhs, self.tol_sq(&p), self.witness(Some(2.0), Some(nu)));
        Ok(())
    }

    pub(crate) fn cartesian_square_bound(&mut self, out: &mut Vec<CheckResult>) -> Result<()> {
        let w = self.w()?;
        let rhs = 0.5 * self.abs_sum_norm();
        let tol = self.rel() * (1.0 + self.nx).powi(2);
        Self::push(out, CheckId::CartesianSquareBound, w * w, rhs, tol, self.witness(None, None));
        Ok(())
    }

    /// The lower and/or upper bound on `Δ²` through `H²` and `|H|² + |H*|²`.
    pub(crate) fn quadratic_bounds(&mut self, p: &RhoNuParams, lower: bool, upper: bool, out: &mut Vec<CheckResult>) -> Result<()> {
        if !(lower || upper) {
            return Ok(());
        }
        let d = self.delta(p)?;
        let tb = build_theorem_blocks(self.x, p)?;
        let mnp = spectral_norm(&tb.mnp());
        let sq = range_extent(&tb.qrts(), self.solver())?;
        let tol = self.tol_sq(p);
        if lower {
            Self::push(out, CheckId::QuadraticLower, 0.25 * mnp + 0.5 * sq.crawford, d * d, tol, self.cell(p));
        }
        if upper {
            Self::push(out, CheckId::QuadraticUpper, d * d, 0.25 * mnp + 0.5 * sq.numerical_radius, tol, self.cell(p));
        }
        Ok(())
    }

    /// Two-sided bound on `w²(K)`, `K = X + μX*`, checked on `K` itself.
    pub(crate) fn mixed_sum_quadratic(&mut self, nu: f64, lower: bool, upper: bool, out: &mut Vec<CheckResult>) -> Result<()> {
        let p = make_params(2.0, nu)?;
        let tol = self.tol_sq(&p);
        let wit = self.witness(Some(2.0), Some(nu));
        let m = self.mixed(nu)?;
        let w2 = m.w * m.w;
        if lower {
            let lhs = 0.25 * m.abs_sum_norm + 0.5 * m.square_c;
            Self::push(out, CheckId::MixedSumQuadraticLower, lhs, w2, tol, wit.clone());
        }
        if upper {
            let rhs = 0.25 * m.abs_sum_norm + 0.5 * m.square_w;
            Self::push(out, CheckId::MixedSumQuadraticUpper, w2, rhs, tol, wit);
        }
        Ok(())
    }

    // ---- Lemmas -----------------------------------------------------------

    /// `‖B^s X C^s‖ ≤ ‖BXC‖^s ‖X‖^{1−s}`.
    pub(crate) fn lemma_heinz(&mut self, b: &ComplexMatrix, c: &ComplexMatrix, s_set: &[f64], out: &mut Vec<CheckResult>) -> Result<()> {
        let full = spectral_norm(&b.matmul(self.x).matmul(c));
        let tol = self.rel() * (1.0 + self.nx) * (1.0 + spectral_norm(b)) * (1.0 + spectral_norm(c));
        for &s in s_set {
            let bs = psd_power_with(b, s, &self.settings.tolerances)?;
            let cs = psd_power_with(c, s, &self.settings.tolerances)?;
            let lhs = spectral_norm(&bs.matmul(self.x).matmul(&cs));
            let rhs = full.powf(s) * self.nx.powf(1.0 - s);
            let mut w = self.witness(None, None);
            w.s = Some(s);
            Self::push(out, CheckId::LemmaHeinz, lhs, rhs, tol, w);
        }
        Ok(())
    }

    /// `|⟨u,e⟩⟨e,v⟩| ≤ (max{1, |λ−1|}‖u‖‖v‖ + |⟨u,v⟩|)/|λ|` for unit `e`.
    pub(crate) fn lemma_buzano(&mut self, u: &[Complex64], v: &[Complex64], e: &[Complex64], lambdas: &[Complex64], out: &mut Vec<CheckResult>) -> Result<()> {
        let lhs = (inner(u, e) * inner(e, v)).norm();
        let (nu_, nv) = (vec_norm(u), vec_norm(v));
        let uv = inner(u, v).norm();
        let tol = self.rel() * (1.0 + nu_ * nv);
        for &l in lambdas {
            if l.norm() == 0.0 {
                return Err(Error::ZeroLambda);
            }
            let rhs = ((l - 1.0).norm().max(1.0) * nu_ * nv + uv) / l.norm();
            let mut w = self.witness(None, None);
            w.lambda = Some([l.re, l.im]);
            Self::push(out, CheckId::LemmaBuzano, lhs, rhs, tol, w);
        }
        Ok(())
    }

    /// `|⟨Xz,z⟩|² ≤ ⟨|X|z,z⟩⟨|X*|z,z⟩`.
    pub(crate) fn lemma_mixed_schwarz(&mut self, z: &[Complex64], out: &mut Vec<CheckResult>) -> Result<()> {
        let zn = vec_norm(z);
        let unit: Vec<Complex64> = z.iter().map(|c| c / zn).collect();
        let lhs = self.x.quadratic_form(&unit).norm_sqr();
        let a = abs_matrix(self.x)?.quadratic_form(&unit).re;
        let b = abs_matrix(&self.x.adjoint())?.quadratic_form(&unit).re;
        let tol = self.rel() * (1.0 + self.nx).powi(2);
        Self::push(out, CheckId::LemmaMixedSchwarz, lhs, a * b, tol, self.witness(None, None));
        Ok(())
    }

    /// `⟨Pz,z⟩² ≤ ⟨P²z,z⟩` for positive `P`.
    pub(crate) fn lemma_positive_square(&mut self, p: &ComplexMatrix, z: &[Complex64], out: &mut Vec<CheckResult>) -> Result<()> {
        let zn = vec_norm(z);
        let unit: Vec<Complex64> = z.iter().map(|c| c / zn).collect();
        let lhs = p.quadratic_form(&unit).re.powi(2);
        let rhs = p.matmul(p).quadratic_form(&unit).re;
        let tol = self.rel() * (1.0 + spectral_norm(p)).powi(2);
        Self::push(out, CheckId::LemmaPositiveSquare, lhs, rhs, tol, self.witness(None, None));
        Ok(())
    }

    // ---- Operator-radius oracles -----------------------------------------

    /// `‖X‖/ρ ≤ w_ρ(X) ≤ max(1, 2/ρ − 1)‖X‖`.
    pub(crate) fn sandwich(&mut self, rho: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        validate_rho(rho)?;
        let wr = self.w_rho(rho)?;
        let p = self.rho_data(rho)?.params;
        let tol = self.tol(&p);
        let w = self.witness(Some(rho), None);
        Self::push(out, CheckId::Sandwich, self.nx / rho, wr, tol, w.clone());
        Self::push(out, CheckId::Sandwich, wr, (2.0 / rho - 1.0).max(1.0) * self.nx, tol, w);
        Ok(())
    }

    pub(crate) fn is_nilpotent(&mut self) -> bool {
        let nx = self.nx;
        self.x2().max_abs() <= 1e-12 * (1.0 + nx * nx)
    }

    pub(crate) fn is_normal(&self) -> bool {
        let x = self.x;
        (&x.gram() - &x.cogram()).max_abs() <= 1e-10 * self.nx * self.nx
    }

    /// `w_ρ(X) = ‖X‖/ρ` when `X² = 0`; emits nothing otherwise.
    pub(crate) fn nilpotent(&mut self, rho: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        validate_rho(rho)?;
        if !self.is_nilpotent() {
            return Ok(());
        }
        let wr = self.w_rho(rho)?;
        let p = self.rho_data(rho)?.params;
        Self::push_eq(out, CheckId::Nilpotent, wr, self.nx / rho, self.tol(&p), self.witness(Some(rho), None));
        Ok(())
    }

    /// `w_ρ(X) = max(1, 2/ρ − 1)‖X‖` when `X` is normal; emits nothing
    /// otherwise.
    pub(crate) fn normal(&mut self, rho: f64, out: &mut Vec<CheckResult>) -> Result<()> {
        validate_rho(rho)?;
        if !self.is_normal() {
            return Ok(());
        }
        let wr = self.w_rho(rho)?;
        let p = self.rho_data(rho)?.params;
        let want = (2.0 / rho - 1.0).max(1.0) * self.nx;
        Self::push_eq(out, CheckId::Normal, wr, want, self.tol(&p), self.witness(Some(rho), None));
        Ok(())
    }

    pub(crate) fn block_identities(&mut self, p: &RhoNuParams, out: &mut Vec<CheckResult>) -> Result<()> {
        for r in block_identity_residuals(self.x, p)? {
            let mut w = self.cell(p);
            w.detail = Some(r.name.to_string());
            Self::push(out, CheckId::BlockIdentities, r.residual, r.bound, 0.0, w);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_support::random_ginibre;

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    fn settings() -> CheckSettings {
        CheckSettings::default()
    }

    fn one(id: CheckId, x: &ComplexMatrix, rho: f64, nu: f64, extras: &Extras) -> CheckResult {
        let r = run_check(id, x, rho, nu, extras, &settings()).unwrap();
        assert_eq!(r.len(), 1, "{id}");
        r.into_iter().next().unwrap()
    }

    #[test]
    fn yamazaki_equality_on_nilpotent() {
        let r = one(CheckId::AluthgeBoundNumericalRadius, &nilpotent(), 1.0, 0.5, &Extras::default());
        assert!((r.lhs - 0.5).abs() < 1e-14 && (r.rhs - 0.5).abs() < 1e-14);
        assert!(r.slack.abs() < 1e-14 && r.pass);
    }

    #[test]
    fn kittaneh_square_bound_on_nilpotent() {
        let r = one(CheckId::CartesianSquareBound, &nilpotent(), 1.0, 0.5, &Extras::default());
        assert!((r.lhs - 0.25).abs() < 1e-14 && (r.rhs - 0.5).abs() < 1e-14);
        assert!((r.slack - 0.25).abs() < 1e-14);
    }

    #[test]
    fn abu_omar_kittaneh_lower_on_nilpotent() {
        let r = one(CheckId::MixedSumQuadraticLower, &nilpotent(), 2.0, 0.5, &Extras::default());
        assert!((r.lhs - 0.25).abs() < 1e-14 && (r.rhs - 0.25).abs() < 1e-14);
        assert!(r.slack.abs() < 1e-14);
    }

    #[test]
    fn square_root_bound_is_sharp_on_nilpotent() {
        let r = one(CheckId::SquareRootBound, &nilpotent(), 2.0, 0.5, &Extras::default());
        assert!(r.slack.abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn missing_extras_and_zero_lambda_are_rejected() {
        let x = random_ginibre(3, 1);
        let e = Extras::default();
        for (id, extra) in [
            (CheckId::TriangleInequality, "second"),
            (CheckId::RealHomogeneity, "t"),
            (CheckId::LambdaBound, "lambda"),
            (CheckId::LemmaBuzano, "u"),
            (CheckId::HeinzInterpolation, "positive"),
        ] {
            assert_eq!(
                run_check(id, &x, 1.0, 0.5, &e, &settings()).unwrap_err(),
                Error::MissingExtra { check: id.as_str(), extra }
            );
        }
        let e = Extras {
            lambda: Some(Complex64::new(0.0, 0.0)),
            ..Default::default()
        };
        assert_eq!(run_check(CheckId::LambdaBound, &x, 1.0, 0.5, &e, &settings()).unwrap_err(), Error::ZeroLambda);
        assert!(run_check(CheckId::Sandwich, &x, 3.0, 0.5, &e, &settings()).is_err());
    }

    #[test]
    fn every_check_runs_with_full_extras() {
        let x = random_ginibre(3, 5);
        let aux = SampleAux::generate(3, 5);
        let mut extras = Extras::from_aux(&aux);
        extras.s = Some(0.5);
        extras.t = Some(-2.5);
        extras.lambda = Some(Complex64::new(1.0, 1.0));
        for &id in CheckId::ALL {
            let r = run_check(id, &x, 0.7, 0.2, &extras, &settings()).unwrap();
            let structural = matches!(id, CheckId::Nilpotent | CheckId::Normal);
            assert_eq!(r.is_empty(), structural, "{id}");
            for c in &r {
                assert_eq!(c.id, id);
                assert!(c.pass, "{id}: {c:?}");
                assert_eq!(c.pass, c.slack >= -c.tolerance);
            }
        }
    }

    #[test]
    fn positivity_fails_on_the_boundary_cells() {
        // X = iI at ν = 0 and X = I at ν = 1 both give Δ_(2,ν)(X) = 0.
        let ix = ComplexMatrix::identity(2).scale(Complex64::new(0.0, 1.0));
        let cfg = settings().solver;
        assert!(delta_with(&ix, &make_params(2.0, 0.0).unwrap(), &cfg).unwrap() < 1e-15);
        let id = ComplexMatrix::identity(2);
        assert!(delta_with(&id, &make_params(2.0, 1.0).unwrap(), &cfg).unwrap() < 1e-15);
        assert!(!positivity_applies(&make_params(2.0, 0.0).unwrap()));
        assert!(!positivity_applies(&make_params(2.0, 1.0).unwrap()));
        assert!(positivity_applies(&make_params(2.0, 0.9).unwrap()));
        assert!(positivity_applies(&make_params(1.99, 1.0).unwrap()));
        let r = run_check(CheckId::Positivity, &id, 2.0, 1.0, &Extras::default(), &settings()).unwrap();
        assert!(r.is_empty());
        let r = run_check(CheckId::Positivity, &id, 1.5, 1.0, &Extras::default(), &settings()).unwrap();
        assert!(r[0].pass && r[0].rhs > 0.1);
    }

    #[test]
    fn nan_fails() {
        let r = CheckResult::new(CheckId::Sandwich, f64::NAN, 1.0, 1.0, Evaluator::new(&nilpotent(), &settings(), "x".into(), 2, 0).unwrap().witness(None, None));
        assert!(!r.pass);
        assert_eq!(r.margin(), f64::NEG_INFINITY);
    }
}
