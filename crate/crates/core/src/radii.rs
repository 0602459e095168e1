//! Scalar functionals: numerical radius, Crawford number, operator radii
//! `w_ρ`, and the Aluthge transform.
//!
//! Both the numerical radius and the Crawford number are read off the same
//! angular profile of the Hermitian pencil `Re(e^{iθ}X) = cos θ·Re X − sin θ·Im X`:
//!
//! * `w(X) = sup_θ λ_max(Re(e^{iθ}X))`
//! * `c(X) = max(0, sup_θ λ_min(Re(e^{iθ}X)))`
//!
//! `λ_max(θ)` is the support function of the numerical range, so if the
//! farthest point of `W(X)` sits at angle `θ*` then
//! `λ_max(θ) ≥ w(X)·cos(θ − θ*)`. On a uniform grid with spacing `h` the grid
//! point nearest `θ*` therefore scores at least `w·cos(h/2)`, which is how
//! candidate cells are chosen. Candidates are subdivided and re-screened
//! down to a small width before a Brent polish (golden section with
//! parabolic steps).
//! `λ_min(θ + π) = −λ_max(θ)`, so one eigensolve gives two grid values.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block2x2, partial_isometry, svd, weighted_projector, ComplexMatrix, ExtremeEigenSolver, ToleranceConfig};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_CANDIDATES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSolverConfig {
    /// Uniform θ grid size over `[0, 2π)`; rounded up to an even count.
    pub coarse_points: usize,
    /// Cap on refinement iterations per candidate.
    pub refine_iters: usize,
    pub target_rel_err: f64,
}

impl Default for AngleSolverConfig {
    fn default() -> Self {
        Self {
            coarse_points: 1024,
            refine_iters: 60,
            target_rel_err: 1e-10,
        }
    }
}

impl AngleSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_points < 8 {
            return Err(Error::InvalidConfig(format!(
                "coarse_points must be at least 8, got {}",
                self.coarse_points
            )));
        }
        if self.refine_iters < 1 {
            return Err(Error::InvalidConfig("refine_iters must be at least 1".into()));
        }
        if !(self.target_rel_err > 0.0 && self.target_rel_err < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target_rel_err must lie in (0,1), got {}",
                self.target_rel_err
            )));
        }
        Ok(())
    }

    fn grid_size(&self) -> usize {
        self.coarse_points + (self.coarse_points & 1)
    }

    /// Angular resolution at which refinement stops. Near a smooth maximum
    /// the value error is quadratic in this.
    fn angle_tolerance(&self) -> f64 {
        0.1 * self.target_rel_err.sqrt()
    }
}

/// `(w(X), c(X))` from one angular sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeExtent {
    pub numerical_radius: f64,
    pub crawford: f64,
}

/// `w(X) = sup_{‖z‖=1} |⟨Xz, z⟩|`.
pub fn numerical_radius(x: &ComplexMatrix, cfg: &AngleSolverConfig) -> Result<f64> {
    Ok(AngleProfile::new(x, cfg)?.numerical_radius())
}

/// `c(X) = inf_{‖z‖=1} |⟨Xz, z⟩|`, the distance from the origin to the
/// numerical range.
pub fn crawford_number(x: &ComplexMatrix, cfg: &AngleSolverConfig) -> Result<f64> {
    Ok(AngleProfile::new(x, cfg)?.crawford())
}

/// Numerical radius and Crawford number sharing a single grid sweep.
pub fn range_extent(x: &ComplexMatrix, cfg: &AngleSolverConfig) -> Result<RangeExtent> {
    let mut p = AngleProfile::new(x, cfg)?;
    let numerical_radius = p.numerical_radius();
    let crawford = p.crawford();
    Ok(RangeExtent {
        numerical_radius,
        crawford,
    })
}

pub fn validate_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 2.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "rho",
            value: rho,
            range: "(0,2]",
        })
    }
}

/// The block whose numerical radius, scaled by `2/ρ`, is `w_ρ(X)`:
/// `[[0, √(ρ(2−ρ))·X], [0, (1−ρ)·X]]`.
pub fn operator_radius_block(x: &ComplexMatrix, rho: f64) -> Result<ComplexMatrix> {
    validate_rho(rho)?;
    let n = x.require_square()?;
    let z = ComplexMatrix::zeros(n, n);
    block2x2(&z, &x.scale_real((rho * (2.0 - rho)).sqrt()), &z, &x.scale_real(1.0 - rho))
}

/// Operator radius `w_ρ(X)` for `ρ ∈ (0, 2]`.
pub fn operator_radius_rho(x: &ComplexMatrix, rho: f64, cfg: &AngleSolverConfig) -> Result<f64> {
    let block = operator_radius_block(x, rho)?;
    Ok(2.0 / rho * numerical_radius(&block, cfg)?)
}

/// Aluthge transform `|X|^{1/2} V |X|^{1/2}` where `X = V|X|`.
pub fn aluthge(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    aluthge_with(x, &ToleranceConfig::default())
}

pub fn aluthge_with(x: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = x.require_square()?;
    if x.is_zero() {
        return Ok(ComplexMatrix::zeros(n, n));
    }
    let s = svd(x)?;
    let v = partial_isometry(&s, tol.rank_cutoff);
    let floor = tol.rank_cutoff * s.singular_values[0];
    let root = weighted_projector(&s.right, &s.singular_values, |sigma| {
        if sigma > floor {
            sigma.sqrt()
        } else {
            0.0
        }
    });
    Ok(root.matmul(&v).matmul(&root))
}

/// Angular profile of `Re(e^{iθ}X)` on the coarse grid.
struct AngleProfile {
    re: Vec<Complex64>,
    im: Vec<Complex64>,
    solver: ExtremeEigenSolver,
    cfg: AngleSolverConfig,
    step: f64,
    /// `λ_max` at grid angle `k·step`.
    upper: Vec<f64>,
    evaluations: usize,
}

impl AngleProfile {
    fn new(x: &ComplexMatrix, cfg: &AngleSolverConfig) -> Result<Self> {
        cfg.validate()?;
        let n = x.require_square()?;
        let re = x.hermitian_part().entries().to_vec();
        let im = x.scale(Complex64::new(0.0, -1.0)).hermitian_part().entries().to_vec();
        let grid = cfg.grid_size();
        let mut p = Self {
            re,
            im,
            solver: ExtremeEigenSolver::new(n),
            cfg: *cfg,
            step: TAU / grid as f64,
            upper: vec![0.0; grid],
            evaluations: 0,
        };
        let half = grid / 2;
        for k in 0..half {
            let (lo, hi) = p.extremes(k as f64 * p.step);
            p.upper[k] = hi;
            p.upper[k + half] = -lo;
        }
        Ok(p)
    }

    fn extremes(&mut self, theta: f64) -> (f64, f64) {
        self.evaluations += 1;
        let (s, c) = theta.sin_cos();
        let buf = self.solver.buffer();
        for ((b, &a), &m) in buf.iter_mut().zip(&self.re).zip(&self.im) {
            *b = a * c - m * s;
        }
        // A failed QL sweep is not expected for Hermitian input; fall back to
        // a value that cannot raise the running maximum.
        self.solver
            .extremes()
            .unwrap_or((f64::INFINITY, f64::NEG_INFINITY))
    }

    fn upper_at(&mut self, theta: f64) -> f64 {
        self.extremes(theta).1
    }

    fn lower_at(&mut self, theta: f64) -> f64 {
        self.extremes(theta).0
    }

    fn numerical_radius(&mut self) -> f64 {
        let best = self.upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if best <= 0.0 {
            return best.max(0.0);
        }
        let values = self.upper.clone();
        self.zoom(&values, Bound::Support, Self::upper_at)
    }

    fn crawford(&mut self) -> f64 {
        // λ_min at grid angle j is −λ_max at the opposite angle.
        let half = self.upper.len() / 2;
        let grid = self.upper.len();
        let lower: Vec<f64> = (0..grid).map(|j| -self.upper[(j + half) % grid]).collect();
        let best = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // |d/dθ λ_min| ≤ w(X) ≤ max λ_max / cos(h/2).
        let w_bound = self.upper.iter().copied().fold(0.0, f64::max) / (0.5 * self.step).cos();
        // Every angle is within h/2 of a grid point.
        if best + 0.5 * w_bound * self.step <= 0.0 {
            return 0.0;
        }
        if best > 0.0 {
            // Where λ_min > 0 it is a minimum of sinusoids g with g'' = −g < 0,
            // hence concave on that arc, and the arc holds every positive
            // value. One bracket around the best grid point suffices.
            let k = first_argmax(&lower);
            let centre = k as f64 * self.step;
            // The maximum sits on a kink when the nearest point of W(X) is
            // inside an edge, so the error is linear in the angle there.
            let tol = self.cfg.target_rel_err;
            return self.refine_max(centre - self.step, centre + self.step, centre, best, tol, Self::lower_at);
        }
        self.zoom(&lower, Bound::Lipschitz(w_bound), Self::lower_at).max(0.0)
    }

    /// Maximizes `f` given its values on the coarse grid.
    ///
    /// Every grid cell whose centre value passes `bound` may hold the
    /// maximizer; those cells are split in three and re-screened with the
    /// tighter bound until they are a few multiples of the angle tolerance
    /// wide, then each survivor gets a Brent polish. Splitting first keeps
    /// the polish away from brackets that straddle two humps of the profile.
    fn zoom(&mut self, values: &[f64], bound: Bound, f: fn(&mut Self, f64) -> f64) -> f64 {
        let mut best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut width = self.step;
        let mut cells: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(k, &v)| (k as f64 * self.step, v))
            .collect();
        screen(&mut cells, bound.threshold(best, width));
        let stop = 64.0 * self.cfg.angle_tolerance();
        while width > stop {
            // Thirds, so the centre value carries over.
            let sub = width / 3.0;
            let mut next = Vec::with_capacity(3 * cells.len());
            for &(c, v) in &cells {
                next.push((c, v));
                for t in [c - sub, c + sub] {
                    let v = f(self, t);
                    best = best.max(v);
                    next.push((t, v));
                }
            }
            width = sub;
            screen(&mut next, bound.threshold(best, width));
            cells = next;
        }
        for (c, v) in cells {
            let r = self.refine_max(c - 0.5 * width, c + 0.5 * width, c, v, self.cfg.angle_tolerance(), f);
            best = best.max(r);
        }
        best
    }

    /// Brent maximization (golden section with parabolic steps) on `[a, b]`
    /// starting from the grid point `x0`. Returns the best value seen, which
    /// is always attained and therefore never exceeds the supremum.
    #[allow(clippy::too_many_arguments)]
    fn refine_max(&mut self, a: f64, b: f64, x0: f64, f0: f64, tol1: f64, f: fn(&mut Self, f64) -> f64) -> f64 {
        const CGOLD: f64 = 1.0 - INV_PHI;
        let tol2 = 2.0 * tol1;
        let (mut a, mut b) = (a, b);
        // Minimize g = −f.
        let (mut x, mut w, mut v) = (x0, x0, x0);
        let (mut fx, mut fw, mut fv) = (-f0, -f0, -f0);
        let (mut d, mut e) = (0.0f64, 0.0f64);
        for _ in 0..self.cfg.refine_iters {
            let xm = 0.5 * (a + b);
            if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
                break;
            }
            let mut golden = true;
            if e.abs() > tol1 {
                let r = (x - w) * (fx - fv);
                let mut q = (x - v) * (fx - fw);
                let mut p = (x - v) * q - (x - w) * r;
                q = 2.0 * (q - r);
                if q > 0.0 {
                    p = -p;
                }
                q = q.abs();
                let etemp = e;
                if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                    e = d;
                    d = p / q;
                    let u = x + d;
                    if u - a < tol2 || b - u < tol2 {
                        d = tol1.copysign(xm - x);
                    }
                    golden = false;
                }
            }
            if golden {
                e = if x >= xm { a - x } else { b - x };
                d = CGOLD * e;
            }
            let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
            let fu = -f(self, u);
            if fu <= fx {
                if u >= x {
                    a = x;
                } else {
                    b = x;
                }
                (v, fv) = (w, fw);
                (w, fw) = (x, fx);
                (x, fx) = (u, fu);
            } else {
                if u < x {
                    a = u;
                } else {
                    b = u;
                }
                if fu <= fw || w == x {
                    (v, fv) = (w, fw);
                    (w, fw) = (u, fu);
                } else if fu <= fv || v == x || v == w {
                    (v, fv) = (u, fu);
                }
            }
        }
        -fx
    }
}

/// Candidate rule for a cell of width `h` whose centre scores `v`.
#[derive(Debug, Clone, Copy)]
enum Bound {
    /// `λ_max(θ) ≥ w·cos(θ − θ*)`: keep cells with `v ≥ best·cos(h/2)`.
    Support,
    /// Derivative bounded by the given constant: keep `v ≥ best − L·h/2`.
    Lipschitz(f64),
}

impl Bound {
    fn threshold(self, best: f64, h: f64) -> f64 {
        match self {
            Bound::Support => best * (0.5 * h).cos(),
            Bound::Lipschitz(l) => best - 0.5 * l * h,
        }
    }
}

fn first_argmax(values: &[f64]) -> usize {
    let mut k = 0;
    for (j, &v) in values.iter().enumerate() {
        if v > values[k] {
            k = j;
        }
    }
    k
}

/// Keeps cells at or above `threshold`, best first, at most
/// `MAX_CANDIDATES`. Ties go to the smaller angle so results do not depend
/// on evaluation order.
fn screen(cells: &mut Vec<(f64, f64)>, threshold: f64) {
    cells.retain(|&(_, v)| v >= threshold);
    cells.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    cells.truncate(MAX_CANDIDATES);
}

/// Angle grid used for sampled-angle checks and tests.
pub fn angle_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |k| 2.0 * PI * k as f64 / points as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_support::{random_ginibre, random_unitary, residual};
    use crate::linalg::{re_part, spectral_norm, spectral_radius};

    fn cfg() -> AngleSolverConfig {
        AngleSolverConfig::default()
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn config_validation() {
        cfg().validate().unwrap();
        let bad = AngleSolverConfig {
            coarse_points: 4,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = AngleSolverConfig {
            refine_iters: 0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        assert!(numerical_radius(&nilpotent(), &bad).is_err());
    }

    #[test]
    fn numerical_radius_examples() {
        assert!((numerical_radius(&nilpotent(), &cfg()).unwrap() - 0.5).abs() < 1e-14);
        let h = random_ginibre(4, 3).hermitian_part();
        assert!((numerical_radius(&h, &cfg()).unwrap() - spectral_norm(&h)).abs() < 1e-12);
        let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert!((numerical_radius(&d, &cfg()).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            numerical_radius(&ComplexMatrix::zeros(2, 3), &cfg()),
            Err(Error::NotSquare { .. })
        ));
        assert_eq!(numerical_radius(&ComplexMatrix::zeros(3, 3), &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn numerical_radius_of_normal_is_max_eigenvalue_modulus() {
        for seed in 0..10 {
            let u = random_unitary(5, seed);
            let d: Vec<Complex64> = (0..5).map(|k| c((k as f64 * 1.7 + seed as f64).sin() * 3.0, (k as f64).cos())).collect();
            let m = u.matmul(&ComplexMatrix::from_diag(&d)).matmul(&u.adjoint());
            let want = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let got = numerical_radius(&m, &cfg()).unwrap();
            assert!((got - want).abs() < 1e-11 * want, "{got} vs {want}");
        }
    }

    #[test]
    fn coarse_grid_finds_the_highest_of_nearby_humps() {
        // Near-equal eigenvalue moduli at nearby angles give a profile with
        // several humps per coarse cell.
        let coarse = AngleSolverConfig {
            coarse_points: 16,
            ..cfg()
        };
        for seed in 0..200u64 {
            let d: Vec<Complex64> = (0..6)
                .map(|k| {
                    let t = ((seed * 6 + k) as f64 * 0.754_877_666).fract();
                    let r = 1.0 - 0.01 * ((seed * 7 + k) as f64 * 0.569_840_29).fract();
                    Complex64::from_polar(r, 0.8 * t)
                })
                .collect();
            let m = ComplexMatrix::from_diag(&d);
            let want = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let got = numerical_radius(&m, &coarse).unwrap();
            assert!((got - want).abs() < 1e-9, "seed {seed}: {got} vs {want}");
            assert!(got <= want * (1.0 + 1e-14));
        }
    }

    #[test]
    fn numerical_radius_bounds_and_invariance() {
        for seed in 0..20 {
            let x = random_ginibre(5, seed);
            let w = numerical_radius(&x, &cfg()).unwrap();
            let nx = spectral_norm(&x);
            assert!(w <= nx * (1.0 + 1e-12) && w >= 0.5 * nx * (1.0 - 1e-12));
            let wa = numerical_radius(&x.adjoint(), &cfg()).unwrap();
            assert!((w - wa).abs() < 1e-10 * w);
            let u = random_unitary(5, seed + 7);
            let wu = numerical_radius(&u.adjoint().matmul(&x).matmul(&u), &cfg()).unwrap();
            assert!((w - wu).abs() < 1e-10 * w);
            for theta in angle_grid(97) {
                let r = re_part(&x.scale(Complex64::from_polar(1.0, theta))).unwrap();
                assert!(spectral_norm(&r) <= w * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn crawford_examples() {
        assert!((crawford_number(&ComplexMatrix::identity(3), &cfg()).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(crawford_number(&ComplexMatrix::from_real_diag(&[1.0, -1.0]), &cfg()).unwrap(), 0.0);
        let d = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let got = crawford_number(&d, &cfg()).unwrap();
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12, "{got}");
        assert_eq!(crawford_number(&nilpotent(), &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn crawford_nearest_point_on_an_edge_with_coarse_grid() {
        // W is a polygon whose nearest point to 0 lies inside the edge
        // [a, b], where λ_min has a kink at its maximum.
        let coarse = AngleSolverConfig {
            coarse_points: 16,
            ..AngleSolverConfig::default()
        };
        for (a, b) in [(c(1.0, 0.0), c(0.0, 1.0)), (c(2.0, 1.0), c(3.0, -1.0)), (c(-1.0, 2.0), c(1.5, 1.2))] {
            let d = ComplexMatrix::from_diag(&[a, b, (a + b) * 1.3]);
            let e = b - a;
            let t = (-(a.conj() * e).re / e.norm_sqr()).clamp(0.0, 1.0);
            let want = (a + e * t).norm();
            let got = crawford_number(&d, &coarse).unwrap();
            assert!((got - want).abs() < 1e-9, "{a} {b}: {got} vs {want}");
        }
    }

    #[test]
    fn crawford_below_numerical_radius() {
        for seed in 0..10 {
            // Shift so the origin is often outside the range.
            let x = &random_ginibre(4, seed) + &ComplexMatrix::identity(4).scale(c(2.0, 1.0));
            let e = range_extent(&x, &cfg()).unwrap();
            assert!(e.crawford <= e.numerical_radius);
            assert_eq!(e.crawford, crawford_number(&x, &cfg()).unwrap());
            assert_eq!(e.numerical_radius, numerical_radius(&x, &cfg()).unwrap());
        }
    }

    #[test]
    fn operator_radius_examples() {
        let x = nilpotent();
        for rho in [0.1, 0.5, 1.0, 1.5, 2.0] {
            let w = operator_radius_rho(&x, rho, &cfg()).unwrap();
            assert!((w - 1.0 / rho).abs() < 1e-10, "rho {rho}: {w}");
        }
        let d = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert!((operator_radius_rho(&d, 0.5, &cfg()).unwrap() - 3.0).abs() < 1e-10);
        for seed in 0..5 {
            let y = random_ginibre(4, seed);
            let one = operator_radius_rho(&y, 1.0, &cfg()).unwrap();
            assert!((one - spectral_norm(&y)).abs() < 1e-10 * one);
            let two = operator_radius_rho(&y, 2.0, &cfg()).unwrap();
            assert!((two - numerical_radius(&y, &cfg()).unwrap()).abs() < 1e-10 * two);
        }
        for bad in [0.0, -1.0, 2.5, f64::NAN] {
            assert!(matches!(operator_radius_rho(&x, bad, &cfg()), Err(Error::OutOfRange { name: "rho", .. })));
        }
    }

    #[test]
    fn aluthge_examples() {
        assert!(aluthge(&nilpotent()).unwrap().frobenius_norm() < 1e-15);
        let d = ComplexMatrix::from_diag(&[c(2.0, 1.0), c(-3.0, 0.0), c(0.0, 0.5)]);
        assert!(residual(&aluthge(&d).unwrap(), &d) < 1e-13);
        assert!(aluthge(&ComplexMatrix::zeros(2, 2)).unwrap().is_zero());
    }

    #[test]
    fn aluthge_preserves_spectral_radius() {
        for seed in 0..20 {
            let x = random_ginibre(5, seed);
            let t = aluthge(&x).unwrap();
            let (a, b) = (spectral_radius(&x).unwrap(), spectral_radius(&t).unwrap());
            assert!((a - b).abs() < 1e-6 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn aluthge_ignores_kernel_choice() {
        // Rank-deficient input: the transform must not depend on how V acts on ker|X|.
        let mut x = random_ginibre(4, 5);
        for i in 0..4 {
            x[(i, 0)] = c(0.0, 0.0);
        }
        let base = aluthge(&x).unwrap();
        let s = svd(&x).unwrap();
        // Extend V by mapping the kernel direction somewhere arbitrary.
        let mut v = partial_isometry(&s, 1e-12);
        let extra = ComplexMatrix::from_fn(4, 4, |i, j| s.left[(i, 3)] * s.right[(j, 3)].conj());
        v = &v + &extra;
        let root = weighted_projector(&s.right, &s.singular_values, |sg| if sg > 1e-12 * s.singular_values[0] { sg.sqrt() } else { 0.0 });
        let alt = root.matmul(&v).matmul(&root);
        assert!(residual(&alt, &base) < 1e-12 * x.frobenius_norm());
    }
}
