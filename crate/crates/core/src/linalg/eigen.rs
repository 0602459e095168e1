//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL with Wilkinson-style shifts.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const QL_MAX_SWEEPS: usize = 60;

/// Spectral decomposition `M = Q diag(λ) Q*` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `Q diag(f(λ)) Q*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let q = &self.eigenvectors;
        let n = q.rows();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = ZERO;
                for (k, &v) in vals.iter().enumerate() {
                    if v != 0.0 {
                        acc += q[(i, k)] * q[(j, k)].conj() * v;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Full eigendecomposition of `(M + M*)/2`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = m.require_square()?;
    let mut a = m.hermitian_part().entries().to_vec();
    let mut scratch = TridiagScratch::new(n);
    let mut q = ComplexMatrix::identity(n);
    tridiagonalize(&mut a, n, &mut scratch, Some(q.entries_mut()));
    scratch.realify(Some(q.entries_mut()));
    tql_implicit(&mut scratch.d, &mut scratch.e, Some(q.entries_mut()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| scratch.d[i].total_cmp(&scratch.d[j]));
    let eigenvalues = order.iter().map(|&k| scratch.d[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues of `(M + M*)/2`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.require_square()?;
    let mut solver = ExtremeEigenSolver::new(n);
    solver.buffer().copy_from_slice(m.hermitian_part().entries());
    let mut vals = solver.eigenvalues()?.to_vec();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Largest eigenvalue of `(M + M*)/2`.
pub fn lambda_max(m: &ComplexMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(m)?.last().expect("non-empty"))
}

/// Reusable eigenvalue-only solver for repeated small Hermitian problems.
///
/// Callers write a full Hermitian matrix (row-major) into [`buffer`] and then
/// ask for the spectrum; no allocation happens per solve.
///
/// [`buffer`]: ExtremeEigenSolver::buffer
pub(crate) struct ExtremeEigenSolver {
    n: usize,
    a: Vec<Complex64>,
    scratch: TridiagScratch,
}

impl ExtremeEigenSolver {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            n,
            a: vec![ZERO; n * n],
            scratch: TridiagScratch::new(n),
        }
    }

    pub(crate) fn buffer(&mut self) -> &mut [Complex64] {
        &mut self.a
    }

    /// Unsorted eigenvalues of the buffered matrix. The buffer is consumed.
    pub(crate) fn eigenvalues(&mut self) -> Result<&[f64]> {
        tridiagonalize(&mut self.a, self.n, &mut self.scratch, None);
        self.scratch.realify(None);
        tql_implicit(&mut self.scratch.d, &mut self.scratch.e, None)?;
        Ok(&self.scratch.d)
    }

    /// `(λ_min, λ_max)` of the buffered matrix. The buffer is consumed.
    pub(crate) fn extremes(&mut self) -> Result<(f64, f64)> {
        let d = self.eigenvalues()?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in d {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        Ok((lo, hi))
    }
}

struct TridiagScratch {
    d: Vec<f64>,
    e: Vec<f64>,
    ec: Vec<Complex64>,
    w: Vec<Complex64>,
    p: Vec<Complex64>,
}

impl TridiagScratch {
    fn new(n: usize) -> Self {
        Self {
            d: vec![0.0; n],
            e: vec![0.0; n],
            ec: vec![ZERO; n],
            w: vec![ZERO; n],
            p: vec![ZERO; n],
        }
    }

    /// Replaces the complex subdiagonal by its moduli. The diagonal phase
    /// similarity that does this is folded into `q` when present.
    fn realify(&mut self, q: Option<&mut [Complex64]>) {
        let n = self.d.len();
        let mut phase = ONE;
        let mut phases = q.as_ref().map(|_| vec![ONE; n]);
        for k in 0..n.saturating_sub(1) {
            let z = self.ec[k];
            let r = z.norm();
            self.e[k] = r;
            if r > 0.0 {
                phase *= z / r;
            }
            if let Some(ph) = phases.as_mut() {
                ph[k + 1] = phase;
            }
        }
        if n > 0 {
            self.e[n - 1] = 0.0;
        }
        if let (Some(q), Some(ph)) = (q, phases) {
            for i in 0..n {
                for (j, &p) in ph.iter().enumerate() {
                    q[i * n + j] *= p;
                }
            }
        }
    }
}

/// Reduces the Hermitian matrix held in the lower triangle of `a` to
/// tridiagonal form `Q T Q*`. Diagonal goes to `s.d`, complex subdiagonal to
/// `s.ec`. When `q` is given it is right-multiplied by the reflectors.
fn tridiagonalize(a: &mut [Complex64], n: usize, s: &mut TridiagScratch, mut q: Option<&mut [Complex64]>) {
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let alpha = a[(k + 1) * n + k];
        let tail: f64 = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if k + 2 >= n || tail == 0.0 {
            s.ec[k] = alpha;
            continue;
        }
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let anorm = hypot(alpha.re, alpha.im);
        let phase = if anorm > 0.0 { alpha / anorm } else { ONE };
        // u = x + e^{iφ}‖x‖ e₁ and P = I − w w* with w = √2 u/‖u‖.
        let unorm = (2.0 * xnorm * (xnorm + anorm)).sqrt();
        let scale = std::f64::consts::SQRT_2 / unorm;
        let w = &mut s.w[..m];
        w[0] = (alpha + phase * xnorm) * scale;
        for i in 1..m {
            w[i] = a[(k + 1 + i) * n + k] * scale;
        }
        s.ec[k] = -phase * xnorm;

        // p = S w using the lower triangle of the trailing block S.
        let p = &mut s.p[..m];
        p.fill(ZERO);
        for i in 0..m {
            let row = (k + 1 + i) * n + k + 1;
            let wi = w[i];
            let mut acc = a[row + i].re * wi;
            for j in 0..i {
                let sij = a[row + j];
                acc += sij * w[j];
                p[j] += sij.conj() * wi;
            }
            p[i] += acc;
        }
        let half_k = 0.5 * w.iter().zip(p.iter()).map(|(wi, pi)| (wi.conj() * pi).re).sum::<f64>();
        for i in 0..m {
            p[i] -= w[i] * half_k;
        }
        // S ← S − w q* − q w* on the lower triangle.
        for i in 0..m {
            let row = (k + 1 + i) * n + k + 1;
            let (wi, qi) = (w[i], p[i]);
            for j in 0..=i {
                a[row + j] -= wi * p[j].conj() + qi * w[j].conj();
            }
        }

        if let Some(q) = q.as_deref_mut() {
            for r in 0..n {
                let row = &mut q[r * n + k + 1..(r + 1) * n];
                let t: Complex64 = row.iter().zip(w.iter()).map(|(&x, &y)| x * y).sum();
                for (x, &y) in row.iter_mut().zip(w.iter()) {
                    *x -= t * y.conj();
                }
            }
        }
    }
    for i in 0..n {
        s.d[i] = a[i * n + i].re;
    }
}

/// `√(a² + b²)`; libm's `hypot` only when squaring could over- or underflow.
/// The QL sweep calls this in its inner loop, where the libm version is a
/// measurable share of the run time.
#[inline]
fn hypot(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m > 1e-150 && m < 1e150 {
        (a * a + b * b).sqrt()
    } else {
        a.hypot(b)
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e[i]`
/// coupling `i` and `i+1`). Rotations are applied to the columns of `z`.
fn tql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [Complex64]>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence("tridiagonal QL"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zi = z[k * n + i];
                        let zi1 = z[k * n + i + 1];
                        z[k * n + i + 1] = zi * s + zi1 * c;
                        z[k * n + i] = zi * c - zi1 * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_support::{random_ginibre, residual};

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let m = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let eig = hermitian_eigen(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]).unwrap();
        let vals = hermitian_eigenvalues(&m).unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-15 && (vals[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_residuals() {
        for seed in 0..20 {
            for n in 1..9 {
                let g = random_ginibre(n, seed);
                let m = g.hermitian_part();
                let eig = hermitian_eigen(&m).unwrap();
                let scale = m.frobenius_norm().max(1e-300);
                let q = &eig.eigenvectors;
                for k in 0..n {
                    let v = q.column(k);
                    let mv = m.mul_vec(&v);
                    let r: f64 = mv
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| (a - b * eig.eigenvalues[k]).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    assert!(r <= 1e-10 * scale, "seed {seed} n {n} k {k}: {r}");
                }
                let gram = q.gram();
                assert!(residual(&gram, &ComplexMatrix::identity(n)) < 1e-12);
                assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
                let fast = hermitian_eigenvalues(&m).unwrap();
                for (a, b) in fast.iter().zip(&eig.eigenvalues) {
                    assert!((a - b).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn symmetrizes_before_solving() {
        // Upper triangle disagrees with lower; the solver sees (M + M*)/2.
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let vals = hermitian_eigenvalues(&m).unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-15 && (vals[1] - 0.5).abs() < 1e-15);
    }
}
