//! One-sided (Hestenes) Jacobi SVD. Slower than bidiagonalization but keeps
//! small singular values accurate, which the rank cutoff in the polar
//! decomposition relies on.

use num_complex::Complex64;

use super::eigen::ExtremeEigenSolver;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `X = left · diag(σ) · right*` with `σ` descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let scaled = ComplexMatrix::from_fn(self.left.rows(), k, |i, j| self.left[(i, j)] * self.singular_values[j]);
        scaled.matmul(&self.right.adjoint())
    }

    /// Number of singular values above `cutoff · σ_max`.
    pub fn rank(&self, cutoff: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.singular_values.iter().take_while(|&&s| s > cutoff * smax).count()
    }
}

pub fn svd(x: &ComplexMatrix) -> Result<SvdResult> {
    if x.rows() < x.cols() {
        let t = svd(&x.adjoint())?;
        return Ok(SvdResult {
            left: t.right,
            singular_values: t.singular_values,
            right: t.left,
        });
    }
    let (m, n) = (x.rows(), x.cols());
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| x.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Jacobi SVD"));
    }

    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let smax = singular_values[0];

    // Left vectors for numerically nonzero σ; complete the rest to an
    // orthonormal set.
    let floor = smax * f64::EPSILON * (m.max(n) as f64);
    let mut left: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &k in &order {
        if norms[k] > floor && norms[k] > 0.0 {
            left.push(cols[k].iter().map(|z| z / norms[k]).collect());
        } else {
            left.push(Vec::new());
        }
    }
    complete_orthonormal(&mut left, m);

    let left = ComplexMatrix::from_fn(m, n, |i, j| left[j][i]);
    let right = ComplexMatrix::from_fn(n, n, |i, j| v[order[j]][i]);
    Ok(SvdResult {
        left,
        singular_values,
        right,
    })
}

fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, phase: Complex64, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let ap = *a;
        let aq = *b * phase;
        *a = ap * c - aq * s;
        *b = ap * s + aq * c;
    }
}

/// Fills empty slots with unit vectors orthogonal to every other slot.
/// Each slot takes the coordinate vector with the largest residual after
/// projecting out the filled slots; some residual is at least
/// `sqrt(free / dim)`, so this never degenerates.
fn complete_orthonormal(vecs: &mut [Vec<Complex64>], dim: usize) {
    for slot in 0..vecs.len() {
        if !vecs[slot].is_empty() {
            continue;
        }
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for basis in 0..dim {
            let mut cand = vec![Complex64::new(0.0, 0.0); dim];
            cand[basis] = Complex64::new(1.0, 0.0);
            // Two passes of Gram-Schmidt for stability.
            for _ in 0..2 {
                for other in vecs.iter().filter(|o| !o.is_empty()) {
                    let proj: Complex64 = other.iter().zip(&cand).map(|(o, c)| o.conj() * c).sum();
                    for (c, o) in cand.iter_mut().zip(other) {
                        *c -= proj * o;
                    }
                }
            }
            let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().map_or(true, |(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, cand) = best.expect("dim > 0");
        vecs[slot] = cand.into_iter().map(|z| z / nrm).collect();
    }
}

/// Largest singular value.
///
/// Computed as `sqrt(λ_max(X*X))`; the top eigenvalue of the Gram matrix is
/// relatively accurate, so this agrees with the SVD route to roundoff.
pub fn spectral_norm(x: &ComplexMatrix) -> f64 {
    let g = if x.rows() >= x.cols() { x.gram() } else { x.cogram() };
    let n = g.rows();
    let mut solver = ExtremeEigenSolver::new(n);
    solver.buffer().copy_from_slice(g.entries());
    match solver.extremes() {
        Ok((_, hi)) => hi.max(0.0).sqrt(),
        Err(_) => svd(x).map(|s| s.singular_values[0]).unwrap_or(f64::NAN),
    }
}
