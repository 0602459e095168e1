//! Eigenvalues of a general complex matrix via Hessenberg reduction and
//! single-shift complex QR.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn eigenvalues(x: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = x.require_square()?;
    let mut h = x.clone();
    hessenberg(&mut h);

    let mut out = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let sub = h[(lo, lo - 1)].norm();
            if sub <= f64::EPSILON * s || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::NoConvergence("Hessenberg QR"));
        }
        let shift = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            let sub = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + Complex64::new(0.75 * sub, 0.4375 * sub)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, lo, hi, shift);
    }
    out[0] = h[(0, 0)];
    Ok(out)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(x: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(x)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = h[(k + 1, k)];
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { Complex64::new(1.0, 0.0) };
        let unorm = (2.0 * xnorm * (xnorm + alpha.norm())).sqrt();
        let scale = std::f64::consts::SQRT_2 / unorm;
        let mut w = vec![ZERO; m];
        w[0] = (alpha + phase * xnorm) * scale;
        for i in 1..m {
            w[i] = h[(k + 1 + i, k)] * scale;
        }
        // Left: rows k+1.. ← (I − w w*) rows.
        for j in 0..n {
            let t: Complex64 = (0..m).map(|i| w[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..m {
                let upd = w[i] * t;
                h[(k + 1 + i, j)] -= upd;
            }
        }
        // Right: cols k+1.. ← cols (I − w w*).
        for r in 0..n {
            let t: Complex64 = (0..m).map(|i| h[(r, k + 1 + i)] * w[i]).sum();
            for i in 0..m {
                let upd = t * w[i].conj();
                h[(r, k + 1 + i)] -= upd;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// One shifted QR sweep on the block `lo..=hi` using Givens rotations.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.rows();
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..n {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let top = (k + 2).min(hi);
        for i in 0..=top {
            let (x, y) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// `(c, s)` with `c` real such that `[[c, s], [−s̄, c]] [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, ZERO);
    }
    let fnorm = f.norm();
    if fnorm == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let nu = fnorm.hypot(gn);
    let c = fnorm / nu;
    let s = (f / fnorm) * g.conj() / nu;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_support::{random_ginibre, random_unitary};

    #[test]
    fn nilpotent_has_zero_radius() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(spectral_radius(&x).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_and_unitary() {
        let x = ComplexMatrix::from_real_diag(&[2.0, -3.0]);
        assert!((spectral_radius(&x).unwrap() - 3.0).abs() < 1e-15);
        for seed in 0..5 {
            let u = random_unitary(5, seed);
            assert!((spectral_radius(&u).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_and_similarity_invariance() {
        for seed in 0..20 {
            for n in 1..8 {
                let x = random_ginibre(n, seed);
                let eig = eigenvalues(&x).unwrap();
                let tr: Complex64 = eig.iter().sum();
                assert!((tr - x.trace()).norm() < 1e-11 * (1.0 + x.frobenius_norm()));
                // Known spectrum under unitary similarity.
                let d: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64 + 1.0, -(k as f64) * 0.5)).collect();
                let u = random_unitary(n, seed + 100);
                let m = u.matmul(&ComplexMatrix::from_diag(&d)).matmul(&u.adjoint());
                let mut got = eigenvalues(&m).unwrap();
                for want in &d {
                    let (pos, err) = got
                        .iter()
                        .enumerate()
                        .map(|(i, z)| (i, (z - want).norm()))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap();
                    assert!(err < 1e-10, "seed {seed} n {n}: {err}");
                    got.remove(pos);
                }
            }
        }
    }
}
