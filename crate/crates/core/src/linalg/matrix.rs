use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
///
/// All entries are finite; constructors that take caller data validate this.
/// Arithmetic operators panic on dimension mismatch, the same way slice
/// indexing does; fallible assembly goes through [`block2x2`].
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real rows, e.g. `from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::RaggedRows);
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::RaggedRows);
        }
        Self::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Wraps data produced by internal kernels, which never emit non-finite
    /// values from finite inputs.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(self.rows, self.cols, self.data.iter().map(|&z| f(z)).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Frobenius norm of `self - self*`.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "hermitian_defect on non-square matrix");
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M*)/2`, exactly Hermitian.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian_part on non-square matrix");
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "submatrix out of bounds");
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows * rhs.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self::from_raw(self.rows, rhs.cols, out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `⟨M z, z⟩ = z* M z`.
    pub fn quadratic_form(&self, z: &[Complex64]) -> Complex64 {
        inner(&self.mul_vec(z), z)
    }

    /// `A* A`.
    pub fn gram(&self) -> Self {
        self.adjoint().matmul(self)
    }

    /// `A A*`.
    pub fn cogram(&self) -> Self {
        self.matmul(&self.adjoint())
    }
}

/// `⟨u, v⟩ = Σ u_i conj(v_i)`, linear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(&a, &b)| a * b.conj()).sum()
}

pub fn vec_norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Assembles `[[s, x], [y, t]]` from four `n×n` blocks.
pub fn block2x2(
    s: &ComplexMatrix,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    t: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = s.require_square()?;
    for b in [x, y, t] {
        if b.rows != n || b.cols != n {
            return Err(Error::DimensionMismatch {
                expected: (n, n),
                actual: (b.rows, b.cols),
            });
        }
    }
    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = s[(i, j)];
            out[(i, j + n)] = x[(i, j)];
            out[(i + n, j)] = y[(i, j)];
            out[(i + n, j + n)] = t[(i, j)];
        }
    }
    Ok(out)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, op: &str, f: impl Fn(Complex64, Complex64) -> Complex64) -> ComplexMatrix {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "{op} dimension mismatch: {}x{} vs {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    ComplexMatrix::from_raw(
        a.rows,
        a.cols,
        a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    )
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, "add", |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, "sub", |x, y| x - y)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
