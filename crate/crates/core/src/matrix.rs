//! Dense square matrices in row-major storage.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::{Error, Result};

/// A dense real `n x n` matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidDimension(format!(
                "expected {} entries for order {n}, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Copies the `size x size` block whose top-left corner is `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> Matrix {
        Matrix::from_fn(size, |i, j| self[(row + i, col + j)])
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        let (p, q) = (a.order(), b.order());
        let mut out = Matrix::zeros(p + q);
        for i in 0..p {
            out.data[i * (p + q)..i * (p + q) + p].copy_from_slice(a.row(i));
        }
        for i in 0..q {
            let r = (p + i) * (p + q) + p;
            out.data[r..r + q].copy_from_slice(b.row(i));
        }
        out
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "order mismatch in matmul");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        if n == 0 {
            return out;
        }
        let stride = n as isize;
        // SAFETY: all three buffers hold n*n elements with row stride n and
        // unit column stride; `out` does not alias the inputs.
        unsafe {
            matrixmultiply::dgemm(
                n,
                n,
                n,
                1.0,
                self.data.as_ptr(),
                stride,
                1,
                rhs.data.as_ptr(),
                stride,
                1,
                0.0,
                out.data.as_mut_ptr(),
                stride,
                1,
            );
        }
        out
    }

    /// `sum_ij self[i][j] * other[j][i]`, i.e. `Tr(self * other)` without
    /// forming the product.
    pub fn trace_of_product(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n, "order mismatch in trace_of_product");
        let n = self.n;
        let mut total = 0.0;
        for i in 0..n {
            let row = self.row(i);
            let mut acc = 0.0;
            for (j, a) in row.iter().enumerate() {
                acc += a * other.data[j * n + i];
            }
            total += acc;
        }
        total
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n);
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.n, self.n)?;
        for i in 0..self.n.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.n.min(8)])?;
        }
        Ok(())
    }
}
