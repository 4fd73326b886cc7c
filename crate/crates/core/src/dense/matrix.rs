use std::ops::{Index, IndexMut};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, C64};

/// Column-major complex dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from column-major storage.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
            data.extend_from_slice(c);
        }
        DenseMatrix { rows, cols: columns.len(), data }
    }

    /// Entries drawn independently from the standard complex normal
    /// distribution (each part has variance 1/2).
    pub fn random_normal<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
        DenseMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Mutable access to two distinct columns.
    pub fn two_cols_mut(&mut self, p: usize, q: usize) -> (&mut [C64], &mut [C64]) {
        assert!(p != q);
        let m = self.rows;
        if p < q {
            let (a, b) = self.data.split_at_mut(q * m);
            (&mut a[p * m..(p + 1) * m], &mut b[..m])
        } else {
            let (a, b) = self.data.split_at_mut(p * m);
            let (bq, bp) = (&mut a[q * m..(q + 1) * m], &mut b[..m]);
            (bp, bq)
        }
    }

    pub fn push_col(&mut self, c: &[C64]) {
        if self.cols == 0 && self.rows == 0 {
            self.rows = c.len();
        }
        assert_eq!(c.len(), self.rows, "column length mismatch");
        self.data.extend_from_slice(c);
        self.cols += 1;
    }

    /// Removes the last column.
    pub fn pop_col(&mut self) -> Option<Vec<C64>> {
        if self.cols == 0 {
            return None;
        }
        self.cols -= 1;
        Some(self.data.split_off(self.cols * self.rows))
    }

    pub fn column_vecs(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.col(j).to_vec()).collect()
    }

    /// Columns `range` as a new matrix.
    pub fn cols_range(&self, start: usize, end: usize) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: end - start,
            data: self.data[start * self.rows..end * self.rows].to_vec(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix { rows: self.rows, cols: idx.len(), data }
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, b: &DenseMatrix) {
        for j in 0..b.cols {
            let src = b.col(j);
            let dst = &mut self.col_mut(c0 + j)[r0..r0 + b.rows];
            dst.copy_from_slice(src);
        }
    }

    /// `[self, other]`.
    pub fn hcat(&self, other: &DenseMatrix) -> Self {
        if self.cols == 0 {
            return other.clone();
        }
        if other.cols == 0 {
            return self.clone();
        }
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        DenseMatrix { rows: self.rows, cols: self.cols + other.cols, data }
    }

    /// `blkdiag(self, other)`.
    pub fn block_diag(&self, other: &DenseMatrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_submatrix(0, 0, self);
        m.set_submatrix(self.rows, self.cols, other);
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// `self · b`.
    pub fn matmul(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.cols, b.rows, "matmul inner dimension mismatch");
        let mut out = Self::zeros(self.rows, b.cols);
        for j in 0..b.cols {
            let bj = b.col(j);
            let oj = out.col_mut(j);
            for (k, &bkj) in bj.iter().enumerate() {
                if bkj == C64::new(0.0, 0.0) {
                    continue;
                }
                axpy(bkj, self.col(k), oj);
            }
        }
        out
    }

    /// `self^H · b` without forming the adjoint.
    pub fn adjoint_mul(&self, b: &DenseMatrix) -> Self {
        assert_eq!(self.rows, b.rows, "adjoint_mul dimension mismatch");
        Self::from_fn(self.cols, b.cols, |i, j| dotc(self.col(i), b.col(j)))
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        for (k, &xk) in x.iter().enumerate() {
            axpy(xk, self.col(k), &mut y);
        }
        y
    }

    /// `self^H · x`.
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.cols).map(|j| dotc(self.col(j), x)).collect()
    }

    pub fn scale(&self, a: C64) -> Self {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * a).collect() }
    }

    pub fn add(&self, b: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (b.rows, b.cols));
        let data = self.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, b: &DenseMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (b.rows, b.cols));
        let data = self.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// `self + a·b` in place.
    pub fn add_scaled(&mut self, a: C64, b: &DenseMatrix) {
        assert_eq!((self.rows, self.cols), (b.rows, b.cols));
        axpy(a, &b.data, &mut self.data);
    }

    pub fn norm_fro(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest column 1-norm.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| self.col(j).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn column_norms(&self) -> Vec<f64> {
        (0..self.cols).map(|j| norm2(self.col(j))).collect()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// A standard complex normal draw: real and imaginary parts N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_normal_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// `x^H y`.
#[inline]
pub fn dotc(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    C64::new(re, im)
}

/// `y += a·x`.
#[inline]
pub fn axpy(a: C64, x: &[C64], y: &mut [C64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Overflow-safe Euclidean norm.
pub fn norm2(x: &[C64]) -> f64 {
    let mut scale = 0.0f64;
    let mut ssq = 1.0f64;
    for v in x {
        for t in [v.re.abs(), v.im.abs()] {
            if t > 0.0 {
                if scale < t {
                    ssq = 1.0 + ssq * (scale / t) * (scale / t);
                    scale = t;
                } else {
                    ssq += (t / scale) * (t / scale);
                }
            }
        }
    }
    scale * ssq.sqrt()
}

pub fn scale_in_place(x: &mut [C64], a: C64) {
    for v in x {
        *v *= a;
    }
}

pub fn sub_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity_and_adjoint() {
        let a = DenseMatrix::from_fn(3, 2, |i, j| C64::new(i as f64, j as f64 + 1.0));
        assert_eq!(DenseMatrix::identity(3).matmul(&a), a);
        let g = a.adjoint_mul(&a);
        assert_eq!(g, a.adjoint().matmul(&a));
        assert_eq!(g[(0, 1)], g[(1, 0)].conj());
    }

    #[test]
    fn two_cols_mut_ordering() {
        let mut a = DenseMatrix::from_fn(2, 3, |i, j| C64::new((10 * j + i) as f64, 0.0));
        let (p, q) = a.two_cols_mut(2, 0);
        assert_eq!(p[0].re, 20.0);
        assert_eq!(q[1].re, 1.0);
    }

    #[test]
    fn norm2_handles_extremes() {
        let x = [C64::new(1e200, 0.0), C64::new(0.0, 1e200)];
        assert!((norm2(&x) / (2f64.sqrt() * 1e200) - 1.0).abs() < 1e-15);
        assert_eq!(norm2(&[]), 0.0);
    }

    #[test]
    fn push_pop_block_diag() {
        let mut a = DenseMatrix::zeros(0, 0);
        a.push_col(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!((a.rows(), a.cols()), (2, 1));
        let b = a.block_diag(&DenseMatrix::identity(1));
        assert_eq!((b.rows(), b.cols()), (3, 2));
        assert_eq!(b[(2, 1)], C64::new(1.0, 0.0));
        assert_eq!(a.pop_col().unwrap().len(), 2);
        assert_eq!(a.cols(), 0);
    }
}
