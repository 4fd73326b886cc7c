//! Compressed sparse column storage, pencils and Matrix Market I/O.

mod mmio;
mod perm;

pub use mmio::{parse_matrix_market, read_matrix_market, write_dense_array, write_matrix_market};
pub use perm::Permutation;

use crate::dense::DenseMatrix;
use crate::{Error, Result, C64};

/// Complex CSC matrix. Row indices are strictly increasing within each column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, colptr: vec![0; cols + 1], rowidx: vec![], values: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            colptr: (0..=n).collect(),
            rowidx: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::identity(d.len());
        m.values.copy_from_slice(d);
        m
    }

    /// Assembles from coordinate triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
        }
        let mut t: Vec<(usize, usize, C64)> = triplets.to_vec();
        t.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        let mut colptr = vec![0usize; cols + 1];
        let mut rowidx = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            rowidx.push(i);
            values.push(v);
            colptr[j + 1] += 1;
        }
        for j in 0..cols {
            colptr[j + 1] += colptr[j];
        }
        Ok(SparseMatrix { rows, cols, colptr, rowidx, values })
    }

    /// Raw CSC parts; validated.
    pub fn from_csc(
        rows: usize,
        cols: usize,
        colptr: Vec<usize>,
        rowidx: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::DimensionMismatch(m.to_string()));
        if colptr.len() != cols + 1 || colptr[0] != 0 || *colptr.last().unwrap() != rowidx.len() {
            return bad("inconsistent column pointers");
        }
        if rowidx.len() != values.len() {
            return bad("row index and value lengths differ");
        }
        for j in 0..cols {
            if colptr[j] > colptr[j + 1] {
                return bad("column pointers decrease");
            }
            let r = &rowidx[colptr[j]..colptr[j + 1]];
            if r.windows(2).any(|w| w[0] >= w[1]) || r.iter().any(|&i| i >= rows) {
                return bad("row indices not strictly increasing or out of range");
            }
        }
        Ok(SparseMatrix { rows, cols, colptr, rowidx, values })
    }

    /// Keeps the nonzero entries of a dense matrix.
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut colptr = vec![0];
        let mut rowidx = vec![];
        let mut values = vec![];
        for j in 0..a.cols() {
            for (i, &v) in a.col(j).iter().enumerate() {
                if v != C64::new(0.0, 0.0) {
                    rowidx.push(i);
                    values.push(v);
                }
            }
            colptr.push(rowidx.len());
        }
        SparseMatrix { rows: a.rows(), cols: a.cols(), colptr, rowidx, values }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for (i, v) in self.col_iter(j) {
                d[(i, j)] = v;
            }
        }
        d
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowidx(&self) -> &[usize] {
        &self.rowidx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// `(row, value)` pairs of column `j`.
    pub fn col_iter(&self, j: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.colptr[j]..self.colptr[j + 1];
        self.rowidx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let r = &self.rowidx[self.colptr[j]..self.colptr[j + 1]];
        match r.binary_search(&i) {
            Ok(k) => self.values[self.colptr[j] + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// True when every stored value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.cols).all(|j| {
                self.col_iter(j).all(|(i, v)| {
                    if i == j {
                        v == C64::new(1.0, 0.0)
                    } else {
                        v == C64::new(0.0, 0.0)
                    }
                }) && self.get(j, j) == C64::new(1.0, 0.0)
            })
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.spmv_add(C64::new(1.0, 0.0), x, &mut y);
        y
    }

    /// `y += alpha · A x`.
    pub fn spmv_add(&self, alpha: C64, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols, "spmv input length mismatch");
        assert_eq!(y.len(), self.rows, "spmv output length mismatch");
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            let s = alpha * xj;
            for k in self.colptr[j]..self.colptr[j + 1] {
                y[self.rowidx[k]] += self.values[k] * s;
            }
        }
    }

    /// `A X` for a dense block.
    pub fn mul_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(x.rows(), self.cols, "mul_dense dimension mismatch");
        let mut y = DenseMatrix::zeros(self.rows, x.cols());
        for j in 0..x.cols() {
            self.spmv_add(C64::new(1.0, 0.0), x.col(j), y.col_mut(j));
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut count = vec![0usize; self.rows + 1];
        for &i in &self.rowidx {
            count[i + 1] += 1;
        }
        for i in 0..self.rows {
            count[i + 1] += count[i];
        }
        let colptr = count.clone();
        let mut next = count;
        let mut rowidx = vec![0; self.nnz()];
        let mut values = vec![C64::new(0.0, 0.0); self.nnz()];
        for j in 0..self.cols {
            for (i, v) in self.col_iter(j) {
                let k = next[i];
                next[i] += 1;
                rowidx[k] = j;
                values[k] = v;
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, colptr, rowidx, values }
    }

    /// `alpha·A + beta·B` on the union pattern.
    pub fn lincomb(alpha: C64, a: &SparseMatrix, beta: C64, b: &SparseMatrix) -> Self {
        assert_eq!((a.rows, a.cols), (b.rows, b.cols), "lincomb shape mismatch");
        let mut colptr = Vec::with_capacity(a.cols + 1);
        colptr.push(0);
        let mut rowidx = Vec::with_capacity(a.nnz() + b.nnz());
        let mut values = Vec::with_capacity(a.nnz() + b.nnz());
        for j in 0..a.cols {
            let (mut p, pe) = (a.colptr[j], a.colptr[j + 1]);
            let (mut q, qe) = (b.colptr[j], b.colptr[j + 1]);
            while p < pe || q < qe {
                let ia = if p < pe { a.rowidx[p] } else { usize::MAX };
                let ib = if q < qe { b.rowidx[q] } else { usize::MAX };
                if ia < ib {
                    rowidx.push(ia);
                    values.push(alpha * a.values[p]);
                    p += 1;
                } else if ib < ia {
                    rowidx.push(ib);
                    values.push(beta * b.values[q]);
                    q += 1;
                } else {
                    rowidx.push(ia);
                    values.push(alpha * a.values[p] + beta * b.values[q]);
                    p += 1;
                    q += 1;
                }
            }
            colptr.push(rowidx.len());
        }
        SparseMatrix { rows: a.rows, cols: a.cols, colptr, rowidx, values }
    }

    /// `A - zeta·M`.
    pub fn shifted(a: &SparseMatrix, zeta: C64, m: &SparseMatrix) -> Self {
        Self::lincomb(C64::new(1.0, 0.0), a, -zeta, m)
    }

    /// The entry at `(i, j)` moves to `(p(i), p(j))`.
    pub fn permute_symmetric(&self, p: &Permutation) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("symmetric permutation of a non-square matrix".into()));
        }
        if p.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for dimension {}",
                p.len(),
                self.rows
            )));
        }
        let n = self.rows;
        let mut colptr = vec![0usize; n + 1];
        for new in 0..n {
            let old = p.apply_inverse(new);
            colptr[new + 1] = colptr[new] + (self.colptr[old + 1] - self.colptr[old]);
        }
        let mut rowidx = vec![0usize; self.nnz()];
        let mut values = vec![C64::new(0.0, 0.0); self.nnz()];
        let mut buf: Vec<(usize, C64)> = Vec::new();
        for new in 0..n {
            let old = p.apply_inverse(new);
            buf.clear();
            buf.extend(self.col_iter(old).map(|(i, v)| (p.apply(i), v)));
            buf.sort_by_key(|e| e.0);
            for (k, &(i, v)) in buf.iter().enumerate() {
                rowidx[colptr[new] + k] = i;
                values[colptr[new] + k] = v;
            }
        }
        Ok(SparseMatrix { rows: n, cols: n, colptr, rowidx, values })
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut colptr = Vec::with_capacity(c1 - c0 + 1);
        colptr.push(0);
        let mut rowidx = vec![];
        let mut values = vec![];
        for j in c0..c1 {
            for (i, v) in self.col_iter(j) {
                if i >= r0 && i < r1 {
                    rowidx.push(i - r0);
                    values.push(v);
                }
            }
            colptr.push(rowidx.len());
        }
        SparseMatrix { rows: r1 - r0, cols: c1 - c0, colptr, rowidx, values }
    }

    /// Places blocks `[[tl, tr], [bl, br]]` into one matrix.
    pub fn assemble_2x2(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        let (d, s) = (tl.rows, bl.rows);
        if tl.cols != bl.cols || tr.cols != br.cols || tl.rows != tr.rows || bl.rows != br.rows {
            return Err(Error::DimensionMismatch("inconsistent 2x2 block shapes".into()));
        }
        let (cl, cr) = (tl.cols, tr.cols);
        let mut colptr = vec![0usize];
        let mut rowidx = vec![];
        let mut values = vec![];
        for j in 0..cl + cr {
            let (top, bot, jj) = if j < cl { (tl, bl, j) } else { (tr, br, j - cl) };
            for (i, v) in top.col_iter(jj) {
                rowidx.push(i);
                values.push(v);
            }
            for (i, v) in bot.col_iter(jj) {
                rowidx.push(i + d);
                values.push(v);
            }
            colptr.push(rowidx.len());
        }
        Ok(SparseMatrix { rows: d + s, cols: cl + cr, colptr, rowidx, values })
    }

    pub fn scale(&self, a: C64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= a);
        m
    }

    /// Frobenius norm of the stored values.
    pub fn norm_fro(&self) -> f64 {
        crate::dense::norm2(&self.values)
    }

    /// Largest column 1-norm.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| self.col_iter(j).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// A regular pencil `(A, M)` of dimension `n` (regularity is assumed).
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePencil {
    pub a: SparseMatrix,
    pub m: SparseMatrix,
    pub n: usize,
}

impl SparsePencil {
    pub fn new(a: SparseMatrix, m: SparseMatrix) -> Result<Self> {
        if a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "pencil blocks {}x{} and {}x{} must be square of equal size",
                a.rows(),
                a.cols(),
                m.rows(),
                m.cols()
            )));
        }
        let n = a.rows();
        Ok(SparsePencil { a, m, n })
    }

    /// Standard problem: `M = I`.
    pub fn standard(a: SparseMatrix) -> Result<Self> {
        let m = SparseMatrix::identity(a.rows());
        Self::new(a, m)
    }

    pub fn permute_symmetric(&self, p: &Permutation) -> Result<Self> {
        Self::new(self.a.permute_symmetric(p)?, self.m.permute_symmetric(p)?)
    }

    /// `A - zeta M`.
    pub fn shifted(&self, zeta: C64) -> SparseMatrix {
        SparseMatrix::shifted(&self.a, zeta, &self.m)
    }
}

/// The 2×2 block split of a reordered pencil at interior count `d`:
/// `A = [[B, F], [E, C]]`, `M = [[M_B, M_F], [M_E, M_C]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilBlocks {
    pub b: SparseMatrix,
    pub f: SparseMatrix,
    pub e: SparseMatrix,
    pub c: SparseMatrix,
    pub mb: SparseMatrix,
    pub mf: SparseMatrix,
    pub me: SparseMatrix,
    pub mc: SparseMatrix,
}

/// Splits a (reordered) pencil into its eight blocks; `0 <= d <= n`.
pub fn extract_blocks(pencil: &SparsePencil, d: usize) -> Result<PencilBlocks> {
    let n = pencil.n;
    if d > n {
        return Err(Error::DimensionMismatch(format!("interior count {d} exceeds dimension {n}")));
    }
    let split = |x: &SparseMatrix| (x.block(0, d, 0, d), x.block(0, d, d, n), x.block(d, n, 0, d), x.block(d, n, d, n));
    let (b, f, e, c) = split(&pencil.a);
    let (mb, mf, me, mc) = split(&pencil.m);
    Ok(PencilBlocks { b, f, e, c, mb, mf, me, mc })
}

impl PencilBlocks {
    pub fn d(&self) -> usize {
        self.b.rows()
    }

    pub fn s(&self) -> usize {
        self.c.rows()
    }

    /// Inverse of [`extract_blocks`].
    pub fn reassemble(&self) -> Result<SparsePencil> {
        SparsePencil::new(
            SparseMatrix::assemble_2x2(&self.b, &self.f, &self.e, &self.c)?,
            SparseMatrix::assemble_2x2(&self.mb, &self.mf, &self.me, &self.mc)?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, c(1.0)), (1, 0, c(2.0)), (0, 0, c(3.0))]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), c(4.0));
        assert_eq!(a.get(1, 1), c(0.0));
    }

    #[test]
    fn swap_permutation_on_diag() {
        let a = SparseMatrix::from_diag(&[c(1.0), c(2.0)]);
        let p = Permutation::from_forward(vec![1, 0]).unwrap();
        assert_eq!(a.permute_symmetric(&p).unwrap(), SparseMatrix::from_diag(&[c(2.0), c(1.0)]));
    }

    #[test]
    fn transpose_and_lincomb() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 2, c(5.0)), (1, 0, c(1.0))]).unwrap();
        let t = a.transpose();
        assert_eq!(t.get(2, 0), c(5.0));
        assert_eq!(t.transpose(), a);
        let z = SparseMatrix::lincomb(c(1.0), &a, c(-1.0), &a);
        assert!(z.is_zero());
    }

    #[test]
    fn identity_detection() {
        assert!(SparseMatrix::identity(4).is_identity());
        assert!(!SparseMatrix::from_diag(&[c(1.0), c(2.0)]).is_identity());
        assert!(!SparseMatrix::zeros(2, 2).is_identity());
    }

    #[test]
    fn boundary_split() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, c(1.0)), (2, 2, c(3.0)), (0, 2, c(7.0))]).unwrap();
        let p = SparsePencil::standard(a).unwrap();
        let b = extract_blocks(&p, 2).unwrap();
        assert_eq!((b.c.rows(), b.c.cols()), (1, 1));
        assert_eq!(b.f.get(0, 0), c(7.0));
        assert_eq!(b.reassemble().unwrap(), p);
    }
}
