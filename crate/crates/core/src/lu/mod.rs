//! Sparse LU with threshold partial pivoting (left-looking, Gilbert–Peierls).

mod ordering;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use ordering::ColumnOrdering;

use crate::dense::DenseMatrix;
use crate::sparse::SparseMatrix;
use crate::{Error, Result, C64};

/// Partial pivoting threshold: the diagonal is kept if it is within this
/// factor of the column maximum.
pub const PIVOT_THRESHOLD: f64 = 0.1;
/// Absolute pivot magnitude below which the matrix is numerically singular.
pub const SINGULAR_PIVOT: f64 = 1e-300;

#[derive(Clone, Debug, Default)]
struct Csc {
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    values: Vec<C64>,
}

/// `P_r A P_c = L U` with unit lower `L` (diagonal stored first in each
/// column) and upper `U` (diagonal stored last).
#[derive(Debug)]
pub struct LuFactor {
    n: usize,
    l: Csc,
    u: Csc,
    /// `pinv[original row] = pivot step`.
    pinv: Vec<usize>,
    /// `q[step] = original column`.
    q: Vec<usize>,
    solves: AtomicUsize,
}

/// Factorization statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FillStats {
    pub nnz_a: usize,
    pub nnz_l: usize,
    pub nnz_u: usize,
}

impl LuFactor {
    /// Factors `a` with a freshly computed minimum-degree ordering.
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let ord = ColumnOrdering::minimum_degree(a);
        Self::factor_with(a, &ord)
    }

    /// Factors `a` with a precomputed column ordering.
    pub fn factor_with(a: &SparseMatrix, ord: &ColumnOrdering) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch(format!("LU of a {}x{} matrix", n, a.cols())));
        }
        if ord.len() != n {
            return Err(Error::DimensionMismatch(format!("ordering of length {} for n = {n}", ord.len())));
        }
        for j in 0..n {
            if a.colptr()[j] == a.colptr()[j + 1] {
                return Err(Error::StructurallySingular { column: j });
            }
        }
        let q = ord.order.clone();
        const NONE: usize = usize::MAX;
        let mut pinv = vec![NONE; n];
        let guess = 4 * a.nnz() + n;
        let mut l = Csc { colptr: Vec::with_capacity(n + 1), rowidx: Vec::with_capacity(guess), values: Vec::with_capacity(guess) };
        let mut u = Csc { colptr: Vec::with_capacity(n + 1), rowidx: Vec::with_capacity(guess), values: Vec::with_capacity(guess) };
        let mut x = vec![C64::new(0.0, 0.0); n];
        let mut xi = vec![0usize; n];
        let mut mark = vec![NONE; n];
        let mut stack: Vec<(usize, usize)> = Vec::with_capacity(n);

        for k in 0..n {
            l.colptr.push(l.rowidx.len());
            u.colptr.push(u.rowidx.len());
            let col = q[k];

            // symbolic: reach of A(:, col) in the graph of L
            let mut top = n;
            for (i, _) in a.col_iter(col) {
                if mark[i] == k {
                    continue;
                }
                mark[i] = k;
                stack.push((i, 0));
                while let Some(&mut (j, ref mut pos)) = stack.last_mut() {
                    let jc = pinv[j];
                    let mut pushed = false;
                    if jc != NONE {
                        let (s, e) = (l.colptr[jc] + 1, col_end(&l, jc, k));
                        while s + *pos < e {
                            let r = l.rowidx[s + *pos];
                            *pos += 1;
                            if mark[r] != k {
                                mark[r] = k;
                                stack.push((r, 0));
                                pushed = true;
                                break;
                            }
                        }
                    }
                    if !pushed {
                        stack.pop();
                        top -= 1;
                        xi[top] = j;
                    }
                }
            }

            // numeric: sparse triangular solve x = L \ A(:, col)
            for (i, v) in a.col_iter(col) {
                x[i] = v;
            }
            for &j in &xi[top..n] {
                let jc = pinv[j];
                if jc == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == C64::new(0.0, 0.0) {
                    continue;
                }
                for p in l.colptr[jc] + 1..col_end(&l, jc, k) {
                    x[l.rowidx[p]] -= l.values[p] * xj;
                }
            }

            // pivot selection
            let mut ipiv = NONE;
            let mut best = -1.0f64;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    let t = x[i].norm();
                    if t > best {
                        best = t;
                        ipiv = i;
                    }
                } else {
                    u.rowidx.push(pinv[i]);
                    u.values.push(x[i]);
                }
            }
            if ipiv == NONE || best < SINGULAR_PIVOT {
                return Err(Error::NumericallySingular { pivot: k });
            }
            if pinv[col] == NONE && mark[col] == k && x[col].norm() >= PIVOT_THRESHOLD * best {
                ipiv = col;
            }
            let pivot = x[ipiv];
            u.rowidx.push(k);
            u.values.push(pivot);
            pinv[ipiv] = k;
            l.rowidx.push(ipiv);
            l.values.push(C64::new(1.0, 0.0));
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    l.rowidx.push(i);
                    l.values.push(x[i] / pivot);
                }
                x[i] = C64::new(0.0, 0.0);
            }
        }
        l.colptr.push(l.rowidx.len());
        u.colptr.push(u.rowidx.len());
        for r in l.rowidx.iter_mut() {
            *r = pinv[*r];
        }
        Ok(LuFactor { n, l, u, pinv, q, solves: AtomicUsize::new(0) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stats(&self, a: &SparseMatrix) -> FillStats {
        FillStats { nnz_a: a.nnz(), nnz_l: self.l.rowidx.len(), nnz_u: self.u.rowidx.len() }
    }

    /// Smallest pivot magnitude `min |u_kk|`.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n).map(|j| self.u.values[self.u.colptr[j + 1] - 1].norm()).fold(f64::INFINITY, f64::min)
    }

    /// Number of right-hand-side columns solved since factorization.
    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::Relaxed)
    }

    fn solve_uncounted(&self, b: &mut [C64], work: &mut [C64]) {
        let n = self.n;
        for i in 0..n {
            work[self.pinv[i]] = b[i];
        }
        for j in 0..n {
            let xj = work[j];
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for p in self.l.colptr[j] + 1..self.l.colptr[j + 1] {
                work[self.l.rowidx[p]] -= self.l.values[p] * xj;
            }
        }
        for j in (0..n).rev() {
            let (s, e) = (self.u.colptr[j], self.u.colptr[j + 1]);
            work[j] /= self.u.values[e - 1];
            let xj = work[j];
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for p in s..e - 1 {
                work[self.u.rowidx[p]] -= self.u.values[p] * xj;
            }
        }
        for k in 0..n {
            b[self.q[k]] = work[k];
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let mut work = vec![C64::new(0.0, 0.0); self.n];
        self.solve_uncounted(b, &mut work);
        self.solves.fetch_add(1, Ordering::Relaxed);
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves every column of `b`.
    pub fn solve_block(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.rows(), self.n, "rhs row mismatch");
        let mut x = b.clone();
        let mut work = vec![C64::new(0.0, 0.0); self.n];
        for j in 0..x.cols() {
            self.solve_uncounted(x.col_mut(j), &mut work);
        }
        self.solves.fetch_add(b.cols(), Ordering::Relaxed);
        x
    }
}

/// End of column `jc` of `L`; column `k` is still being built.
#[inline]
fn col_end(l: &Csc, jc: usize, k: usize) -> usize {
    if jc + 1 <= k {
        l.colptr[jc + 1]
    } else {
        l.rowidx.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn identity_has_no_fill() {
        let a = SparseMatrix::identity(5);
        let f = LuFactor::factor(&a).unwrap();
        assert_eq!(f.stats(&a), FillStats { nnz_a: 5, nnz_l: 5, nnz_u: 5 });
        assert_eq!(f.solve(&[c(1.0), c(2.0), c(3.0), c(4.0), c(5.0)])[3], c(4.0));
    }

    #[test]
    fn scaled_identity_and_zero_rhs() {
        let a = SparseMatrix::identity(3).scale(c(2.0));
        let f = LuFactor::factor(&a).unwrap();
        assert_eq!(f.solve(&[c(1.0); 3]), vec![c(0.5); 3]);
        assert_eq!(f.solve(&[c(0.0); 3]), vec![c(0.0); 3]);
        assert_eq!(f.solve_count(), 2);
    }

    #[test]
    fn zero_row_is_numerically_singular() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, c(1.0)), (0, 1, c(1.0)), (2, 2, c(1.0)), (0, 2, c(2.0))]).unwrap();
        assert!(matches!(LuFactor::factor(&a), Err(Error::NumericallySingular { .. })));
    }

    #[test]
    fn empty_column_is_structurally_singular() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, c(1.0)), (1, 0, c(1.0))]).unwrap();
        assert_eq!(LuFactor::factor(&a).unwrap_err(), Error::StructurallySingular { column: 1 });
    }

    #[test]
    fn needs_row_pivoting() {
        // zero diagonal forces an off-diagonal pivot
        let a = SparseMatrix::from_triplets(2, 2, &[(1, 0, c(1.0)), (0, 1, c(1.0))]).unwrap();
        let f = LuFactor::factor(&a).unwrap();
        assert_eq!(f.solve(&[c(3.0), c(7.0)]), vec![c(7.0), c(3.0)]);
    }
}
