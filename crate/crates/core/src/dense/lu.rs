use super::matrix::DenseMatrix;
use crate::{Error, Result, C64};

/// Relative pivot threshold below which a dense matrix is declared singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// Dense LU with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: DenseMatrix,
    piv: Vec<usize>,
}

impl DenseLu {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of a {}x{} matrix", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let amax = a.max_abs();
        let tol = PIVOT_TOL * amax;
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let col = &lu.col(k)[k..];
            let (p, pv) = col
                .iter()
                .enumerate()
                .fold((0, -1.0), |(bi, bv), (i, v)| if v.norm() > bv { (i, v.norm()) } else { (bi, bv) });
            let p = p + k;
            if pv <= tol || pv == 0.0 {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                piv.swap(k, p);
                for j in 0..n {
                    let c = lu.col_mut(j);
                    c.swap(k, p);
                }
            }
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] *= inv;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in k + 1..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * ukj;
                }
            }
        }
        Ok(DenseLu { lu, piv })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b` in place.
    pub fn solve_vec(&self, b: &mut [C64]) {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let pb: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&pb);
        for j in 0..n {
            let bj = b[j];
            if bj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.lu.col(j);
            for i in j + 1..n {
                b[i] -= col[i] * bj;
            }
        }
        for j in (0..n).rev() {
            let col = self.lu.col(j);
            b[j] /= col[j];
            let bj = b[j];
            if bj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..j {
                b[i] -= col[i] * bj;
            }
        }
    }

    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut x = b.clone();
        for j in 0..x.cols() {
            self.solve_vec(x.col_mut(j));
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve(&DenseMatrix::identity(self.dim()))
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn dense_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!("{} rows in A, {} in B", a.rows(), b.rows())));
    }
    Ok(DenseLu::factor(a)?.solve(b))
}
