use super::matrix::{dotc, norm2, DenseMatrix};
use crate::{Error, Result, C64};

/// Relative drop tolerance for numerical rank in [`orthonormalize`].
pub const RANK_TOL: f64 = 1e-14;

/// Householder reflector `I - tau v v^H` with `v[0] = 1`, mapping `x` to
/// `beta e_1`. Returns `(v, tau, beta)`.
fn householder(x: &[C64]) -> (Vec<C64>, C64, C64) {
    let alpha = x[0];
    let xnorm = norm2(x);
    let zero = C64::new(0.0, 0.0);
    let tail = norm2(&x[1..]);
    let mut v = x.to_vec();
    if tail == 0.0 && alpha.im == 0.0 {
        v.iter_mut().for_each(|e| *e = zero);
        v[0] = C64::new(1.0, 0.0);
        return (v, zero, alpha);
    }
    let phase = if alpha.norm() == 0.0 { C64::new(1.0, 0.0) } else { alpha / alpha.norm() };
    let beta = -phase * xnorm;
    let v0 = alpha - beta;
    for e in v.iter_mut().skip(1) {
        *e /= v0;
    }
    v[0] = C64::new(1.0, 0.0);
    let tau = (beta - alpha) / beta;
    (v, tau, beta)
}

/// Applies `(I - tau v v^H)` from the left to columns `c0..` of `a`,
/// restricted to rows `r0..r0+v.len()`.
fn apply_left(a: &mut DenseMatrix, v: &[C64], tau: C64, r0: usize, c0: usize) {
    if tau == C64::new(0.0, 0.0) {
        return;
    }
    for j in c0..a.cols() {
        let col = &mut a.col_mut(j)[r0..r0 + v.len()];
        let w = dotc(v, col) * tau;
        for (c, vi) in col.iter_mut().zip(v) {
            *c -= w * vi;
        }
    }
}

/// Householder QR, possibly with column pivoting.
struct Householder {
    factors: DenseMatrix,
    taus: Vec<C64>,
    perm: Vec<usize>,
}

fn householder_qr(x: &DenseMatrix, pivot: bool) -> Householder {
    let (m, n) = (x.rows(), x.cols());
    let mut a = x.clone();
    let k = m.min(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = a.column_norms();
    let mut orig = norms.clone();
    let mut taus = Vec::with_capacity(k);
    for j in 0..k {
        if pivot {
            let (piv, _) = norms[j..]
                .iter()
                .enumerate()
                .fold((0, -1.0), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
            let piv = piv + j;
            if piv != j {
                let (cj, cp) = a.two_cols_mut(j, piv);
                cj.swap_with_slice(cp);
                perm.swap(j, piv);
                norms.swap(j, piv);
                orig.swap(j, piv);
            }
        }
        let (v, tau, beta) = householder(&a.col(j)[j..]);
        apply_left(&mut a, &v, tau, j, j + 1);
        let col = a.col_mut(j);
        col[j] = beta;
        col[j + 1..].copy_from_slice(&v[1..]);
        taus.push(tau);
        if pivot {
            // downdate partial column norms, recomputing when cancellation bites
            for l in j + 1..n {
                if norms[l] == 0.0 {
                    continue;
                }
                let t = a[(j, l)].norm() / norms[l];
                let t = (1.0 - t * t).max(0.0);
                let ratio = norms[l] / orig[l];
                if t * ratio * ratio <= 1e-10 {
                    norms[l] = norm2(&a.col(l)[j + 1..]);
                    orig[l] = norms[l];
                } else {
                    norms[l] *= t.sqrt();
                }
            }
        }
    }
    Householder { factors: a, taus, perm }
}

impl Householder {
    /// First `r` columns of Q.
    fn thin_q(&self, r: usize) -> DenseMatrix {
        let m = self.factors.rows();
        let mut q = DenseMatrix::zeros(m, r);
        for i in 0..r {
            q[(i, i)] = C64::new(1.0, 0.0);
        }
        for j in (0..self.taus.len().min(r)).rev() {
            let mut v = self.factors.col(j)[j..].to_vec();
            v[0] = C64::new(1.0, 0.0);
            apply_left(&mut q, &v, self.taus[j], j, j);
        }
        q
    }

    fn r_factor(&self, r: usize) -> DenseMatrix {
        let n = self.factors.cols();
        DenseMatrix::from_fn(r, n, |i, j| if i <= j { self.factors[(i, j)] } else { C64::new(0.0, 0.0) })
    }
}

/// Orthonormal basis of `range(X)` from Householder QR with column pivoting.
/// The column count equals the numerical rank: diagonal entries of `R` below
/// `1e-14·|R_00|` are dropped.
pub fn orthonormalize(x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.cols() == 0 || x.rows() == 0 {
        return Err(Error::AllZeroInput);
    }
    if x.column_norms().iter().all(|&c| c < 1e-300) {
        return Err(Error::AllZeroInput);
    }
    let h = householder_qr(x, true);
    let k = x.rows().min(x.cols());
    let r00 = h.factors[(0, 0)].norm();
    let rank = (0..k).take_while(|&i| h.factors[(i, i)].norm() > RANK_TOL * r00).count();
    Ok(h.thin_q(rank))
}

/// Like [`orthonormalize`] but an all-zero or empty input yields an empty basis.
pub fn orthonormalize_or_empty(x: &DenseMatrix) -> DenseMatrix {
    match orthonormalize(x) {
        Ok(q) => q,
        Err(_) => DenseMatrix::zeros(x.rows(), 0),
    }
}

/// Unpivoted thin QR: `X = Q R` with `Q` of size `m × min(m,n)`.
pub fn qr(x: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let k = x.rows().min(x.cols());
    let h = householder_qr(x, false);
    (h.thin_q(k), h.r_factor(k))
}

/// Pivoted thin QR: `X[:, perm] = Q R`.
pub fn qr_pivoted(x: &DenseMatrix) -> (DenseMatrix, DenseMatrix, Vec<usize>) {
    let k = x.rows().min(x.cols());
    let h = householder_qr(x, true);
    (h.thin_q(k), h.r_factor(k), h.perm.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn orth_err(q: &DenseMatrix) -> f64 {
        q.adjoint_mul(q).sub(&DenseMatrix::identity(q.cols())).norm_fro()
    }

    #[test]
    fn identity_input() {
        let q = orthonormalize(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(q.cols(), 3);
        for i in 0..3 {
            assert!((q[(i, i)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rank_one_duplicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = DenseMatrix::random_normal(6, 1, &mut rng);
        let v = v.scale(C64::new(1.0 / v.norm_fro(), 0.0));
        let x = v.hcat(&v.scale(C64::new(2.0, 0.0)));
        let q = orthonormalize(&x).unwrap();
        assert_eq!(q.cols(), 1);
        let p = q.matmul(&q.adjoint_mul(&v));
        assert!(p.sub(&v).norm_fro() <= 1e-12);
    }

    #[test]
    fn zero_input_errors() {
        assert_eq!(orthonormalize(&DenseMatrix::zeros(4, 2)), Err(Error::AllZeroInput));
    }

    #[test]
    fn unpivoted_qr_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = DenseMatrix::random_normal(9, 4, &mut rng);
        let (q, r) = qr(&x);
        assert!(orth_err(&q) < 1e-13);
        assert!(q.matmul(&r).sub(&x).norm_fro() < 1e-13 * x.norm_fro());
        for j in 0..4 {
            for i in j + 1..4 {
                assert_eq!(r[(i, j)], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn wide_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = DenseMatrix::random_normal(3, 7, &mut rng);
        let q = orthonormalize(&x).unwrap();
        assert_eq!(q.cols(), 3);
        assert!(orth_err(&q) < 1e-13);
    }
}
