use super::matrix::{dotc, norm2, DenseMatrix};
use crate::{Error, Result, C64, MACHINE_EPSILON};

/// Complex Schur form `A = U T U^H`.
#[derive(Clone, Debug)]
pub struct SchurResult {
    /// Diagonal of `T`, in Schur order.
    pub eigenvalues: Vec<C64>,
    pub unitary_factor: DenseMatrix,
    pub triangular_factor: DenseMatrix,
}

/// Plane rotation `[[c, s], [-conj(s), c]]` taking `(a, b)` to `(r, 0)`.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn new(a: C64, b: C64) -> Self {
        let an = a.norm();
        let bn = b.norm();
        if bn == 0.0 {
            return Givens { c: 1.0, s: C64::new(0.0, 0.0) };
        }
        if an == 0.0 {
            return Givens { c: 0.0, s: b.conj() / bn };
        }
        let nrm = an.hypot(bn);
        Givens { c: an / nrm, s: (a / an) * b.conj() / nrm }
    }

    /// Rows `i`, `j` of `m`, columns `c0..c1`.
    fn apply_left(&self, m: &mut DenseMatrix, i: usize, j: usize, c0: usize, c1: usize) {
        for k in c0..c1 {
            let x = m[(i, k)];
            let y = m[(j, k)];
            m[(i, k)] = x * self.c + self.s * y;
            m[(j, k)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `i`, `j` of `m` multiplied by `G^H` from the right, rows `r0..r1`.
    fn apply_right(&self, m: &mut DenseMatrix, i: usize, j: usize, r0: usize, r1: usize) {
        let (ci, cj) = m.two_cols_mut(i, j);
        for k in r0..r1 {
            let x = ci[k];
            let y = cj[k];
            ci[k] = x * self.c + y * self.s.conj();
            cj[k] = -x * self.s + y * self.c;
        }
    }
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q^H`.
fn hessenberg(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = norm2(&x);
        if xn == 0.0 {
            continue;
        }
        let alpha = x[0];
        let phase = if alpha.norm() == 0.0 { C64::new(1.0, 0.0) } else { alpha / alpha.norm() };
        let mut v = x;
        v[0] += phase * xn;
        let vn2 = dotc(&v, &v).re;
        if vn2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vn2;
        // H <- P H P with P = I - tau v v^H acting on rows/cols k+1..n
        for j in 0..n {
            let col = &mut h.col_mut(j)[k + 1..];
            let w = dotc(&v, col) * tau;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= w * vi;
            }
        }
        for target in [&mut h, &mut q] {
            for i in 0..n {
                let mut w = C64::new(0.0, 0.0);
                for (l, vl) in v.iter().enumerate() {
                    w += target[(i, k + 1 + l)] * vl;
                }
                w *= tau;
                for (l, vl) in v.iter().enumerate() {
                    target[(i, k + 1 + l)] -= w * vl.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Eigenvalue of the 2×2 matrix `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr2 = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let sq = disc.sqrt();
    let l1 = tr2 + sq;
    let l2 = tr2 - sq;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition by Hessenberg reduction and single-shift
/// implicit QR with Wilkinson shifts.
pub fn complex_eig(a: &DenseMatrix) -> Result<SchurResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "complex_eig needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SchurResult {
            eigenvalues: vec![],
            unitary_factor: DenseMatrix::zeros(0, 0),
            triangular_factor: DenseMatrix::zeros(0, 0),
        });
    }
    let (mut h, mut z) = hessenberg(a);
    let anorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let cap = 30 * n.max(1);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // locate the active window [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { anorm } else { s };
            if h[(lo, lo - 1)].norm() <= MACHINE_EPSILON * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::ConvergenceFailure("complex Schur QR iteration"));
        }
        let mu = if since_deflation % 10 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        // implicit single-shift bulge chase on [lo, hi]
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let g = Givens::new(x, y);
            let c0 = if k > lo { k - 1 } else { lo };
            g.apply_left(&mut h, k, k + 1, c0, n);
            let r1 = (k + 3).min(hi + 1);
            g.apply_right(&mut h, k, k + 1, 0, r1);
            g.apply_right(&mut z, k, k + 1, 0, n);
            if k > lo {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(SchurResult { eigenvalues: h.diag(), unitary_factor: z, triangular_factor: h })
}

impl SchurResult {
    /// Unit-norm right eigenvectors of the original matrix, column `k`
    /// belonging to `eigenvalues[k]`, by back-substitution on `T`.
    pub fn eigenvectors(&self) -> DenseMatrix {
        let t = &self.triangular_factor;
        let n = t.rows();
        let small = (MACHINE_EPSILON * t.norm_fro()).max(f64::MIN_POSITIVE);
        let mut y = DenseMatrix::zeros(n, n);
        for k in 0..n {
            let lam = t[(k, k)];
            let col = y.col_mut(k);
            col[k] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut s = t[(i, k)];
                for j in i + 1..k {
                    s += t[(i, j)] * col[j];
                }
                let mut d = t[(i, i)] - lam;
                if d.norm() < small {
                    d = C64::new(small, 0.0);
                }
                col[i] = -s / d;
                // rescale to keep the growth in check
                let m = col[i].norm();
                if m > 1e100 {
                    for v in col[..=k].iter_mut() {
                        *v /= m;
                    }
                }
            }
        }
        let mut x = self.unitary_factor.matmul(&y);
        for k in 0..n {
            let c = x.col_mut(k);
            let nc = norm2(c);
            if nc > 0.0 {
                for v in c.iter_mut() {
                    *v /= nc;
                }
            }
        }
        x
    }
}

/// Eigenvalues only.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<C64>> {
    Ok(complex_eig(a)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_schur(a: &DenseMatrix, r: &SchurResult) {
        let u = &r.unitary_factor;
        let t = &r.triangular_factor;
        assert!(u.adjoint_mul(u).sub(&DenseMatrix::identity(a.rows())).norm_fro() < 1e-12);
        let rec = u.matmul(t).matmul(&u.adjoint());
        assert!(rec.sub(a).norm_fro() < 1e-12 * a.norm_fro().max(1.0));
    }

    #[test]
    fn small_known_spectra() {
        let a = DenseMatrix::from_diag(&[C64::new(1.0, 2.0), C64::new(-3.0, 0.0)]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((ev[0] - C64::new(-3.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(1.0, 2.0)).norm() < 1e-14);

        let rot = DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(1.0, 0.0),
            (1, 0) => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        let r = complex_eig(&rot).unwrap();
        let mut ev = r.eigenvalues.clone();
        ev.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
        check_schur(&rot, &r);
    }

    #[test]
    fn random_schur_and_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [1, 2, 5, 17, 40] {
            let a = DenseMatrix::random_normal(n, n, &mut rng);
            let r = complex_eig(&a).unwrap();
            check_schur(&a, &r);
            let x = r.eigenvectors();
            for k in 0..n {
                let ax = a.matvec(x.col(k));
                let res: f64 = norm2(&ax.iter().zip(x.col(k)).map(|(p, q)| p - r.eigenvalues[k] * q).collect::<Vec<_>>());
                assert!(res <= 1e-10 * a.norm_fro(), "n={n} k={k} res={res}");
            }
        }
    }

    #[test]
    fn upper_triangular_and_zero() {
        let t = DenseMatrix::from_fn(4, 4, |i, j| if i <= j { C64::new((i + j) as f64 + 1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let ev = eigenvalues(&t).unwrap();
        for (k, v) in ev.iter().enumerate() {
            assert!((v - C64::new(2.0 * k as f64 + 1.0, 0.0)).norm() < 1e-14);
        }
        let z = complex_eig(&DenseMatrix::zeros(3, 3)).unwrap();
        assert!(z.eigenvalues.iter().all(|v| v.norm() == 0.0));
    }
}
