use super::matrix::{dotc, norm2, DenseMatrix};
use crate::{Error, Result, C64, MACHINE_EPSILON};

#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Nonincreasing, `min(rows, cols)` entries.
    pub singular_values: Vec<f64>,
    pub left_vectors: Option<DenseMatrix>,
    pub right_vectors: Option<DenseMatrix>,
}

/// One pass of one-sided Jacobi rotations over all column pairs of `w`,
/// applying the same rotations to `v` when given. Returns the number of
/// rotations performed.
fn jacobi_sweep(w: &mut DenseMatrix, mut v: Option<&mut DenseMatrix>, tol: f64) -> usize {
    let n = w.cols();
    let mut norms: Vec<f64> = (0..n).map(|j| dotc(w.col(j), w.col(j)).re).collect();
    let mut rotations = 0;
    for p in 0..n {
        for q in p + 1..n {
            let (alpha, beta) = (norms[p], norms[q]);
            if alpha == 0.0 || beta == 0.0 {
                continue;
            }
            let gamma = dotc(w.col(p), w.col(q));
            let g = gamma.norm();
            if g <= tol * (alpha * beta).sqrt() {
                continue;
            }
            rotations += 1;
            let zeta = (beta - alpha) / (2.0 * g);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            let ph = (gamma / g).conj();
            rotate(w, p, q, c, s, ph);
            if let Some(v) = v.as_deref_mut() {
                rotate(v, p, q, c, s, ph);
            }
            // closed-form updates, recomputed where cancellation bites
            let (np, nq) = (alpha - t * g, beta + t * g);
            norms[p] = if np < 0.25 * alpha { dotc(w.col(p), w.col(p)).re } else { np };
            norms[q] = if nq < 0.25 * beta { dotc(w.col(q), w.col(q)).re } else { nq };
        }
    }
    rotations
}

#[inline]
fn rotate(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, ph: C64) {
    let (cp, cq) = m.two_cols_mut(p, q);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = ph * *y;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// Drives one-sided Jacobi on `w` until its columns are mutually orthogonal
/// to working precision. On return the singular values of the input are
/// the column norms of `w`, and `v` (if given) has accumulated the right
/// rotations. Warm starts (nearly orthogonal columns) need few sweeps.
pub fn jacobi_orthogonalize(
    w: &mut DenseMatrix,
    mut v: Option<&mut DenseMatrix>,
    max_sweeps: usize,
) -> Result<()> {
    let tol = (w.rows().max(1) as f64).sqrt() * MACHINE_EPSILON;
    for _ in 0..max_sweeps {
        if jacobi_sweep(w, v.as_deref_mut(), tol) == 0 {
            return Ok(());
        }
    }
    Err(Error::ConvergenceFailure("one-sided Jacobi SVD"))
}

/// Singular value decomposition by one-sided Jacobi.
pub fn svd(x: &DenseMatrix, want_vectors: bool) -> Result<SvdResult> {
    if x.rows() < x.cols() {
        let r = svd(&x.adjoint(), want_vectors)?;
        return Ok(SvdResult {
            singular_values: r.singular_values,
            left_vectors: r.right_vectors,
            right_vectors: r.left_vectors,
        });
    }
    let (m, n) = (x.rows(), x.cols());
    if !want_vectors && n > 8 {
        // rows of a pivoted triangular factor are nearly orthogonal, so
        // Jacobi on R^H needs far fewer sweeps
        let (_, r, _) = super::qr::qr_pivoted(x);
        let mut w = r.adjoint();
        jacobi_orthogonalize(&mut w, None, 100 * n)?;
        let mut singular_values = w.column_norms();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        return Ok(SvdResult { singular_values, left_vectors: None, right_vectors: None });
    }
    let mut w = x.clone();
    let mut v = want_vectors.then(|| DenseMatrix::identity(n));
    let cap = 100 * n.max(1);
    jacobi_orthogonalize(&mut w, v.as_mut(), cap)?;

    let norms = w.column_norms();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    if !want_vectors {
        return Ok(SvdResult { singular_values, left_vectors: None, right_vectors: None });
    }
    let v = v.unwrap().select_cols(&order);
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let floor = smax * MACHINE_EPSILON * n as f64;
    let mut u = DenseMatrix::zeros(m, n);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > floor && s > 0.0 {
            let inv = 1.0 / s;
            for (dst, src) in u.col_mut(k).iter_mut().zip(w.col(j)) {
                *dst = src * inv;
            }
        } else {
            pending.push(k);
        }
    }
    // complete U where the singular value vanished
    let mut e = 0;
    for k in pending {
        loop {
            let mut c = vec![C64::new(0.0, 0.0); m];
            c[e % m] = C64::new(1.0, 0.0);
            e += 1;
            for _ in 0..2 {
                for l in 0..n {
                    if l == k {
                        continue;
                    }
                    let h = dotc(u.col(l), &c);
                    for (ci, ui) in c.iter_mut().zip(u.col(l)) {
                        *ci -= h * ui;
                    }
                }
            }
            let nc = norm2(&c);
            if nc > 0.5 {
                for (dst, src) in u.col_mut(k).iter_mut().zip(&c) {
                    *dst = src / nc;
                }
                break;
            }
            if e > 2 * m + n {
                break;
            }
        }
    }
    Ok(SvdResult { singular_values, left_vectors: Some(u), right_vectors: Some(v) })
}

/// 2-norm condition number `σ_max/σ_min` (infinite when singular).
pub fn cond2(x: &DenseMatrix) -> Result<f64> {
    let s = svd(x, false)?.singular_values;
    let (max, min) = (s[0], *s.last().unwrap());
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}
