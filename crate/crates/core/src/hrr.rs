//! Harmonic Rayleigh-Ritz extraction for eigenvalues near a target.

use crate::dense::{complex_eig, cond2, dense_solve, norm2, qr, DenseMatrix};
use crate::filter::Disk;
use crate::resolvent::SolveLedger;
use crate::sparse::SparsePencil;
use crate::{Error, Result, C64};

/// Projections whose relevant condition number exceeds this are rejected.
pub const MAX_PROJECTION_COND: f64 = 1e14;
/// Default residual threshold separating accepted from spurious pairs.
pub const DEFAULT_SPURIOUS_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct RitzPair {
    pub value: C64,
    /// Unit 2-norm.
    pub vector: Vec<C64>,
    pub residual: f64,
    pub in_disk: bool,
}

/// Partition metadata carried into reports.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PartitionSummary {
    pub parts: usize,
    pub interior_sizes: Vec<usize>,
    pub interface_sizes: Vec<usize>,
    pub d: usize,
    pub s: usize,
    pub edge_cut: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EigenReport {
    /// In-disk pairs with residual at most the spurious threshold, sorted
    /// by real then imaginary part.
    pub accepted: Vec<RitzPair>,
    /// In-disk pairs discarded for their residual.
    pub spurious: usize,
    /// Finite Ritz values outside the disk.
    pub outside: usize,
    /// Ritz values at infinity.
    pub infinite: usize,
    /// Columns of the projection basis.
    pub basis_dim: usize,
    pub ledger: SolveLedger,
    /// Named iteration counts, e.g. range-finder applications.
    pub iterations: Vec<(&'static str, usize)>,
    /// False when an iteration cap was hit.
    pub converged: bool,
    /// Wall-clock seconds per phase.
    pub timings: Vec<(&'static str, f64)>,
    pub warnings: Vec<String>,
    pub partition: Option<PartitionSummary>,
    /// Largest accepted residual after each subspace iteration sweep.
    pub residual_history: Vec<f64>,
}

impl EigenReport {
    pub fn iteration(&self, name: &str) -> Option<usize> {
        self.iterations.iter().find(|(n, _)| *n == name).map(|e| e.1)
    }

    pub fn max_residual(&self) -> f64 {
        self.accepted.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    pub fn values(&self) -> Vec<C64> {
        self.accepted.iter().map(|p| p.value).collect()
    }
}

/// `G = (K Z)^H (K Z)` and `H = (K Z)^H (M Z)` with `K = A - zeta_c M`.
pub fn assemble_hrr(pencil: &SparsePencil, center: C64, z: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if z.cols() == 0 {
        return Err(Error::EmptyBasis);
    }
    let (kz, mz) = project(pencil, center, z)?;
    Ok((kz.adjoint_mul(&kz), kz.adjoint_mul(&mz)))
}

fn project(pencil: &SparsePencil, center: C64, z: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if z.rows() != pencil.n {
        return Err(Error::DimensionMismatch(format!("basis has {} rows for n = {}", z.rows(), pencil.n)));
    }
    let mz = pencil.m.mul_dense(z);
    let mut kz = pencil.a.mul_dense(z);
    kz.add_scaled(-center, &mz);
    Ok((kz, mz))
}

/// Eigenpairs `(tau, w)` of `X`, with `tau` negligible relative to `X`
/// reported as infinite Ritz values (dropped, counted).
fn harmonic_pairs(x: &DenseMatrix, center: C64) -> Result<(Vec<(C64, Vec<C64>)>, usize)> {
    let schur = complex_eig(x)?;
    let vecs = schur.eigenvectors();
    let scale = x.norm_fro();
    let mut out = Vec::new();
    let mut infinite = 0;
    for (k, &tau) in schur.eigenvalues.iter().enumerate() {
        if tau.norm() <= 1e-14 * scale || tau.norm() == 0.0 {
            infinite += 1;
            continue;
        }
        out.push((center + C64::new(1.0, 0.0) / tau, vecs.col(k).to_vec()));
    }
    Ok((out, infinite))
}

/// Solves `G q = (theta - zeta_c) H q` through the standard problem for
/// `G^{-1} H`, whose eigenvalues are `1 / (theta - zeta_c)`.
pub fn hrr_solve(g: &DenseMatrix, h: &DenseMatrix, center: C64) -> Result<Vec<(C64, Vec<C64>)>> {
    if !g.is_square() || g.rows() != h.rows() || g.cols() != h.cols() {
        return Err(Error::DimensionMismatch("G and H must be square of equal size".into()));
    }
    if g.rows() == 0 {
        return Err(Error::EmptyBasis);
    }
    let c = cond2(g)?;
    if c > MAX_PROJECTION_COND {
        return Err(Error::IllConditionedProjection(c));
    }
    let x = dense_solve(g, h)?;
    Ok(harmonic_pairs(&x, center)?.0)
}

/// `||A x - theta M x|| / (||A x|| + |theta| ||M x||)`.
pub fn residual(pencil: &SparsePencil, theta: C64, x: &[C64]) -> f64 {
    let ax = pencil.a.spmv(x);
    let mx = pencil.m.spmv(x);
    let r: Vec<C64> = ax.iter().zip(&mx).map(|(a, m)| a - theta * m).collect();
    let num = norm2(&r);
    if num == 0.0 {
        return 0.0;
    }
    num / (norm2(&ax) + theta.norm() * norm2(&mx))
}

fn solve_upper(r: &DenseMatrix, x: &mut [C64]) {
    for j in (0..x.len()).rev() {
        x[j] /= r[(j, j)];
        let xj = x[j];
        for (xi, rij) in x[..j].iter_mut().zip(&r.col(j)[..j]) {
            *xi -= rij * xj;
        }
    }
}

/// `x <- R^{-H} x`.
fn solve_upper_adjoint(r: &DenseMatrix, x: &mut [C64]) {
    for j in 0..x.len() {
        let col = r.col(j);
        let s: C64 = col[..j].iter().zip(&x[..j]).map(|(a, b)| a.conj() * b).sum();
        x[j] = (x[j] - s) / col[j].conj();
    }
}

/// 2-norm condition estimate of an upper triangular matrix by power and
/// inverse iteration on `R^H R`. Dense SVD is cubic with a large
/// constant; this only needs triangular products and solves.
pub fn triangular_cond_estimate(r: &DenseMatrix) -> f64 {
    let k = r.cols();
    if k == 0 {
        return 1.0;
    }
    if r.diag().iter().any(|d| *d == C64::new(0.0, 0.0)) {
        return f64::INFINITY;
    }
    let start: Vec<C64> = (0..k).map(|i| C64::new(1.0, 0.3 * (i as f64 + 1.0).sin())).collect();
    let unit = |v: Vec<C64>| {
        let n = norm2(&v);
        v.into_iter().map(|e| e / n).collect::<Vec<C64>>()
    };
    let mut v = unit(start.clone());
    let mut smax: f64 = 0.0;
    for _ in 0..40 {
        let rv = r.matvec(&v);
        smax = smax.max(norm2(&rv));
        v = unit(r.adjoint_matvec(&rv));
    }
    let mut v = unit(start);
    let mut inv_min: f64 = 0.0;
    for _ in 0..40 {
        let mut y = v.clone();
        solve_upper(r, &mut y);
        inv_min = inv_min.max(norm2(&y));
        if !inv_min.is_finite() {
            return f64::INFINITY;
        }
        solve_upper_adjoint(r, &mut y);
        v = unit(y);
    }
    smax * inv_min
}

/// Harmonic Ritz pairs from `span(Z)` relative to the disk center. The
/// reduction runs through the QR factorization `K Z = Q_K R_K`: with
/// `T = Q_K^H M Z`, `G^{-1} H = R_K^{-1} T`, which avoids squaring the
/// condition number of `K Z`.
pub fn extract(pencil: &SparsePencil, disk: &Disk, z: &DenseMatrix, spurious_tol: f64) -> Result<EigenReport> {
    let mut report = EigenReport { basis_dim: z.cols(), converged: true, ..Default::default() };
    if z.cols() == 0 {
        return Ok(report);
    }
    let (kz, mz) = project(pencil, disk.center, z)?;
    let (qk, rk) = qr(&kz);
    let c = triangular_cond_estimate(&rk);
    if c > MAX_PROJECTION_COND {
        return Err(Error::IllConditionedProjection(c));
    }
    let t = qk.adjoint_mul(&mz);
    let x = dense_solve(&rk, &t)?;
    let (pairs, infinite) = harmonic_pairs(&x, disk.center)?;
    report.infinite = infinite;
    for (theta, w) in pairs {
        if !disk.contains(theta) {
            report.outside += 1;
            continue;
        }
        let mut v = z.matvec(&w);
        let nv = norm2(&v);
        if nv == 0.0 {
            report.spurious += 1;
            continue;
        }
        v.iter_mut().for_each(|e| *e /= nv);
        let res = residual(pencil, theta, &v);
        if res.is_nan() || res > spurious_tol {
            report.spurious += 1;
            continue;
        }
        report.accepted.push(RitzPair { value: theta, vector: v, residual: res, in_disk: true });
    }
    report.accepted.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(report)
}
