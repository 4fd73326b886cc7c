//! Test pencils with planted spectra.
//!
//! The sparse generator builds `A0 = T1 ⊗ I + I ⊗ A2` where `T1` is a
//! shifted tridiagonal Toeplitz matrix with known imaginary eigenvalues and
//! `A2 = Q Λ2 Q^{-1}` is a small dense non-normal matrix with chosen
//! eigenvalues. The spectrum of `A0` is `{α_k + β_l}`. Exactly one `α` is
//! zero and the others are far from it, so the inside eigenvalues are the
//! inside `β`'s and their eigenvectors `u ⊗ q_l` share one flat factor `u`.
//! Restricted to any vertex subset they stay independent, which is what the
//! partitioned solvers need. The graph of `A0` is a path of cliques. `(A, M) = (M A0, M)` has the same spectrum for any
//! nonsingular `M`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{complex_normal, DenseLu, DenseMatrix};
use crate::filter::Disk;
use crate::sparse::{SparseMatrix, SparsePencil};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassKind {
    Identity,
    Diagonal,
    Tridiagonal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedConfig {
    /// Length of the Toeplitz factor (number of cliques).
    pub p1: usize,
    /// Size of the dense factor (clique size).
    pub p2: usize,
    /// Number of eigenvalues planted inside the disk.
    pub k2: usize,
    /// Outside eigenvalues of the dense factor with real part in
    /// `2.5r..4r`; the rest have modulus `10r..100r`.
    pub moderate: usize,
    pub disk: Disk,
    /// Radius of the region holding the inside eigenvalues, relative to `r`.
    pub spread: f64,
    pub mass: MassKind,
    pub seed: u64,
}

impl PlantedConfig {
    pub fn new(p1: usize, p2: usize, k2: usize) -> Self {
        PlantedConfig {
            p1,
            p2,
            k2,
            moderate: 3.min(p2 - k2),
            disk: Disk::unit(),
            spread: 0.7,
            mass: MassKind::Identity,
            seed: 1,
        }
    }

    pub fn n(&self) -> usize {
        self.p1 * self.p2
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mass(mut self, mass: MassKind) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_disk(mut self, disk: Disk) -> Self {
        self.disk = disk;
        self
    }

    pub fn with_moderate(mut self, moderate: usize) -> Self {
        self.moderate = moderate;
        self
    }
}

#[derive(Clone, Debug)]
pub struct PlantedPencil {
    pub pencil: SparsePencil,
    pub disk: Disk,
    /// Every eigenvalue of the pencil.
    pub eigenvalues: Vec<C64>,
    /// The eigenvalues inside the disk, sorted by real then imaginary part.
    pub inside: Vec<C64>,
}

fn sort_values(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

fn unit_phase<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

fn mass_matrix<R: Rng>(kind: MassKind, n: usize, rng: &mut R) -> SparseMatrix {
    let mut diag = || C64::from_polar(rng.random_range(0.6..1.4), rng.random_range(-0.2..0.2));
    match kind {
        MassKind::Identity => SparseMatrix::identity(n),
        MassKind::Diagonal => SparseMatrix::from_diag(&(0..n).map(|_| diag()).collect::<Vec<_>>()),
        MassKind::Tridiagonal => {
            let mut t = Vec::with_capacity(3 * n);
            let dvals: Vec<C64> = (0..n).map(|_| diag()).collect();
            for (i, &dv) in dvals.iter().enumerate() {
                t.push((i, i, dv));
                if i + 1 < n {
                    t.push((i, i + 1, unit_phase(rng) * rng.random_range(0.05..0.2)));
                    t.push((i + 1, i, unit_phase(rng) * rng.random_range(0.05..0.2)));
                }
            }
            SparseMatrix::from_triplets(n, n, &t).expect("indices in range")
        }
    }
}

/// Sparse pencil with exactly `k2` eigenvalues inside the disk, all within
/// `spread r` of the center, and the rest at distance at least `2.5r`.
pub fn planted(cfg: &PlantedConfig) -> Result<PlantedPencil> {
    let (p1, p2, k2) = (cfg.p1, cfg.p2, cfg.k2);
    if p1 == 0 || p2 == 0 || k2 > p2 || cfg.moderate + k2 > p2 || !(cfg.spread > 0.0 && cfg.spread < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "planted sizes p1={p1}, p2={p2}, k2={k2}, moderate={}, spread={}",
            cfg.moderate, cfg.spread
        )));
    }
    let r = cfg.disk.radius;
    let c = cfg.disk.center;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Toeplitz factor with a·c = -g², so every α is imaginary. One mode is
    // shifted to zero; the others stay at least 3.5r away from it.
    let h = PI / (p1 + 1) as f64;
    let mode = (1..=p1)
        .max_by(|&x, &y| {
            let w = |k: usize| (1..=p1).map(|i| (i as f64 * k as f64 * h).sin().abs()).fold(f64::INFINITY, f64::min);
            w(x).total_cmp(&w(y)).then(y.cmp(&x))
        })
        .unwrap();
    let cosk = |k: usize| 2.0 * (k as f64 * h).cos();
    let gap = (1..=p1).filter(|&k| k != mode).map(|k| (cosk(k) - cosk(mode)).abs()).fold(f64::INFINITY, f64::min);
    let g = if gap.is_finite() { 3.5 * r / gap } else { r };
    let phase = unit_phase(&mut rng);
    let (ta, tc) = (phase * g, -phase.conj() * g);
    let alphas: Vec<C64> = (1..=p1).map(|k| C64::new(0.0, g * (cosk(k) - cosk(mode)))).collect();
    let shift = C64::new(0.0, -g * cosk(mode));

    // dense factor eigenvalues: separated points inside, the rest with real
    // part at least 2.5r so no sum with an imaginary α comes near the disk
    let mut betas: Vec<C64> = Vec::with_capacity(p2);
    let sep = 0.08 * r * cfg.spread / (k2 as f64).sqrt().max(1.0);
    while betas.len() < k2 {
        let z = unit_phase(&mut rng) * (cfg.spread * r * rng.random_range(0.0f64..1.0).sqrt());
        if betas.iter().all(|b| (b - z).norm() >= sep) {
            betas.push(z);
        }
    }
    for _ in 0..cfg.moderate {
        betas.push(C64::new(r * rng.random_range(2.5..4.0), r * rng.random_range(-2.0..2.0)));
    }
    while betas.len() < p2 {
        let ang = rng.random_range(-0.4 * PI..0.4 * PI);
        betas.push(C64::from_polar(r * rng.random_range(10.0..100.0), ang));
    }

    let q = {
        let g = DenseMatrix::random_normal(p2, p2, &mut rng);
        DenseMatrix::identity(p2).add(&g.scale(C64::new(0.5 / (p2 as f64).sqrt(), 0.0)))
    };
    let qinv = DenseLu::factor(&q)?.inverse();
    let a2 = q.matmul(&DenseMatrix::from_diag(&betas)).matmul(&qinv);

    let n = p1 * p2;
    let mut t = Vec::with_capacity(p1 * p2 * p2 + 3 * n);
    for blk in 0..p1 {
        let off = blk * p2;
        for j in 0..p2 {
            for i in 0..p2 {
                let mut v = a2[(i, j)];
                if i == j {
                    v += c + shift;
                }
                t.push((off + i, off + j, v));
            }
        }
        if blk + 1 < p1 {
            for l in 0..p2 {
                t.push((off + p2 + l, off + l, ta));
                t.push((off + l, off + p2 + l, tc));
            }
        }
    }
    let a0 = SparseMatrix::from_triplets(n, n, &t)?;
    let m = mass_matrix(cfg.mass, n, &mut rng);
    let a = if cfg.mass == MassKind::Identity { a0 } else { sparse_product(&m, &a0) };

    let mut eigenvalues = Vec::with_capacity(n);
    for &al in &alphas {
        for &be in &betas {
            eigenvalues.push(c + al + be);
        }
    }
    let mut inside: Vec<C64> = eigenvalues.iter().copied().filter(|&z| cfg.disk.contains(z)).collect();
    sort_values(&mut inside);
    Ok(PlantedPencil { pencil: SparsePencil::new(a, m)?, disk: cfg.disk, eigenvalues, inside })
}

/// `A B` for sparse operands.
pub fn sparse_product(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let mut colptr = vec![0usize];
    let mut rowidx = Vec::new();
    let mut values = Vec::new();
    let mut acc = vec![C64::new(0.0, 0.0); a.rows()];
    let mut mark = vec![usize::MAX; a.rows()];
    let mut rows = Vec::new();
    for j in 0..b.cols() {
        rows.clear();
        for (k, bkj) in b.col_iter(j) {
            for (i, aik) in a.col_iter(k) {
                if mark[i] != j {
                    mark[i] = j;
                    rows.push(i);
                    acc[i] = C64::new(0.0, 0.0);
                }
                acc[i] += aik * bkj;
            }
        }
        rows.sort_unstable();
        for &i in &rows {
            rowidx.push(i);
            values.push(acc[i]);
        }
        colptr.push(rowidx.len());
    }
    SparseMatrix::from_csc(a.rows(), b.cols(), colptr, rowidx, values).expect("valid product")
}

/// Dense pencil `(M X Λ X^{-1}, M)` with the given eigenvalues and a
/// random eigenbasis `X`.
#[derive(Clone, Debug)]
pub struct DensePlanted {
    pub pencil: SparsePencil,
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors, column `i` for `eigenvalues[i]`.
    pub x: DenseMatrix,
}

pub fn dense_planted(eigenvalues: &[C64], random_mass: bool, seed: u64) -> Result<DensePlanted> {
    let n = eigenvalues.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DenseMatrix::random_normal(n, n, &mut rng);
    let xinv = DenseLu::factor(&x)?.inverse();
    let a0 = x.matmul(&DenseMatrix::from_diag(eigenvalues)).matmul(&xinv);
    let m = if random_mass {
        let g = DenseMatrix::random_normal(n, n, &mut rng);
        DenseMatrix::identity(n).add(&g.scale(C64::new(0.3 / (n as f64).sqrt(), 0.0)))
    } else {
        DenseMatrix::identity(n)
    };
    let a = m.matmul(&a0);
    let pencil = SparsePencil::new(SparseMatrix::from_dense(&a), SparseMatrix::from_dense(&m))?;
    Ok(DensePlanted { pencil, eigenvalues: eigenvalues.to_vec(), x })
}

/// `inside` eigenvalues uniformly in the disk of radius `0.6r` and
/// `outside` ones at distance `2r..6r` from the center.
pub fn random_spectrum(disk: &Disk, inside: usize, outside: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vec::with_capacity(inside + outside);
    for _ in 0..inside {
        let rad = 0.6 * disk.radius * rng.random_range(0.0f64..1.0).sqrt();
        v.push(disk.center + unit_phase(&mut rng) * rad);
    }
    for _ in 0..outside {
        v.push(disk.center + unit_phase(&mut rng) * (disk.radius * rng.random_range(2.0..6.0)));
    }
    v
}

/// A complex normal matrix as a sparse matrix; kept for tests.
#[doc(hidden)]
pub fn random_dense_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    for j in 0..cols {
        for i in 0..rows {
            if rng.random_range(0.0..1.0) < density {
                t.push((i, j, complex_normal(&mut rng)));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &t).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::eigenvalues;

    fn matches(mut a: Vec<C64>, b: Vec<C64>, tol: f64) -> bool {
        a.len() == b.len()
            && b.iter().all(|y| {
                let (k, d) = a.iter().enumerate().map(|(k, x)| (k, (x - y).norm())).min_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
                a.swap_remove(k);
                d <= tol * (1.0 + y.norm())
            })
    }

    #[test]
    fn planted_spectrum_is_exact() {
        for mass in [MassKind::Identity, MassKind::Diagonal, MassKind::Tridiagonal] {
            let cfg = PlantedConfig::new(4, 5, 2).with_mass(mass).with_seed(3);
            let p = planted(&cfg).unwrap();
            assert_eq!(p.inside.len(), 2);
            let m = p.pencil.m.to_dense();
            let a = p.pencil.a.to_dense();
            let x = DenseLu::factor(&m).unwrap().solve(&a);
            let ev = eigenvalues(&x).unwrap();
            assert!(matches(ev, p.eigenvalues.clone(), 1e-10));
        }
    }

    #[test]
    fn outside_values_are_far() {
        for p1 in 1..12 {
            let p = planted(&PlantedConfig::new(p1, 12, 5).with_seed(p1 as u64)).unwrap();
            assert_eq!(p.inside.len(), 5);
            for z in &p.eigenvalues {
                let d = (z - p.disk.center).norm();
                assert!(d <= 0.7 || d >= 2.5, "{z}");
            }
        }
    }

    #[test]
    fn product_matches_dense() {
        let a = random_dense_sparse(5, 4, 0.5, 1);
        let b = random_dense_sparse(4, 3, 0.5, 2);
        let p = sparse_product(&a, &b).to_dense();
        assert!(p.sub(&a.to_dense().matmul(&b.to_dense())).norm_fro() < 1e-14);
    }
}
