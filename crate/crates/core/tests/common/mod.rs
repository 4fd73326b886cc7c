#![allow(dead_code)]

use diskeig_core::dense::{complex_normal, DenseMatrix};
use diskeig_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::random_normal(rows, cols, &mut rng(seed))
}

pub fn random_vec(n: usize, seed: u64) -> Vec<C64> {
    let mut r = rng(seed);
    (0..n).map(|_| complex_normal(&mut r)).collect()
}

/// Largest distance in a greedy nearest matching of two multisets, or
/// infinity when the sizes differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool = a.to_vec();
    let mut worst: f64 = 0.0;
    for y in b {
        let (k, d) = pool
            .iter()
            .enumerate()
            .map(|(k, x)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        pool.swap_remove(k);
        worst = worst.max(d);
    }
    worst
}

/// For every wanted value the distance to the closest found one.
pub fn nearest_errors(found: &[C64], want: &[C64]) -> Vec<f64> {
    want.iter()
        .map(|w| found.iter().map(|f| (f - w).norm()).fold(f64::INFINITY, f64::min))
        .collect()
}

pub fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

pub fn identity_defect(q: &DenseMatrix) -> f64 {
    q.adjoint_mul(q).sub(&DenseMatrix::identity(q.cols())).norm_fro()
}
