//! Incremental randomized range finder with a condition-ratio stop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::{dotc, jacobi_orthogonalize, norm2, random_normal_vec, DenseMatrix};
use crate::{Error, Result, C64};

/// Below this norm the first operator product counts as zero.
pub const ZERO_PRODUCT: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeFinderConfig {
    pub ratio_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for RangeFinderConfig {
    fn default() -> Self {
        RangeFinderConfig { ratio_tol: 1e-12, max_iterations: 400, seed: 0 }
    }
}

impl RangeFinderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio_tol > 0.0 && self.ratio_tol < 1.0) {
            return Err(Error::InvalidConfig(format!("ratio_tol {} not in (0, 1)", self.ratio_tol)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeFinderResult {
    /// Orthonormal basis of the captured range.
    pub basis: DenseMatrix,
    /// Operator applications performed.
    pub iterations: usize,
    /// `sigma_min / sigma_max` of the sampled matrix at termination.
    pub ratio: f64,
    /// False only when the iteration cap stopped the loop.
    pub converged: bool,
    /// The first product was numerically zero.
    pub zero_operator: bool,
}

/// Sampled matrix `Y = Q R` grown one column at a time. `W = R V` is kept
/// column-orthogonal by warm-started one-sided Jacobi, so the singular
/// values of `Y` are the column norms of `W`.
#[derive(Clone, Debug)]
pub struct IncrementalRange {
    q: DenseMatrix,
    w: DenseMatrix,
    ratio: f64,
    iterations: usize,
    tol: f64,
    max_iterations: usize,
    input_dim: usize,
    done: bool,
    converged: bool,
    zero: bool,
}

impl IncrementalRange {
    /// `input_dim` bounds the rank, so at most `min(input_dim, rows)` columns are kept.
    pub fn new(input_dim: usize, config: &RangeFinderConfig) -> Self {
        IncrementalRange {
            q: DenseMatrix::zeros(0, 0),
            w: DenseMatrix::zeros(0, 0),
            ratio: 1.0,
            iterations: 0,
            tol: config.ratio_tol,
            max_iterations: config.max_iterations,
            input_dim,
            done: false,
            converged: false,
            zero: false,
        }
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Singular values of the sampled matrix, nonincreasing.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s = self.w.column_norms();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Appends a sampled column and returns the updated ratio
    /// `sigma_min / sigma_max`. Columns pushed after termination are ignored.
    pub fn push(&mut self, y: &[C64]) -> f64 {
        if self.done {
            return self.ratio;
        }
        self.iterations += 1;
        let k = self.q.cols();
        if k == 0 && norm2(y) < ZERO_PRODUCT {
            self.done = true;
            self.converged = true;
            self.zero = true;
            self.ratio = 0.0;
            self.q = DenseMatrix::zeros(y.len(), 0);
            return self.ratio;
        }
        if k == 0 {
            self.q = DenseMatrix::zeros(y.len(), 0);
        }
        // classical Gram-Schmidt with one reorthogonalization pass
        let mut v = y.to_vec();
        let mut r = vec![C64::new(0.0, 0.0); k];
        for _ in 0..2 {
            let h = self.q.adjoint_matvec(&v);
            for (j, hj) in h.iter().enumerate() {
                r[j] += hj;
                for (vi, qi) in v.iter_mut().zip(self.q.col(j)) {
                    *vi -= hj * qi;
                }
            }
        }
        let gamma = norm2(&v);
        let mut w = DenseMatrix::zeros(k + 1, k + 1);
        for j in 0..k {
            w.col_mut(j)[..k].copy_from_slice(self.w.col(j));
        }
        w.col_mut(k)[..k].copy_from_slice(&r);
        w[(k, k)] = C64::new(gamma, 0.0);
        jacobi_orthogonalize(&mut w, None, 60).ok();
        self.w = w;
        let s = self.w.column_norms();
        let smax = s.iter().copied().fold(0.0, f64::max);
        let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
        self.ratio = if smax > 0.0 { smin / smax } else { 0.0 };

        if gamma > 0.0 {
            let inv = 1.0 / gamma;
            v.iter_mut().for_each(|e| *e *= inv);
        }
        self.q.push_col(&v);

        if self.ratio <= self.tol {
            // the newest column is dependent: drop it
            self.q.pop_col();
            self.done = true;
            self.converged = true;
        } else if self.q.cols() >= self.input_dim.min(self.q.rows()) {
            self.done = true;
            self.converged = true;
        } else if self.iterations >= self.max_iterations {
            self.done = true;
            self.converged = false;
        }
        self.ratio
    }

    /// Current orthonormal basis (excluding a dropped dependent column).
    pub fn basis(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn finish(self) -> RangeFinderResult {
        RangeFinderResult {
            basis: self.q,
            iterations: self.iterations,
            ratio: self.ratio,
            converged: self.converged,
            zero_operator: self.zero,
        }
    }
}

/// Range of a black-box operator `x -> X x` on `C^{input_dim}`, probed with
/// standard complex Gaussian vectors until the sampled matrix becomes
/// numerically rank deficient.
pub fn randomized_range(
    mut op: impl FnMut(&[C64]) -> Vec<C64>,
    input_dim: usize,
    config: &RangeFinderConfig,
) -> Result<RangeFinderResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = IncrementalRange::new(input_dim, config);
    while !state.is_done() {
        let r = random_normal_vec(input_dim, &mut rng);
        let y = op(&r);
        state.push(&y);
    }
    Ok(state.finish())
}

/// `sigma_min / sigma_max` computed from scratch, for checking the
/// incremental update.
pub fn singular_ratio(y: &DenseMatrix) -> Result<f64> {
    let s = crate::dense::svd(y, false)?.singular_values;
    let max = s[0];
    Ok(if max > 0.0 { s[s.len() - 1] / max } else { 0.0 })
}

/// Consistency check used by tests: `|q_i^H q_j - delta_ij|` maximum.
#[doc(hidden)]
pub fn orthogonality_defect(q: &DenseMatrix) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..q.cols() {
        for j in 0..q.cols() {
            let d = dotc(q.col(i), q.col(j)) - if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            m = m.max(d.norm());
        }
    }
    m
}
