use super::{par_map, Phase, SolveLedger};
use crate::dense::DenseMatrix;
use crate::filter::QuadratureRule;
use crate::lu::{ColumnOrdering, LuFactor};
use crate::sparse::{SparseMatrix, SparsePencil};
use crate::{Error, Result, C64, MACHINE_EPSILON};

/// One sparse LU of `A - zeta_j M` per pole.
#[derive(Debug)]
pub struct FullResolventCache {
    pub rule: QuadratureRule,
    factors: Vec<LuFactor>,
    m: SparseMatrix,
    threads: usize,
}

/// LU of `A - zeta M`, with near-singular pivots reported as a collision
/// with the spectrum.
pub(crate) fn factor_shifted(
    pencil: &SparsePencil,
    zeta: C64,
    ord: &ColumnOrdering,
    pole: usize,
) -> Result<LuFactor> {
    let k = pencil.shifted(zeta);
    let scale = k.norm_one();
    match LuFactor::factor_with(&k, ord) {
        Ok(f) if f.min_pivot() > MACHINE_EPSILON * scale => Ok(f),
        Ok(_) | Err(Error::NumericallySingular { .. }) => Err(Error::PoleOnSpectrum(pole)),
        Err(e) => Err(e),
    }
}

/// Factors `A - zeta_j M` for every pole. The fill-reducing ordering is
/// computed once from the shift-independent pattern.
pub fn build_full_cache(pencil: &SparsePencil, rule: &QuadratureRule, threads: usize) -> Result<FullResolventCache> {
    let pattern = SparseMatrix::lincomb(C64::new(1.0, 0.0), &pencil.a, C64::new(1.0, 0.0), &pencil.m);
    let ord = ColumnOrdering::minimum_degree(&pattern);
    let factors: Vec<Result<LuFactor>> =
        par_map(threads, rule.order(), |j| factor_shifted(pencil, rule.poles[j], &ord, j));
    let factors = factors.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(FullResolventCache { rule: rule.clone(), factors, m: pencil.m.clone(), threads })
}

impl FullResolventCache {
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn factors(&self) -> &[LuFactor] {
        &self.factors
    }

    /// `sum_j w_j (A - zeta_j M)^{-1} M R`, charging `N·cols(R)` full solves.
    pub fn apply_filter(&self, r: &DenseMatrix, ledger: &mut SolveLedger, phase: Phase) -> DenseMatrix {
        assert_eq!(r.rows(), self.dim(), "filter input row mismatch");
        let mr = self.m.mul_dense(r);
        let parts = par_map(self.threads, self.factors.len(), |j| self.factors[j].solve_block(&mr));
        let mut out = DenseMatrix::zeros(r.rows(), r.cols());
        for (j, x) in parts.iter().enumerate() {
            out.add_scaled(self.rule.weights[j], x);
        }
        ledger.record_full(phase, self.factors.len() * r.cols());
        out
    }
}
