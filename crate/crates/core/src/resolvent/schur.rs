use std::ops::Range;

use super::{par_map, Phase, PhaseCounts, SolveLedger};
use crate::dense::{DenseLu, DenseMatrix};
use crate::filter::QuadratureRule;
use crate::lu::{ColumnOrdering, LuFactor};
use crate::partition::PartitionedPencil;
use crate::sparse::SparseMatrix;
use crate::{Error, Result, C64, MACHINE_EPSILON};

/// Interior blocks up to this size are factored densely.
pub const DENSE_BLOCK_CROSSOVER: usize = 64;

#[derive(Debug)]
enum BlockSolve {
    Dense(DenseLu),
    Sparse(LuFactor),
}

/// Factors of the block-diagonal `B(zeta) = B - zeta M_B`, one per
/// diagonal block.
#[derive(Debug)]
pub struct BlockDiagSolver {
    d: usize,
    ranges: Vec<Range<usize>>,
    solvers: Vec<BlockSolve>,
}

impl BlockDiagSolver {
    /// Block orderings for [`BlockDiagSolver::factor`]; `None` for dense blocks.
    pub fn orderings(pp: &PartitionedPencil) -> Vec<Option<ColumnOrdering>> {
        pp.b_blocks
            .iter()
            .zip(&pp.mb_blocks)
            .map(|(b, mb)| {
                (b.rows() > DENSE_BLOCK_CROSSOVER).then(|| {
                    ColumnOrdering::minimum_degree(&SparseMatrix::lincomb(
                        C64::new(1.0, 0.0),
                        b,
                        C64::new(1.0, 0.0),
                        mb,
                    ))
                })
            })
            .collect()
    }

    /// Factors every diagonal block of `B - zeta M_B`. A singular block `i`
    /// is reported as `PoleOnBlockSpectrum { pole, block: i }`.
    pub fn factor(
        pp: &PartitionedPencil,
        zeta: C64,
        pole: usize,
        orderings: &[Option<ColumnOrdering>],
    ) -> Result<Self> {
        let mut solvers = Vec::with_capacity(pp.b_blocks.len());
        for (i, (b, mb)) in pp.b_blocks.iter().zip(&pp.mb_blocks).enumerate() {
            let k = SparseMatrix::shifted(b, zeta, mb);
            let singular = Error::PoleOnBlockSpectrum { pole, block: i };
            let s = match &orderings[i] {
                None => match DenseLu::factor(&k.to_dense()) {
                    Ok(lu) => BlockSolve::Dense(lu),
                    Err(Error::SingularMatrix { .. }) => return Err(singular),
                    Err(e) => return Err(e),
                },
                Some(ord) => match LuFactor::factor_with(&k, ord) {
                    Ok(f) if f.min_pivot() > MACHINE_EPSILON * k.norm_one() => BlockSolve::Sparse(f),
                    Ok(_) | Err(Error::NumericallySingular { .. }) => return Err(singular),
                    Err(e) => return Err(e),
                },
            };
            solvers.push(s);
        }
        Ok(BlockDiagSolver { d: pp.d(), ranges: pp.block_ranges.clone(), solvers })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn block_count(&self) -> usize {
        self.solvers.len()
    }

    fn solve_block_rows(&self, i: usize, x: &mut [C64]) {
        match &self.solvers[i] {
            BlockSolve::Dense(lu) => lu.solve_vec(x),
            BlockSolve::Sparse(f) => f.solve_in_place(x),
        }
    }

    /// `x <- B(zeta)^{-1} x` for a full interior vector.
    pub fn solve_in_place(&self, x: &mut [C64]) {
        assert_eq!(x.len(), self.d, "interior vector length mismatch");
        for (i, r) in self.ranges.iter().enumerate() {
            self.solve_block_rows(i, &mut x[r.clone()]);
        }
    }

    /// Solves every column of an interior block.
    pub fn solve_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut y = x.clone();
        for j in 0..y.cols() {
            self.solve_in_place(y.col_mut(j));
        }
        y
    }
}

#[derive(Debug)]
struct SchurPole {
    b: BlockDiagSolver,
    /// `F - zeta M_F`.
    f: SparseMatrix,
    s_lu: DenseLu,
}

/// Per-pole block factors of `B(zeta_j)` and dense LU factors of the
/// explicitly formed Schur complements `S(zeta_j) = C(zeta_j) - E(zeta_j) B(zeta_j)^{-1} F(zeta_j)`.
#[derive(Debug)]
pub struct SchurCache {
    pub rule: QuadratureRule,
    d: usize,
    s: usize,
    threads: usize,
    poles: Vec<SchurPole>,
    setup: PhaseCounts,
}

/// Forms `S(zeta)` densely; `s` interior solves.
fn form_schur(pp: &PartitionedPencil, b: &BlockDiagSolver, zeta: C64) -> (DenseMatrix, SparseMatrix) {
    let bl = &pp.blocks;
    let (d, s) = (pp.d(), pp.s());
    let fz = SparseMatrix::shifted(&bl.f, zeta, &bl.mf);
    let ez = SparseMatrix::shifted(&bl.e, zeta, &bl.me);
    let mut sm = SparseMatrix::shifted(&bl.c, zeta, &bl.mc).to_dense();
    if d == 0 {
        return (sm, fz);
    }
    for (i, r) in pp.block_ranges.iter().enumerate() {
        // columns of F(zeta) with support in block i
        let fi = fz.block(r.start, r.end, 0, s);
        let cols: Vec<usize> = (0..s).filter(|&k| fi.colptr()[k] < fi.colptr()[k + 1]).collect();
        if cols.is_empty() {
            continue;
        }
        let mut x = DenseMatrix::zeros(r.len(), cols.len());
        for (c, &k) in cols.iter().enumerate() {
            for (row, v) in fi.col_iter(k) {
                x[(row, c)] = v;
            }
        }
        for c in 0..cols.len() {
            b.solve_block_rows(i, x.col_mut(c));
        }
        let ei = ez.block(0, s, r.start, r.end);
        let ex = ei.mul_dense(&x);
        for (c, &k) in cols.iter().enumerate() {
            for (dst, src) in sm.col_mut(k).iter_mut().zip(ex.col(c)) {
                *dst -= src;
            }
        }
    }
    (sm, fz)
}

/// Builds the Schur-complement cache for every pole of `rule`. Forming
/// each `S(zeta_j)` costs `s` interior solves, charged to [`Phase::Setup`]
/// in [`SchurCache::setup_counts`].
pub fn build_schur_cache(pp: &PartitionedPencil, rule: &QuadratureRule, cap: usize, threads: usize) -> Result<SchurCache> {
    let (d, s) = (pp.d(), pp.s());
    if s == 0 {
        return Err(Error::NoInterface);
    }
    if s > cap {
        return Err(Error::InterfaceTooLarge { size: s, cap });
    }
    let orderings = BlockDiagSolver::orderings(pp);
    let built: Vec<Result<SchurPole>> = par_map(threads, rule.order(), |j| {
        let zeta = rule.poles[j];
        let b = BlockDiagSolver::factor(pp, zeta, j, &orderings)?;
        let (sm, f) = form_schur(pp, &b, zeta);
        let s_lu = DenseLu::factor(&sm).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::PoleOnSpectrum(j),
            e => e,
        })?;
        Ok(SchurPole { b, f, s_lu })
    });
    let poles = built.into_iter().collect::<Result<Vec<_>>>()?;
    let n_poles = rule.order();
    let blocks = pp.b_blocks.len();
    let setup = PhaseCounts {
        full_solves: 0,
        b_solves: if d > 0 { n_poles * s } else { 0 },
        s_solves: 0,
        factorizations: n_poles * (blocks + 1),
    };
    Ok(SchurCache { rule: rule.clone(), d, s, threads, poles, setup })
}

impl SchurCache {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Work spent building the cache.
    pub fn setup_counts(&self) -> PhaseCounts {
        self.setup
    }

    pub fn record_setup(&self, ledger: &mut SolveLedger) {
        ledger.record_b(Phase::Setup, self.setup.b_solves);
        ledger.record_factorizations(Phase::Setup, self.setup.factorizations);
    }

    fn schur_solve(&self, j: usize, r: &DenseMatrix) -> DenseMatrix {
        self.poles[j].s_lu.solve(r)
    }

    fn coupling(&self, j: usize, y: &DenseMatrix) -> DenseMatrix {
        let p = &self.poles[j];
        p.b.solve_dense(&p.f.mul_dense(y))
    }

    fn weighted_sum(&self, parts: &[DenseMatrix], rows: usize, cols: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows, cols);
        for (j, x) in parts.iter().enumerate() {
            out.add_scaled(self.rule.weights[j], x);
        }
        out
    }

    /// `sum_j w_j S(zeta_j)^{-1} R`; `N·cols` S-solves.
    pub fn apply_schur_filter(&self, r: &DenseMatrix, ledger: &mut SolveLedger, phase: Phase) -> DenseMatrix {
        assert_eq!(r.rows(), self.s, "interface block row mismatch");
        let parts = par_map(self.threads, self.poles.len(), |j| self.schur_solve(j, r));
        ledger.record_s(phase, self.poles.len() * r.cols());
        self.weighted_sum(&parts, self.s, r.cols())
    }

    /// `sum_j w_j B(zeta_j)^{-1} F(zeta_j) S(zeta_j)^{-1} R`; `N·cols` solves
    /// of each kind. This is the negated (1,2) block of the filtered
    /// resolvent; only its range matters.
    pub fn apply_coupling_filter(&self, r: &DenseMatrix, ledger: &mut SolveLedger, phase: Phase) -> DenseMatrix {
        self.apply_joint(r, ledger, phase).1
    }

    /// Both filters from one set of S-solves: `N·cols` S-solves and
    /// `N·cols` B-solves in total.
    pub fn apply_joint(&self, r: &DenseMatrix, ledger: &mut SolveLedger, phase: Phase) -> (DenseMatrix, DenseMatrix) {
        assert_eq!(r.rows(), self.s, "interface block row mismatch");
        let parts = par_map(self.threads, self.poles.len(), |j| {
            let y = self.schur_solve(j, r);
            let x = if self.d > 0 { self.coupling(j, &y) } else { DenseMatrix::zeros(0, r.cols()) };
            (y, x)
        });
        let n = self.poles.len();
        ledger.record_s(phase, n * r.cols());
        if self.d > 0 {
            ledger.record_b(phase, n * r.cols());
        }
        let (ys, xs): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
        (self.weighted_sum(&ys, self.s, r.cols()), self.weighted_sum(&xs, self.d, r.cols()))
    }
}
