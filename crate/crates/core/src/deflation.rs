//! Interior-block eigendecomposition and the deflated resolvent series.

use crate::dense::{complex_eig, norm2, orthonormalize_or_empty, DenseLu, DenseMatrix};
use crate::filter::Disk;
use crate::partition::PartitionedPencil;
use crate::resolvent::{BlockDiagSolver, Phase, SolveLedger};
use crate::sparse::SparseMatrix;
use crate::{Error, Result, C64};

/// Largest interior block handled by the dense eigensolver.
pub const DEFAULT_BLOCK_CAP: usize = 3000;

/// How many interior eigenvalues to deflate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiChoice {
    /// As many as `(B, M_B)` has inside the disk.
    Auto,
    Count(usize),
}

/// Eigenvalues of `(B, M_B)` and the selected right/left eigenvectors,
/// scaled so that `Vhat^H M_B V = I`.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    /// All interior eigenvalues, block by block.
    pub delta: Vec<C64>,
    /// Block index of each entry of `delta`.
    pub block_of: Vec<usize>,
    /// Indices into `delta` of the deflated eigenvalues.
    pub selected: Vec<usize>,
    pub v_phi: DenseMatrix,
    pub vhat_phi: DenseMatrix,
    pub phi: usize,
}

impl BlockEigen {
    /// Eigenvalues left in the resolvent after deflation.
    pub fn remaining(&self) -> Vec<C64> {
        let mut keep = vec![true; self.delta.len()];
        for &i in &self.selected {
            keep[i] = false;
        }
        self.delta.iter().zip(keep).filter(|(_, k)| *k).map(|(d, _)| *d).collect()
    }

    pub fn selected_values(&self) -> Vec<C64> {
        self.selected.iter().map(|&i| self.delta[i]).collect()
    }
}

/// Dense eigendecomposition of `M_B^(i)^{-1} B_i` per block and selection
/// of the `phi` eigenvalues nearest the disk center across all blocks.
pub fn block_eig(pp: &PartitionedPencil, disk: &Disk, phi: PhiChoice, cap: usize) -> Result<BlockEigen> {
    let d = pp.d();
    let mut delta = Vec::with_capacity(d);
    let mut block_of = Vec::with_capacity(d);
    let mut vecs: Vec<(DenseMatrix, DenseMatrix)> = Vec::with_capacity(pp.b_blocks.len());
    for (i, (b, mb)) in pp.b_blocks.iter().zip(&pp.mb_blocks).enumerate() {
        let di = b.rows();
        if di > cap {
            return Err(Error::BlockTooLarge { size: di, cap });
        }
        let mbd = mb.to_dense();
        let mlu = DenseLu::factor(&mbd).map_err(|_| Error::SingularMassBlock(i))?;
        let x = mlu.solve(&b.to_dense());
        let schur = complex_eig(&x)?;
        let v = schur.eigenvectors();
        // rows of (M_B V)^{-1} are the left vectors
        let vhat_h = DenseLu::factor(&mbd.matmul(&v))?.inverse();
        delta.extend_from_slice(&schur.eigenvalues);
        block_of.extend(std::iter::repeat_n(i, di));
        vecs.push((v, vhat_h.adjoint()));
    }
    let mut order: Vec<usize> = (0..delta.len()).collect();
    let dist = |k: usize| (delta[k] - disk.center).norm();
    order.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
    let count = match phi {
        PhiChoice::Auto => delta.iter().filter(|&&z| disk.contains(z)).count(),
        PhiChoice::Count(k) => k.min(delta.len()),
    };
    let mut selected: Vec<usize> = order[..count].to_vec();
    selected.sort_unstable();

    let mut offsets = Vec::with_capacity(vecs.len());
    let mut acc = 0;
    for r in &pp.block_ranges {
        offsets.push((r.start, acc));
        acc += r.len();
    }
    let mut v_phi = DenseMatrix::zeros(d, count);
    let mut vhat_phi = DenseMatrix::zeros(d, count);
    for (c, &k) in selected.iter().enumerate() {
        let blk = block_of[k];
        let (row0, first) = offsets[blk];
        let local = k - first;
        let (v, vh) = &vecs[blk];
        v_phi.col_mut(c)[row0..row0 + v.rows()].copy_from_slice(v.col(local));
        vhat_phi.col_mut(c)[row0..row0 + v.rows()].copy_from_slice(vh.col(local));
    }
    Ok(BlockEigen { delta, block_of, selected, v_phi, vhat_phi, phi: count })
}

/// `B~(zeta_c) = (I - V_phi Vhat_phi^H M_B) B(zeta_c)^{-1}`.
#[derive(Debug)]
pub struct DeflatedResolvent {
    pub eig: BlockEigen,
    pub center: C64,
    b_center: BlockDiagSolver,
    mb: SparseMatrix,
}

impl DeflatedResolvent {
    pub fn new(pp: &PartitionedPencil, eig: BlockEigen, center: C64) -> Result<Self> {
        let ord = BlockDiagSolver::orderings(pp);
        let b_center = BlockDiagSolver::factor(pp, center, 0, &ord).map_err(|e| match e {
            Error::PoleOnBlockSpectrum { block, .. } => Error::SingularMatrix { pivot: block },
            e => e,
        })?;
        Ok(DeflatedResolvent { eig, center, b_center, mb: pp.blocks.mb.clone() })
    }

    pub fn dim(&self) -> usize {
        self.b_center.dim()
    }

    /// `y - V_phi Vhat_phi^H M_B y`.
    fn project(&self, y: &mut [C64]) {
        if self.eig.phi == 0 {
            return;
        }
        let my = self.mb.spmv(y);
        let h = self.eig.vhat_phi.adjoint_matvec(&my);
        for (j, hj) in h.iter().enumerate() {
            for (yi, vi) in y.iter_mut().zip(self.eig.v_phi.col(j)) {
                *yi -= hj * vi;
            }
        }
    }

    fn apply_uncounted(&self, x: &[C64]) -> Vec<C64> {
        let mut y = x.to_vec();
        self.b_center.solve_in_place(&mut y);
        self.project(&mut y);
        y
    }

    /// `B~(zeta_c) x`; one interior solve.
    pub fn deflated_apply(&self, x: &[C64], ledger: &mut SolveLedger, phase: Phase) -> Vec<C64> {
        assert_eq!(x.len(), self.dim(), "interior vector length mismatch");
        ledger.record_b(phase, 1);
        self.apply_uncounted(x)
    }

    /// `B~ sum_{k=0}^{psi} [(lambda - zeta_c) M_B B~]^k x`; `psi + 1` interior solves.
    pub fn neumann_resolvent(&self, lambda: C64, psi: usize, x: &[C64], ledger: &mut SolveLedger, phase: Phase) -> Vec<C64> {
        let shift = lambda - self.center;
        let mut t = self.deflated_apply(x, ledger, phase);
        let mut acc = t.clone();
        for _ in 0..psi {
            let mt: Vec<C64> = self.mb.spmv(&t).into_iter().map(|v| v * shift).collect();
            t = self.deflated_apply(&mt, ledger, phase);
            for (a, v) in acc.iter_mut().zip(&t) {
                *a += v;
            }
        }
        acc
    }

    /// `[t_0, ..., t_psi]` with `t_0 = B~ x` and `t_k = B~ M_B t_{k-1}`.
    fn powers(&self, x: &[C64], psi: usize, ledger: &mut SolveLedger, phase: Phase) -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(psi + 1);
        out.push(self.deflated_apply(x, ledger, phase));
        for k in 0..psi {
            let mt = self.mb.spmv(&out[k]);
            out.push(self.deflated_apply(&mt, ledger, phase));
        }
        out
    }

    /// Prop.-style tail surrogate `sum_j |g_j|^{psi+1} / (|delta_j - zeta_c| (1 - |g_j|))`
    /// over non-deflated `delta_j`, `g_j = (lambda - zeta_c)/(delta_j - zeta_c)`;
    /// infinite when some `|g_j| >= 1`.
    pub fn truncation_bound(&self, lambda: C64, psi: usize) -> f64 {
        truncation_bound_for(&self.eig.remaining(), self.center, lambda, psi)
    }
}

/// Interior basis `orth[V_phi | B~ [M_B B~]^k F(zeta_c) G | B~ [M_B B~]^k M_F G]`,
/// `k = 0..=psi`, the last group only when `M_F != 0`.
pub fn build_w(
    dr: &DeflatedResolvent,
    g: &DenseMatrix,
    pp: &PartitionedPencil,
    psi: usize,
    ledger: &mut SolveLedger,
) -> Result<DenseMatrix> {
    let d = pp.d();
    if d == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    ledger.touch(Phase::WBasis);
    let mut cols: Vec<Vec<C64>> = dr.eig.v_phi.column_vecs();
    let fz = SparseMatrix::shifted(&pp.blocks.f, dr.center, &pp.blocks.mf);
    let mut groups = vec![fz.mul_dense(g)];
    if !pp.blocks.mf.is_zero() {
        groups.push(pp.blocks.mf.mul_dense(g));
    }
    for rhs in &groups {
        for j in 0..rhs.cols() {
            cols.extend(dr.powers(rhs.col(j), psi, ledger, Phase::WBasis));
        }
    }
    for c in cols.iter_mut() {
        let n = norm2(c);
        if n > 0.0 {
            c.iter_mut().for_each(|v| *v /= n);
        }
    }
    Ok(orthonormalize_or_empty(&DenseMatrix::from_columns(d, &cols)))
}

/// See [`DeflatedResolvent::truncation_bound`].
pub fn truncation_bound_for(remaining: &[C64], center: C64, lambda: C64, psi: usize) -> f64 {
    let mut s = 0.0;
    for &dj in remaining {
        let gap = (dj - center).norm();
        let g = (lambda - center).norm() / gap;
        if g >= 1.0 {
            return f64::INFINITY;
        }
        s += g.powi(psi as i32 + 1) / (gap * (1.0 - g));
    }
    s
}
