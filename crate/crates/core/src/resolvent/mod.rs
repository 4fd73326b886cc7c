//! Filtered resolvent operators and the linear-solve ledger.

mod full;
mod schur;

pub use full::{build_full_cache, FullResolventCache};
pub use schur::{build_schur_cache, BlockDiagSolver, SchurCache, DENSE_BLOCK_CROSSOVER};

use crate::filter::QuadratureRule;
use crate::{Error, Result};

/// Algorithm phase a solve is charged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// Factorizations and the explicit Schur complement columns.
    Setup,
    /// Operator applications inside the range finder.
    RangeFinder,
    /// Neumann-series columns of the deflated interior basis.
    WBasis,
    /// Dense eigendecomposition of the interior blocks (no solves).
    BlockEig,
    /// Subspace iteration sweeps.
    Rsi,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Setup => "setup",
            Phase::RangeFinder => "range_finder",
            Phase::WBasis => "w_basis",
            Phase::BlockEig => "block_eig",
            Phase::Rsi => "rsi",
        }
    }
}

/// Tallies for one phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCounts {
    /// Solves with the full shifted matrix `A - zeta M`.
    pub full_solves: usize,
    /// Solves with the interior block `B(zeta)`; a full solve counts two.
    pub b_solves: usize,
    /// Solves with the Schur complement `S(zeta)`; a full solve counts one.
    pub s_solves: usize,
    /// Sparse or dense factorizations performed.
    pub factorizations: usize,
}

impl PhaseCounts {
    fn add(&mut self, o: &PhaseCounts) {
        self.full_solves += o.full_solves;
        self.b_solves += o.b_solves;
        self.s_solves += o.s_solves;
        self.factorizations += o.factorizations;
    }
}

/// Exact counts of linear solves, keyed by phase in order of first use.
///
/// A solve with `A - zeta M` is decomposed through the 2×2 block
/// factorization into two interior solves and one interface solve, so
/// `record_full(k)` adds `k` full, `2k` B-type and `k` S-type solves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveLedger {
    entries: Vec<(Phase, PhaseCounts)>,
}

impl SolveLedger {
    pub fn new() -> Self {
        Self::default()
    }

    fn entry(&mut self, phase: Phase) -> &mut PhaseCounts {
        if let Some(i) = self.entries.iter().position(|(p, _)| *p == phase) {
            return &mut self.entries[i].1;
        }
        self.entries.push((phase, PhaseCounts::default()));
        &mut self.entries.last_mut().unwrap().1
    }

    pub fn touch(&mut self, phase: Phase) {
        self.entry(phase);
    }

    pub fn record_full(&mut self, phase: Phase, k: usize) {
        let e = self.entry(phase);
        e.full_solves += k;
        e.b_solves += 2 * k;
        e.s_solves += k;
    }

    pub fn record_b(&mut self, phase: Phase, k: usize) {
        self.entry(phase).b_solves += k;
    }

    pub fn record_s(&mut self, phase: Phase, k: usize) {
        self.entry(phase).s_solves += k;
    }

    pub fn record_factorizations(&mut self, phase: Phase, k: usize) {
        self.entry(phase).factorizations += k;
    }

    pub fn merge(&mut self, other: &SolveLedger) {
        for (p, c) in &other.entries {
            self.entry(*p).add(c);
        }
    }

    pub fn get(&self, phase: Phase) -> PhaseCounts {
        self.entries.iter().find(|(p, _)| *p == phase).map(|e| e.1).unwrap_or_default()
    }

    pub fn phases(&self) -> &[(Phase, PhaseCounts)] {
        &self.entries
    }

    pub fn total(&self) -> PhaseCounts {
        let mut t = PhaseCounts::default();
        for (_, c) in &self.entries {
            t.add(c);
        }
        t
    }

    /// Totals over every phase except [`Phase::Setup`].
    pub fn total_excluding_setup(&self) -> PhaseCounts {
        let mut t = PhaseCounts::default();
        for (p, c) in &self.entries {
            if *p != Phase::Setup {
                t.add(c);
            }
        }
        t
    }
}

/// Maximum number of phase rotations tried when a pole hits the spectrum.
pub const POLE_RETRIES: usize = 3;

/// Runs `build`, rotating the quadrature phases by `pi/(4N)` after a pole
/// collision, at most [`POLE_RETRIES`] times.
pub fn with_pole_retry<T>(rule: &QuadratureRule, mut build: impl FnMut(&QuadratureRule) -> Result<T>) -> Result<T> {
    let mut r = rule.clone();
    let mut attempt = 0;
    loop {
        match build(&r) {
            Err(Error::PoleOnSpectrum(_) | Error::PoleOnBlockSpectrum { .. }) if attempt < POLE_RETRIES => {
                attempt += 1;
                r = r.rotated();
            }
            other => return other,
        }
    }
}

/// `f(0..n)` on up to `threads` scoped threads, results in index order.
pub(crate) fn par_map<T: Send>(threads: usize, n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let f = &f;
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunk = n.div_ceil(threads);
        for (t, slot) in out.chunks_mut(chunk).enumerate() {
            scope.spawn(move || {
                for (k, s) in slot.iter_mut().enumerate() {
                    *s = Some(f(t * chunk + k));
                }
            });
        }
    });
    out.into_iter().map(|v| v.expect("worker filled its slot")).collect()
}
