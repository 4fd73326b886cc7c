//! End-to-end solvers.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::deflation::{block_eig, build_w, DeflatedResolvent, PhiChoice, DEFAULT_BLOCK_CAP};
use crate::dense::{orthonormalize_or_empty, random_normal_vec, svd, DenseMatrix};
use crate::filter::{trapezoidal_rule, Disk, QuadratureRule};
use crate::hrr::{extract, EigenReport, PartitionSummary, DEFAULT_SPURIOUS_TOL};
use crate::partition::PartitionedPencil;
use crate::range::{randomized_range, IncrementalRange, RangeFinderConfig, RangeFinderResult};
use crate::resolvent::{
    build_full_cache, build_schur_cache, with_pole_retry, FullResolventCache, Phase, SchurCache, SolveLedger,
};
use crate::sparse::SparsePencil;
use crate::{Error, Result, C64};

/// Largest interface size for which `S(zeta)` is formed densely.
pub const DEFAULT_SCHUR_CAP: usize = 4000;
/// Filter gain above which a subspace direction counts as inside the disk.
pub const SATURATED_GAIN: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub disk: Disk,
    /// Quadrature order `N`.
    pub n_poles: usize,
    /// Graph parts for the partitioned solvers.
    pub parts: usize,
    /// Neumann series truncation.
    pub psi: usize,
    pub phi: PhiChoice,
    pub range: RangeFinderConfig,
    pub spurious_tol: f64,
    /// Subspace dimension of the subspace iteration.
    pub rsi_m: usize,
    pub rsi_tol: f64,
    pub rsi_maxit: usize,
    /// Upper bound on pole-level worker threads.
    pub threads: usize,
    pub schur_cap: usize,
    pub block_cap: usize,
}

impl SolverConfig {
    pub fn new(disk: Disk) -> Self {
        SolverConfig {
            disk,
            n_poles: 16,
            parts: 8,
            psi: 1,
            phi: PhiChoice::Auto,
            range: RangeFinderConfig::default(),
            spurious_tol: DEFAULT_SPURIOUS_TOL,
            rsi_m: 32,
            rsi_tol: 1e-10,
            rsi_maxit: 50,
            threads: 1,
            schur_cap: DEFAULT_SCHUR_CAP,
            block_cap: DEFAULT_BLOCK_CAP,
        }
    }

    pub fn with_poles(mut self, n: usize) -> Self {
        self.n_poles = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.range.seed = seed;
        self
    }

    pub fn with_parts(mut self, p: usize) -> Self {
        self.parts = p;
        self
    }

    pub fn rule(&self) -> Result<QuadratureRule> {
        trapezoidal_rule(self.disk, self.n_poles)
    }

    pub fn validate(&self) -> Result<()> {
        self.range.validate()?;
        if !(self.spurious_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("spurious_tol {} must be positive", self.spurious_tol)));
        }
        Ok(())
    }
}

struct Timer(Vec<(&'static str, f64)>);

impl Timer {
    fn time<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let v = f();
        self.0.push((name, t.elapsed().as_secs_f64()));
        v
    }
}

fn full_cache(pencil: &SparsePencil, cfg: &SolverConfig, ledger: &mut SolveLedger) -> Result<FullResolventCache> {
    let rule = cfg.rule()?;
    let cache = with_pole_retry(&rule, |r| build_full_cache(pencil, r, cfg.threads))?;
    ledger.record_factorizations(Phase::Setup, cache.rule.order());
    Ok(cache)
}

fn schur_cache(pp: &PartitionedPencil, cfg: &SolverConfig, ledger: &mut SolveLedger) -> Result<SchurCache> {
    let rule = cfg.rule()?;
    let cache = with_pole_retry(&rule, |r| build_schur_cache(pp, r, cfg.schur_cap, cfg.threads))?;
    cache.record_setup(ledger);
    Ok(cache)
}

fn summary(pp: &PartitionedPencil) -> PartitionSummary {
    let p = &pp.partition;
    PartitionSummary {
        parts: p.parts(),
        interior_sizes: p.interior_sizes.clone(),
        interface_sizes: p.interface_sizes.clone(),
        d: p.d,
        s: p.s,
        edge_cut: p.edge_cut,
    }
}

fn partitioned(pencil: &SparsePencil, cfg: &SolverConfig) -> Result<PartitionedPencil> {
    let pp = PartitionedPencil::build(pencil, cfg.parts)?;
    if pp.s() == 0 {
        return Err(Error::NoInterface);
    }
    Ok(pp)
}

fn cap_warning(report: &mut EigenReport, what: &str, rf: &RangeFinderResult) {
    if !rf.converged {
        report.converged = false;
        report.warnings.push(format!("{what} range finder stopped at its iteration cap ({})", rf.iterations));
    }
}

fn to_original(pp: &PartitionedPencil, report: &mut EigenReport) {
    for p in report.accepted.iter_mut() {
        p.vector = pp.to_original(&p.vector);
    }
}

/// Range finder on the filtered full resolvent, then harmonic Rayleigh-Ritz.
pub fn algorithm2(pencil: &SparsePencil, cfg: &SolverConfig) -> Result<EigenReport> {
    cfg.validate()?;
    let mut ledger = SolveLedger::new();
    let mut timer = Timer(Vec::new());
    let cache = timer.time("setup", || full_cache(pencil, cfg, &mut ledger))?;
    let rf = timer.time("range_finder", || {
        randomized_range(
            |x| {
                let r = DenseMatrix::from_columns(x.len(), &[x.to_vec()]);
                cache.apply_filter(&r, &mut ledger, Phase::RangeFinder).into_vec()
            },
            pencil.n,
            &cfg.range,
        )
    })?;
    let mut report = timer.time("extraction", || extract(pencil, &cfg.disk, &rf.basis, cfg.spurious_tol))?;
    report.iterations.push(("range_finder", rf.iterations));
    cap_warning(&mut report, "filtered operator", &rf);
    report.ledger = ledger;
    report.timings = timer.0;
    Ok(report)
}

/// Randomized ranges of the Schur-complement filter (`G`) and of the
/// interior coupling filter (`W`) from shared interface solves, then
/// extraction on `blkdiag(W, G)`.
pub fn algorithm3(pencil: &SparsePencil, cfg: &SolverConfig) -> Result<EigenReport> {
    cfg.validate()?;
    let mut ledger = SolveLedger::new();
    let mut timer = Timer(Vec::new());
    let pp = timer.time("partition", || partitioned(pencil, cfg))?;
    let cache = timer.time("setup", || schur_cache(&pp, cfg, &mut ledger))?;
    let (d, s) = (pp.d(), pp.s());

    let (g, w, iterations) = timer.time("range_finder", || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.range.seed);
        let mut gb = IncrementalRange::new(s, &cfg.range);
        let mut wb = IncrementalRange::new(s, &cfg.range);
        let mut it = 0;
        while !(gb.is_done() && wb.is_done()) {
            let r = DenseMatrix::from_columns(s, &[random_normal_vec(s, &mut rng)]);
            let (ys, xd) = cache.apply_joint(&r, &mut ledger, Phase::RangeFinder);
            it += 1;
            if !gb.is_done() {
                gb.push(ys.col(0));
            }
            if !wb.is_done() {
                wb.push(if d > 0 { xd.col(0) } else { &[] });
            }
        }
        (gb.finish(), wb.finish(), it)
    });
    let z = g_w_basis(d, &w.basis, &g.basis);
    let mut report = timer.time("extraction", || extract(&pp.pencil, &cfg.disk, &z, cfg.spurious_tol))?;
    to_original(&pp, &mut report);
    report.iterations.push(("range_finder", iterations));
    report.iterations.push(("g_columns", g.basis.cols()));
    report.iterations.push(("w_columns", if d > 0 { w.basis.cols() } else { 0 }));
    cap_warning(&mut report, "Schur complement", &g);
    if d > 0 {
        cap_warning(&mut report, "coupling", &w);
    }
    report.ledger = ledger;
    report.timings = timer.0;
    report.partition = Some(summary(&pp));
    Ok(report)
}

fn g_w_basis(d: usize, w: &DenseMatrix, g: &DenseMatrix) -> DenseMatrix {
    let w = if w.rows() == d { w.clone() } else { DenseMatrix::zeros(d, 0) };
    w.block_diag(g)
}

/// The expensive part of the deflated solver, kept so that the series
/// truncation and the deflation count can be varied without new
/// interface solves.
pub struct Algorithm4Session {
    pub pp: PartitionedPencil,
    pub g: RangeFinderResult,
    pub ledger: SolveLedger,
    cfg: SolverConfig,
    timings: Vec<(&'static str, f64)>,
}

impl Algorithm4Session {
    pub fn new(pencil: &SparsePencil, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let mut ledger = SolveLedger::new();
        let mut timer = Timer(Vec::new());
        let pp = timer.time("partition", || partitioned(pencil, cfg))?;
        let cache = timer.time("setup", || schur_cache(&pp, cfg, &mut ledger))?;
        let s = pp.s();
        let g = timer.time("range_finder", || {
            randomized_range(
                |x| {
                    let r = DenseMatrix::from_columns(s, &[x.to_vec()]);
                    cache.apply_schur_filter(&r, &mut ledger, Phase::RangeFinder).into_vec()
                },
                s,
                &cfg.range,
            )
        })?;
        Ok(Algorithm4Session { pp, g, ledger, cfg: cfg.clone(), timings: timer.0 })
    }

    /// Builds the deflated interior basis for `(psi, phi)` and extracts.
    pub fn extract(&self, psi: usize, phi: PhiChoice) -> Result<EigenReport> {
        let mut ledger = self.ledger.clone();
        let mut timer = Timer(self.timings.clone());
        let disk = self.cfg.disk;
        let eig = timer.time("block_eig", || block_eig(&self.pp, &disk, phi, self.cfg.block_cap))?;
        ledger.touch(Phase::BlockEig);
        let phi_used = eig.phi;
        let d = self.pp.d();
        let w = if d > 0 {
            let dr = DeflatedResolvent::new(&self.pp, eig, disk.center)?;
            ledger.record_factorizations(Phase::Setup, self.pp.b_blocks.len());
            timer.time("w_basis", || build_w(&dr, &self.g.basis, &self.pp, psi, &mut ledger))?
        } else {
            DenseMatrix::zeros(0, 0)
        };
        let z = g_w_basis(d, &w, &self.g.basis);
        let mut report = timer.time("extraction", || extract(&self.pp.pencil, &disk, &z, self.cfg.spurious_tol))?;
        to_original(&self.pp, &mut report);
        report.iterations.push(("range_finder", self.g.iterations));
        report.iterations.push(("g_columns", self.g.basis.cols()));
        report.iterations.push(("w_columns", w.cols()));
        report.iterations.push(("phi", phi_used));
        report.iterations.push(("psi", psi));
        cap_warning(&mut report, "Schur complement", &self.g);
        report.ledger = ledger;
        report.timings = timer.0;
        report.partition = Some(summary(&self.pp));
        Ok(report)
    }
}

/// Schur-complement range plus a deflated Neumann-series interior basis.
pub fn algorithm4(pencil: &SparsePencil, cfg: &SolverConfig) -> Result<EigenReport> {
    Algorithm4Session::new(pencil, cfg)?.extract(cfg.psi, cfg.phi)
}

/// Subspace iteration with the filtered operator, extracting after every
/// sweep. `initial` columns (e.g. earlier Ritz vectors) are padded with
/// random vectors up to `rsi_m`.
pub fn rsi(pencil: &SparsePencil, cfg: &SolverConfig, initial: Option<&DenseMatrix>) -> Result<EigenReport> {
    cfg.validate()?;
    if cfg.rsi_m == 0 {
        return Err(Error::InvalidConfig("rsi_m must be at least 1".into()));
    }
    let n = pencil.n;
    let m = cfg.rsi_m.min(n);
    let mut ledger = SolveLedger::new();
    let mut timer = Timer(Vec::new());
    let cache = timer.time("setup", || full_cache(pencil, cfg, &mut ledger))?;
    ledger.touch(Phase::Rsi);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.range.seed);
    let mut cols: Vec<Vec<C64>> = match initial {
        Some(x) => {
            if x.rows() != n {
                return Err(Error::DimensionMismatch(format!("initial basis has {} rows for n = {n}", x.rows())));
            }
            x.column_vecs().into_iter().take(m).collect()
        }
        None => Vec::new(),
    };
    while cols.len() < m {
        cols.push(random_normal_vec(n, &mut rng));
    }
    let mut basis = orthonormalize_or_empty(&DenseMatrix::from_columns(n, &cols));

    let start = Instant::now();
    let mut history = Vec::new();
    let mut sweeps = 0;
    // smallest gain of the filter on the current subspace
    let mut retained = 0.0;
    let mut done;
    let mut report;
    loop {
        report = extract(pencil, &cfg.disk, &basis, cfg.spurious_tol)?;
        let worst = if report.accepted.is_empty() { f64::INFINITY } else { report.max_residual() };
        history.push(worst);
        // an in-disk pair still above the purge threshold means some
        // direction has not converged yet
        done = report.spurious == 0 && worst <= cfg.rsi_tol;
        if done || sweeps >= cfg.rsi_maxit {
            break;
        }
        let next = cache.apply_filter(&basis, &mut ledger, Phase::Rsi);
        retained = svd(&next, false)?.singular_values.last().copied().unwrap_or(0.0);
        basis = orthonormalize_or_empty(&next);
        sweeps += 1;
        if basis.cols() == 0 {
            report = extract(pencil, &cfg.disk, &basis, cfg.spurious_tol)?;
            history.push(f64::INFINITY);
            break;
        }
    }
    timer.0.push(("rsi", start.elapsed().as_secs_f64()));
    report.converged = done;
    if !report.converged {
        report.warnings.push(format!("subspace iteration did not reach {:e} in {sweeps} sweeps", cfg.rsi_tol));
    }
    // the filter keeps every direction: all of them belong to the disk
    if report.accepted.len() >= m || retained >= SATURATED_GAIN {
        report.warnings.push(format!(
            "all {m} subspace directions lie in the disk; the subspace dimension may be too small"
        ));
    }
    report.iterations.push(("rsi", sweeps));
    report.residual_history = history;
    report.ledger = ledger;
    report.timings = timer.0;
    Ok(report)
}

/// Smallest circle containing every point (Welzl, iterative form).
pub fn minimal_enclosing_circle(points: &[C64]) -> (C64, f64) {
    fn circle2(a: C64, b: C64) -> (C64, f64) {
        let c = (a + b) * 0.5;
        (c, (a - c).norm())
    }
    fn circle3(a: C64, b: C64, c: C64) -> Option<(C64, f64)> {
        let (bx, by) = (b.re - a.re, b.im - a.im);
        let (cx, cy) = (c.re - a.re, c.im - a.im);
        let d = 2.0 * (bx * cy - by * cx);
        if d.abs() < 1e-300 {
            return None;
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        let center = C64::new(a.re + ux, a.im + uy);
        Some((center, (center - a).norm()))
    }
    let inside = |c: &(C64, f64), p: C64| (p - c.0).norm() <= c.1 * (1.0 + 1e-12) + 1e-300;
    if points.is_empty() {
        return (C64::new(0.0, 0.0), 0.0);
    }
    // deterministic shuffle keeps the expected linear running time
    let mut pts = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    use rand::seq::SliceRandom;
    pts.shuffle(&mut rng);
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(&c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(&c, pts[j]) {
                continue;
            }
            c = circle2(pts[i], pts[j]);
            for k in 0..j {
                if inside(&c, pts[k]) {
                    continue;
                }
                c = circle3(pts[i], pts[j], pts[k]).unwrap_or_else(|| {
                    // collinear: the widest pair
                    let cands = [circle2(pts[i], pts[j]), circle2(pts[i], pts[k]), circle2(pts[j], pts[k])];
                    cands.into_iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap()
                });
            }
        }
    }
    c
}

/// Disk enclosing the `count` eigenvalues of smallest modulus: the minimal
/// enclosing circle of those values with its radius enlarged by 0.1%.
pub fn disk_for_smallest(eigenvalues: &[C64], count: usize) -> Result<Disk> {
    if count == 0 || count > eigenvalues.len() {
        return Err(Error::InvalidConfig(format!("cannot enclose {count} of {} eigenvalues", eigenvalues.len())));
    }
    let mut v = eigenvalues.to_vec();
    v.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let (c, r) = minimal_enclosing_circle(&v[..count]);
    let r = if r > 0.0 { r } else { 1e-8 * (1.0 + c.norm()) };
    Disk::new(c, 1.001 * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosing_circle_cases() {
        let (c, r) = minimal_enclosing_circle(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.5)]);
        assert!(c.norm() < 1e-15 && (r - 1.0).abs() < 1e-15);
        let tri = [C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 3f64.sqrt())];
        let (c, r) = minimal_enclosing_circle(&tri);
        assert!((c - C64::new(1.0, 1.0 / 3f64.sqrt())).norm() < 1e-14);
        assert!((r - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        let d = disk_for_smallest(&[C64::new(0.5, 0.0), C64::new(-0.5, 0.0), C64::new(9.0, 0.0)], 2).unwrap();
        assert!((d.radius - 0.5005).abs() < 1e-15);
    }
}
