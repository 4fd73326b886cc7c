use std::path::{Path, PathBuf};

use diskeig_cli::report::{JsonReport, CSV_HEADER};
use diskeig_cli::{run, run_solver, Algorithm, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};
use diskeig_core::drivers::SolverConfig;
use diskeig_core::filter::Disk;
use diskeig_core::sparse::{read_matrix_market, write_matrix_market, SparseMatrix, SparsePencil};
use diskeig_core::C64;

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("diskeig").chain(args.iter().copied()))
}

fn synth(dir: &Path) -> PathBuf {
    let p = dir.join("pencil");
    assert_eq!(cli(&["synth", "--out", p.to_str().unwrap(), "--blocks", "5", "--block-size", "12", "--inside", "5", "--mass", "diagonal"]), EXIT_OK);
    p
}

fn solve(pencil: &Path, out: &Path, extra: &[&str]) -> i32 {
    let a = pencil.join("A.mtx");
    let m = pencil.join("M.mtx");
    let mut args = vec!["solve", "--a", a.to_str().unwrap(), "--m", m.to_str().unwrap(), "--parts", "4", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    cli(&args)
}

fn report(out: &Path) -> JsonReport {
    JsonReport::from_json(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn solve_writes_consistent_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path());
    let spectrum = std::fs::read_to_string(p.join("spectrum.csv")).unwrap();
    let inside = spectrum.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(inside, 5);
    let pencil = SparsePencil::new(read_matrix_market(p.join("A.mtx")).unwrap(), read_matrix_market(p.join("M.mtx")).unwrap()).unwrap();
    for (alg, name) in [(Algorithm::Alg2, "alg2"), (Algorithm::Alg3, "alg3"), (Algorithm::Alg4, "alg4"), (Algorithm::Rsi, "rsi")] {
        let out = dir.path().join(name);
        assert_eq!(solve(&p, &out, &["--alg", name, "--rsi-m", "10", "--psi", "3", "--vectors"]), EXIT_OK);
        let r = report(&out);
        assert_eq!((r.schema, r.error.as_deref(), r.accepted.len()), (1, None, 5), "{name}");
        let csv = std::fs::read_to_string(out.join("eigenvalues.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 5);
        assert!(out.join("vectors/vectors.mtx").exists());

        // the same run in memory
        let mut cfg = SolverConfig::new(Disk::unit()).with_parts(4);
        cfg.rsi_m = 10;
        cfg.psi = 3;
        let mem = run_solver(alg, &pencil, &cfg).unwrap();
        let t = mem.ledger.total();
        let j = &r.ledger_total;
        assert_eq!((j.full_solves, j.b_solves, j.s_solves, j.factorizations), (t.full_solves, t.b_solves, t.s_solves, t.factorizations));
        let phases: Vec<&str> = r.ledger.iter().map(|e| e.phase.as_str()).collect();
        let want: Vec<&str> = mem.ledger.phases().iter().map(|(p, _)| p.as_str()).collect();
        assert_eq!(phases, want);
        for (a, b) in r.accepted.iter().zip(&mem.accepted) {
            assert_eq!((a.re, a.im, a.residual), (b.value.re, b.value.im, b.residual));
        }
    }
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path());
    let out = dir.path().join("o");
    assert_eq!(solve(&p, &out, &["--alg", "rsi", "--rsi-m", "4", "--rsi-maxit", "2", "--spurious-tol", "inf"]), EXIT_OK);
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    let r = JsonReport::from_json(&text).unwrap();
    assert_eq!(r.to_json(), text);
    assert_eq!(JsonReport::from_json(&r.to_json()).unwrap(), r);
    assert!(r.config.spurious_tol.is_infinite());
}

#[test]
fn empty_disk_gives_empty_array() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path());
    let out = dir.path().join("o");
    assert_eq!(solve(&p, &out, &["--alg", "alg2", "--center", "0,1.6", "--radius", "0.05"]), EXIT_OK);
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["accepted"], serde_json::json!([]));
    assert_eq!(std::fs::read_to_string(out.join("eigenvalues.csv")).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn identical_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path());
    for alg in ["alg2", "alg3", "alg4", "rsi"] {
        let (x, y) = (dir.path().join(format!("{alg}-1")), dir.path().join(format!("{alg}-2")));
        for o in [&x, &y] {
            assert_eq!(solve(&p, o, &["--alg", alg, "--seed", "7", "--rsi-m", "10"]), EXIT_OK);
        }
        let a = std::fs::read(x.join("eigenvalues.csv")).unwrap();
        assert_eq!(a, std::fs::read(y.join("eigenvalues.csv")).unwrap(), "{alg}");
    }
}

#[test]
fn missing_mass_is_noted() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path());
    let out = dir.path().join("o");
    let a = p.join("A.mtx");
    assert_eq!(cli(&["solve", "--a", a.to_str().unwrap(), "--alg", "alg2", "--out", out.to_str().unwrap()]), EXIT_OK);
    let r = report(&out);
    assert!(r.config.m.is_none());
    assert!(r.notes.iter().any(|n| n.contains("M = I")));
}

#[test]
fn error_paths() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path());
    let out = dir.path().join("bad-radius");
    assert_eq!(solve(&p, &out, &["--radius", "-1"]), EXIT_CONFIG);
    assert!(report(&out).error.unwrap().contains("radius"));

    let out = dir.path().join("bad-poles");
    assert_eq!(solve(&p, &out, &["--n-poles", "1"]), EXIT_CONFIG);
    assert!(report(&out).error.is_some());

    let out = dir.path().join("missing");
    let missing = dir.path().join("nope.mtx");
    assert_eq!(cli(&["solve", "--a", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_CONFIG);
    assert!(report(&out).error.is_some());

    // a diagonal pencil has no interface variables
    let diag = dir.path().join("diag.mtx");
    let d: Vec<C64> = (0..40).map(|k| C64::new(0.1 * k as f64, 0.0)).collect();
    write_matrix_market(&diag, &SparseMatrix::from_diag(&d)).unwrap();
    let out = dir.path().join("numerical");
    assert_eq!(cli(&["solve", "--a", diag.to_str().unwrap(), "--alg", "alg3", "--parts", "4", "--out", out.to_str().unwrap()]), EXIT_NUMERICAL);
    let r = report(&out);
    assert!(r.error.unwrap().contains("interface"));
    assert!(r.accepted.is_empty());

    assert_eq!(cli(&["solve", "--bogus"]), EXIT_CONFIG);
    assert_eq!(cli(&["solve", "--a", "x.mtx", "--alg", "alg9"]), EXIT_CONFIG);
    assert_eq!(cli(&["--help"]), EXIT_OK);
}

#[test]
fn filter_grid_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.tsv");
    let code = cli(&["filter-grid", "--n", "16", "--center", "0,0", "--radius", "1", "--box", "-2,2,-2,2", "--res", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# N=16 center=0,0 radius=1"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split('\t').map(|t| t.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200 * 200);
    assert!(rows.iter().all(|r| r.len() == 3 && r[2] >= 0.0));
    assert_eq!(cli(&["filter-grid", "--n", "1"]), EXIT_CONFIG);
}
