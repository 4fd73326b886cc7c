//! Machine-readable run reports: `report.json`, `eigenvalues.csv` and
//! optional eigenvector dumps.

use std::fmt::Write as _;
use std::path::Path;

use diskeig_core::dense::DenseMatrix;
use diskeig_core::hrr::EigenReport;
use diskeig_core::resolvent::PhaseCounts;
use diskeig_core::sparse::write_dense_array;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// Floats that may be infinite or NaN, written as `"inf"`, `"-inf"` or
/// `"nan"` since JSON has no such numbers.
mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(|_| serde::de::Error::custom(format!("bad float {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub a: Option<String>,
    pub m: Option<String>,
    pub center: Option<[f64; 2]>,
    #[serde(with = "lenient_f64")]
    pub radius: f64,
    pub algorithm: String,
    pub n_poles: usize,
    pub parts: usize,
    pub psi: usize,
    pub phi: String,
    #[serde(with = "lenient_f64")]
    pub rf_tol: f64,
    pub rf_maxit: usize,
    pub seed: u64,
    #[serde(with = "lenient_f64")]
    pub spurious_tol: f64,
    pub rsi_m: usize,
    #[serde(with = "lenient_f64")]
    pub rsi_tol: f64,
    pub rsi_maxit: usize,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub phase: String,
    pub full_solves: usize,
    pub b_solves: usize,
    pub s_solves: usize,
    pub factorizations: usize,
}

impl LedgerEntry {
    fn new(phase: &str, c: &PhaseCounts) -> Self {
        LedgerEntry {
            phase: phase.to_string(),
            full_solves: c.full_solves,
            b_solves: c.b_solves,
            s_solves: c.s_solves,
            factorizations: c.factorizations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub name: String,
    pub value: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub phase: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub parts: usize,
    pub interior_sizes: Vec<usize>,
    pub interface_sizes: Vec<usize>,
    pub d: usize,
    pub s: usize,
    pub edge_cut: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema: u32,
    pub config: ConfigEcho,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub n: Option<usize>,
    pub accepted: Vec<Eigenvalue>,
    pub spurious: usize,
    pub outside: usize,
    pub infinite: usize,
    pub basis_dim: usize,
    pub converged: bool,
    pub iterations: Vec<Count>,
    pub ledger: Vec<LedgerEntry>,
    pub ledger_total: LedgerEntry,
    pub ledger_total_excluding_setup: LedgerEntry,
    pub timings: Vec<Timing>,
    pub partition: Option<PartitionJson>,
    /// `None` stands for a sweep with nothing accepted.
    pub residual_history: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

impl JsonReport {
    pub fn new(config: ConfigEcho) -> Self {
        JsonReport { schema: SCHEMA, config, ..Default::default() }
    }

    pub fn fill(&mut self, r: &EigenReport) {
        self.accepted = r
            .accepted
            .iter()
            .map(|p| Eigenvalue { re: p.value.re, im: p.value.im, residual: p.residual })
            .collect();
        self.spurious = r.spurious;
        self.outside = r.outside;
        self.infinite = r.infinite;
        self.basis_dim = r.basis_dim;
        self.converged = r.converged;
        self.iterations = r.iterations.iter().map(|(n, v)| Count { name: n.to_string(), value: *v }).collect();
        self.ledger = r.ledger.phases().iter().map(|(p, c)| LedgerEntry::new(p.as_str(), c)).collect();
        self.ledger_total = LedgerEntry::new("total", &r.ledger.total());
        self.ledger_total_excluding_setup = LedgerEntry::new("total_excluding_setup", &r.ledger.total_excluding_setup());
        self.timings = r.timings.iter().map(|(p, s)| Timing { phase: p.to_string(), seconds: *s }).collect();
        self.partition = r.partition.as_ref().map(|p| PartitionJson {
            parts: p.parts,
            interior_sizes: p.interior_sizes.clone(),
            interface_sizes: p.interface_sizes.clone(),
            d: p.d,
            s: p.s,
            edge_cut: p.edge_cut,
        });
        self.residual_history = r.residual_history.iter().map(|&h| h.is_finite().then_some(h)).collect();
        self.warnings = r.warnings.clone();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub const CSV_HEADER: &str = "re(theta),im(theta),residual";

pub fn eigenvalues_csv(r: &EigenReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in &r.accepted {
        let _ = writeln!(s, "{:.17e},{:.17e},{:.17e}", p.value.re, p.value.im, p.residual);
    }
    s
}

/// Writes `report.json`, and `eigenvalues.csv` plus `vectors/vectors.mtx`
/// when a solve result is present.
pub fn emit(dir: &Path, json: &JsonReport, result: Option<&EigenReport>, vectors: bool) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), json.to_json())?;
    let Some(r) = result else { return Ok(()) };
    std::fs::write(dir.join("eigenvalues.csv"), eigenvalues_csv(r))?;
    if vectors {
        let vdir = dir.join("vectors");
        std::fs::create_dir_all(&vdir)?;
        let n = json.n.unwrap_or(0);
        let cols: Vec<_> = r.accepted.iter().map(|p| p.vector.clone()).collect();
        write_dense_array(vdir.join("vectors.mtx"), &DenseMatrix::from_columns(n, &cols))
            .map_err(|e| std::io::Error::other(e.to_string()))?;
    }
    Ok(())
}
