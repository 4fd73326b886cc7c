use std::fmt::Write as _;
use std::path::Path;

use super::SparseMatrix;
use crate::dense::DenseMatrix;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_matrix_market(&text)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses coordinate-format Matrix Market text. Symmetric, Hermitian and
/// skew-symmetric storage is expanded; duplicate coordinates are summed.
pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let tok: Vec<String> = banner.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tok.len() != 5 || tok[0] != "%%matrixmarket" || tok[1] != "matrix" {
        return Err(parse_err(1, "missing or malformed %%MatrixMarket banner"));
    }
    match tok[2].as_str() {
        "coordinate" => {}
        "array" => return Err(Error::UnsupportedFormat("array (dense) storage".into())),
        other => return Err(Error::UnsupportedFormat(other.to_string())),
    }
    let field = match tok[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(Error::UnsupportedFormat(format!("field '{other}'"))),
    };
    let symmetry = match tok[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(Error::UnsupportedFormat(format!("symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut entries = 0usize;
    for (ln, raw) in lines {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            if parts.len() != 3 {
                return Err(parse_err(ln, "expected 'rows cols nnz'"));
            }
            let p = |s: &str| s.parse::<usize>().map_err(|_| parse_err(ln, format!("bad size '{s}'")));
            let s = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
            triplets.reserve(if symmetry == Symmetry::General { s.2 } else { 2 * s.2 });
            size = Some(s);
            continue;
        };
        let want = match field {
            Field::Pattern => 2,
            Field::Complex => 4,
            _ => 3,
        };
        if parts.len() < want {
            return Err(parse_err(ln, format!("expected {want} fields, found {}", parts.len())));
        }
        let idx = |s: &str, lim: usize| -> Result<usize> {
            let v = s.parse::<usize>().map_err(|_| parse_err(ln, format!("bad index '{s}'")))?;
            if v == 0 || v > lim {
                return Err(parse_err(ln, format!("index {v} out of range 1..={lim}")));
            }
            Ok(v - 1)
        };
        let num = |s: &str| -> Result<f64> {
            let v = s.parse::<f64>().map_err(|_| parse_err(ln, format!("bad value '{s}'")))?;
            if !v.is_finite() {
                return Err(parse_err(ln, "non-finite value"));
            }
            Ok(v)
        };
        let i = idx(parts[0], rows)?;
        let j = idx(parts[1], cols)?;
        let v = match field {
            Field::Pattern => C64::new(1.0, 0.0),
            Field::Real | Field::Integer => C64::new(num(parts[2])?, 0.0),
            Field::Complex => C64::new(num(parts[2])?, num(parts[3])?),
        };
        triplets.push((i, j, v));
        entries += 1;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
                Symmetry::Skew => triplets.push((j, i, -v)),
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if entries != nnz {
        return Err(parse_err(0, format!("header declares {nnz} entries, found {entries}")));
    }
    SparseMatrix::from_triplets(rows, cols, &triplets)
}

/// Writes complex general coordinate format with 17 significant digits.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let mut s = String::with_capacity(64 + 50 * a.nnz());
    s.push_str("%%MatrixMarket matrix coordinate complex general\n");
    let _ = writeln!(s, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for j in 0..a.cols() {
        for (i, v) in a.col_iter(j) {
            let _ = writeln!(s, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re, v.im);
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Writes a dense block in Matrix Market array format (complex general).
pub fn write_dense_array(path: impl AsRef<Path>, x: &DenseMatrix) -> Result<()> {
    let mut s = String::with_capacity(64 + 50 * x.rows() * x.cols());
    s.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(s, "{} {}", x.rows(), x.cols());
    for v in x.as_slice() {
        let _ = writeln!(s, "{:.16e} {:.16e}", v.re, v.im);
    }
    std::fs::write(path, s)?;
    Ok(())
}
