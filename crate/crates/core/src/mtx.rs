//! Matrix Market coordinate files and permutation files.
//!
//! The reader accepts `real`, `integer` and `pattern` fields with `symmetric`
//! or `general` symmetry. `general` inputs go through [`symmetrize`]. The
//! writer always emits `symmetric real`, lower triangle plus diagonal, with
//! shortest round-trip float formatting so save/load is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::{csr_from_coo, symmetrize, CooEntries, LinearArrangement, SparseSymMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Replace every value by 1.0 after reading (and after symmetrizing).
    pub pattern_only: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    Symmetric,
    General,
}

pub fn read_matrix_market(path: impl AsRef<Path>, opts: ReadOptions) -> Result<SparseSymMatrix> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(BufReader::new(file), path, opts)
}

pub fn parse_matrix_market(
    reader: impl BufRead,
    path: &Path,
    opts: ReadOptions,
) -> Result<SparseSymMatrix> {
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("bad header: {header}")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(1, format!("unsupported format {}", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "pattern" => Field::Pattern,
        other => return Err(err(1, format!("unsupported field {other}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "symmetric" => Symmetry::Symmetric,
        "general" => Symmetry::General,
        other => return Err(err(1, format!("unsupported symmetry {other}"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut coo = CooEntries::default();
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let Some((n, expected)) = size else {
            if parts.len() != 3 {
                return Err(err(lineno, format!("bad size line: {t}")));
            }
            let nums: Vec<usize> = parts
                .iter()
                .map(|p| p.parse().map_err(|_| err(lineno, format!("bad integer {p}"))))
                .collect::<Result<_>>()?;
            if nums[0] != nums[1] {
                return Err(err(lineno, format!("matrix is not square: {}x{}", nums[0], nums[1])));
            }
            size = Some((nums[0], nums[2]));
            coo = CooEntries::new(nums[0]);
            coo.triples.reserve(2 * nums[2]);
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if parts.len() < want {
            return Err(err(lineno, format!("expected {want} fields: {t}")));
        }
        let index = |s: &str| -> Result<usize> {
            let i: usize = s.parse().map_err(|_| err(lineno, format!("bad index {s}")))?;
            if i == 0 || i > n {
                return Err(err(lineno, format!("index {i} out of range 1..={n}")));
            }
            Ok(i - 1)
        };
        let (i, j) = (index(parts[0])?, index(parts[1])?);
        let v = match field {
            Field::Pattern => 1.0,
            Field::Real => {
                parts[2].parse::<f64>().map_err(|_| err(lineno, format!("bad value {}", parts[2])))?
            }
        };
        match symmetry {
            Symmetry::Symmetric => coo.push_sym(i, j, v),
            Symmetry::General => coo.push(i, j, v),
        }
        seen += 1;
        if seen > expected {
            return Err(err(lineno, format!("more than the declared {expected} entries")));
        }
    }
    let Some((_, expected)) = size else {
        return Err(err(1, "missing size line".into()));
    };
    if seen != expected {
        return Err(err(0, format!("declared {expected} entries, found {seen}")));
    }
    let mut a = csr_from_coo(&coo)?;
    if symmetry == Symmetry::General {
        a = symmetrize(&a);
    }
    if opts.pattern_only {
        a = a.to_pattern();
    }
    Ok(a)
}

/// Serializes a symmetric matrix as `symmetric real`, lower triangle plus
/// diagonal, 1-indexed.
pub fn format_matrix_market(a: &SparseSymMatrix) -> Result<String> {
    if !a.is_symmetric() {
        return Err(Error::InvalidArgument("writer requires a symmetric matrix".into()));
    }
    let lower: Vec<(usize, usize, f64)> = a.entries().filter(|&(i, j, _)| j <= i).collect();
    let mut out = String::with_capacity(32 * lower.len() + 64);
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{} {} {}", a.n(), a.n(), lower.len());
    for (i, j, v) in lower {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    Ok(out)
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseSymMatrix) -> Result<()> {
    let path = path.as_ref();
    let text = format_matrix_market(a)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `n=<count>` followed by one 0-indexed forward position per line.
pub fn write_permutation(path: impl AsRef<Path>, pi: &LinearArrangement) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "n={}", pi.len()).map_err(io)?;
    for &p in pi.forward() {
        writeln!(w, "{p}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_permutation(path: impl AsRef<Path>) -> Result<LinearArrangement> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err(1, "empty permutation file".into()))?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(1, format!("bad header {header}")))?;
    let forward: Vec<usize> = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.trim().parse().map_err(|_| err(i + 2, format!("bad entry {l}"))))
        .collect::<Result<_>>()?;
    if forward.len() != n {
        return Err(err(0, format!("header says n={n}, found {} entries", forward.len())));
    }
    LinearArrangement::from_forward(forward)
}
