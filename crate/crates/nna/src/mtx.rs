//! Matrix Market exchange format, `coordinate real` flavour.
//!
//! `general` and `symmetric` files are read; symmetric ones are expanded to full
//! storage by mirroring every off-diagonal entry. Indices are 1-based on disk.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nna_core::{DenseVector, SparseMatrix};

use crate::error::{IoError, Result};

const BANNER: &str = "%%matrixmarket";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn header(line: &str) -> Result<(String, Symmetry)> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != BANNER || words[1] != "matrix" {
        return Err(IoError::parse(1, "expected a %%MatrixMarket matrix header"));
    }
    let (format, field, symmetry) = (&words[2], &words[3], &words[4]);
    if field != "real" && field != "double" && field != "integer" {
        return Err(IoError::UnsupportedFormat(format!("{format} {field} {symmetry}")));
    }
    let symmetry = match symmetry.as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        _ => return Err(IoError::UnsupportedFormat(format!("{format} {field} {symmetry}"))),
    };
    Ok((format.clone(), symmetry))
}

/// Non-comment lines with their 1-based line numbers.
fn data_lines(lines: &[String]) -> impl Iterator<Item = (usize, &str)> {
    lines
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| IoError::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| IoError::parse(line, format!("invalid {what}")))
}

fn read_lines<R: Read>(reader: R) -> Result<Vec<String>> {
    Ok(BufReader::new(reader).lines().collect::<std::io::Result<_>>()?)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    parse_matrix_market(File::open(path)?)
}

pub fn parse_matrix_market<R: Read>(reader: R) -> Result<SparseMatrix> {
    let lines = read_lines(reader)?;
    let first = lines.first().ok_or_else(|| IoError::parse(1, "empty file"))?;
    let (format, symmetry) = header(first)?;
    if format != "coordinate" {
        return Err(IoError::UnsupportedFormat(format!(
            "{format} (only coordinate matrices)"
        )));
    }
    let mut rows = data_lines(&lines);
    let (size_line, size) = rows
        .next()
        .ok_or_else(|| IoError::parse(lines.len(), "missing size line"))?;
    let mut tok = size.split_whitespace();
    let nrows: usize = field(tok.next(), size_line, "row count")?;
    let ncols: usize = field(tok.next(), size_line, "column count")?;
    let nnz: usize = field(tok.next(), size_line, "entry count")?;
    if symmetry == Symmetry::Symmetric && nrows != ncols {
        return Err(IoError::parse(size_line, "symmetric matrix must be square"));
    }

    let mut triplets = Vec::with_capacity(nnz * if symmetry == Symmetry::Symmetric { 2 } else { 1 });
    let mut count = 0;
    for (line, text) in rows {
        let mut tok = text.split_whitespace();
        let i: usize = field(tok.next(), line, "row index")?;
        let j: usize = field(tok.next(), line, "column index")?;
        let v: f64 = field(tok.next(), line, "value")?;
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(nna_core::Error::IndexOutOfRange {
                row: i,
                col: j,
                nrows,
                ncols,
            }
            .into());
        }
        if !v.is_finite() {
            return Err(IoError::parse(line, "non-finite value"));
        }
        triplets.push((i - 1, j - 1, v));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
        count += 1;
    }
    if count != nnz {
        return Err(IoError::parse(
            lines.len(),
            format!("size line announces {nnz} entries, found {count}"),
        ));
    }
    Ok(SparseMatrix::from_triplets(nrows, ncols, &triplets)?)
}

/// Writes `A` as `coordinate real general` with round-trip precision.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market_to(&mut w, a)?;
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market_to<W: Write>(w: &mut W, a: &SparseMatrix) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.entries() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Reads a vector from a Matrix Market `array real` file with one column, or
/// from plain text holding one number per whitespace-separated token.
pub fn read_vector(path: impl AsRef<Path>) -> Result<DenseVector> {
    parse_vector(File::open(path)?)
}

pub fn parse_vector<R: Read>(reader: R) -> Result<DenseVector> {
    let lines = read_lines(reader)?;
    let mut values = Vec::new();
    let banner = lines
        .first()
        .is_some_and(|l| l.trim_start().to_ascii_lowercase().starts_with(BANNER));
    if banner {
        let (format, _) = header(&lines[0])?;
        if format != "array" {
            return Err(IoError::UnsupportedFormat(format!("{format} (vectors must be arrays)")));
        }
        let mut rows = data_lines(&lines);
        let (size_line, size) = rows
            .next()
            .ok_or_else(|| IoError::parse(lines.len(), "missing size line"))?;
        let mut tok = size.split_whitespace();
        let n: usize = field(tok.next(), size_line, "row count")?;
        let c: usize = field(tok.next(), size_line, "column count")?;
        if c != 1 {
            return Err(IoError::parse(size_line, "vector file must have one column"));
        }
        for (line, text) in rows {
            values.push(field(Some(text), line, "value")?);
        }
        if values.len() != n {
            return Err(IoError::parse(
                lines.len(),
                format!("expected {n} values, found {}", values.len()),
            ));
        }
    } else {
        for (k, l) in lines.iter().enumerate() {
            let l = l.trim();
            if l.starts_with('%') || l.starts_with('#') {
                continue;
            }
            for t in l.split_whitespace() {
                values.push(field(Some(t), k + 1, "value")?);
            }
        }
    }
    Ok(DenseVector::new(values)?)
}
