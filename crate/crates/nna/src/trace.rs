//! Residual trace CSV: `iter,residual_l2,kl_b,elapsed_ns`, one row per iterate
//! including iterate 0.
//!
//! Floats carry 17 significant digits in exponent form, so a re-read trace is
//! bit-identical. `+∞` is written `inf`. `kl_b` is empty for solvers that do not
//! track a divergence. Lines end in LF.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nna_core::{Divergence, SolveReport};

use crate::error::{IoError, Result};

pub const HEADER: [&str; 4] = ["iter", "residual_l2", "kl_b", "elapsed_ns"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub residual: f64,
    pub kl: Option<Divergence>,
    pub elapsed_ns: u64,
}

pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn rows(report: &SolveReport) -> Vec<TraceRow> {
    (0..report.residual_trace.len())
        .map(|n| TraceRow {
            iter: n,
            residual: report.residual_trace[n],
            kl: report.kl_trace.get(n).copied(),
            elapsed_ns: report.elapsed_trace.get(n).copied().unwrap_or(0),
        })
        .collect()
}

pub fn write_trace(report: &SolveReport, path: impl AsRef<Path>) -> Result<()> {
    let mut f = File::create(path)?;
    write_trace_to(&mut f, report)?;
    f.flush()?;
    Ok(())
}

pub fn write_trace_to<W: Write>(w: W, report: &SolveReport) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(HEADER)?;
    for r in rows(report) {
        let kl = r.kl.map(|d| d.to_string()).unwrap_or_default();
        out.write_record([r.iter.to_string(), format_f64(r.residual), kl, r.elapsed_ns.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    read_trace_from(File::open(path)?)
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        "nan" => Ok(f64::NAN),
        _ => s
            .parse()
            .map_err(|_| IoError::parse(line, format!("invalid number {s:?}"))),
    }
}

pub fn read_trace_from<R: Read>(r: R) -> Result<Vec<TraceRow>> {
    let mut input = csv::ReaderBuilder::new().from_reader(r);
    if input.headers()?.iter().ne(HEADER) {
        return Err(IoError::parse(1, "unexpected trace header"));
    }
    let mut out = Vec::new();
    for (k, rec) in input.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != 4 {
            return Err(IoError::parse(line, "expected 4 fields"));
        }
        let iter = rec[0].parse().map_err(|_| IoError::parse(line, "invalid iter"))?;
        let kl = match &rec[2] {
            "" => None,
            "inf" => Some(Divergence::Infinite),
            s => Some(Divergence::Finite(parse_f64(s, line)?)),
        };
        out.push(TraceRow {
            iter,
            residual: parse_f64(&rec[1], line)?,
            kl,
            elapsed_ns: rec[3].parse().map_err(|_| IoError::parse(line, "invalid elapsed_ns"))?,
        });
    }
    Ok(out)
}
