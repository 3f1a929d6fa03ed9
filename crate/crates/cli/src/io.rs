//! Matrix files.
//!
//! Text: a header line `n` (square) or `m n`, then one line of
//! whitespace-separated reals per row. Binary: the magic bytes `JACM`, rows
//! and cols as little-endian `u64`, then the entries as little-endian `f64`
//! in row-major order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use jacobi_core::DenseMatrix;

pub const MAGIC: &[u8; 4] = b"JACM";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
}

impl Format {
    /// `.bin` and `.jacm` files are binary, anything else is text.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin" | "jacm") => Format::Binary,
            _ => Format::Text,
        }
    }
}

pub fn parse_text(src: &str) -> Result<DenseMatrix> {
    let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().context("empty matrix file")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().with_context(|| format!("bad dimension {t:?} in header")))
        .collect::<Result<_>>()?;
    let (rows, cols) = match dims[..] {
        [n] => (n, n),
        [m, n] => (m, n),
        _ => bail!("header must be `n` or `m n`, got {header:?}"),
    };
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (lineno, line) = lines.next().with_context(|| format!("expected {rows} rows, found {r}"))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            let x: f64 = tok.parse().with_context(|| format!("line {}: bad number {tok:?}", lineno + 1))?;
            data.push(x);
        }
        ensure!(
            data.len() - before == cols,
            "line {}: expected {cols} values, found {}",
            lineno + 1,
            data.len() - before
        );
    }
    if let Some((lineno, _)) = lines.next() {
        bail!("line {}: trailing data after {rows} rows", lineno + 1);
    }
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Shortest representation that parses back to the same bits.
pub fn format_text(m: &DenseMatrix) -> String {
    let mut out = String::new();
    if m.is_square() {
        writeln!(out, "{}", m.rows()).unwrap();
    } else {
        writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    }
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:e}")).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn encode_binary(m: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 8 * m.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for x in m.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DenseMatrix> {
    ensure!(bytes.len() >= 20 && &bytes[..4] == MAGIC, "not a JACM file");
    let word = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    let rows = usize::try_from(word(4))?;
    let cols = usize::try_from(word(12))?;
    let len = rows.checked_mul(cols).and_then(|n| n.checked_mul(8)).context("dimensions overflow")?;
    ensure!(bytes.len() - 20 == len, "payload has {} bytes, expected {len} for {rows}x{cols}", bytes.len() - 20);
    let data = bytes[20..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Reads either format, detected by the magic bytes.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)
    } else {
        std::str::from_utf8(&bytes).context("text matrix is not UTF-8").and_then(parse_text)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

pub fn write_matrix(path: &Path, m: &DenseMatrix, format: Format) -> Result<()> {
    let bytes = match format {
        Format::Text => format_text(m).into_bytes(),
        Format::Binary => encode_binary(m),
    };
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
