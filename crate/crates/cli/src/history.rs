//! Per-sweep convergence history as CSV.

use std::fmt::Write as _;

use anyhow::{ensure, Context, Result};
use jacobi_core::SweepRecord;

pub const HEADER: &str = "sweep,max_offdiag,offdiag_fro,cum_flops,rotations";

/// Header plus one row per sweep. Reals carry 17 significant digits, enough
/// to parse back bit-exactly.
pub fn format_history(rows: &[SweepRecord]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{},{:.16e},{:.16e},{},{}", r.sweep, r.max_off_diag, r.off_diag_norm, r.cum_flops, r.rotations)
            .unwrap();
    }
    out
}

pub fn parse_history(src: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = src.lines();
    let header = lines.next().context("empty history file")?;
    ensure!(header.trim() == HEADER, "unexpected header {header:?}");
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, line)| {
            let f: Vec<&str> = line.split(',').collect();
            ensure!(f.len() == 5, "row {}: expected 5 fields, found {}", k + 1, f.len());
            let ctx = || format!("row {}: {line:?}", k + 1);
            Ok(SweepRecord {
                sweep: f[0].parse().with_context(ctx)?,
                max_off_diag: f[1].parse().with_context(ctx)?,
                off_diag_norm: f[2].parse().with_context(ctx)?,
                cum_flops: f[3].parse().with_context(ctx)?,
                rotations: f[4].parse().with_context(ctx)?,
            })
        })
        .collect()
}
