//! Pair orderings for scalar entries and block indices.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{max_off_diag, BlockPartition, SymmetricMatrix};

/// How a sweep visits the strict upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderingKind {
    /// `(0,1), (0,2), (1,2), (0,3), …`: column by column.
    ColumnCyclic,
    /// `(0,1), (0,2), …, (0,n−1), (1,2), …`: row by row.
    RowCyclic,
    /// Uniform shuffle of all pairs, redrawn every sweep from a ChaCha8
    /// stream seeded with the given value.
    Random(u64),
    /// Always the currently largest pair; stateful, see [`next_max_pivot`].
    MaxPivot,
}

impl fmt::Display for OrderingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderingKind::ColumnCyclic => f.write_str("column-cyclic"),
            OrderingKind::RowCyclic => f.write_str("row-cyclic"),
            OrderingKind::Random(seed) => write!(f, "random:{seed}"),
            OrderingKind::MaxPivot => f.write_str("max-pivot"),
        }
    }
}

impl FromStr for OrderingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "column-cyclic" => Ok(OrderingKind::ColumnCyclic),
            "row-cyclic" => Ok(OrderingKind::RowCyclic),
            "max-pivot" => Ok(OrderingKind::MaxPivot),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed.parse().map(OrderingKind::Random).map_err(|_| Error::UnknownOrdering(s.to_string())),
                None => Err(Error::UnknownOrdering(s.to_string())),
            },
        }
    }
}

fn check_count(count: usize) -> Result<()> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!("an ordering needs at least 2 indices, got {count}")));
    }
    Ok(())
}

fn column_cyclic(count: usize) -> Vec<(usize, usize)> {
    (1..count).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

fn row_cyclic(count: usize) -> Vec<(usize, usize)> {
    (0..count).flat_map(|i| (i + 1..count).map(move |j| (i, j))).collect()
}

/// Pairs of the first sweep under a static ordering (0-based, `I < J`).
pub fn sweep_pairs(kind: OrderingKind, count: usize) -> Result<Vec<(usize, usize)>> {
    let mut schedule = PairSchedule::new(kind, count)?;
    schedule.next_sweep().ok_or_else(|| Error::InvalidParameter(String::from("max-pivot has no fixed sweep order")))
}

/// Per-solve pair generator.
///
/// Cyclic orderings repeat the same list; random ordering reshuffles once
/// per sweep, continuing one PRNG stream.
#[derive(Clone, Debug)]
pub struct PairSchedule {
    kind: OrderingKind,
    count: usize,
    pairs: Vec<(usize, usize)>,
    rng: Option<ChaCha8Rng>,
}

impl PairSchedule {
    pub fn new(kind: OrderingKind, count: usize) -> Result<Self> {
        check_count(count)?;
        let (pairs, rng) = match kind {
            OrderingKind::ColumnCyclic => (column_cyclic(count), None),
            OrderingKind::RowCyclic => (row_cyclic(count), None),
            OrderingKind::Random(seed) => (row_cyclic(count), Some(ChaCha8Rng::seed_from_u64(seed))),
            OrderingKind::MaxPivot => (Vec::new(), None),
        };
        Ok(Self { kind, count, pairs, rng })
    }

    pub fn kind(&self) -> OrderingKind {
        self.kind
    }

    /// Steps per sweep: every strict-upper pair once.
    pub fn steps_per_sweep(&self) -> usize {
        self.count * (self.count - 1) / 2
    }

    /// Pair list for the next sweep, or `None` for max-pivot ordering.
    pub fn next_sweep(&mut self) -> Option<Vec<(usize, usize)>> {
        if self.kind == OrderingKind::MaxPivot {
            return None;
        }
        if let Some(rng) = self.rng.as_mut() {
            self.pairs.shuffle(rng);
        }
        Some(self.pairs.clone())
    }
}

/// Position of the largest off-diagonal magnitude; the first maximizer in
/// row-major order wins ties.
pub fn next_max_pivot(a: &SymmetricMatrix) -> Result<(usize, usize)> {
    max_off_diag(a).map(|m| (m.i, m.j))
}

/// Block pair `(I, J)` whose gathered subproblem holds the largest
/// off-diagonal entry of `a`. Among pairs sharing that entry the larger
/// cross-block entry wins, then the lexicographically smallest pair.
pub fn next_max_pivot_block(a: &SymmetricMatrix, part: &BlockPartition) -> Result<(usize, usize)> {
    if part.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} indices, matrix has order {}",
            part.n(),
            a.n()
        )));
    }
    let count = part.count();
    check_count(count)?;
    // block_max[I * count + J]: largest |a_ij| over i in I, j in J, i != j.
    let mut block_max = vec![0.0f64; count * count];
    for bi in 0..count {
        for i in part.range(bi) {
            let row = a.as_dense().row(i);
            for bj in bi..count {
                let m = part.range(bj).filter(|&j| j != i).map(|j| row[j].abs()).fold(0.0, f64::max);
                let slot = &mut block_max[bi * count + bj];
                *slot = slot.max(m);
            }
        }
    }
    let mut best = (0, 1);
    let mut best_key = (-1.0, -1.0);
    for bi in 0..count {
        for bj in bi + 1..count {
            let cross = block_max[bi * count + bj];
            let whole = cross.max(block_max[bi * count + bi]).max(block_max[bj * count + bj]);
            if whole > best_key.0 || (whole == best_key.0 && cross > best_key.1) {
                best_key = (whole, cross);
                best = (bi, bj);
            }
        }
    }
    Ok(best)
}
