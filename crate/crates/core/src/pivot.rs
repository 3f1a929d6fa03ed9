//! Recursive LU with partial pivoting, column-pivoted QR, and the column
//! permutation applied to block rotations before they are used.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::DenseMatrix;

/// Column permutation applied to each block rotation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PivotMode {
    #[default]
    None,
    Lupp,
    Qrcp,
}

impl fmt::Display for PivotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PivotMode::None => "none",
            PivotMode::Lupp => "lupp",
            PivotMode::Qrcp => "qrcp",
        })
    }
}

impl FromStr for PivotMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PivotMode::None),
            "lupp" => Ok(PivotMode::Lupp),
            "qrcp" => Ok(PivotMode::Qrcp),
            _ => Err(Error::InvalidParameter(format!("unknown pivot mode {s:?}"))),
        }
    }
}

/// `P A = L U` with `(P A)[k, :] = A[perm[k], :]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotResult {
    pub perm: Vec<usize>,
    /// m×n unit lower trapezoidal.
    pub l: DenseMatrix,
    /// n×n upper triangular.
    pub u: DenseMatrix,
}

/// Recursive LU with partial pivoting of an m×n matrix, `m ≥ n`.
///
/// Splits the columns at `⌊n/2⌋`, factors the left half, updates the right
/// half by a triangular solve and a Schur complement, then factors the
/// trailing block. Row swaps are applied to whole rows, so the permutation
/// of the left factor's lower part is implicit.
pub fn recursive_lupp(a: &DenseMatrix) -> Result<PivotResult> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::DimensionMismatch(format!("LUPP needs rows >= cols, got {m}x{n}")));
    }
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: m, cols: n });
    }
    let col_norms: Vec<f64> = (0..n).map(|j| math::sqrt((0..m).map(|i| a[(i, j)] * a[(i, j)]).sum())).collect();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    lupp_rec(&mut w, &mut perm, &col_norms, 0, n)?;

    let l = DenseMatrix::from_fn(m, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Greater => w[(i, j)],
        core::cmp::Ordering::Equal => 1.0,
        core::cmp::Ordering::Less => 0.0,
    });
    let u = DenseMatrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { 0.0 });
    Ok(PivotResult { perm, l, u })
}

/// Factors columns `c0..c1` of `w`, rows `c0..m`.
fn lupp_rec(w: &mut DenseMatrix, perm: &mut [usize], norms: &[f64], c0: usize, c1: usize) -> Result<()> {
    let m = w.rows();
    let mut best = c0;
    for r in c0 + 1..m {
        if w[(r, c0)].abs() > w[(best, c0)].abs() {
            best = r;
        }
    }
    if best != c0 {
        w.swap_rows(c0, best);
        perm.swap(c0, best);
    }
    if c1 - c0 == 1 {
        let pivot = w[(c0, c0)];
        if pivot.abs() <= f64::EPSILON * norms[c0] || pivot == 0.0 {
            return Err(Error::RankDeficient(c0));
        }
        for r in c0 + 1..m {
            w[(r, c0)] /= pivot;
        }
        return Ok(());
    }
    let mid = c0 + (c1 - c0) / 2;
    lupp_rec(w, perm, norms, c0, mid)?;
    // Forward substitution with the unit lower triangle of the left half.
    for j in mid..c1 {
        for i in c0 + 1..mid {
            let mut acc = w[(i, j)];
            for p in c0..i {
                acc -= w[(i, p)] * w[(p, j)];
            }
            w[(i, j)] = acc;
        }
    }
    // Schur complement of the trailing rows.
    for i in mid..m {
        for j in mid..c1 {
            let mut acc = w[(i, j)];
            for p in c0..mid {
                acc -= w[(i, p)] * w[(p, j)];
            }
            w[(i, j)] = acc;
        }
    }
    lupp_rec(w, perm, norms, mid, c1)
}

/// `A P = Q R` with `(A P)[:, k] = A[:, perm[k]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrcpResult {
    pub perm: Vec<usize>,
    /// m×k with orthonormal columns, `k = min(m, n)`.
    pub q: DenseMatrix,
    /// k×n upper trapezoidal.
    pub r: DenseMatrix,
}

/// Householder QR with greedy column-norm pivoting.
pub fn qrcp(a: &DenseMatrix) -> Result<QrcpResult> {
    householder_qr(a, true)
}

/// Householder QR, optionally with column pivoting. Downdated column norms
/// are recomputed once cancellation leaves fewer than half the digits.
pub(crate) fn householder_qr(a: &DenseMatrix, pivoted: bool) -> Result<QrcpResult> {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix { rows: m, cols: n });
    }
    let k = m.min(n);
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let col_norm =
        |w: &DenseMatrix, j: usize, from: usize| -> f64 { math::sqrt((from..m).map(|i| w[(i, j)] * w[(i, j)]).sum()) };
    let mut vn1: Vec<f64> = (0..n).map(|j| col_norm(&w, j, 0)).collect();
    let mut vn2 = vn1.clone();
    let mut taus = vec![0.0; k];
    let tol3z = math::sqrt(f64::EPSILON);

    for step in 0..k {
        if pivoted {
            let mut p = step;
            for j in step + 1..n {
                if vn1[j] > vn1[p] {
                    p = j;
                }
            }
            if p != step {
                for i in 0..m {
                    let t = w[(i, p)];
                    w[(i, p)] = w[(i, step)];
                    w[(i, step)] = t;
                }
                perm.swap(p, step);
                vn1.swap(p, step);
                vn2.swap(p, step);
            }
        }

        let alpha = w[(step, step)];
        let xnorm = col_norm(&w, step, step + 1);
        if xnorm != 0.0 {
            let beta = -math::hypot(alpha, xnorm).copysign(alpha);
            let tau = (beta - alpha) / beta;
            let scale = 1.0 / (alpha - beta);
            for i in step + 1..m {
                w[(i, step)] *= scale;
            }
            w[(step, step)] = beta;
            taus[step] = tau;
            for j in step + 1..n {
                let mut dot = w[(step, j)];
                for i in step + 1..m {
                    dot += w[(i, step)] * w[(i, j)];
                }
                let f = tau * dot;
                w[(step, j)] -= f;
                for i in step + 1..m {
                    w[(i, j)] -= f * w[(i, step)];
                }
            }
        }

        if pivoted {
            for j in step + 1..n {
                if vn1[j] == 0.0 {
                    continue;
                }
                let ratio = w[(step, j)].abs() / vn1[j];
                let temp = (1.0 - ratio * ratio).max(0.0);
                let temp2 = temp * (vn1[j] / vn2[j]) * (vn1[j] / vn2[j]);
                if temp2 <= tol3z {
                    vn1[j] = col_norm(&w, j, step + 1);
                    vn2[j] = vn1[j];
                } else {
                    vn1[j] *= math::sqrt(temp);
                }
            }
        }
    }

    let r = DenseMatrix::from_fn(k, n, |i, j| if i <= j { w[(i, j)] } else { 0.0 });
    // Q = H₀ H₁ ⋯ applied to the leading k columns of the identity.
    let mut q = DenseMatrix::from_fn(m, k, |i, j| if i == j { 1.0 } else { 0.0 });
    for step in (0..k).rev() {
        let tau = taus[step];
        if tau == 0.0 {
            continue;
        }
        for j in 0..k {
            let mut dot = q[(step, j)];
            for i in step + 1..m {
                dot += w[(i, step)] * q[(i, j)];
            }
            let f = tau * dot;
            q[(step, j)] -= f;
            for i in step + 1..m {
                q[(i, j)] -= f * w[(i, step)];
            }
        }
    }
    Ok(QrcpResult { perm, q, r })
}

/// Lower bound on the smallest singular value of the leading b×b block of
/// a 2b×2b orthogonal matrix after the LUPP column permutation:
/// `3√2 / sqrt((3b² + b)(4ᵇ + 6b − 1))`.
pub fn lemma_bound(b: usize) -> f64 {
    let b = b as f64;
    3.0 * core::f64::consts::SQRT_2 / math::sqrt((3.0 * b * b + b) * (math::pow(4.0, b) + 6.0 * b - 1.0))
}

/// Permutes the columns of a block rotation so that its leading
/// `lead × lead` block is well conditioned, returning the permutation
/// (new column `k` is old column `perm[k]`).
///
/// LUPP factors the transpose of the leading `lead` rows; QRCP factors the
/// rows themselves and uses their column permutation.
pub fn pivot_fix(qhat: &mut DenseMatrix, lead: usize, mode: PivotMode, ledger: &mut CostLedger) -> Result<Vec<usize>> {
    let s = qhat.cols();
    if lead == 0 || lead > qhat.rows() || lead > s {
        return Err(Error::DimensionMismatch(format!(
            "leading block of {lead} rows does not fit a {}x{s} rotation",
            qhat.rows()
        )));
    }
    let top = qhat.select_rows(&(0..lead).collect::<Vec<_>>());
    let perm = match mode {
        PivotMode::None => return Ok((0..s).collect()),
        PivotMode::Lupp => {
            let res = recursive_lupp(&top.transpose())?;
            ledger.charge_lupp(s, lead);
            res.perm
        }
        PivotMode::Qrcp => {
            let res = qrcp(&top)?;
            ledger.charge_qrcp(lead, s);
            res.perm
        }
    };
    *qhat = qhat.select_columns(&perm);
    Ok(perm)
}
