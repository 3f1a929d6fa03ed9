//! 2×2 Jacobi rotations, block rotations, and the kernels that apply them.
//!
//! A rotation at `(i, j)` embeds `Q̂ = [[c, −s], [s, c]]` into rows/columns
//! `i` and `j` of the identity; applying it two-sided means `A ← Jᵀ A J`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cost::{CostLedger, Kernel};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{BlockPartition, DenseMatrix, SymmetricMatrix};

/// Plane rotation `[[c, −s], [s, c]]` acting on indices `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation2x2 {
    pub c: f64,
    pub s: f64,
    pub i: usize,
    pub j: usize,
}

impl Rotation2x2 {
    pub fn identity(i: usize, j: usize) -> Self {
        Self { c: 1.0, s: 0.0, i, j }
    }

    /// Same angle, placed at `(i, j)`.
    pub fn at(self, i: usize, j: usize) -> Self {
        Self { i, j, ..self }
    }

    pub fn is_identity(&self) -> bool {
        self.c == 1.0 && self.s == 0.0
    }

    /// The rotation undoing this one.
    pub fn inverse(self) -> Self {
        Self { s: -self.s, ..self }
    }
}

/// Rotation diagonalizing `[[a11, a12], [a12, a22]]`, and the resulting
/// diagonal `(d1, d2)` in position order.
///
/// The angle satisfies `cot 2θ = (a11 − a22) / (2 a12)` with `|θ| ≤ π/4`,
/// computed through `t = tan θ = sign(τ) / (|τ| + sqrt(1 + τ²))`. When
/// `a11 = a22` the angle is `π/4` with the sign of `a12`.
///
/// In adversarial mode the angle is `θ + π/2`: the block is still
/// diagonalized, but the two eigenvalues trade places, which breaks the
/// Forsythe–Henrici condition that cyclic convergence relies on.
pub fn solve2x2(a11: f64, a12: f64, a22: f64, adversarial: bool) -> (Rotation2x2, [f64; 2]) {
    if a12 == 0.0 {
        return (Rotation2x2::identity(0, 1), [a11, a22]);
    }
    let tau = (a11 - a22) / (2.0 * a12);
    let t = if tau == 0.0 { 1.0f64.copysign(a12) } else { 1.0f64.copysign(tau) / (tau.abs() + math::hypot(1.0, tau)) };
    let c = 1.0 / math::hypot(1.0, t);
    let s = t * c;
    let d1 = a11 + t * a12;
    let d2 = a22 - t * a12;
    if adversarial {
        // cos(θ + π/2) = −sin θ, sin(θ + π/2) = cos θ.
        (Rotation2x2 { c: -s, s: c, i: 0, j: 1 }, [d2, d1])
    } else {
        (Rotation2x2 { c, s, i: 0, j: 1 }, [d1, d2])
    }
}

fn check_rotation(r: &Rotation2x2, n: usize) -> Result<()> {
    if r.i >= r.j || r.j >= n {
        return Err(Error::IndexOutOfRange { i: r.i, j: r.j, n });
    }
    Ok(())
}

/// Replaces rows `i < j` of a row-major buffer by `c·row_i + s·row_j` and
/// `−s·row_i + c·row_j`.
#[inline]
fn rotate_row_pair(data: &mut [f64], cols: usize, i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = data.split_at_mut(j * cols);
    let row_i = &mut lo[i * cols..(i + 1) * cols];
    let row_j = &mut hi[..cols];
    for (x, y) in row_i.iter_mut().zip(row_j.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi + s * yj;
        *y = c * yj - s * xi;
    }
}

/// `A ← Jᵀ A J` for the rotation embedded at `(r.i, r.j)`.
pub fn apply_two_sided(a: &mut SymmetricMatrix, r: &Rotation2x2) -> Result<()> {
    check_rotation(r, a.n())?;
    two_sided_unchecked(a, r);
    Ok(())
}

pub(crate) fn two_sided_unchecked(a: &mut SymmetricMatrix, r: &Rotation2x2) {
    let n = a.n();
    let Rotation2x2 { c, s, i, j } = *r;
    let (aii, aij, ajj) = (a.get(i, i), a.get(i, j), a.get(j, j));
    let m = a.dense_mut();
    rotate_row_pair(m.data_mut(), n, i, j, c, s);
    let (cc, ss, cs) = (c * c, s * s, c * s);
    let bij = (cc - ss) * aij + cs * (ajj - aii);
    m[(i, i)] = cc * aii + 2.0 * cs * aij + ss * ajj;
    m[(j, j)] = ss * aii - 2.0 * cs * aij + cc * ajj;
    m[(i, j)] = bij;
    m[(j, i)] = bij;
    let data = m.data_mut();
    for k in 0..n {
        if k != i && k != j {
            data[k * n + i] = data[i * n + k];
            data[k * n + j] = data[j * n + k];
        }
    }
}

/// Rotates columns `r.i` and `r.j` of `q`: `Q ← Q J`.
pub fn apply_right(q: &mut DenseMatrix, r: &Rotation2x2) -> Result<()> {
    if r.i >= r.j || r.j >= q.cols() {
        return Err(Error::IndexOutOfRange { i: r.i, j: r.j, n: q.cols() });
    }
    let cols = q.cols();
    let Rotation2x2 { c, s, i, j } = *r;
    for row in q.data_mut().chunks_exact_mut(cols) {
        let (qi, qj) = (row[i], row[j]);
        row[i] = c * qi + s * qj;
        row[j] = c * qj - s * qi;
    }
    Ok(())
}

/// Orthogonal 2b×2b rotation acting on block rows/columns `i < j` of a
/// [`BlockPartition`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockRotation {
    pub q: DenseMatrix,
    pub i: usize,
    pub j: usize,
}

impl BlockRotation {
    /// Checks the rotation against `part`, returning the global indices it
    /// acts on (block `i` first).
    fn indices(&self, part: &BlockPartition) -> Result<Vec<usize>> {
        if self.i >= self.j || self.j >= part.count() {
            return Err(Error::InvalidBlockPair { i: self.i, j: self.j, count: part.count() });
        }
        let idx = part.pair_indices(self.i, self.j);
        if !self.q.is_square() || self.q.rows() != idx.len() {
            return Err(Error::DimensionMismatch(format!(
                "block rotation is {}x{}, blocks {} and {} span {} indices",
                self.q.rows(),
                self.q.cols(),
                self.i,
                self.j,
                idx.len()
            )));
        }
        Ok(idx)
    }
}

/// `R = Q̂ᵀ M[idx, :]`, built one source row at a time.
fn block_rows_product(m: &DenseMatrix, idx: &[usize], qhat: &DenseMatrix) -> DenseMatrix {
    let s = idx.len();
    let cols = m.cols();
    let mut out = DenseMatrix::zeros(s, cols);
    let out_data = out.data_mut();
    for (r, &src) in idx.iter().enumerate() {
        let src_row = m.row(src);
        let qrow = qhat.row(r);
        for (p, &coef) in qrow.iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            let dst = &mut out_data[p * cols..(p + 1) * cols];
            for (d, &x) in dst.iter_mut().zip(src_row) {
                *d += coef * x;
            }
        }
    }
    out
}

/// `M[idx, :] ← Q̂ᵀ M[idx, :]`, i.e. the right update applied to a matrix
/// stored transposed.
pub(crate) fn rotate_block_rows(m: &mut DenseMatrix, idx: &[usize], qhat: &DenseMatrix) {
    let rows = block_rows_product(m, idx, qhat);
    for (p, &ip) in idx.iter().enumerate() {
        m.row_mut(ip).copy_from_slice(rows.row(p));
    }
}

/// `A ← Jᵀ A J` for a block rotation acting on the (not necessarily
/// contiguous) index set `idx`.
pub(crate) fn block_two_sided_indices(
    a: &mut SymmetricMatrix,
    idx: &[usize],
    qhat: &DenseMatrix,
    ledger: &mut CostLedger,
) {
    let n = a.n();
    let s = idx.len();
    // New block rows: Q̂ᵀ A[idx, :], one 2b×2b by 2b×n product.
    let rows = block_rows_product(a.as_dense(), idx, qhat);
    ledger.charge_matmul(s, s, n);
    // Cross block: (Q̂ᵀ A[idx, idx]) Q̂.
    let cross_left = rows.select_columns(idx);
    let cross = cross_left.matmul(qhat).expect("square block");
    ledger.charge_matmul(s, s, s);

    let mut in_block = vec![false; n];
    for &k in idx {
        in_block[k] = true;
    }
    let m = a.dense_mut();
    for (p, &ip) in idx.iter().enumerate() {
        m.row_mut(ip).copy_from_slice(rows.row(p));
    }
    for (p, &ip) in idx.iter().enumerate() {
        for (q, &iq) in idx.iter().enumerate().skip(p) {
            let v = 0.5 * (cross[(p, q)] + cross[(q, p)]);
            m[(ip, iq)] = v;
            m[(iq, ip)] = v;
        }
    }
    let data = m.data_mut();
    for (p, &ip) in idx.iter().enumerate() {
        let src = rows.row(p);
        for k in (0..n).filter(|&k| !in_block[k]) {
            data[k * n + ip] = src[k];
        }
    }
}

/// `A ← Jᵀ A J` where `J` embeds the block rotation into block rows/columns
/// `I` and `J`. Charged as the classical products it performs.
pub fn apply_block_two_sided(
    a: &mut SymmetricMatrix,
    part: &BlockPartition,
    br: &BlockRotation,
    ledger: &mut CostLedger,
) -> Result<()> {
    if part.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} indices, matrix has order {}",
            part.n(),
            a.n()
        )));
    }
    let idx = br.indices(part)?;
    block_two_sided_indices(a, &idx, &br.q, ledger);
    Ok(())
}

/// `Q[:, I∪J] ← Q[:, I∪J] Q̂`.
pub fn apply_block_right(
    q: &mut DenseMatrix,
    part: &BlockPartition,
    br: &BlockRotation,
    ledger: &mut CostLedger,
) -> Result<()> {
    if part.n() != q.cols() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} indices, matrix has {} columns",
            part.n(),
            q.cols()
        )));
    }
    let idx = br.indices(part)?;
    let s = idx.len();
    let cols = q.cols();
    let mut tmp = vec![0.0; s];
    for row in q.data_mut().chunks_exact_mut(cols) {
        for (t, &k) in tmp.iter_mut().zip(&idx) {
            *t = row[k];
        }
        for (p, &k) in idx.iter().enumerate() {
            row[k] = tmp.iter().enumerate().map(|(r, &x)| x * br.q[(r, p)]).sum();
        }
    }
    ledger.charge_matmul(q.rows(), s, s);
    Ok(())
}

/// Accumulated product of applied rotations, `Q = J₁ J₂ ⋯`.
///
/// Stored transposed so that every update touches contiguous rows.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalAccumulator {
    qt: DenseMatrix,
}

impl OrthogonalAccumulator {
    pub fn identity(n: usize) -> Self {
        Self { qt: DenseMatrix::identity(n) }
    }

    pub fn from_matrix(q: &DenseMatrix) -> Self {
        Self { qt: q.transpose() }
    }

    pub fn n(&self) -> usize {
        self.qt.rows()
    }

    /// `Q ← Q J`.
    pub fn rotate(&mut self, r: &Rotation2x2) {
        let n = self.qt.cols();
        rotate_row_pair(self.qt.data_mut(), n, r.i, r.j, r.c, r.s);
    }

    /// `Q[:, idx] ← Q[:, idx] Q̂`.
    pub(crate) fn rotate_block(&mut self, idx: &[usize], qhat: &DenseMatrix, ledger: &mut CostLedger) {
        rotate_block_rows(&mut self.qt, idx, qhat);
        ledger.charge_matmul(self.qt.cols(), idx.len(), idx.len());
    }

    /// New column `k` of `Q` is old column `perm[k]`.
    pub(crate) fn permute_columns(&mut self, perm: &[usize]) {
        self.qt = self.qt.select_rows(perm);
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        self.qt.transpose()
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.qt.transpose()
    }
}

/// Flops charged for one scalar rotation on an order-`n` problem: the two
/// block rows as a 2×2 by 2×n product, the 2×2 cross block, and two columns
/// of the accumulator.
pub(crate) fn charge_scalar_rotation(ledger: &mut CostLedger, n: usize) {
    use crate::cost::matmul_flops;
    ledger.charge(Kernel::Rotation2x2, matmul_flops(2, 2, n) + matmul_flops(2, 2, 2) + matmul_flops(n, 2, 2));
    ledger.rotations += 1;
}
