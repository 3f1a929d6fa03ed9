//! Dense storage, the symmetric working matrix, block partitions and the two
//! convergence metrics (off-diagonal Frobenius norm and largest off-diagonal
//! magnitude).

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Range};

use crate::error::{Error, Result};
use crate::math;

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting empty shapes, length
    /// mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DataLength { rows, cols, len: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(format!("ragged rows in a {r}-row literal")));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: alloc::vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Classical product `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self - rhs`, entrywise.
    pub fn sub(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot subtract {}x{} from {}x{}",
                rhs.rows, rhs.cols, self.rows, self.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max |Mᵀ M − I|` over all entries.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut dot = 0.0;
                for k in 0..self.rows {
                    dot += self[(k, i)] * self[(k, j)];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Columns `cols[0], cols[1], ...` of `self`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, k| self[(i, cols[k])])
    }

    /// Rows `rows[0], rows[1], ...` of `self`, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |k, j| self[(rows[k], j)])
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Dense real symmetric matrix. Both triangles are stored and kept bitwise
/// equal: every update writes `A(i, j)` and `A(j, i)` together.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    inner: DenseMatrix,
}

impl SymmetricMatrix {
    /// Wraps a square matrix whose two triangles agree exactly.
    pub fn from_dense(m: DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if !m.all_finite() {
            return Err(Error::NonFinite);
        }
        let n = m.rows;
        for i in 0..n {
            for j in i + 1..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { inner: m })
    }

    /// Wraps a square matrix after replacing it with `(M + Mᵀ) / 2`.
    pub fn from_dense_symmetrized(mut m: DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if !m.all_finite() {
            return Err(Error::NonFinite);
        }
        let n = m.rows;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Ok(Self { inner: m })
    }

    /// Builds `A` from its upper triangle: `f(i, j)` is called for `i <= j`.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self { inner: m }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self { inner: DenseMatrix::from_diagonal(diag) }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    /// Sets `A(i, j)` and `A(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.inner[(i, j)] = value;
        self.inner[(j, i)] = value;
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.inner
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.inner
    }

    #[inline]
    pub(crate) fn dense_mut(&mut self) -> &mut DenseMatrix {
        &mut self.inner
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.get(i, i)).sum()
    }

    /// Largest magnitude over all entries, diagonal included. This is the
    /// fixed reference the stopping rule compares against.
    pub fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }
}

/// Largest off-diagonal magnitude and where it was found (0-based, `i < j`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffDiagMax {
    pub value: f64,
    pub i: usize,
    pub j: usize,
}

/// `Ξ(A) = sqrt(Σ_{i≠j} A(i,j)²)`.
pub fn off_diag_norm(a: &SymmetricMatrix) -> f64 {
    let n = a.n();
    let mut sum = 0.0;
    for i in 0..n {
        let row = a.inner.row(i);
        for &x in &row[i + 1..] {
            sum += x * x;
        }
    }
    math::sqrt(2.0 * sum)
}

/// First maximizer of `|A(i, j)|` over the strict upper triangle in
/// row-major order.
pub fn max_off_diag(a: &SymmetricMatrix) -> Result<OffDiagMax> {
    let n = a.n();
    if n < 2 {
        return Err(Error::NoOffDiagonal(n));
    }
    let mut best = OffDiagMax { value: -1.0, i: 0, j: 1 };
    for i in 0..n {
        let row = a.inner.row(i);
        for (j, &x) in row.iter().enumerate().skip(i + 1) {
            if x.abs() > best.value {
                best = OffDiagMax { value: x.abs(), i, j };
            }
        }
    }
    Ok(best)
}

/// Largest off-diagonal magnitude, `0` for matrices of order below 2.
pub(crate) fn max_off_diag_value(a: &SymmetricMatrix) -> f64 {
    let n = a.n();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for &x in &a.inner.row(i)[i + 1..] {
            best = best.max(x.abs());
        }
    }
    best
}

/// Largest `|A(i,j)| / sqrt(|A(i,i) A(j,j)|)` over `i < j`: the off-diagonal
/// of a Gram matrix measured as cosines between columns.
pub(crate) fn max_scaled_off_diag(a: &SymmetricMatrix) -> f64 {
    let n = a.n();
    let mut best: f64 = 0.0;
    for i in 0..n {
        let row = a.inner.row(i);
        for j in i + 1..n {
            best = best.max(scaled_entry(row[j], row[i], a.get(j, j)));
        }
    }
    best
}

#[inline]
pub(crate) fn scaled_entry(aij: f64, aii: f64, ajj: f64) -> f64 {
    if aij == 0.0 {
        return 0.0;
    }
    let denom = math::sqrt(aii.abs()) * math::sqrt(ajj.abs());
    if denom == 0.0 {
        f64::INFINITY
    } else {
        aij.abs() / denom
    }
}

/// Partition of `0..n` into contiguous blocks of width `b`; the last block is
/// narrower when `b` does not divide `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    b: usize,
    count: usize,
}

impl BlockPartition {
    pub fn new(n: usize, b: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBlockSize { n, b, reason: "matrix order must be positive" });
        }
        if b == 0 {
            return Err(Error::InvalidBlockSize { n, b, reason: "block size must be positive" });
        }
        Ok(Self { n, b, count: n.div_ceil(b) })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn block_size(&self) -> usize {
        self.b
    }

    /// Number of blocks, `ceil(n / b)`.
    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    /// Index range of block `k` (0-based).
    #[inline]
    pub fn range(&self, k: usize) -> Range<usize> {
        let start = k * self.b;
        start..(start + self.b).min(self.n)
    }

    #[inline]
    pub fn width(&self, k: usize) -> usize {
        self.range(k).len()
    }

    /// Indices of blocks `i` and `j`, block `i` first.
    pub fn pair_indices(&self, i: usize, j: usize) -> Vec<usize> {
        self.range(i).chain(self.range(j)).collect()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= j || j >= self.count {
            return Err(Error::InvalidBlockPair { i, j, count: self.count });
        }
        Ok(())
    }
}

/// Copies the cross submatrix `A([I, J], [I, J])`.
pub fn gather_cross(a: &SymmetricMatrix, part: &BlockPartition, i: usize, j: usize) -> Result<SymmetricMatrix> {
    part.check_pair(i, j)?;
    if part.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} indices, matrix has order {}",
            part.n(),
            a.n()
        )));
    }
    let idx = part.pair_indices(i, j);
    Ok(gather_indices(a, &idx))
}

pub(crate) fn gather_indices(a: &SymmetricMatrix, idx: &[usize]) -> SymmetricMatrix {
    let s = idx.len();
    let mut out = DenseMatrix::zeros(s, s);
    for (p, &ip) in idx.iter().enumerate() {
        let row = a.inner.row(ip);
        let out_row = out.row_mut(p);
        for (q, &iq) in idx.iter().enumerate() {
            out_row[q] = row[iq];
        }
    }
    SymmetricMatrix { inner: out }
}

/// Writes `hat` back into the cross blocks `(I,I), (I,J), (J,I), (J,J)`.
pub fn scatter_cross(
    a: &mut SymmetricMatrix,
    part: &BlockPartition,
    i: usize,
    j: usize,
    hat: &SymmetricMatrix,
) -> Result<()> {
    part.check_pair(i, j)?;
    let idx = part.pair_indices(i, j);
    if hat.n() != idx.len() || part.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "cross block of order {} does not match blocks {i}, {j} of width {}",
            hat.n(),
            idx.len()
        )));
    }
    for (p, &ip) in idx.iter().enumerate() {
        for (q, &iq) in idx.iter().enumerate() {
            a.inner[(ip, iq)] = hat.get(p, q);
        }
    }
    Ok(())
}
