//! Flop accounting with classical kernel formulas, closed-form complexity
//! models for one sweep of each solver, and the reduction of matrix
//! multiplication to an eigenvector computation.
//!
//! Kernel charges (always classical, whatever `ω₀` the analytic models use):
//!
//! | kernel                         | flops           |
//! |--------------------------------|-----------------|
//! | `A B`, `A` m×n, `B` n×p        | `mp(2n − 1)`    |
//! | full n×n eigendecomposition    | `8⅔ n³`         |
//! | QRCP of m×n, m ≥ n             | `2mn² − ⅔n³`    |
//! | LUPP of m×n, m ≥ n             | `mn² − ⅓n³`     |
//!
//! Fractional formulas are rounded to the nearest integer using exact integer
//! arithmetic, so ledgers never drift.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::DenseMatrix;

/// Kernel categories tracked by [`CostLedger`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Matmul,
    Eig,
    Qrcp,
    Lupp,
    Rotation2x2,
    Misc,
}

impl Kernel {
    pub const ALL: [Kernel; 6] =
        [Kernel::Matmul, Kernel::Eig, Kernel::Qrcp, Kernel::Lupp, Kernel::Rotation2x2, Kernel::Misc];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Matmul => "matmul",
            Kernel::Eig => "eig",
            Kernel::Qrcp => "qrcp",
            Kernel::Lupp => "lupp",
            Kernel::Rotation2x2 => "rotation2x2",
            Kernel::Misc => "misc",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Running counters for one solve (or several, via [`CostLedger::merge`]).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    breakdown: [u64; 6],
    pub rotations: u64,
    pub sweeps: u64,
    pub block_pair_visits: u64,
}

#[inline]
fn div3_rounded(x: u128) -> u64 {
    // x = 3k + r: r = 2 rounds up, r = 1 rounds down.
    ((x + 1) / 3) as u64
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total flops, the sum of the per-kernel subtotals.
    pub fn flops(&self) -> u64 {
        self.breakdown.iter().sum()
    }

    pub fn kernel(&self, kernel: Kernel) -> u64 {
        self.breakdown[kernel.slot()]
    }

    pub fn breakdown(&self) -> impl Iterator<Item = (Kernel, u64)> + '_ {
        Kernel::ALL.iter().map(move |&k| (k, self.kernel(k)))
    }

    pub fn charge(&mut self, kernel: Kernel, flops: u64) {
        self.breakdown[kernel.slot()] += flops;
    }

    /// `A B` with `A` m×n and `B` n×p: `mp(2n − 1)`.
    pub fn charge_matmul(&mut self, m: usize, n: usize, p: usize) {
        self.charge(Kernel::Matmul, matmul_flops(m, n, p));
    }

    /// Full n×n symmetric eigendecomposition: `8⅔ n³`.
    pub fn charge_eig(&mut self, n: usize) {
        self.charge(Kernel::Eig, eig_flops(n));
    }

    /// QRCP of an m×n matrix: `2mn² − ⅔n³` (roles swapped when `m < n`).
    pub fn charge_qrcp(&mut self, m: usize, n: usize) {
        self.charge(Kernel::Qrcp, qrcp_flops(m, n));
    }

    /// LUPP of an m×n matrix, `m ≥ n`: `mn² − ⅓n³`.
    pub fn charge_lupp(&mut self, m: usize, n: usize) {
        self.charge(Kernel::Lupp, lupp_flops(m, n));
    }

    /// Adds another ledger's counters into this one. Associative and
    /// commutative.
    pub fn merge(&mut self, other: &CostLedger) {
        for (a, b) in self.breakdown.iter_mut().zip(other.breakdown.iter()) {
            *a += b;
        }
        self.rotations += other.rotations;
        self.sweeps += other.sweeps;
        self.block_pair_visits += other.block_pair_visits;
    }
}

pub fn matmul_flops(m: usize, n: usize, p: usize) -> u64 {
    if m == 0 || n == 0 || p == 0 {
        return 0;
    }
    (m as u64) * (p as u64) * (2 * n as u64 - 1)
}

pub fn eig_flops(n: usize) -> u64 {
    let n = n as u128;
    div3_rounded(26 * n * n * n)
}

pub fn qrcp_flops(m: usize, n: usize) -> u64 {
    let (m, n) = if m >= n { (m as u128, n as u128) } else { (n as u128, m as u128) };
    div3_rounded(6 * m * n * n - 2 * n * n * n)
}

pub fn lupp_flops(m: usize, n: usize) -> u64 {
    let (m, n) = if m >= n { (m as u128, n as u128) } else { (n as u128, m as u128) };
    div3_rounded(3 * m * n * n - n * n * n)
}

/// Matrix-multiplication exponent used by the analytic models, `2 < ω₀ ≤ 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Omega(f64);

impl Omega {
    pub const CLASSICAL: Omega = Omega(3.0);

    pub fn new(omega: f64) -> Result<Self> {
        if omega > 2.0 && omega <= 3.0 {
            Ok(Self(omega))
        } else {
            Err(Error::InvalidParameter(format!("omega0 must lie in (2, 3], got {omega}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// One-sweep block Jacobi arithmetic model `n²b + n³b^{ω₀−3}` (constants
/// absorbed; meaningful only in ratios).
pub fn predict_block_sweep(n: f64, b: f64, omega: Omega) -> f64 {
    n * n * b + n * n * n * math::pow(b, omega.0 - 3.0)
}

/// Exponent `3(1 − f) + ω₀ f` of the recursive Jacobi arithmetic model.
pub fn recursive_exponent(f: f64, omega: Omega) -> f64 {
    3.0 * (1.0 - f) + omega.0 * f
}

/// One-sweep recursive Jacobi arithmetic model `n^{3(1−f)+ω₀f}`.
pub fn predict_recursive(n: f64, f: f64, omega: Omega) -> f64 {
    math::pow(n, recursive_exponent(f, omega))
}

/// Default cost of diagonalizing an s×s subproblem: `8⅔ s³`.
pub fn default_subproblem_flops(s: f64) -> f64 {
    26.0 / 3.0 * s * s * s
}

/// One-sweep one-sided Jacobi SVD arithmetic model
/// `mn²b^{ω₀−3} + ⌈n/b⌉² G(2b)` with `G(s) = 8⅔ s³`.
pub fn predict_svd_sweep(m: f64, n: f64, b: f64, omega: Omega) -> f64 {
    let blocks = libm::ceil(n / b);
    m * n * n * math::pow(b, omega.0 - 3.0) + blocks * blocks * default_subproblem_flops(2.0 * b)
}

/// Which communication model [`predict_words`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordModel {
    /// Scalar Jacobi, best ordering: `n⁴ / M`.
    Scalar,
    /// Block Jacobi: `n³ / b`.
    Block,
    /// Recursive Jacobi: `n^{3(1−f)+ω₀f} / M^{ω₀/2−1}`.
    Recursive,
    /// One-sided SVD with `b = 1`: `m²n² / M`.
    SvdScalar,
    /// One-sided SVD, blocks fit in fast memory: `mn² / b`.
    SvdBlock,
    /// One-sided SVD, blocks larger than fast memory:
    /// `mn²b^{ω₀−3} / M^{ω₀/2−1} + ⌈n/b⌉² U(2b)`, `U(s) = s^{ω₀} / M^{ω₀/2−1}`.
    SvdLarge,
}

impl FromStr for WordModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "scalar" => WordModel::Scalar,
            "block" => WordModel::Block,
            "recursive" => WordModel::Recursive,
            "svdScalar" | "svd-scalar" => WordModel::SvdScalar,
            "svdBlock" | "svd-block" => WordModel::SvdBlock,
            "svdLarge" | "svd-large" => WordModel::SvdLarge,
            other => return Err(Error::UnknownModel(other.to_string())),
        })
    }
}

/// Problem dimensions and parameters fed to the analytic models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelDims {
    pub m: f64,
    pub n: f64,
    pub b: f64,
    pub f: f64,
}

impl ModelDims {
    pub fn square(n: f64) -> Self {
        Self { m: n, n, b: 1.0, f: 0.5 }
    }
}

/// Analytic words-moved model for one sweep. No memory is simulated.
pub fn predict_words(kind: WordModel, dims: ModelDims, mem: f64, omega: Omega) -> Result<f64> {
    if mem.is_nan() || mem < 1.0 {
        return Err(Error::InvalidParameter(format!("fast memory size must be >= 1, got {mem}")));
    }
    let ModelDims { m, n, b, f } = dims;
    let w = omega.0;
    let mem_factor = math::pow(mem, w / 2.0 - 1.0);
    Ok(match kind {
        WordModel::Scalar => n * n * n * n / mem,
        WordModel::Block => n * n * n / b,
        WordModel::Recursive => predict_recursive(n, f, omega) / mem_factor,
        WordModel::SvdScalar => m * m * n * n / mem,
        WordModel::SvdBlock => m * n * n / b,
        WordModel::SvdLarge => {
            let blocks = libm::ceil(n / b);
            let sub = math::pow(2.0 * b, w) / mem_factor;
            m * n * n * math::pow(b, w - 3.0) / mem_factor + blocks * blocks * sub
        }
    })
}

/// Whether a decreasing log-block-size schedule keeps the powers of `n` in
/// the recursive cost expansion decreasing:
/// `f_{i+1} > 1 − (1 − f_i) / ((3 − ω₀) f_i)` for consecutive entries.
/// At `ω₀ = 3` the bound is `−∞` and every schedule qualifies.
pub fn schedule_admissible(schedule: &[f64], omega: Omega) -> bool {
    let gap = 3.0 - omega.0;
    schedule.windows(2).all(|w| {
        let (fi, next) = (w[0], w[1]);
        if gap <= 0.0 {
            return true;
        }
        next > 1.0 - (1.0 - fi) / (gap * fi)
    })
}

/// Computes `A B` by reading eigenvectors of the 3n×3n block upper triangular
/// matrix
///
/// ```text
/// M = | D₁  A  0  |
///     | 0   I  B  |
///     | 0   0  D₃ |
/// ```
///
/// with `D₁ = diag(2, …, n+1)` and `D₃ = diag(−2, …, −(n+1))`. For the
/// eigenvalue `λ = D₃(i, i)` the eigenvector normalized to `e_i` in its last
/// block has leading block `(λ−1)⁻¹(λI − D₁)⁻¹ A B e_i`; rescaling by
/// `(λ−1)(λI − D₁)` yields column `i` of `A B`.
///
/// Each eigenvector is obtained by block back-substitution on `(M − λI) v = 0`
/// and checked against `M v = λ v` before use.
pub fn matmul_via_eig(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    if !a.is_square() || !b.is_square() || b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "matmul_via_eig needs two n×n factors, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let d1: Vec<f64> = (0..n).map(|k| (k + 2) as f64).collect();
    let d3: Vec<f64> = (0..n).map(|k| -((k + 2) as f64)).collect();
    let big = reduction_matrix(a, b, &d1, &d3);
    let scale = big.max_abs().max(1.0);

    let mut product = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let lambda = d3[i];
        if lambda == 1.0 || d1.contains(&lambda) {
            return Err(Error::EigenvalueCollision);
        }
        let v = reduction_eigenvector(&big, n, i, lambda);
        let mv = mat_vec(&big, &v);
        let residual = mv.iter().zip(&v).fold(0.0f64, |r, (x, y)| r.max((x - lambda * y).abs()));
        let vnorm = v.iter().fold(0.0f64, |r, x| r.max(x.abs()));
        if residual > 1e-10 * scale * vnorm.max(1.0) {
            return Err(Error::EigenvalueCollision);
        }
        for k in 0..n {
            product[(k, i)] = v[k] * (lambda - 1.0) * (lambda - d1[k]);
        }
    }
    Ok(product)
}

fn reduction_matrix(a: &DenseMatrix, b: &DenseMatrix, d1: &[f64], d3: &[f64]) -> DenseMatrix {
    let n = a.rows();
    let mut m = DenseMatrix::zeros(3 * n, 3 * n);
    for r in 0..n {
        m[(r, r)] = d1[r];
        m[(n + r, n + r)] = 1.0;
        m[(2 * n + r, 2 * n + r)] = d3[r];
        for c in 0..n {
            m[(r, n + c)] = a[(r, c)];
            m[(n + r, 2 * n + c)] = b[(r, c)];
        }
    }
    m
}

/// Solves `(M − λI) v = 0` with the last block fixed to `e_i`, working upward
/// through the block upper triangular structure.
fn reduction_eigenvector(m: &DenseMatrix, n: usize, i: usize, lambda: f64) -> Vec<f64> {
    let mut v = vec![0.0; 3 * n];
    v[2 * n + i] = 1.0;
    // Middle block row: (1 − λ) v₂ + B v₃ = 0.
    for r in 0..n {
        let coupling: f64 = (0..n).map(|c| m[(n + r, 2 * n + c)] * v[2 * n + c]).sum();
        v[n + r] = -coupling / (m[(n + r, n + r)] - lambda);
    }
    // Top block row: (D₁ − λ) v₁ + A v₂ = 0.
    for r in 0..n {
        let coupling: f64 = (0..n).map(|c| m[(r, n + c)] * v[n + c]).sum();
        v[r] = -coupling / (m[(r, r)] - lambda);
    }
    v
}

fn mat_vec(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.rows()).map(|r| m.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_charges() {
        let mut l = CostLedger::new();
        l.charge_matmul(2, 2, 2);
        assert_eq!(l.flops(), 12);
        let mut l = CostLedger::new();
        l.charge_matmul(1, 1, 1);
        assert_eq!(l.flops(), 1);
        let mut l = CostLedger::new();
        l.charge_matmul(3, 4, 5);
        assert_eq!(l.flops(), 105);
        assert_eq!(eig_flops(3), 234);
        assert_eq!(lupp_flops(2, 2), 5);
        assert_eq!(qrcp_flops(4, 2), 27);
        assert_eq!(qrcp_flops(2, 4), 27);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let mut l = CostLedger::new();
        l.charge_matmul(7, 3, 5);
        l.charge_eig(11);
        l.charge_qrcp(9, 4);
        l.charge_lupp(9, 4);
        l.charge(Kernel::Rotation2x2, 17);
        let sum: u64 = l.breakdown().map(|(_, f)| f).sum();
        assert_eq!(sum, l.flops());
        let mut twice = l.clone();
        twice.merge(&l);
        assert_eq!(twice.flops(), 2 * l.flops());
    }

    #[test]
    fn block_model() {
        let w = Omega::CLASSICAL;
        assert_eq!(predict_block_sweep(64.0, 4.0, w), 64.0 * 64.0 * 4.0 + 64.0f64.powi(3));
        let ratio = predict_block_sweep(4096.0, 8.0, w) / predict_block_sweep(2048.0, 8.0, w);
        assert!((ratio - 4.0 * 4104.0 / 2056.0).abs() < 1e-12, "{ratio}");
        assert!((ratio - 8.0).abs() < 0.02);
        // b = n/2: n³/2 + n³, still cubic.
        let n = 1000.0;
        assert!((predict_block_sweep(n, n / 2.0, w) / (n * n * n) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn recursive_exponents() {
        assert!((recursive_exponent(1e-9, Omega::CLASSICAL) - 3.0).abs() < 1e-8);
        assert_eq!(recursive_exponent(0.5, Omega::CLASSICAL), 3.0);
        let w = Omega::new(2.81).unwrap();
        assert!((recursive_exponent(0.8, w) - 2.848).abs() < 1e-12);
        assert!(Omega::new(2.0).is_err());
        assert!(Omega::new(3.1).is_err());
    }

    #[test]
    fn word_models() {
        let w = Omega::CLASSICAL;
        let n = 256.0;
        let scalar = predict_words(WordModel::Scalar, ModelDims::square(n), n, w).unwrap();
        assert_eq!(scalar, n * n * n);
        let mem: f64 = 1024.0;
        let dims = ModelDims { b: mem.sqrt(), ..ModelDims::square(n) };
        let block = predict_words(WordModel::Block, dims, mem, w).unwrap();
        assert!((block - n * n * n / mem.sqrt()).abs() < 1e-6);
        let dims = ModelDims { f: 0.9, ..ModelDims::square(n) };
        let full = predict_words(WordModel::Recursive, dims, mem, w).unwrap();
        let half = predict_words(WordModel::Recursive, dims, mem / 2.0, w).unwrap();
        assert!((half / full - 2f64.sqrt()).abs() < 1e-12);
        assert!(predict_words(WordModel::Block, dims, 0.0, w).is_err());
        assert!("bogus".parse::<WordModel>().is_err());
    }

    #[test]
    fn schedule_check() {
        assert!(schedule_admissible(&[0.9, 0.1], Omega::CLASSICAL));
        let w = Omega::new(2.5).unwrap();
        // f₁ = 0.8: bound is 1 − 0.2 / 0.4 = 0.5.
        assert!(schedule_admissible(&[0.8, 0.6], w));
        assert!(!schedule_admissible(&[0.8, 0.4], w));
    }

    #[test]
    fn matmul_via_eig_scalar_case() {
        let a = DenseMatrix::from_rows(&[&[2.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[&[3.0]]).unwrap();
        let ab = matmul_via_eig(&a, &b).unwrap();
        assert!((ab[(0, 0)] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn matmul_via_eig_identity_factor() {
        let b = DenseMatrix::from_fn(3, 3, |i, j| (i as f64) - 2.0 * (j as f64) + 0.5);
        let ab = matmul_via_eig(&DenseMatrix::identity(3), &b).unwrap();
        let err = ab.sub(&b).unwrap().frobenius_norm() / b.frobenius_norm();
        assert!(err < 1e-10, "{err}");
    }
}
