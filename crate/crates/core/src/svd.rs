//! One-sided Jacobi SVD: block Jacobi run implicitly on `GᵀG`, with each
//! Gram block formed from the current columns of `G`.

use alloc::vec::Vec;

use crate::block::{block_jacobi, direct_sub_solve, BlockJacobiConfig};
use crate::convergence::{ConvergenceState, SweepRecord};
use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{off_diag_norm, scaled_entry, BlockPartition, DenseMatrix, SymmetricMatrix};
use crate::ordering::{next_max_pivot_block, OrderingKind, PairSchedule};
use crate::pivot::{householder_qr, pivot_fix, PivotMode};
use crate::recursive::{recursive_jacobi, RecursiveJacobiConfig};
use crate::rotation::{rotate_block_rows, OrthogonalAccumulator};
use crate::scalar::{check_sweeps, check_tolerance, run_scalar, Criterion, ScalarJacobiConfig, ScalarRun};

/// Eigensolver for the 2b×2b Gram blocks.
#[derive(Clone, Debug, PartialEq)]
pub enum GramSolver {
    /// Scalar Jacobi using the scaled criterion
    /// `|a_ij| / sqrt(a_ii a_jj)` for both its trigger and stopping rule.
    ScalarJacobi(ScalarJacobiConfig),
    /// Uses the absolute criterion on `Â`, so its tolerance must be tight
    /// enough for the smallest column pair to meet the outer scaled one.
    BlockJacobi(BlockJacobiConfig),
    /// Same caveat as `BlockJacobi`.
    RecursiveJacobi(RecursiveJacobiConfig),
    DirectReference,
}

impl Default for GramSolver {
    fn default() -> Self {
        GramSolver::ScalarJacobi(ScalarJacobiConfig::default())
    }
}

/// QR factorization applied before the Jacobi iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preprocess {
    #[default]
    None,
    Qr,
    Qrcp,
}

/// Options for [`jacobi_svd`].
#[derive(Clone, Debug, PartialEq)]
pub struct SvdConfig {
    /// Block size over columns.
    pub block_size: usize,
    pub ordering: OrderingKind,
    pub pivot: PivotMode,
    pub gram_solver: GramSolver,
    pub preprocess: Preprocess,
    /// Converged once `|gᵢᵀgⱼ| ≤ tol · ‖gᵢ‖‖gⱼ‖` for all column pairs.
    pub relative_tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SvdConfig {
    fn default() -> Self {
        Self {
            block_size: 4,
            ordering: OrderingKind::RowCyclic,
            pivot: PivotMode::None,
            gram_solver: GramSolver::default(),
            preprocess: Preprocess::None,
            relative_tolerance: crate::DEFAULT_TOLERANCE,
            max_sweeps: 50,
        }
    }
}

/// `G ≈ U diag(sigma) Vᵀ`, singular values in the solver's column order.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdResult {
    /// m×n; columns belonging to zero singular values are zero.
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    /// n×n orthogonal.
    pub v: DenseMatrix,
    /// `max_off_diag` in the history is the scaled Gram measure;
    /// `off_diag_norm` is the unscaled `Ξ(GᵀG)`.
    pub state: ConvergenceState,
}

/// `Q`, `R`, and the column permutation of `G P = Q R`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrFactors {
    /// m×n with orthonormal columns.
    pub q: DenseMatrix,
    /// n×n upper triangular.
    pub r: DenseMatrix,
    /// Column `k` of `G P` is column `perm[k]` of `G`.
    pub perm: Vec<usize>,
}

/// Householder QR of an m×n matrix, `m ≥ n`, with column pivoting iff
/// `pivoted`. Charged with the QRCP formula either way.
pub fn qr_preprocess(g: &DenseMatrix, pivoted: bool, ledger: &mut CostLedger) -> Result<QrFactors> {
    let (m, n) = (g.rows(), g.cols());
    if m < n {
        return Err(Error::TransposeFirst { rows: m, cols: n });
    }
    let res = householder_qr(g, pivoted)?;
    ledger.charge_qrcp(m, n);
    Ok(QrFactors { q: res.q, r: res.r, perm: res.perm })
}

/// Singular value decomposition of an m×n matrix with `m ≥ n`.
pub fn jacobi_svd(g: &DenseMatrix, cfg: &SvdConfig, ledger: &mut CostLedger) -> Result<SvdResult> {
    check_tolerance("relative tolerance", cfg.relative_tolerance)?;
    check_sweeps(cfg.max_sweeps)?;
    if let GramSolver::ScalarJacobi(inner) = &cfg.gram_solver {
        inner.validate()?;
    }
    let (m, n) = (g.rows(), g.cols());
    if m < n {
        return Err(Error::TransposeFirst { rows: m, cols: n });
    }
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: m, cols: n });
    }
    if !g.all_finite() {
        return Err(Error::NonFinite);
    }
    match cfg.preprocess {
        Preprocess::None => one_sided(g, cfg, ledger),
        Preprocess::Qr | Preprocess::Qrcp => {
            // G P = Q R and Rᵀ = U' Σ V'ᵀ give G = (Q V') Σ (P U')ᵀ.
            let qr = qr_preprocess(g, cfg.preprocess == Preprocess::Qrcp, ledger)?;
            let inner = one_sided(&qr.r.transpose(), cfg, ledger)?;
            let u = qr.q.matmul(&inner.v)?;
            let mut v = DenseMatrix::zeros(n, n);
            for (k, &p) in qr.perm.iter().enumerate() {
                v.row_mut(p).copy_from_slice(inner.u.row(k));
            }
            Ok(SvdResult { u, sigma: inner.sigma, v, state: inner.state })
        }
    }
}

/// Gram matrix of the rows `idx` of the transposed working matrix.
fn gram_block(gt: &DenseMatrix, idx: &[usize]) -> SymmetricMatrix {
    let s = idx.len();
    let mut out = DenseMatrix::zeros(s, s);
    for p in 0..s {
        let x = gt.row(idx[p]);
        for q in p..s {
            let y = gt.row(idx[q]);
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            out[(p, q)] = dot;
            out[(q, p)] = dot;
        }
    }
    SymmetricMatrix::from_dense(out).expect("Gram matrix is symmetric by construction")
}

fn gram_solve(
    a_hat: &mut SymmetricMatrix,
    solver: &GramSolver,
    ledger: &mut CostLedger,
) -> Result<(DenseMatrix, usize, bool)> {
    let s = a_hat.n();
    match solver {
        GramSolver::ScalarJacobi(inner) => {
            let run = ScalarRun {
                ordering: inner.ordering,
                stop: inner.relative_tolerance,
                trigger: inner.rotation_trigger_tolerance,
                max_sweeps: inner.max_sweeps,
                adversarial: inner.adversarial,
                criterion: Criterion::Scaled,
            };
            let mut state = ConvergenceState::new(1.0, inner.relative_tolerance);
            let mut acc = OrthogonalAccumulator::identity(s);
            run_scalar(a_hat, &mut acc, &run, &mut state, ledger)?;
            Ok((acc.into_matrix(), state.rotations, state.converged))
        }
        GramSolver::BlockJacobi(cfg) => {
            let res = block_jacobi(a_hat, cfg, ledger)?;
            Ok((res.q, res.state.rotations, res.state.converged))
        }
        GramSolver::RecursiveJacobi(cfg) => {
            let res = recursive_jacobi(a_hat, cfg, ledger)?;
            Ok((res.q, res.state.rotations, res.state.converged))
        }
        GramSolver::DirectReference => {
            let sub = direct_sub_solve(a_hat, ledger)?;
            Ok((sub.q, sub.rotations, true))
        }
    }
}

/// Full Gram matrix with entries `|gᵢᵀgⱼ| / (‖gᵢ‖‖gⱼ‖)` and a zero diagonal.
fn scaled_gram(gt: &DenseMatrix) -> SymmetricMatrix {
    let n = gt.rows();
    let gram = gram_block(gt, &(0..n).collect::<Vec<_>>());
    SymmetricMatrix::from_upper(n, |i, j| {
        if i == j {
            0.0
        } else {
            scaled_entry(gram.get(i, j), gram.get(i, i), gram.get(j, j))
        }
    })
}

/// Scaled and unscaled off-diagonal measures of the full Gram matrix, used
/// only for the stopping rule and reporting.
fn gram_metrics(gt: &DenseMatrix) -> (f64, f64) {
    let n = gt.rows();
    let gram = gram_block(gt, &(0..n).collect::<Vec<_>>());
    (Criterion::Scaled.max_off_diag(&gram), off_diag_norm(&gram))
}

fn one_sided(g: &DenseMatrix, cfg: &SvdConfig, ledger: &mut CostLedger) -> Result<SvdResult> {
    let (m, n) = (g.rows(), g.cols());
    let tol = cfg.relative_tolerance;
    let mut gt = g.transpose();
    let mut v = OrthogonalAccumulator::identity(n);
    let mut state = ConvergenceState::new(1.0, tol);

    if n == 1 || gram_metrics(&gt).0 <= tol {
        state.converged = true;
    } else {
        let part = BlockPartition::new(n, cfg.block_size)?;
        if part.count() < 2 {
            return Err(Error::InvalidBlockSize { n, b: cfg.block_size, reason: "need at least two blocks" });
        }
        let mut schedule = PairSchedule::new(cfg.ordering, part.count())?;
        for k in 1..=cfg.max_sweeps {
            let mut applied = 0;
            let mut visit = |bi: usize, bj: usize, gt: &mut DenseMatrix, ledger: &mut CostLedger| -> Result<bool> {
                ledger.block_pair_visits += 1;
                let idx = part.pair_indices(bi, bj);
                let s = idx.len();
                let mut a_hat = gram_block(gt, &idx);
                ledger.charge_matmul(s, m, s);
                if Criterion::Scaled.max_off_diag(&a_hat) <= tol {
                    return Ok(false);
                }
                let (mut vhat, rotations, converged) = gram_solve(&mut a_hat, &cfg.gram_solver, ledger)?;
                state.subproblem_failures += usize::from(!converged);
                if rotations == 0 {
                    return Ok(false);
                }
                if cfg.pivot != PivotMode::None {
                    pivot_fix(&mut vhat, part.width(bi), cfg.pivot, ledger)?;
                }
                rotate_block_rows(gt, &idx, &vhat);
                ledger.charge_matmul(m, s, s);
                v.rotate_block(&idx, &vhat, ledger);
                applied += 1;
                Ok(true)
            };
            match schedule.next_sweep() {
                Some(pairs) => {
                    for (bi, bj) in pairs {
                        visit(bi, bj, &mut gt, ledger)?;
                    }
                }
                None => {
                    for _ in 0..schedule.steps_per_sweep() {
                        let (bi, bj) = next_max_pivot_block(&scaled_gram(&gt), &part)?;
                        if !visit(bi, bj, &mut gt, ledger)? {
                            break;
                        }
                    }
                }
            }
            ledger.sweeps += 1;
            state.rotations += applied;
            state.sweeps = k;
            let (scaled, fro) = gram_metrics(&gt);
            state.record(SweepRecord {
                sweep: k,
                max_off_diag: scaled,
                off_diag_norm: fro,
                cum_flops: ledger.flops(),
                rotations: applied,
            });
            if scaled <= tol {
                state.converged = true;
                break;
            }
            if applied == 0 {
                state.stagnated = true;
                break;
            }
        }
    }
    let sigma: Vec<f64> = (0..n).map(|j| math::sqrt(gt.row(j).iter().map(|x| x * x).sum())).collect();
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    let mut u = DenseMatrix::zeros(m, n);
    for (j, &sj) in sigma.iter().enumerate() {
        if sj > f64::EPSILON * largest {
            for (i, &x) in gt.row(j).iter().enumerate() {
                u[(i, j)] = x / sj;
            }
        }
    }
    Ok(SvdResult { u, sigma, v: v.into_matrix(), state })
}
