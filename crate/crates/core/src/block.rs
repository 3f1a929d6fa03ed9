//! Block Jacobi: diagonalize 2b×2b cross submatrices and apply the
//! resulting block rotations.

use crate::convergence::{ConvergenceState, SweepRecord};
use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::matrix::{gather_indices, max_off_diag_value, off_diag_norm, BlockPartition, DenseMatrix, SymmetricMatrix};
use crate::ordering::{next_max_pivot_block, OrderingKind, PairSchedule};
use crate::pivot::{pivot_fix, PivotMode};
use crate::reference::symmetric_eigen;
use crate::rotation::{block_two_sided_indices, OrthogonalAccumulator};
use crate::scalar::{
    check_sweeps, check_tolerance, run_scalar, sort_descending, Criterion, EigenDecomposition, ScalarJacobiConfig,
    ScalarRun,
};

/// How each 2b×2b subproblem is diagonalized.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockSolver {
    /// Scalar Jacobi; its tolerances are taken relative to the largest entry
    /// of the full input, not of the subproblem.
    ScalarJacobi(ScalarJacobiConfig),
    /// Dense tridiagonal-QL solver, eigenvalues sorted descending.
    DirectReference,
}

impl Default for BlockSolver {
    fn default() -> Self {
        BlockSolver::ScalarJacobi(ScalarJacobiConfig::default())
    }
}

/// Options for [`block_jacobi`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlockJacobiConfig {
    pub block_size: usize,
    /// Ordering over block indices.
    pub ordering: OrderingKind,
    pub pivot: PivotMode,
    pub solver: BlockSolver,
    /// Run the inner scalar solves with sabotaged angles.
    pub adversarial: bool,
    /// Sweep cap of each inner solve in adversarial mode.
    pub adversarial_sweep_cap: usize,
    pub relative_tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for BlockJacobiConfig {
    fn default() -> Self {
        Self {
            block_size: 8,
            ordering: OrderingKind::RowCyclic,
            pivot: PivotMode::None,
            solver: BlockSolver::default(),
            adversarial: false,
            adversarial_sweep_cap: 4,
            relative_tolerance: crate::DEFAULT_TOLERANCE,
            max_sweeps: 50,
        }
    }
}

impl BlockJacobiConfig {
    fn validate(&self) -> Result<()> {
        check_tolerance("relative tolerance", self.relative_tolerance)?;
        check_sweeps(self.max_sweeps)?;
        check_sweeps(self.adversarial_sweep_cap)?;
        if let BlockSolver::ScalarJacobi(inner) = &self.solver {
            inner.validate()?;
        }
        Ok(())
    }
}

/// Result of diagonalizing one subproblem.
#[derive(Clone, Debug, PartialEq)]
pub struct SubSolve {
    /// Orthogonal `Q̂` with `Q̂ᵀ Â Q̂` (approximately) diagonal.
    pub q: DenseMatrix,
    /// Rotations the inner solver applied; zero means `Q̂ = I`.
    pub rotations: usize,
    pub converged: bool,
    /// Failed solves nested inside this one.
    pub nested_failures: usize,
}

/// Diagonalizes the gathered subproblem `a_hat` in place with the configured
/// backend. `reference` is the largest entry of the full input matrix.
pub fn block_sub_solve(
    a_hat: &mut SymmetricMatrix,
    cfg: &BlockJacobiConfig,
    reference: f64,
    ledger: &mut CostLedger,
) -> Result<SubSolve> {
    let s = a_hat.n();
    match &cfg.solver {
        BlockSolver::ScalarJacobi(inner) => {
            let run = ScalarRun {
                ordering: inner.ordering,
                stop: inner.relative_tolerance * reference,
                trigger: inner.rotation_trigger_tolerance * reference,
                max_sweeps: if cfg.adversarial { cfg.adversarial_sweep_cap } else { inner.max_sweeps },
                adversarial: cfg.adversarial,
                criterion: Criterion::Absolute,
            };
            let mut state = ConvergenceState::new(reference, inner.relative_tolerance);
            let mut acc = OrthogonalAccumulator::identity(s);
            run_scalar(a_hat, &mut acc, &run, &mut state, ledger)?;
            // Sorting would undo the swapped eigenvalue order of sabotaged runs.
            if !cfg.adversarial && state.rotations > 0 {
                sort_descending(a_hat, &mut acc);
            }
            Ok(SubSolve {
                q: acc.into_matrix(),
                rotations: state.rotations,
                converged: state.converged,
                nested_failures: 0,
            })
        }
        BlockSolver::DirectReference => direct_sub_solve(a_hat, ledger),
    }
}

pub(crate) fn direct_sub_solve(a_hat: &mut SymmetricMatrix, ledger: &mut CostLedger) -> Result<SubSolve> {
    let eig = symmetric_eigen(a_hat)?;
    ledger.charge_eig(a_hat.n());
    *a_hat = SymmetricMatrix::from_diagonal(&eig.values);
    Ok(SubSolve { q: eig.vectors, rotations: 1, converged: true, nested_failures: 0 })
}

/// Outer-loop options shared by block and recursive Jacobi.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SweepParams {
    pub ordering: OrderingKind,
    pub pivot: PivotMode,
    pub tolerance: f64,
    pub reference: f64,
    pub max_sweeps: usize,
}

/// Block sweeps over `part` until `max |A(i, j)| ≤ tolerance · reference`,
/// with `sub_solve` diagonalizing each gathered subproblem.
pub(crate) fn block_sweeps<F>(
    a: &mut SymmetricMatrix,
    part: &BlockPartition,
    params: &SweepParams,
    ledger: &mut CostLedger,
    mut sub_solve: F,
) -> Result<(OrthogonalAccumulator, ConvergenceState)>
where
    F: FnMut(&mut SymmetricMatrix, &mut CostLedger) -> Result<SubSolve>,
{
    let n = a.n();
    let mut acc = OrthogonalAccumulator::identity(n);
    let mut state = ConvergenceState::new(params.reference, params.tolerance);
    let threshold = state.threshold();
    if max_off_diag_value(a) <= threshold {
        state.converged = true;
        return Ok((acc, state));
    }
    let mut schedule = PairSchedule::new(params.ordering, part.count())?;

    for k in 1..=params.max_sweeps {
        let mut applied = 0;
        let mut visit = |bi: usize, bj: usize, a: &mut SymmetricMatrix, ledger: &mut CostLedger| -> Result<bool> {
            ledger.block_pair_visits += 1;
            let idx = part.pair_indices(bi, bj);
            let mut a_hat = gather_indices(a, &idx);
            if max_off_diag_value(&a_hat) <= threshold {
                return Ok(false);
            }
            let sub = sub_solve(&mut a_hat, ledger)?;
            state.subproblem_failures += sub.nested_failures + usize::from(!sub.converged);
            if sub.rotations == 0 {
                return Ok(false);
            }
            let mut qhat = sub.q;
            if params.pivot != PivotMode::None {
                pivot_fix(&mut qhat, part.width(bi), params.pivot, ledger)?;
            }
            block_two_sided_indices(a, &idx, &qhat, ledger);
            acc.rotate_block(&idx, &qhat, ledger);
            applied += 1;
            Ok(true)
        };
        match schedule.next_sweep() {
            Some(pairs) => {
                for (bi, bj) in pairs {
                    visit(bi, bj, a, ledger)?;
                }
            }
            None => {
                for _ in 0..schedule.steps_per_sweep() {
                    let (bi, bj) = next_max_pivot_block(a, part)?;
                    if !visit(bi, bj, a, ledger)? {
                        break;
                    }
                }
            }
        }
        ledger.sweeps += 1;
        state.rotations += applied;
        state.sweeps = k;
        let max = max_off_diag_value(a);
        state.record(SweepRecord {
            sweep: k,
            max_off_diag: max,
            off_diag_norm: off_diag_norm(a),
            cum_flops: ledger.flops(),
            rotations: applied,
        });
        if max <= threshold {
            state.converged = true;
            break;
        }
        if applied == 0 {
            state.stagnated = true;
            break;
        }
    }
    Ok((acc, state))
}

pub(crate) fn validate_input(a: &SymmetricMatrix) -> Result<()> {
    if a.n() == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    if !a.as_dense().all_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Diagonalizes `a` in place with block rotations.
///
/// The partition must contain at least two blocks. Non-convergence within
/// `max_sweeps` is reported through `state.converged`.
pub fn block_jacobi(
    a: &mut SymmetricMatrix,
    cfg: &BlockJacobiConfig,
    ledger: &mut CostLedger,
) -> Result<EigenDecomposition> {
    cfg.validate()?;
    validate_input(a)?;
    let n = a.n();
    let part = BlockPartition::new(n, cfg.block_size)?;
    if part.count() < 2 {
        return Err(Error::InvalidBlockSize { n, b: cfg.block_size, reason: "need at least two blocks" });
    }
    let reference = a.max_abs();
    let params = SweepParams {
        ordering: cfg.ordering,
        pivot: cfg.pivot,
        tolerance: cfg.relative_tolerance,
        reference,
        max_sweeps: cfg.max_sweeps,
    };
    let (acc, state) =
        block_sweeps(a, &part, &params, ledger, |a_hat, ledger| block_sub_solve(a_hat, cfg, reference, ledger))?;
    Ok(EigenDecomposition { q: acc.into_matrix(), values: a.diagonal(), state })
}
