//! Recursive Jacobi: block sweeps with `b = n^f`, each subproblem solved by
//! a recursive call until it is small enough for a direct solve.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::block::{block_sweeps, direct_sub_solve, validate_input, SubSolve, SweepParams};
use crate::convergence::ConvergenceState;
use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{max_off_diag_value, BlockPartition, SymmetricMatrix};
use crate::ordering::OrderingKind;
use crate::pivot::PivotMode;
use crate::rotation::OrthogonalAccumulator;
use crate::scalar::{
    check_sweeps, check_tolerance, run_scalar, sort_descending, Criterion, EigenDecomposition, ScalarRun,
};

/// Solver for base-case subproblems.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BaseSolver {
    #[default]
    ScalarJacobi,
    DirectReference,
}

/// Options for [`recursive_jacobi`].
#[derive(Clone, Debug, PartialEq)]
pub struct RecursiveJacobiConfig {
    /// Log block size `f`: a level of order `n` uses blocks of `round(n^f)`.
    pub log_block_size: f64,
    /// Per-depth values of `f` overriding `log_block_size`; the last entry
    /// repeats once the schedule runs out.
    pub f_schedule: Vec<f64>,
    /// Levels of order below this are solved directly.
    pub n_threshold: usize,
    /// Depth (top level = 0) at which subproblems are solved directly.
    pub max_depth: Option<usize>,
    /// Relative tolerance of base-case solves below the top level; defaults
    /// to `relative_tolerance`.
    pub base_tolerance: Option<f64>,
    pub base_solver: BaseSolver,
    pub ordering: OrderingKind,
    pub pivot: PivotMode,
    pub relative_tolerance: f64,
    /// Sweep cap applied at every level.
    pub max_sweeps: usize,
}

impl Default for RecursiveJacobiConfig {
    fn default() -> Self {
        Self {
            log_block_size: 0.5,
            f_schedule: Vec::new(),
            n_threshold: 4,
            max_depth: None,
            base_tolerance: None,
            base_solver: BaseSolver::ScalarJacobi,
            ordering: OrderingKind::RowCyclic,
            pivot: PivotMode::None,
            relative_tolerance: crate::DEFAULT_TOLERANCE,
            max_sweeps: 50,
        }
    }
}

impl RecursiveJacobiConfig {
    fn validate(&self) -> Result<()> {
        for &f in core::iter::once(&self.log_block_size).chain(&self.f_schedule) {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidParameter(format!("log block size must lie in (0, 1), got {f}")));
            }
        }
        if self.n_threshold == 0 {
            return Err(Error::InvalidParameter(String::from("n_threshold must be positive")));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidParameter(String::from("max depth must be positive")));
        }
        check_tolerance("relative tolerance", self.relative_tolerance)?;
        check_tolerance("base tolerance", self.base_tolerance())?;
        check_sweeps(self.max_sweeps)
    }

    pub fn base_tolerance(&self) -> f64 {
        self.base_tolerance.unwrap_or(self.relative_tolerance)
    }

    /// `f` used at recursion depth `depth`.
    pub fn f_at(&self, depth: usize) -> f64 {
        match self.f_schedule.get(depth).or(self.f_schedule.last()) {
            Some(&f) => f,
            None => self.log_block_size,
        }
    }

    /// Conditions of the complexity analysis that this configuration
    /// violates. They do not affect correctness.
    pub fn theory_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let limit = math::log2(self.n_threshold as f64);
        let mut fs: Vec<f64> = self.f_schedule.clone();
        if fs.is_empty() {
            fs.push(self.log_block_size);
        }
        for f in fs {
            if 1.0 / (1.0 - f) >= limit {
                out.push(format!(
                    "1/(1-f) = {:.3} is not below log2(n_threshold) = {limit:.3} for f = {f}",
                    1.0 / (1.0 - f)
                ));
            }
        }
        if self.f_schedule.windows(2).any(|w| w[1] > w[0]) {
            out.push(String::from("f schedule is not non-increasing"));
        }
        out
    }
}

/// `max(1, round(n^f))`.
pub fn effective_block_size(n: usize, f: f64) -> usize {
    (math::round(math::pow(n as f64, f)) as usize).max(1)
}

/// Diagonalizes `a` in place.
///
/// The stopping threshold `relative_tolerance · max |A⁽⁰⁾|` uses the input
/// at the top level for every recursion depth.
pub fn recursive_jacobi(
    a: &mut SymmetricMatrix,
    cfg: &RecursiveJacobiConfig,
    ledger: &mut CostLedger,
) -> Result<EigenDecomposition> {
    cfg.validate()?;
    validate_input(a)?;
    let reference = a.max_abs();
    let (acc, state) = level(a, cfg, 0, reference, ledger)?;
    Ok(EigenDecomposition { q: acc.into_matrix(), values: a.diagonal(), state })
}

fn is_base_case(n: usize, b: usize, depth: usize, cfg: &RecursiveJacobiConfig) -> bool {
    n < cfg.n_threshold || 2 * b >= n || cfg.max_depth == Some(depth)
}

fn level(
    a: &mut SymmetricMatrix,
    cfg: &RecursiveJacobiConfig,
    depth: usize,
    reference: f64,
    ledger: &mut CostLedger,
) -> Result<(OrthogonalAccumulator, ConvergenceState)> {
    let n = a.n();
    let b = effective_block_size(n, cfg.f_at(depth));
    if is_base_case(n, b, depth, cfg) {
        let tol = if depth == 0 { cfg.relative_tolerance } else { cfg.base_tolerance() };
        return base_solve(a, cfg, tol, reference, ledger);
    }
    let part = BlockPartition::new(n, b)?;
    let params = SweepParams {
        ordering: cfg.ordering,
        pivot: cfg.pivot,
        tolerance: cfg.relative_tolerance,
        reference,
        max_sweeps: cfg.max_sweeps,
    };
    block_sweeps(a, &part, &params, ledger, |a_hat, ledger| {
        let (acc, state) = level(a_hat, cfg, depth + 1, reference, ledger)?;
        Ok(SubSolve {
            q: acc.into_matrix(),
            rotations: state.rotations,
            converged: state.converged,
            nested_failures: state.subproblem_failures,
        })
    })
}

fn base_solve(
    a: &mut SymmetricMatrix,
    cfg: &RecursiveJacobiConfig,
    tol: f64,
    reference: f64,
    ledger: &mut CostLedger,
) -> Result<(OrthogonalAccumulator, ConvergenceState)> {
    let n = a.n();
    let mut state = ConvergenceState::new(reference, tol);
    match cfg.base_solver {
        BaseSolver::ScalarJacobi => {
            let run = ScalarRun {
                ordering: cfg.ordering,
                stop: tol * reference,
                trigger: tol * reference,
                max_sweeps: cfg.max_sweeps,
                adversarial: false,
                criterion: Criterion::Absolute,
            };
            let mut acc = OrthogonalAccumulator::identity(n);
            run_scalar(a, &mut acc, &run, &mut state, ledger)?;
            if state.rotations > 0 {
                sort_descending(a, &mut acc);
            }
            Ok((acc, state))
        }
        BaseSolver::DirectReference => {
            if n < 2 || max_off_diag_value(a) <= state.threshold() {
                state.converged = true;
                return Ok((OrthogonalAccumulator::identity(n), state));
            }
            let sub = direct_sub_solve(a, ledger)?;
            state.converged = true;
            state.rotations = 1;
            Ok((OrthogonalAccumulator::from_matrix(&sub.q), state))
        }
    }
}
