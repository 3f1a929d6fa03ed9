//! Classical (scalar) Jacobi: one 2×2 rotation per off-diagonal pair.

use alloc::vec::Vec;

use crate::convergence::{ConvergenceState, SweepRecord};
use crate::cost::CostLedger;
use crate::error::{Error, Result};
use crate::matrix::{
    gather_indices, max_off_diag_value, max_scaled_off_diag, off_diag_norm, scaled_entry, DenseMatrix, SymmetricMatrix,
};
use crate::ordering::{OrderingKind, PairSchedule};
use crate::rotation::{charge_scalar_rotation, solve2x2, two_sided_unchecked, OrthogonalAccumulator};

/// Options for [`scalar_jacobi`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarJacobiConfig {
    pub ordering: OrderingKind,
    /// Stop once every `|A(i, j)|` is at most this multiple of `max |A⁽⁰⁾|`.
    pub relative_tolerance: f64,
    pub max_sweeps: usize,
    /// Rotate by `θ + π/2` instead of `θ`.
    pub adversarial: bool,
    /// Only rotate pairs whose entry exceeds this multiple of `max |A⁽⁰⁾|`.
    pub rotation_trigger_tolerance: f64,
}

impl Default for ScalarJacobiConfig {
    fn default() -> Self {
        Self {
            ordering: OrderingKind::RowCyclic,
            relative_tolerance: crate::DEFAULT_TOLERANCE,
            max_sweeps: 50,
            adversarial: false,
            rotation_trigger_tolerance: crate::DEFAULT_TOLERANCE,
        }
    }
}

impl ScalarJacobiConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        check_tolerance("relative tolerance", self.relative_tolerance)?;
        check_tolerance("rotation trigger tolerance", self.rotation_trigger_tolerance)?;
        check_sweeps(self.max_sweeps)
    }
}

pub(crate) fn check_tolerance(name: &str, tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("{name} must lie in (0, 1), got {tol}")));
    }
    Ok(())
}

pub(crate) fn check_sweeps(max_sweeps: usize) -> Result<()> {
    if max_sweeps == 0 {
        return Err(Error::InvalidParameter(alloc::string::String::from("max sweeps must be positive")));
    }
    Ok(())
}

/// `A = Q diag(values) Qᵀ`, with `values` in the solver's diagonal order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub q: DenseMatrix,
    pub values: Vec<f64>,
    pub state: ConvergenceState,
}

/// How an off-diagonal entry is measured against the thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Criterion {
    /// `|A(i, j)|`.
    Absolute,
    /// `|A(i, j)| / sqrt(A(i, i) A(j, j))`, for Gram matrices.
    Scaled,
}

impl Criterion {
    #[inline]
    fn measure(self, a: &SymmetricMatrix, i: usize, j: usize) -> f64 {
        let aij = a.get(i, j);
        match self {
            Criterion::Absolute => aij.abs(),
            Criterion::Scaled => scaled_entry(aij, a.get(i, i), a.get(j, j)),
        }
    }

    pub(crate) fn max_off_diag(self, a: &SymmetricMatrix) -> f64 {
        match self {
            Criterion::Absolute => max_off_diag_value(a),
            Criterion::Scaled => max_scaled_off_diag(a),
        }
    }

    fn argmax(self, a: &SymmetricMatrix) -> (usize, usize, f64) {
        let n = a.n();
        let mut best = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.measure(a, i, j);
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        best
    }
}

/// Absolute thresholds and options for one run of the scalar engine.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ScalarRun {
    pub ordering: OrderingKind,
    pub stop: f64,
    pub trigger: f64,
    pub max_sweeps: usize,
    pub adversarial: bool,
    pub criterion: Criterion,
}

/// Zeroes `A(i, j)` with one rotation and records it in `acc`.
fn rotate_pair(
    a: &mut SymmetricMatrix,
    acc: &mut OrthogonalAccumulator,
    i: usize,
    j: usize,
    adversarial: bool,
    ledger: &mut CostLedger,
) {
    let (r, d) = solve2x2(a.get(i, i), a.get(i, j), a.get(j, j), adversarial);
    let r = r.at(i, j);
    two_sided_unchecked(a, &r);
    a.set(i, i, d[0]);
    a.set(j, j, d[1]);
    a.set(i, j, 0.0);
    acc.rotate(&r);
    charge_scalar_rotation(ledger, a.n());
}

fn sweep(
    a: &mut SymmetricMatrix,
    acc: &mut OrthogonalAccumulator,
    schedule: &mut PairSchedule,
    run: &ScalarRun,
    ledger: &mut CostLedger,
) -> usize {
    let mut applied = 0;
    match schedule.next_sweep() {
        Some(pairs) => {
            for (i, j) in pairs {
                if run.criterion.measure(a, i, j) > run.trigger {
                    rotate_pair(a, acc, i, j, run.adversarial, ledger);
                    applied += 1;
                }
            }
        }
        None => {
            for _ in 0..schedule.steps_per_sweep() {
                let (i, j, v) = run.criterion.argmax(a);
                if v <= run.trigger {
                    break;
                }
                rotate_pair(a, acc, i, j, run.adversarial, ledger);
                applied += 1;
            }
        }
    }
    applied
}

/// Runs sweeps until the stopping rule holds, the sweep cap is reached, or a
/// sweep applies nothing.
pub(crate) fn run_scalar(
    a: &mut SymmetricMatrix,
    acc: &mut OrthogonalAccumulator,
    run: &ScalarRun,
    state: &mut ConvergenceState,
    ledger: &mut CostLedger,
) -> Result<()> {
    let n = a.n();
    if n < 2 || run.criterion.max_off_diag(a) <= run.stop {
        state.converged = true;
        return Ok(());
    }
    let mut schedule = PairSchedule::new(run.ordering, n)?;
    for k in 1..=run.max_sweeps {
        let applied = sweep(a, acc, &mut schedule, run, ledger);
        ledger.sweeps += 1;
        state.rotations += applied;
        state.sweeps = k;
        let max = run.criterion.max_off_diag(a);
        state.record(SweepRecord {
            sweep: k,
            max_off_diag: max,
            off_diag_norm: off_diag_norm(a),
            cum_flops: ledger.flops(),
            rotations: applied,
        });
        if max <= run.stop {
            state.converged = true;
            break;
        }
        if applied == 0 {
            state.stagnated = true;
            break;
        }
    }
    Ok(())
}

/// Diagonalizes `a` in place.
///
/// Non-convergence within `max_sweeps` is reported through
/// `state.converged`, not as an error.
pub fn scalar_jacobi(
    a: &mut SymmetricMatrix,
    cfg: &ScalarJacobiConfig,
    ledger: &mut CostLedger,
) -> Result<EigenDecomposition> {
    cfg.validate()?;
    let n = a.n();
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    if !a.as_dense().all_finite() {
        return Err(Error::NonFinite);
    }
    let reference = a.max_abs();
    let mut state = ConvergenceState::new(reference, cfg.relative_tolerance);
    let run = ScalarRun {
        ordering: cfg.ordering,
        stop: cfg.relative_tolerance * reference,
        trigger: cfg.rotation_trigger_tolerance * reference,
        max_sweeps: cfg.max_sweeps,
        adversarial: cfg.adversarial,
        criterion: Criterion::Absolute,
    };
    let mut acc = OrthogonalAccumulator::identity(n);
    run_scalar(a, &mut acc, &run, &mut state, ledger)?;
    Ok(EigenDecomposition { q: acc.into_matrix(), values: a.diagonal(), state })
}

/// One pass of `schedule` over `a`, rotating every pair whose entry exceeds
/// `trigger` in magnitude. Returns the number of rotations applied.
pub fn single_sweep(
    a: &mut SymmetricMatrix,
    q: &mut OrthogonalAccumulator,
    schedule: &mut PairSchedule,
    trigger: f64,
    adversarial: bool,
    ledger: &mut CostLedger,
) -> Result<usize> {
    if q.n() != a.n() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "accumulator has order {}, matrix has order {}",
            q.n(),
            a.n()
        )));
    }
    let run = ScalarRun {
        ordering: schedule.kind(),
        stop: 0.0,
        trigger,
        max_sweeps: 1,
        adversarial,
        criterion: Criterion::Absolute,
    };
    let applied = sweep(a, q, schedule, &run, ledger);
    ledger.sweeps += 1;
    Ok(applied)
}

/// Reorders a finished subproblem so the diagonal of `a` is descending,
/// permuting the columns of `acc` to match.
pub(crate) fn sort_descending(a: &mut SymmetricMatrix, acc: &mut OrthogonalAccumulator) {
    let d = a.diagonal();
    let mut perm: Vec<usize> = (0..d.len()).collect();
    perm.sort_by(|&x, &y| d[y].total_cmp(&d[x]));
    *a = gather_indices(a, &perm);
    acc.permute_columns(&perm);
}
