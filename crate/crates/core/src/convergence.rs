use alloc::vec::Vec;

/// Metrics recorded at the end of one sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    /// 1-based sweep index.
    pub sweep: usize,
    pub max_off_diag: f64,
    pub off_diag_norm: f64,
    /// Ledger total after the sweep.
    pub cum_flops: u64,
    /// Rotations (scalar or block) applied during the sweep.
    pub rotations: usize,
}

/// Outcome and per-sweep history of one solve.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceState {
    /// `max |A⁽⁰⁾(i, j)|` over all entries of the input.
    pub reference: f64,
    /// Relative tolerance: converged once the largest off-diagonal magnitude
    /// is at most `tolerance * reference`.
    pub tolerance: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// A sweep applied nothing while the stopping rule still failed, so
    /// further sweeps could not change the matrix.
    pub stagnated: bool,
    /// Rotations applied over the whole solve.
    pub rotations: usize,
    /// Inner solves (block subproblems at any recursion depth) that hit their
    /// sweep cap without converging.
    pub subproblem_failures: usize,
    pub history: Vec<SweepRecord>,
}

impl ConvergenceState {
    pub fn new(reference: f64, tolerance: f64) -> Self {
        Self {
            reference,
            tolerance,
            sweeps: 0,
            converged: false,
            stagnated: false,
            rotations: 0,
            subproblem_failures: 0,
            history: Vec::new(),
        }
    }

    /// Absolute threshold the stopping and rotation rules compare against.
    pub fn threshold(&self) -> f64 {
        self.tolerance * self.reference
    }

    pub(crate) fn record(&mut self, record: SweepRecord) {
        debug_assert_eq!(record.sweep, self.history.len() + 1);
        self.history.push(record);
    }

    /// Largest off-diagonal magnitude after the last sweep, if any ran.
    pub fn final_max_off_diag(&self) -> Option<f64> {
        self.history.last().map(|r| r.max_off_diag)
    }
}
