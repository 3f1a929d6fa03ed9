//! Solver selection shared by the command line and config files.

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use jacobi_core::block::BlockSolver;
use jacobi_core::svd::{GramSolver, Preprocess};
use jacobi_core::{
    block_jacobi, jacobi_svd, recursive_jacobi, scalar_jacobi, BlockJacobiConfig, ConvergenceState, CostLedger,
    DenseMatrix, OrderingKind, PivotMode, RecursiveJacobiConfig, ScalarJacobiConfig, SvdConfig, SymmetricMatrix,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Scalar,
    Block,
    Recursive,
    Svd,
}

/// Diagonalizer for block subproblems and recursive base cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Scalar,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PreprocessArg {
    None,
    Qr,
    Qrcp,
}

/// Flat solver parameters; fields irrelevant to the chosen solver are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    #[arg(long, value_enum, default_value = "block")]
    pub solver: SolverKind,
    /// Block size (block Jacobi and SVD).
    #[arg(long, default_value_t = 8)]
    pub b: usize,
    /// Log block size for recursive Jacobi.
    #[arg(long, default_value_t = 0.5)]
    pub f: f64,
    /// Per-depth log block sizes, overriding `f`.
    #[arg(long, value_delimiter = ',')]
    pub f_schedule: Vec<f64>,
    /// column-cyclic, row-cyclic, random:<seed> or max-pivot.
    #[arg(long, default_value = "row-cyclic")]
    pub ordering: String,
    /// none, lupp or qrcp.
    #[arg(long, default_value = "none")]
    pub pivot: String,
    #[arg(long, default_value_t = jacobi_core::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_sweeps: usize,
    /// Sabotage every scalar rotation inside block subproblems.
    #[arg(long)]
    pub adversarial: bool,
    #[arg(long, default_value_t = 4)]
    pub adversarial_sweep_cap: usize,
    #[arg(long, value_enum, default_value = "scalar")]
    pub backend: Backend,
    #[arg(long, default_value_t = 4)]
    pub n_threshold: usize,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub base_tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "none")]
    pub preprocess: PreprocessArg,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            solver: SolverKind::Block,
            b: 8,
            f: 0.5,
            f_schedule: Vec::new(),
            ordering: "row-cyclic".into(),
            pivot: "none".into(),
            tol: jacobi_core::DEFAULT_TOLERANCE,
            max_sweeps: 50,
            adversarial: false,
            adversarial_sweep_cap: 4,
            backend: Backend::Scalar,
            n_threshold: 4,
            max_depth: None,
            base_tolerance: None,
            preprocess: PreprocessArg::None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolverSpec {
    Scalar(ScalarJacobiConfig),
    Block(BlockJacobiConfig),
    Recursive(RecursiveJacobiConfig),
    Svd(SvdConfig),
}

impl SolverParams {
    pub fn to_spec(&self) -> Result<SolverSpec> {
        let ordering: OrderingKind = self.ordering.parse()?;
        let pivot: PivotMode = self.pivot.parse()?;
        let inner = ScalarJacobiConfig {
            relative_tolerance: self.tol,
            rotation_trigger_tolerance: self.tol,
            ..Default::default()
        };
        Ok(match self.solver {
            SolverKind::Scalar => SolverSpec::Scalar(ScalarJacobiConfig {
                ordering,
                max_sweeps: self.max_sweeps,
                adversarial: self.adversarial,
                ..inner
            }),
            SolverKind::Block => SolverSpec::Block(BlockJacobiConfig {
                block_size: self.b,
                ordering,
                pivot,
                solver: match self.backend {
                    Backend::Scalar => BlockSolver::ScalarJacobi(inner),
                    Backend::Direct => BlockSolver::DirectReference,
                },
                adversarial: self.adversarial,
                adversarial_sweep_cap: self.adversarial_sweep_cap,
                relative_tolerance: self.tol,
                max_sweeps: self.max_sweeps,
            }),
            SolverKind::Recursive => {
                if self.adversarial {
                    bail!("--adversarial applies to the scalar and block solvers only");
                }
                SolverSpec::Recursive(RecursiveJacobiConfig {
                    log_block_size: self.f,
                    f_schedule: self.f_schedule.clone(),
                    n_threshold: self.n_threshold,
                    max_depth: self.max_depth,
                    base_tolerance: self.base_tolerance,
                    base_solver: match self.backend {
                        Backend::Scalar => jacobi_core::recursive::BaseSolver::ScalarJacobi,
                        Backend::Direct => jacobi_core::recursive::BaseSolver::DirectReference,
                    },
                    ordering,
                    pivot,
                    relative_tolerance: self.tol,
                    max_sweeps: self.max_sweeps,
                })
            }
            SolverKind::Svd => SolverSpec::Svd(SvdConfig {
                block_size: self.b,
                ordering,
                pivot,
                gram_solver: match self.backend {
                    Backend::Scalar => GramSolver::ScalarJacobi(inner),
                    Backend::Direct => GramSolver::DirectReference,
                },
                preprocess: match self.preprocess {
                    PreprocessArg::None => Preprocess::None,
                    PreprocessArg::Qr => Preprocess::Qr,
                    PreprocessArg::Qrcp => Preprocess::Qrcp,
                },
                relative_tolerance: self.tol,
                max_sweeps: self.max_sweeps,
            }),
        })
    }
}

/// Result of one solve, in the solver's own order.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub state: ConvergenceState,
    /// Eigenvalues, or singular values for the SVD.
    pub values: Vec<f64>,
    /// Eigenvectors `Q`, or right singular vectors `V`.
    pub vectors: DenseMatrix,
    /// Left singular vectors `U` (SVD only).
    pub left: Option<DenseMatrix>,
    pub ledger: CostLedger,
}

pub fn solve(matrix: &DenseMatrix, spec: &SolverSpec) -> Result<Outcome> {
    let mut ledger = CostLedger::new();
    let symmetric = || -> Result<SymmetricMatrix> { Ok(SymmetricMatrix::from_dense(matrix.clone())?) };
    let eig = match spec {
        SolverSpec::Scalar(cfg) => scalar_jacobi(&mut symmetric()?, cfg, &mut ledger)?,
        SolverSpec::Block(cfg) => block_jacobi(&mut symmetric()?, cfg, &mut ledger)?,
        SolverSpec::Recursive(cfg) => recursive_jacobi(&mut symmetric()?, cfg, &mut ledger)?,
        SolverSpec::Svd(cfg) => {
            let res = jacobi_svd(matrix, cfg, &mut ledger)?;
            return Ok(Outcome { state: res.state, values: res.sigma, vectors: res.v, left: Some(res.u), ledger });
        }
    };
    Ok(Outcome { state: eig.state, values: eig.values, vectors: eig.q, left: None, ledger })
}
