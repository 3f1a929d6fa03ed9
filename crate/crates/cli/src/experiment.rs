//! Seeded experiment runs, their CSV/JSON outputs, and the built-in presets.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use jacobi_core::{DenseMatrix, SweepRecord};
use serde::{Deserialize, Serialize};

use crate::history::format_history;
use crate::instances::{gaussian_matrix, gaussian_symmetric};
use crate::io::read_matrix;
use crate::solver::{solve, SolverKind, SolverParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MatrixSource {
    /// `(G + Gᵀ)/2`; repetition `k` uses `seed + k`.
    GaussianSymmetric {
        n: usize,
        seed: u64,
    },
    GaussianRectangular {
        m: usize,
        n: usize,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

impl MatrixSource {
    pub fn seed(&self, repetition: usize) -> Option<u64> {
        match *self {
            MatrixSource::GaussianSymmetric { seed, .. } | MatrixSource::GaussianRectangular { seed, .. } => {
                Some(seed + repetition as u64)
            }
            MatrixSource::File { .. } => None,
        }
    }

    pub fn instance(&self, repetition: usize) -> Result<DenseMatrix> {
        let seed = self.seed(repetition).unwrap_or(0);
        Ok(match self {
            MatrixSource::GaussianSymmetric { n, .. } => gaussian_symmetric(*n, seed).into_dense(),
            MatrixSource::GaussianRectangular { m, n, .. } => gaussian_matrix(*m, *n, seed),
            MatrixSource::File { path } => read_matrix(path)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub matrix: MatrixSource,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default = "one")]
    pub repetitions: usize,
}

fn one() -> usize {
    1
}

/// Outcome of one repetition. `history` and `values` are written to the CSV
/// and kept in memory, not repeated in the JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub repetition: usize,
    pub seed: Option<u64>,
    pub matrix: MatrixSource,
    pub solver: SolverParams,
    pub converged: bool,
    pub stagnated: bool,
    pub sweeps: usize,
    pub rotations: usize,
    pub subproblem_failures: usize,
    /// Stopping reference: largest input magnitude (1 for the SVD's scaled
    /// criterion).
    pub reference: f64,
    pub final_max_offdiag: Option<f64>,
    pub final_offdiag_fro: Option<f64>,
    pub total_flops: u64,
    pub flops_by_kernel: BTreeMap<String, u64>,
    #[serde(skip)]
    pub history: Vec<SweepRecord>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl RunRecord {
    /// Name of the history CSV inside the output directory.
    pub fn csv_name(&self) -> String {
        match self.seed {
            Some(seed) => format!("{}_seed{seed}.csv", self.experiment),
            None => format!("{}_rep{}.csv", self.experiment, self.repetition),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: Vec<RunRecord>,
    pub total_sweeps: usize,
    pub total_flops: u64,
}

impl Summary {
    pub fn new(runs: Vec<RunRecord>) -> Self {
        let total_sweeps = runs.iter().map(|r| r.sweeps).sum();
        let total_flops = runs.iter().map(|r| r.total_flops).sum();
        Self { runs, total_sweeps, total_flops }
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    if spec.repetitions == 0 {
        bail!("experiment {}: repetitions must be positive", spec.name);
    }
    let solver = spec.solver.to_spec().with_context(|| format!("experiment {}", spec.name))?;
    (0..spec.repetitions)
        .map(|k| {
            let matrix = spec.matrix.instance(k)?;
            let out = solve(&matrix, &solver).with_context(|| format!("experiment {} repetition {k}", spec.name))?;
            let last = out.state.history.last();
            Ok(RunRecord {
                experiment: spec.name.clone(),
                repetition: k,
                seed: spec.matrix.seed(k),
                matrix: spec.matrix.clone(),
                solver: spec.solver.clone(),
                converged: out.state.converged,
                stagnated: out.state.stagnated,
                sweeps: out.state.sweeps,
                rotations: out.state.rotations,
                subproblem_failures: out.state.subproblem_failures,
                reference: out.state.reference,
                final_max_offdiag: last.map(|r| r.max_off_diag),
                final_offdiag_fro: last.map(|r| r.off_diag_norm),
                total_flops: out.ledger.flops(),
                flops_by_kernel: out.ledger.breakdown().map(|(k, v)| (k.name().to_string(), v)).collect(),
                history: out.state.history,
                values: out.values,
            })
        })
        .collect()
}

/// One history CSV per run plus `summary.json`.
pub fn write_outputs(dir: &Path, runs: &[RunRecord]) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for run in runs {
        let path = dir.join(run.csv_name());
        fs::write(&path, format_history(&run.history)).with_context(|| format!("writing {}", path.display()))?;
    }
    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&Summary::new(runs.to_vec()))?;
    fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))
}

pub const PRESETS: [&str; 5] = ["table4", "fig2", "fig3", "fig4", "fig5"];

/// Built-in experiment grids. `large` adds the n = 1024 and 2048 rows of
/// `table4`; other presets ignore it.
pub fn preset(name: &str, large: bool) -> Result<Vec<ExperimentSpec>> {
    let sym = |n, seed| MatrixSource::GaussianSymmetric { n, seed };
    let block = |b| SolverParams { solver: SolverKind::Block, b, ..Default::default() };
    let recursive = |f| SolverParams { solver: SolverKind::Recursive, f, ..Default::default() };
    let spec = |name: String, matrix, solver, repetitions| ExperimentSpec { name, matrix, solver, repetitions };
    Ok(match name {
        "table4" => {
            let mut sizes = vec![128, 256, 512];
            if large {
                sizes.extend([1024, 2048]);
            }
            let mut out = Vec::new();
            for n in sizes {
                for parts in [4, 8, 16, 32] {
                    out.push(spec(format!("table4_n{n}_p{parts}"), sym(n, 1), block(n / parts), 5));
                }
            }
            out
        }
        "fig2" => {
            let mut out = vec![spec(
                "fig2_scalar".into(),
                sym(512, 2),
                SolverParams { solver: SolverKind::Scalar, ..Default::default() },
                1,
            )];
            for b in [4, 16, 64] {
                out.push(spec(format!("fig2_block_b{b}"), sym(512, 2), block(b), 1));
            }
            for f in [0.2, 0.4, 0.6, 0.8] {
                out.push(spec(format!("fig2_recursive_f{f}"), sym(512, 2), recursive(f), 1));
            }
            out
        }
        "fig3" => {
            let adv = |pivot: &str, ordering: &str, max_sweeps| SolverParams {
                adversarial: true,
                pivot: pivot.into(),
                ordering: ordering.into(),
                max_sweeps,
                ..block(2)
            };
            vec![
                spec("fig3_nadv".into(), sym(512, 3), block(2), 1),
                spec("fig3_adv".into(), sym(512, 3), adv("none", "row-cyclic", 20), 1),
                spec("fig3_adv_lupp".into(), sym(512, 3), adv("lupp", "row-cyclic", 50), 1),
                spec("fig3_adv_qrcp".into(), sym(512, 3), adv("qrcp", "row-cyclic", 50), 1),
                spec("fig3_adv_random".into(), sym(512, 3), adv("none", "random:7", 50), 1),
            ]
        }
        "fig4" => [1e-7, 1e-6, 1e-5, 1e-4]
            .into_iter()
            .map(|t| {
                let solver = SolverParams { base_tolerance: Some(t), max_sweeps: 30, ..recursive(0.4) };
                spec(format!("fig4_base{t:e}"), sym(512, 4), solver, 1)
            })
            .collect(),
        "fig5" => (1..=4)
            .map(|d| {
                let solver = SolverParams { max_depth: Some(d), ..recursive(0.8) };
                spec(format!("fig5_depth{d}"), sym(512, 5), solver, 1)
            })
            .collect(),
        other => bail!("unknown preset {other:?}; expected one of {}", PRESETS.join(", ")),
    })
}
