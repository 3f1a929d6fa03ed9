use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use jacobi_cli::config::load_config;
use jacobi_cli::experiment::{preset, run_experiment, write_outputs, ExperimentSpec};
use jacobi_cli::history::format_history;
use jacobi_cli::io::{read_matrix, write_matrix, Format};
use jacobi_cli::predict::{predict, PredictArgs};
use jacobi_cli::solver::{solve, SolverParams, SolverSpec};
use serde_json::json;

#[derive(Parser)]
#[command(name = "jacobi", version, about = "Scalar, blocked and recursive Jacobi eigensolvers and SVD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or config file; writes one history CSV per run and summary.json.
    Run {
        /// table4, fig2, fig3, fig4 or fig5.
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Include the n = 1024 and 2048 rows of table4.
        #[arg(long)]
        large: bool,
    },
    /// Solve one matrix file and print a JSON summary.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: SolverParams,
        /// Write the per-sweep history CSV here.
        #[arg(long)]
        history: Option<PathBuf>,
        /// Write eigenvectors (or V) here; `.bin` selects the binary format.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Evaluate an analytic cost model and print it as JSON.
    Predict {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        n: f64,
        /// Rows for the SVD models; defaults to n.
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, default_value_t = 8.0)]
        b: f64,
        #[arg(long, default_value_t = 0.5)]
        f: f64,
        #[arg(long, default_value_t = 3.0)]
        omega: f64,
        /// Fast memory size in words.
        #[arg(long, default_value_t = 32768.0)]
        mem: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` when a solve did not converge.
fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { preset: name, config, out, large } => {
            let specs: Vec<ExperimentSpec> = match (name, config) {
                (Some(name), _) => preset(&name, large)?,
                (None, Some(path)) => load_config(&path)?,
                (None, None) => unreachable!("clap requires one of --preset and --config"),
            };
            let mut runs = Vec::new();
            for spec in &specs {
                for run in run_experiment(spec)? {
                    println!(
                        "{} seed={} converged={} sweeps={} flops={}",
                        run.experiment,
                        run.seed.map_or_else(|| "-".into(), |s| s.to_string()),
                        run.converged,
                        run.sweeps,
                        run.total_flops
                    );
                    runs.push(run);
                }
            }
            write_outputs(&out, &runs)?;
            println!("wrote {} runs to {}", runs.len(), out.display());
            Ok(true)
        }
        Command::Solve { input, params, history, vectors } => {
            let matrix = read_matrix(&input)?;
            let spec = params.to_spec()?;
            if let SolverSpec::Recursive(cfg) = &spec {
                for w in cfg.theory_warnings() {
                    eprintln!("warning: {w}");
                }
            }
            let out = solve(&matrix, &spec)?;
            if let Some(path) = history {
                std::fs::write(&path, format_history(&out.state.history))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = vectors {
                write_matrix(&path, &out.vectors, Format::from_path(&path))?;
            }
            let summary = json!({
                "converged": out.state.converged,
                "stagnated": out.state.stagnated,
                "sweeps": out.state.sweeps,
                "rotations": out.state.rotations,
                "subproblem_failures": out.state.subproblem_failures,
                "total_flops": out.ledger.flops(),
                "values": out.values,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(out.state.converged)
        }
        Command::Predict { theorem, n, m, b, f, omega, mem } => {
            let p = predict(&theorem, PredictArgs { n, m: m.unwrap_or(n), b, f, omega, mem })?;
            println!("{}", serde_json::to_string_pretty(&p)?);
            Ok(true)
        }
    }
}
