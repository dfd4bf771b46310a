use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use saddle_bench::report::{slopes_for_files, PLOT_FILE, SUMMARY_FILE};
use saddle_bench::{default_grid, parse_grid, run_grid, GridOptions, RunSpec, SolverKind, SummaryRow};
use saddle_core::problems::ProblemKind;

#[derive(Parser)]
#[command(name = "saddlebench", about = "Convergence benchmarks for first-order saddle-point solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one problem.
    Run(RunArgs),
    /// Run every block of a spec file (or the default comparison grid).
    Grid {
        /// Spec file of `key = value` blocks; omit for the default grid.
        spec: Option<PathBuf>,
        /// Iteration budget for the default grid.
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reference optimum budget as a multiple of the run budget.
        #[arg(long, default_value_t = 10)]
        oracle_factor: usize,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
    /// Fit log-log slopes to existing trace CSVs.
    Slopes {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Reference optimum; defaults to the lowest energy across the files.
        #[arg(long)]
        e_hat: Option<f64>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    problem: ProblemKind,
    #[arg(long)]
    solver: String,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    fobos_c: f64,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = saddle_core::solvers::DEFAULT_KAPPA)]
    kappa: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    data: Option<PathBuf>,
    /// ε-insensitive width for multitask.
    #[arg(long)]
    tube: Option<f64>,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Try the parameter grid and keep the best value.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 10)]
    oracle_factor: usize,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

impl RunArgs {
    fn spec(&self) -> anyhow::Result<RunSpec> {
        let solver: SolverKind = self.solver.parse()?;
        let mut s = RunSpec::new(self.problem, solver);
        if let Some(l) = self.lambda {
            s.lambda = l;
        }
        if let Some(t) = self.tube {
            s.tube = t;
        }
        s.max_iters = self.max_iters;
        s.a_ratio = self.a;
        s.fobos_c = self.fobos_c;
        s.smooth_eps = self.eps;
        s.theta = self.theta;
        s.kappa = self.kappa;
        s.seed = self.seed;
        s.data_path = self.data.clone();
        s.record_every = self.record_every;
        s.sweep = self.sweep;
        s.validate()?;
        Ok(s)
    }
}

fn print_rows(rows: &[SummaryRow]) {
    for r in rows {
        let best = r.best_energy.map(|e| format!("{e:.10e}")).unwrap_or_else(|| "-".into());
        let slope = r.fit.map(|f| format!("{:.3} (r2 {:.3})", f.slope, f.r2)).unwrap_or_else(|| "-".into());
        println!("{:<32} {:<8} best {best:<18} slope {slope}  [{}]", r.label, r.status.split(':').next().unwrap_or(""), r.data);
        if !r.is_ok() {
            eprintln!("  {}", r.status);
        }
    }
}

fn main_inner(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let spec = args.spec()?;
            let opts = GridOptions { oracle_factor: args.oracle_factor };
            let rows = run_grid(&[spec], &args.out, &opts)?;
            print_rows(&rows);
            Ok(rows.iter().all(|r| r.is_ok()))
        }
        Command::Grid { spec, max_iters, seed, oracle_factor, out } => {
            let specs = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    parse_grid(&text)?
                }
                None => default_grid(max_iters, seed),
            };
            let rows = run_grid(&specs, &out, &GridOptions { oracle_factor })?;
            print_rows(&rows);
            println!("wrote {} and {} to {}", SUMMARY_FILE, PLOT_FILE, out.display());
            Ok(true)
        }
        Command::Slopes { traces, e_hat } => {
            for (path, fit) in slopes_for_files(&traces, e_hat)? {
                match fit {
                    Ok(f) => println!(
                        "{}: slope {:.4} intercept {:.4} r2 {:.4} window {}..{}",
                        path.display(),
                        f.slope,
                        f.intercept,
                        f.r2,
                        f.window.0,
                        f.window.1
                    ),
                    Err(e) => println!("{}: {e}", path.display()),
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
