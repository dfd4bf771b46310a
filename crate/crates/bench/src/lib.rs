//! Benchmark harness for the saddle-core solvers: runs solver × problem grids,
//! estimates reference optima and fits log-log convergence slopes.

pub mod data;
pub mod error;
pub mod report;
pub mod runner;
pub mod slopes;
pub mod spec;

pub use error::{BenchError, Result};
pub use report::{run_grid, GridOptions, SummaryRow};
pub use runner::{estimate_optimum, run_spec, solve, RunOutcome};
pub use slopes::{default_window, fit_loglog_slope, fit_points, report_per_iteration_time, SlopeFit};
pub use spec::{default_grid, parse_grid, RunSpec, SolverKind, SweepParam};
