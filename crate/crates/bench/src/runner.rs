//! Single runs, parameter sweeps and the reference optimum.

use rayon::prelude::*;
use saddle_core::problems::ProblemSpec;
use saddle_core::solvers::{fista_solve, fobos_solve, pdcp_online_solve, pdcp_solve, SolveResult, SolverConfig};

use crate::data::{load_problem, DataSource};
use crate::error::{BenchError, Result};
use crate::spec::{RunSpec, SolverKind, SweepParam};

/// Step ratios tried by [`estimate_optimum`].
pub const ORACLE_RATIOS: [f64; 3] = [0.1, 1.0, 10.0];
/// The optimum runs evaluate the energy every this many iterations (and at the last one).
pub const ORACLE_RECORD_EVERY: usize = 10;
/// A run has reached the optimum once `E ≤ Ê + REACH_TOL·|Ê|`.
pub const REACH_TOL: f64 = 1e-4;

pub fn reach_target(e_hat: f64) -> f64 {
    e_hat + REACH_TOL * e_hat.abs()
}

pub fn solve(problem: &ProblemSpec, solver: SolverKind, config: &SolverConfig) -> Result<SolveResult> {
    let composite = || {
        problem
            .composite
            .as_ref()
            .ok_or_else(|| BenchError::InvalidRun(format!("{} has no composite form for {solver}", problem.kind)))
    };
    Ok(match solver {
        SolverKind::Pdcp => pdcp_solve(&problem.saddle, config)?,
        SolverKind::PdcpOnline => pdcp_online_solve(&problem.saddle, config)?,
        SolverKind::Fobos => fobos_solve(composite()?, config)?,
        SolverKind::Fista => fista_solve(composite()?, config)?,
    })
}

/// Lowest energy seen by PD CP over `budget` iterations with `a ∈ {0.1, 1, 10}`.
pub fn estimate_optimum(problem: &ProblemSpec, budget: usize) -> Result<f64> {
    let runs: Vec<Result<f64>> = ORACLE_RATIOS
        .par_iter()
        .map(|&a| {
            let config = SolverConfig {
                max_iters: budget,
                a_ratio: a,
                record_every: ORACLE_RECORD_EVERY,
                ..Default::default()
            };
            let r = pdcp_solve(&problem.saddle, &config)?;
            r.trace.best_energy().ok_or_else(|| BenchError::OracleFailure("empty trace".into()))
        })
        .collect();
    let best = runs.iter().filter_map(|r| r.as_ref().ok().copied()).fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        let reasons: Vec<String> = runs.into_iter().filter_map(|r| r.err()).map(|e| e.to_string()).collect();
        Err(BenchError::OracleFailure(reasons.join("; ")))
    }
}

/// A finished run and the setting that produced it.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// The spec actually run (after the sweep picked its parameter).
    pub spec: RunSpec,
    pub source: DataSource,
    pub result: SolveResult,
    /// Swept parameter and the best energy of each grid value (`None` for failed runs).
    pub sweep: Option<(SweepParam, Vec<(f64, Option<f64>)>)>,
}

pub fn run_spec(spec: &RunSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let (problem, source) = load_problem(spec)?;
    run_on(&problem, spec, source, None)
}

/// Runs `spec` on an already built instance.
///
/// A sweep keeps the grid value that first reaches `target` (ties and runs that
/// never reach it are ranked by best energy); without a target only the best
/// energy counts.
pub fn run_on(problem: &ProblemSpec, spec: &RunSpec, source: DataSource, target: Option<f64>) -> Result<RunOutcome> {
    if !spec.sweep {
        let result = solve(problem, spec.solver, &spec.solver_config())?;
        return Ok(RunOutcome { spec: spec.clone(), source, result, sweep: None });
    }
    let param = spec.solver.sweep_param();
    let runs: Vec<(RunSpec, Result<SolveResult>)> = SweepParam::GRID
        .par_iter()
        .map(|&v| {
            let s = param.apply(spec, v);
            let r = solve(problem, s.solver, &s.solver_config());
            (s, r)
        })
        .collect();
    let table = runs
        .iter()
        .zip(SweepParam::GRID)
        .map(|((_, r), v)| (v, r.as_ref().ok().and_then(|r| r.trace.best_energy())))
        .collect();
    let rank = |r: &SolveResult| {
        let reached = target.and_then(|t| r.trace.first_reaching(t)).unwrap_or(usize::MAX);
        (reached, r.trace.best_energy().unwrap_or(f64::INFINITY))
    };
    let mut best: Option<(RunSpec, SolveResult)> = None;
    let mut last_err = None;
    for (s, r) in runs {
        match r {
            Ok(r) => {
                let (n, e) = rank(&r);
                let better = best.as_ref().is_none_or(|(_, b)| {
                    let (bn, be) = rank(b);
                    n < bn || (n == bn && e < be)
                });
                if better {
                    best = Some((s, r));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((mut s, result)) => {
            s.sweep = false;
            Ok(RunOutcome { spec: s, source, result, sweep: Some((param, table)) })
        }
        None => Err(last_err.unwrap_or_else(|| BenchError::InvalidRun("empty sweep".into()))),
    }
}
