//! Grid execution and the CSV / plot-script outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use saddle_core::solvers::{Trace, TraceRecord};

use crate::data::load_problem;
use crate::error::{BenchError, Result};
use crate::runner::{estimate_optimum, reach_target, run_on, RunOutcome};
use crate::slopes::{default_window, fit_loglog_slope, report_per_iteration_time, SlopeFit};
use crate::spec::RunSpec;

pub const TRACE_HEADER: [&str; 4] = ["iter", "energy", "gap", "elapsed_seconds"];
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_FILE: &str = "plot.gp";

#[derive(Debug, Clone)]
pub struct GridOptions {
    /// The reference optimum runs this many times the largest budget of its instance.
    pub oracle_factor: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { oracle_factor: 10 }
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub problem: String,
    pub solver: String,
    pub lambda: f64,
    pub max_iters: usize,
    pub swept: Option<(String, f64)>,
    pub data: String,
    pub status: String,
    pub final_energy: Option<f64>,
    pub best_energy: Option<f64>,
    pub e_hat: Option<f64>,
    /// First recorded iteration within the reach tolerance of `e_hat`.
    pub reached_at: Option<usize>,
    pub fit: Option<SlopeFit>,
    pub seconds_per_iter: Option<f64>,
    pub trace_file: Option<String>,
}

impl SummaryRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn write_trace_csv(path: &Path, trace: &Trace) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        let gap = r.gap.map(|g| g.to_string()).unwrap_or_default();
        w.write_record([r.iter.to_string(), r.energy.to_string(), gap, r.elapsed_seconds.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv(path: &Path) -> Result<Trace> {
    let mut rd = csv::Reader::from_path(path)?;
    if rd.headers()?.iter().ne(TRACE_HEADER) {
        return Err(BenchError::InvalidRun(format!("{} is not a trace file", path.display())));
    }
    let mut trace = Trace::default();
    let mut best = f64::INFINITY;
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let bad = |what: &str| BenchError::Spec { line: i + 2, msg: format!("bad {what} in {}", path.display()) };
        let iter: usize = row[0].parse().map_err(|_| bad("iter"))?;
        let energy: f64 = row[1].parse().map_err(|_| bad("energy"))?;
        let gap = if row[2].is_empty() { None } else { Some(row[2].parse().map_err(|_| bad("gap"))?) };
        let elapsed_seconds: f64 = row[3].parse().map_err(|_| bad("elapsed_seconds"))?;
        best = best.min(energy);
        trace.records.push(TraceRecord { iter, energy, best_energy: best, elapsed_seconds, gap });
    }
    Ok(trace)
}

/// Runs every spec, writing `<label>.csv` traces, `summary.csv` and `plot.gp` into `out`.
///
/// Each distinct instance gets one reference optimum. A failing run becomes a
/// summary row with an `error:` status; the grid carries on.
pub fn run_grid(specs: &[RunSpec], out: &Path, options: &GridOptions) -> Result<Vec<SummaryRow>> {
    fs::create_dir_all(out)?;
    let mut instances: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in specs.iter().enumerate() {
        instances.entry(instance_key(s)).or_default().push(i);
    }
    let groups: Vec<(Vec<usize>, Vec<Result<RunOutcome>>, Option<f64>)> = instances
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|idx| {
            let first = &specs[idx[0]];
            let loaded = first.validate().and_then(|_| load_problem(first));
            let (problem, source) = match loaded {
                Ok(p) => p,
                Err(e) => {
                    let msg = e.to_string();
                    let errs = idx.iter().map(|_| Err(BenchError::InvalidRun(msg.clone()))).collect();
                    return (idx, errs, None);
                }
            };
            let budget = idx.iter().map(|&i| specs[i].max_iters).max().unwrap_or(1);
            let e_hat = estimate_optimum(&problem, budget.saturating_mul(options.oracle_factor.max(1))).ok();
            let outcomes = idx
                .par_iter()
                .map(|&i| {
                    specs[i].validate().and_then(|_| run_on(&problem, &specs[i], source.clone(), e_hat.map(reach_target)))
                })
                .collect();
            (idx, outcomes, e_hat)
        })
        .collect();

    let mut rows: Vec<Option<SummaryRow>> = vec![None; specs.len()];
    for (idx, outcomes, e_hat) in groups {
        for (i, outcome) in idx.into_iter().zip(outcomes) {
            rows[i] = Some(summarize(i, &specs[i], outcome, e_hat, out)?);
        }
    }
    let rows: Vec<SummaryRow> = rows.into_iter().flatten().collect();
    write_summary(&out.join(SUMMARY_FILE), &rows)?;
    write_plot_script(&out.join(PLOT_FILE), &rows)?;
    Ok(rows)
}

fn instance_key(s: &RunSpec) -> String {
    format!("{}|{:e}|{}|{:?}|{:e}", s.problem, s.lambda, s.seed, s.data_path, s.tube)
}

fn summarize(
    index: usize,
    spec: &RunSpec,
    outcome: Result<RunOutcome>,
    e_hat: Option<f64>,
    out: &Path,
) -> Result<SummaryRow> {
    let label = spec.label(index);
    let mut row = SummaryRow {
        label: label.clone(),
        problem: spec.problem.to_string(),
        solver: spec.solver.to_string(),
        lambda: spec.lambda,
        max_iters: spec.max_iters,
        swept: None,
        data: String::new(),
        status: "ok".into(),
        final_energy: None,
        best_energy: None,
        e_hat,
        reached_at: None,
        fit: None,
        seconds_per_iter: None,
        trace_file: None,
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            row.status = format!("error: {e}");
            return Ok(row);
        }
    };
    let trace = &outcome.result.trace;
    let file = format!("{label}.csv");
    write_trace_csv(&out.join(&file), trace)?;
    row.trace_file = Some(file);
    row.data = outcome.source.to_string();
    if let Some((param, _)) = &outcome.sweep {
        let v = match param {
            crate::spec::SweepParam::A => outcome.spec.a_ratio,
            crate::spec::SweepParam::FobosC => outcome.spec.fobos_c,
            crate::spec::SweepParam::SmoothEps => outcome.spec.smooth_eps,
        };
        row.swept = Some((param.name().to_string(), v));
    }
    row.final_energy = trace.final_energy();
    row.best_energy = trace.best_energy();
    row.reached_at = e_hat.and_then(|e| trace.first_reaching(reach_target(e)));
    row.fit = e_hat.and_then(|e| {
        let last = trace.last().map(|r| r.iter).unwrap_or(0);
        fit_loglog_slope(trace, e, default_window(last)).ok()
    });
    row.seconds_per_iter = report_per_iteration_time(trace).ok();
    Ok(row)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "label", "problem", "solver", "lambda", "max_iters", "swept_param", "swept_value", "data", "status",
        "final_energy", "best_energy", "e_hat", "reached_at", "slope", "intercept", "r2", "window_start", "window_end",
        "seconds_per_iter", "trace_file",
    ])?;
    for r in rows {
        let (param, value) = match &r.swept {
            Some((p, v)) => (p.clone(), v.to_string()),
            None => (String::new(), String::new()),
        };
        let fit = r.fit.as_ref();
        w.write_record([
            r.label.clone(),
            r.problem.clone(),
            r.solver.clone(),
            r.lambda.to_string(),
            r.max_iters.to_string(),
            param,
            value,
            r.data.clone(),
            r.status.clone(),
            opt(r.final_energy),
            opt(r.best_energy),
            opt(r.e_hat),
            r.reached_at.map(|n| n.to_string()).unwrap_or_default(),
            opt(fit.map(|f| f.slope)),
            opt(fit.map(|f| f.intercept)),
            opt(fit.map(|f| f.r2)),
            fit.map(|f| f.window.0.to_string()).unwrap_or_default(),
            fit.map(|f| f.window.1.to_string()).unwrap_or_default(),
            opt(r.seconds_per_iter),
            r.trace_file.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Gnuplot script drawing `Eⁿ − Ê` on log-log axes, one PNG per problem.
pub fn write_plot_script(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut by_problem: BTreeMap<&str, Vec<&SummaryRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.is_ok() && r.trace_file.is_some() && r.e_hat.is_some()) {
        by_problem.entry(&r.problem).or_default().push(r);
    }
    let mut f = fs::File::create(path)?;
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set logscale xy")?;
    writeln!(f, "set xlabel 'iteration'")?;
    writeln!(f, "set ylabel 'E - E_hat'")?;
    writeln!(f, "set terminal pngcairo size 800,600")?;
    for (problem, runs) in by_problem {
        writeln!(f, "\nset output '{problem}.png'")?;
        writeln!(f, "set title '{problem}'")?;
        let curves: Vec<String> = runs
            .iter()
            .map(|r| {
                format!(
                    "'{}' skip 1 using 1:($2 - ({})) with lines title '{}'",
                    r.trace_file.as_deref().unwrap_or_default(),
                    r.e_hat.unwrap_or(0.0),
                    r.solver
                )
            })
            .collect();
        writeln!(f, "plot {}", curves.join(", \\\n     "))?;
    }
    Ok(())
}

/// Slope fits for trace files, against `e_hat` or, when absent, the lowest energy across all files.
pub fn slopes_for_files(files: &[PathBuf], e_hat: Option<f64>) -> Result<Vec<(PathBuf, Result<SlopeFit>)>> {
    let traces = files.iter().map(|p| read_trace_csv(p)).collect::<Result<Vec<_>>>()?;
    let e_hat = e_hat.unwrap_or_else(|| {
        traces.iter().filter_map(|t| t.best_energy()).fold(f64::INFINITY, f64::min)
    });
    Ok(files
        .iter()
        .cloned()
        .zip(traces.iter().map(|t| {
            let last = t.last().map(|r| r.iter).unwrap_or(0);
            fit_loglog_slope(t, e_hat, default_window(last))
        }))
        .collect())
}
