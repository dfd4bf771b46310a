//! Empirical convergence rates from energy traces.

use saddle_core::solvers::Trace;

use crate::error::{BenchError, Result};

pub const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (usize, usize),
}

/// Last two decades of a run ending at `last_iter`: `[N/100, N]`.
pub fn default_window(last_iter: usize) -> (usize, usize) {
    ((last_iter / 100).max(1), last_iter)
}

/// Least-squares line through `(log₁₀ n, log₁₀(Eⁿ − Ê))` for `n` in `window`.
///
/// Uses the best energy reached so far at each record, so oscillating methods
/// are measured by the envelope they actually attain. Points with `Eⁿ ≤ Ê` are
/// dropped.
pub fn fit_loglog_slope(trace: &Trace, e_hat: f64, window: (usize, usize)) -> Result<SlopeFit> {
    fit_points(&trace.best_energies(), e_hat, window)
}

/// [`fit_loglog_slope`] on raw `(iter, energy)` pairs.
pub fn fit_points(points: &[(usize, f64)], e_hat: f64, window: (usize, usize)) -> Result<SlopeFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|&&(n, e)| n >= window.0 && n <= window.1 && n > 0 && e > e_hat && e.is_finite())
        .map(|&(n, e)| ((n as f64).log10(), (e - e_hat).log10()))
        .unzip();
    if xs.len() < MIN_POINTS {
        return Err(BenchError::InsufficientData(format!(
            "{} usable points in window {window:?}, need {MIN_POINTS}",
            xs.len()
        )));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BenchError::InsufficientData("all points share one iteration".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    // a flat sequence is fit perfectly
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(SlopeFit { slope, intercept, r2, window })
}

/// Mean wall-clock seconds per iteration between the first and last record.
pub fn report_per_iteration_time(trace: &Trace) -> Result<f64> {
    let (first, last) = match (trace.records.first(), trace.records.last()) {
        (Some(f), Some(l)) if l.iter > f.iter => (f, l),
        _ => return Err(BenchError::InsufficientData("timing needs two records at distinct iterations".into())),
    };
    Ok(((last.elapsed_seconds - first.elapsed_seconds) / (last.iter - first.iter) as f64).max(0.0))
}
