use std::sync::Arc;

use super::smoothing::smooth_loss;
use super::{Recorder, SolveResult, SolverConfig};
use crate::error::{Error, Result};
use crate::forms::CompositeProblem;

/// `tₙ₊₁ = (1 + √(1 + 4tₙ²)) / 2`
pub fn fista_momentum(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

/// Accelerated proximal gradient with constant step `1/L`.
///
/// A loss without a Lipschitz gradient is replaced by its Moreau envelope of
/// width `config.smooth_eps`; recorded energies always use the original loss.
pub fn fista_solve(problem: &CompositeProblem, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let smoothed;
    let work = match problem.loss_lipschitz() {
        Some(_) => problem,
        None => {
            let eps = config.smooth_eps.ok_or_else(|| {
                Error::Config("fista needs a smooth loss or a smoothing width".into())
            })?;
            smoothed = problem.with_loss(Arc::new(smooth_loss(problem.loss.clone(), eps)?));
            &smoothed
        }
    };
    let lip = work.loss_lipschitz().unwrap_or(0.0);
    let lip = if lip > 0.0 { lip } else { 1.0 };
    let step = 1.0 / lip;

    let n = problem.dim();
    let mut x_prev = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = 1.0;
    let mut rec = Recorder::new(config);
    for iter in 1..=config.max_iters {
        let g = work
            .loss_subgradient(&z)?
            .ok_or_else(|| Error::Config("fista needs a loss gradient".into()))?;
        let w: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect();
        let x = work.prox_g(&w, step)?;
        let t_next = fista_momentum(t);
        let beta = (t - 1.0) / t_next;
        for ((zi, xi), xp) in z.iter_mut().zip(&x).zip(&x_prev) {
            *zi = xi + beta * (xi - xp);
        }
        t = t_next;
        x_prev = x;
        if rec.wants(iter) {
            rec.record(iter, problem.energy(&x_prev)?, None)?;
        }
    }
    Ok(SolveResult {
        solution: x_prev,
        dual: None,
        trace: rec.finish(),
        online: None,
    })
}
