use super::{Recorder, SolveResult, SolverConfig};
use crate::error::{check_len, Error, Result};
use crate::forms::CompositeProblem;

/// `ηₙ = C/√n`
pub fn fobos_step(c: f64, n: usize) -> f64 {
    c / (n as f64).sqrt()
}

/// Forward-backward splitting with a diminishing step:
/// `xⁿ⁺¹ = prox_{ηₙλG}(xⁿ − ηₙ gⁿ)`, `gⁿ ∈ ∂(F∘K)(xⁿ)`.
pub fn fobos_solve(problem: &CompositeProblem, config: &SolverConfig) -> Result<SolveResult> {
    fobos_solve_from(problem, config, vec![0.0; problem.dim()])
}

/// [`fobos_solve`] from a given starting point.
pub fn fobos_solve_from(problem: &CompositeProblem, config: &SolverConfig, x0: Vec<f64>) -> Result<SolveResult> {
    config.validate()?;
    check_len(problem.dim(), x0.len())?;
    let mut x = x0;
    let mut rec = Recorder::new(config);
    for iter in 1..=config.max_iters {
        let g = problem
            .loss_subgradient(&x)?
            .ok_or_else(|| Error::Config("fobos needs a loss with a subgradient".into()))?;
        let eta = fobos_step(config.fobos_c, iter);
        let w: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - eta * gi).collect();
        x = problem.prox_g(&w, eta)?;
        if rec.wants(iter) {
            rec.record(iter, problem.energy(&x)?, None)?;
        }
    }
    Ok(SolveResult {
        solution: x,
        dual: None,
        trace: rec.finish(),
        online: None,
    })
}
