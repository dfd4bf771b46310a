use super::gap::{partial_gap, GapOracle};
use super::{Recorder, SolveResult, SolverConfig};
use crate::error::Result;
use crate::forms::SaddleProblem;
use crate::linalg::{dot, norm};
use crate::operator::LinearOperator;

/// Stalled-iterate threshold for the online norm estimate.
const STALL_EPS: f64 = 1e-14;

/// Per-iteration record of the online step-size adaptation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OnlineDiagnostics {
    /// `L̃ⁿ⁺¹`, or `None` when the iterates stalled and the update was skipped.
    pub l_tilde: Vec<Option<f64>>,
    /// `max(Lⁿ, L̃ⁿ⁺¹)` before smoothing.
    pub candidate: Vec<f64>,
    /// Smoothed `L` that sets the next `τ = a/L`, `σ = 1/(aL)`.
    pub smoothed: Vec<f64>,
    /// Running maximum of every `L̃` seen so far (and the starting value).
    pub running_max: Vec<f64>,
}

/// `⟨K Δx, Δy⟩ / (‖Δx‖‖Δy‖)`, or `None` when the denominator is below `1e-14`.
pub fn curvature_estimate(op: &dyn LinearOperator, dx: &[f64], dy: &[f64]) -> Result<Option<f64>> {
    let denom = norm(dx) * norm(dy);
    if denom <= STALL_EPS {
        return Ok(None);
    }
    Ok(Some(dot(&op.apply(dx)?, dy) / denom))
}

/// `(L + κ·max(L, candidate)) / (1 + κ)`
pub fn smooth_norm_estimate(l: f64, candidate: f64, kappa: f64) -> f64 {
    (l + kappa * l.max(candidate)) / (1.0 + kappa)
}

/// Chambolle-Pock with fixed steps `τ = a/L`, `σ = 1/(aL)`, `L = ‖K‖·safety`.
pub fn pdcp_solve(problem: &SaddleProblem, config: &SolverConfig) -> Result<SolveResult> {
    pdcp_solve_with(problem, config, None)
}

/// [`pdcp_solve`] that also records the ergodic partial gap against a known saddle point.
pub fn pdcp_solve_with(
    problem: &SaddleProblem,
    config: &SolverConfig,
    oracle: Option<&GapOracle>,
) -> Result<SolveResult> {
    config.validate()?;
    let l = problem.step_norm();
    let l = if l > 0.0 { l } else { 1.0 };
    run(problem, config, oracle, l, false)
}

/// Online PD CP: starts from an optimistic `L₀ < ‖K‖` and grows `L` from observed
/// iterate curvature `⟨K Δx, Δy⟩ / (‖Δx‖‖Δy‖)`, smoothed with weight `κ`.
pub fn pdcp_online_solve(problem: &SaddleProblem, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let l0 = match config.online_l0 {
        Some(l0) => l0,
        None if problem.op_norm > 0.0 => 0.1 * problem.op_norm,
        None => 1.0,
    };
    run(problem, config, None, l0, true)
}

fn run(
    problem: &SaddleProblem,
    config: &SolverConfig,
    oracle: Option<&GapOracle>,
    l_init: f64,
    online: bool,
) -> Result<SolveResult> {
    let n = problem.primal_dim();
    let m = problem.dual_dim();
    let op = problem.op.as_ref();
    let a = config.a_ratio;
    let theta = config.theta;

    let mut l = l_init;
    let mut tau = a / l;
    let mut sigma = 1.0 / (a * l);

    let mut x = vec![0.0; n];
    let mut x_prev = vec![0.0; n];
    let mut x_bar = vec![0.0; n];
    let mut y = vec![0.0; m];
    let mut x_sum = vec![0.0; n];
    let mut y_sum = vec![0.0; m];

    let mut kbuf = vec![0.0; m];
    let mut ktbuf = vec![0.0; n];
    let mut dx = vec![0.0; n];
    let mut diag = online.then(|| OnlineDiagnostics::default());
    let mut running_max = l;

    let mut rec = Recorder::new(config);
    for iter in 1..=config.max_iters {
        // dual ascent
        op.apply_into(&x_bar, &mut kbuf);
        let v: Vec<f64> = y.iter().zip(&kbuf).map(|(yi, ki)| yi + sigma * ki).collect();
        let y_new = problem.prox_fstar(&v, sigma)?;

        // primal descent
        op.adjoint_into(&y_new, &mut ktbuf);
        let w: Vec<f64> = x.iter().zip(&ktbuf).map(|(xi, ki)| xi - tau * ki).collect();
        let x_new = problem.prox_g(&w, tau)?;

        for ((xb, xn), xo) in x_bar.iter_mut().zip(&x_new).zip(&x) {
            *xb = xn + theta * (xn - xo);
        }

        if let Some(d) = diag.as_mut() {
            // xⁿ − xⁿ⁻¹ from the previous step against yⁿ⁺¹ − yⁿ from this one
            for ((d, xc), xp) in dx.iter_mut().zip(&x).zip(&x_prev) {
                *d = xc - xp;
            }
            let dy: Vec<f64> = y_new.iter().zip(&y).map(|(a, b)| a - b).collect();
            let l_tilde = if iter > 1 { curvature_estimate(op, &dx, &dy)? } else { None };
            let candidate = l_tilde.map_or(l, |lt| l.max(lt));
            if let Some(lt) = l_tilde {
                running_max = running_max.max(lt);
                l = smooth_norm_estimate(l, candidate, config.kappa);
                tau = a / l;
                sigma = 1.0 / (a * l);
            }
            d.l_tilde.push(l_tilde);
            d.candidate.push(candidate);
            d.smoothed.push(l);
            d.running_max.push(running_max);
        }

        x_prev.copy_from_slice(&x);
        x = x_new;
        y = y_new;
        for (s, xi) in x_sum.iter_mut().zip(&x) {
            *s += xi;
        }
        for (s, yi) in y_sum.iter_mut().zip(&y) {
            *s += yi;
        }

        if rec.wants(iter) {
            let energy = problem.energy(&x)?;
            let gap = match oracle {
                Some(o) => {
                    let k = iter as f64;
                    let x_avg: Vec<f64> = x_sum.iter().map(|s| s / k).collect();
                    let y_avg: Vec<f64> = y_sum.iter().map(|s| s / k).collect();
                    Some(partial_gap(problem, &x_avg, &y_avg, &o.x_hat, &o.y_hat)?)
                }
                None => None,
            };
            rec.record(iter, energy, gap)?;
        }
    }

    Ok(SolveResult {
        solution: x,
        dual: Some(y),
        trace: rec.finish(),
        online: diag,
    })
}
