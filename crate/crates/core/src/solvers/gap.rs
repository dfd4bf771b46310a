use crate::error::{check_len, invalid, Result};
use crate::forms::SaddleProblem;
use crate::linalg::dist;

/// A known saddle point `(x̂, ŷ)` of a test problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GapOracle {
    pub x_hat: Vec<f64>,
    pub y_hat: Vec<f64>,
}

impl GapOracle {
    pub fn new(problem: &SaddleProblem, x_hat: Vec<f64>, y_hat: Vec<f64>) -> Result<Self> {
        check_len(problem.primal_dim(), x_hat.len())?;
        check_len(problem.dual_dim(), y_hat.len())?;
        Ok(Self { x_hat, y_hat })
    }

    /// `(‖ŷ − y⁰‖²/(2σ) + ‖x̂ − x⁰‖²/(2τ)) / N` from the zero start.
    pub fn ergodic_bound(&self, tau: f64, sigma: f64, n: usize) -> f64 {
        let zx = vec![0.0; self.x_hat.len()];
        let zy = vec![0.0; self.y_hat.len()];
        let dy = dist(&self.y_hat, &zy);
        let dx = dist(&self.x_hat, &zx);
        (dy * dy / (2.0 * sigma) + dx * dx / (2.0 * tau)) / n as f64
    }
}

/// `[⟨Kx, ŷ⟩ − F*(ŷ) + λG(x)] − [⟨Kx̂, y⟩ − F*(y) + λG(x̂)]`
///
/// Non-negative whenever `(x̂, ŷ)` is a saddle point; `+∞` when `y` is outside
/// the domain of `F*`.
pub fn partial_gap(
    problem: &SaddleProblem,
    x: &[f64],
    y: &[f64],
    x_hat: &[f64],
    y_hat: &[f64],
) -> Result<f64> {
    let first = problem.saddle_value(x, y_hat)?;
    let second = problem.saddle_value(x_hat, y)?;
    if second == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(first - second)
}

/// Step ratio `a = ‖x̂ − x⁰‖ / ‖ŷ − y⁰‖` that minimizes the ergodic gap bound.
pub fn optimal_ratio_hint(x_hat: &[f64], y_hat: &[f64], x0: &[f64], y0: &[f64]) -> Result<f64> {
    check_len(x_hat.len(), x0.len())?;
    check_len(y_hat.len(), y0.len())?;
    let dy = dist(y_hat, y0);
    if dy == 0.0 {
        return Err(invalid("dual start coincides with the saddle point"));
    }
    let dx = dist(x_hat, x0);
    if dx == 0.0 {
        return Err(invalid("primal start coincides with the saddle point"));
    }
    Ok(dx / dy)
}
