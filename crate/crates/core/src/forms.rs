//! The two problem shapes the solvers consume.
//!
//! Both describe `min_x F(Kx) + λ G(x)`. The saddle form additionally carries
//! `F*` for the primal-dual iteration `min_x max_y ⟨Kx, y⟩ + λG(x) − F*(y)`.

use std::sync::Arc;

use crate::error::{check_len, invalid, Result};
use crate::linalg::dot;
use crate::operator::{estimate_norm, LinearOperator, DEFAULT_POWER_ITERS, DEFAULT_POWER_SEED, NORM_SAFETY};
use crate::prox::ProxFn;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("regularization weight must be non-negative, got {lambda}")))
    }
}

/// Prox of `λG` with step `t`; a zero combined weight is the identity.
fn prox_weighted(reg: &dyn ProxFn, lambda: f64, v: &[f64], t: f64) -> Result<Vec<f64>> {
    let w = t * lambda;
    if w == 0.0 {
        Ok(v.to_vec())
    } else {
        reg.prox(v, w)
    }
}

fn weighted_eval(reg: &dyn ProxFn, lambda: f64, x: &[f64]) -> f64 {
    if lambda == 0.0 {
        // δ-type regularizers still restrict the domain
        let g = reg.eval(x);
        if g == f64::INFINITY {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        lambda * reg.eval(x)
    }
}

#[derive(Debug, Clone)]
pub struct SaddleProblem {
    pub op: Arc<dyn LinearOperator>,
    /// `F`, used for energy evaluation.
    pub loss: Arc<dyn ProxFn>,
    /// `F*`, used by the dual step.
    pub loss_conjugate: Arc<dyn ProxFn>,
    /// `G`, scaled by `lambda`.
    pub reg: Arc<dyn ProxFn>,
    pub lambda: f64,
    /// Power-iteration estimate of `‖K‖`, without the safety factor.
    pub op_norm: f64,
}

impl SaddleProblem {
    pub fn new(
        op: Arc<dyn LinearOperator>,
        loss: Arc<dyn ProxFn>,
        loss_conjugate: Arc<dyn ProxFn>,
        reg: Arc<dyn ProxFn>,
        lambda: f64,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        let op_norm = estimate_norm(op.as_ref(), DEFAULT_POWER_ITERS, DEFAULT_POWER_SEED)?;
        Ok(Self {
            op,
            loss,
            loss_conjugate,
            reg,
            lambda,
            op_norm,
        })
    }

    /// Replaces the estimated operator norm with a known value.
    pub fn with_op_norm(mut self, op_norm: f64) -> Self {
        self.op_norm = op_norm;
        self
    }

    pub fn primal_dim(&self) -> usize {
        self.op.in_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.op.out_dim()
    }

    /// Operator norm bound used in step sizes (estimate times safety factor).
    pub fn step_norm(&self) -> f64 {
        self.op_norm * NORM_SAFETY
    }

    /// `E(x) = F(Kx) + λG(x)`
    pub fn energy(&self, x: &[f64]) -> Result<f64> {
        let kx = self.op.apply(x)?;
        Ok(self.loss.eval(&kx) + weighted_eval(self.reg.as_ref(), self.lambda, x))
    }

    pub fn prox_fstar(&self, v: &[f64], sigma: f64) -> Result<Vec<f64>> {
        self.loss_conjugate.prox(v, sigma)
    }

    pub fn prox_g(&self, v: &[f64], tau: f64) -> Result<Vec<f64>> {
        prox_weighted(self.reg.as_ref(), self.lambda, v, tau)
    }

    /// `⟨Kx, y⟩ + λG(x) − F*(y)`
    pub fn saddle_value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let kx = self.op.apply(x)?;
        check_len(self.dual_dim(), y.len())?;
        Ok(dot(&kx, y) + weighted_eval(self.reg.as_ref(), self.lambda, x) - self.loss_conjugate.eval(y))
    }
}

#[derive(Debug, Clone)]
pub struct CompositeProblem {
    pub op: Arc<dyn LinearOperator>,
    pub loss: Arc<dyn ProxFn>,
    pub reg: Arc<dyn ProxFn>,
    pub lambda: f64,
    pub op_norm: f64,
}

impl CompositeProblem {
    pub fn new(
        op: Arc<dyn LinearOperator>,
        loss: Arc<dyn ProxFn>,
        reg: Arc<dyn ProxFn>,
        lambda: f64,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        let op_norm = estimate_norm(op.as_ref(), DEFAULT_POWER_ITERS, DEFAULT_POWER_SEED)?;
        Ok(Self {
            op,
            loss,
            reg,
            lambda,
            op_norm,
        })
    }

    pub fn with_op_norm(mut self, op_norm: f64) -> Self {
        self.op_norm = op_norm;
        self
    }

    /// Same problem with a different loss (used for smoothing).
    pub fn with_loss(&self, loss: Arc<dyn ProxFn>) -> Self {
        Self {
            loss,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.op.in_dim()
    }

    pub fn loss_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.loss.eval(&self.op.apply(x)?))
    }

    /// `K* ∂F(Kx)`, or `None` when the loss exposes no subgradient.
    pub fn loss_subgradient(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        let kx = self.op.apply(x)?;
        match self.loss.subgradient(&kx) {
            Some(g) => Ok(Some(self.op.adjoint_apply(&g)?)),
            None => Ok(None),
        }
    }

    /// Lipschitz constant of `∇(F∘K)` when `F` is smooth: `L_F·‖K‖²` with the safety factor applied.
    pub fn loss_lipschitz(&self) -> Option<f64> {
        let n = self.op_norm * NORM_SAFETY;
        self.loss.gradient_lipschitz().map(|l| l * n * n)
    }

    pub fn energy(&self, x: &[f64]) -> Result<f64> {
        Ok(self.loss_value(x)? + weighted_eval(self.reg.as_ref(), self.lambda, x))
    }

    pub fn prox_g(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_weighted(self.reg.as_ref(), self.lambda, v, t)
    }
}
