use std::sync::Arc;

use crate::prox::check_step;
use crate::error::{invalid, Result};
use crate::prox::ProxFn;

/// Moreau envelope `F_ε(z) = min_u F(u) + ‖u − z‖²/(2ε)`.
///
/// Differentiable with `∇F_ε(z) = (z − prox_{εF}(z))/ε`, which is `1/ε`-Lipschitz.
#[derive(Debug, Clone)]
pub struct MoreauEnvelope {
    inner: Arc<dyn ProxFn>,
    eps: f64,
}

/// Smooths a loss with known prox into its Moreau envelope of width `eps`.
pub fn smooth_loss(loss: Arc<dyn ProxFn>, eps: f64) -> Result<MoreauEnvelope> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("smoothing width must be positive, got {eps}")));
    }
    Ok(MoreauEnvelope { inner: loss, eps })
}

impl MoreauEnvelope {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        let p = self.inner.prox(z, self.eps)?;
        Ok(z.iter().zip(&p).map(|(zi, pi)| (zi - pi) / self.eps).collect())
    }
}

impl ProxFn for MoreauEnvelope {
    fn eval(&self, z: &[f64]) -> f64 {
        match self.inner.prox(z, self.eps) {
            Ok(p) => {
                let d2: f64 = z.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
                self.inner.eval(&p) + d2 / (2.0 * self.eps)
            }
            Err(_) => f64::NAN,
        }
    }

    /// `prox_{tF_ε}(v) = v + t/(ε + t)·(prox_{(ε+t)F}(v) − v)`
    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        let p = self.inner.prox(v, self.eps + t)?;
        let w = t / (self.eps + t);
        Ok(v.iter().zip(&p).map(|(vi, pi)| vi + w * (pi - vi)).collect())
    }

    fn subgradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        self.gradient(z).ok()
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(1.0 / self.eps)
    }
}
