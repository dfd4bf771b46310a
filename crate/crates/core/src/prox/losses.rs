//! Losses and their conjugates, in the forms the primal-dual solver consumes.

use super::norms::sign0;
use super::{check_step, soft_threshold, ProxFn, FEASIBILITY_TOL};
use crate::error::{check_len, invalid, Result};
use crate::linalg::dot;

fn in_box(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo - FEASIBILITY_TOL * lo.abs().max(1.0) && x <= hi + FEASIBILITY_TOL * hi.abs().max(1.0)
}

/// The zero function; its prox is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProxFn for Zero {
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        Ok(v.to_vec())
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len()])
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `½‖x‖²`, its own conjugate.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfSquaredNorm;

impl ProxFn for HalfSquaredNorm {
    fn eval(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, x)
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        Ok(v.iter().map(|x| x / (1.0 + t)).collect())
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.to_vec())
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `½‖z − b‖²`
#[derive(Debug, Clone)]
pub struct SquareLoss {
    b: Vec<f64>,
}

impl SquareLoss {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }
}

impl ProxFn for SquareLoss {
    fn eval(&self, z: &[f64]) -> f64 {
        0.5 * z
            .iter()
            .zip(&self.b)
            .map(|(zi, bi)| (zi - bi) * (zi - bi))
            .sum::<f64>()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.b.len(), v.len())?;
        Ok(v.iter()
            .zip(&self.b)
            .map(|(vi, bi)| (vi + t * bi) / (1.0 + t))
            .collect())
    }

    fn subgradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(z.iter().zip(&self.b).map(|(zi, bi)| zi - bi).collect())
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// `(v − σb)/(1 + σ)`, the prox of `σ(½‖y‖² + ⟨b, y⟩)`.
pub fn prox_square_conjugate(v: &[f64], sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
    check_step(sigma)?;
    check_len(b.len(), v.len())?;
    Ok(v.iter()
        .zip(b)
        .map(|(vi, bi)| (vi - sigma * bi) / (1.0 + sigma))
        .collect())
}

/// `½‖y‖² + ⟨b, y⟩`, the conjugate of [`SquareLoss`].
#[derive(Debug, Clone)]
pub struct SquareLossConjugate {
    b: Vec<f64>,
}

impl SquareLossConjugate {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }
}

impl ProxFn for SquareLossConjugate {
    fn eval(&self, y: &[f64]) -> f64 {
        0.5 * dot(y, y) + dot(&self.b, y)
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_square_conjugate(v, t, &self.b)
    }
}

/// `‖z − b‖₁`
#[derive(Debug, Clone)]
pub struct AbsLoss {
    b: Vec<f64>,
}

impl AbsLoss {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }
}

impl ProxFn for AbsLoss {
    fn eval(&self, z: &[f64]) -> f64 {
        z.iter().zip(&self.b).map(|(zi, bi)| (zi - bi).abs()).sum()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.b.len(), v.len())?;
        Ok(v.iter()
            .zip(&self.b)
            .map(|(vi, bi)| bi + soft_threshold(vi - bi, t))
            .collect())
    }

    fn subgradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(z.iter().zip(&self.b).map(|(zi, bi)| sign0(zi - bi)).collect())
    }
}

/// `clip(v − σb, −1, 1)`, the prox of `σ(⟨b, y⟩ + δ_{‖y‖_∞ ≤ 1})`.
pub fn prox_abs_conjugate(v: &[f64], sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
    check_step(sigma)?;
    check_len(b.len(), v.len())?;
    Ok(v.iter()
        .zip(b)
        .map(|(vi, bi)| (vi - sigma * bi).clamp(-1.0, 1.0))
        .collect())
}

/// `⟨b, y⟩ + δ_{‖y‖_∞ ≤ 1}`, the conjugate of [`AbsLoss`].
#[derive(Debug, Clone)]
pub struct AbsLossConjugate {
    b: Vec<f64>,
}

impl AbsLossConjugate {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }
}

impl ProxFn for AbsLossConjugate {
    fn eval(&self, y: &[f64]) -> f64 {
        if y.iter().all(|&v| in_box(v, -1.0, 1.0)) {
            dot(&self.b, y)
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_abs_conjugate(v, t, &self.b)
    }
}

/// `Σ max(|zᵢ − bᵢ| − ε, 0)`
#[derive(Debug, Clone)]
pub struct EpsInsensitiveLoss {
    b: Vec<f64>,
    eps: f64,
}

impl EpsInsensitiveLoss {
    pub fn new(b: Vec<f64>, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(invalid(format!("insensitivity width must be non-negative, got {eps}")));
        }
        Ok(Self { b, eps })
    }
}

impl ProxFn for EpsInsensitiveLoss {
    fn eval(&self, z: &[f64]) -> f64 {
        z.iter()
            .zip(&self.b)
            .map(|(zi, bi)| ((zi - bi).abs() - self.eps).max(0.0))
            .sum()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.b.len(), v.len())?;
        let eps = self.eps;
        Ok(v.iter()
            .zip(&self.b)
            .map(|(vi, bi)| {
                let u = vi - bi;
                let a = u.abs();
                let p = if a <= eps {
                    u
                } else if a <= eps + t {
                    u.signum() * eps
                } else {
                    u - t * u.signum()
                };
                bi + p
            })
            .collect())
    }

    fn subgradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(
            z.iter()
                .zip(&self.b)
                .map(|(zi, bi)| {
                    let u = zi - bi;
                    if u.abs() > self.eps {
                        sign0(u)
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
    }
}

/// `clip(soft_threshold(v − σb, σε), −1, 1)`, the prox of
/// `σ(⟨b, y⟩ + ε‖y‖₁ + δ_{‖y‖_∞ ≤ 1})`.
pub fn prox_eps_insensitive_conjugate(
    v: &[f64],
    sigma: f64,
    b: &[f64],
    eps: f64,
) -> Result<Vec<f64>> {
    check_step(sigma)?;
    check_len(b.len(), v.len())?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid(format!("insensitivity width must be non-negative, got {eps}")));
    }
    Ok(v.iter()
        .zip(b)
        .map(|(vi, bi)| soft_threshold(vi - sigma * bi, sigma * eps).clamp(-1.0, 1.0))
        .collect())
}

/// `⟨b, y⟩ + ε‖y‖₁ + δ_{‖y‖_∞ ≤ 1}`, the conjugate of [`EpsInsensitiveLoss`].
#[derive(Debug, Clone)]
pub struct EpsInsensitiveConjugate {
    b: Vec<f64>,
    eps: f64,
}

impl EpsInsensitiveConjugate {
    pub fn new(b: Vec<f64>, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(invalid(format!("insensitivity width must be non-negative, got {eps}")));
        }
        Ok(Self { b, eps })
    }
}

impl ProxFn for EpsInsensitiveConjugate {
    fn eval(&self, y: &[f64]) -> f64 {
        if y.iter().all(|&v| in_box(v, -1.0, 1.0)) {
            dot(&self.b, y) + self.eps * y.iter().map(|v| v.abs()).sum::<f64>()
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_eps_insensitive_conjugate(v, t, &self.b, self.eps)
    }
}

/// `Σ max(0, 1 + zᵢ)`.
///
/// With `z = −diag(b)Ax` this is the hinge loss `Σ max(0, 1 − bᵢ⟨aᵢ, x⟩)`; the
/// sign is folded into the operator so the conjugate is `−Σyᵢ + δ_{[0,1]^N}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShiftedHinge;

impl ProxFn for ShiftedHinge {
    fn eval(&self, z: &[f64]) -> f64 {
        z.iter().map(|zi| (1.0 + zi).max(0.0)).sum()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        Ok(v.iter()
            .map(|vi| {
                let w = vi + 1.0;
                let p = if w > t {
                    w - t
                } else if w >= 0.0 {
                    0.0
                } else {
                    w
                };
                p - 1.0
            })
            .collect())
    }

    fn subgradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        Some(z.iter().map(|zi| if 1.0 + zi > 0.0 { 1.0 } else { 0.0 }).collect())
    }
}

/// `clip(v + σ, 0, 1)`, the prox of `σ(−Σyᵢ + δ_{[0,1]^N})`.
pub fn prox_hinge_conjugate(v: &[f64], sigma: f64) -> Result<Vec<f64>> {
    check_step(sigma)?;
    Ok(v.iter().map(|vi| (vi + sigma).clamp(0.0, 1.0)).collect())
}

/// `−Σyᵢ + δ_{[0,1]^N}(y)`, the conjugate of [`ShiftedHinge`].
#[derive(Debug, Clone, Copy, Default)]
pub struct HingeConjugate;

impl ProxFn for HingeConjugate {
    fn eval(&self, y: &[f64]) -> f64 {
        if y.iter().all(|&v| in_box(v, 0.0, 1.0)) {
            -y.iter().sum::<f64>()
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_hinge_conjugate(v, t)
    }
}

/// `clip(v − t·c, lo, hi)`, the prox of `t(⟨c, x⟩ + δ_{[lo,hi]}(x))`.
pub fn prox_box_linear(v: &[f64], t: f64, lo: &[f64], hi: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    check_step(t)?;
    check_len(v.len(), lo.len())?;
    check_len(v.len(), hi.len())?;
    check_len(v.len(), c.len())?;
    if let Some(i) = lo.iter().zip(hi).position(|(l, h)| l > h) {
        return Err(invalid(format!("box lower bound exceeds upper bound at coordinate {i}")));
    }
    Ok(v.iter()
        .zip(lo.iter().zip(hi))
        .zip(c)
        .map(|((vi, (l, h)), ci)| (vi - t * ci).clamp(*l, *h))
        .collect())
}

/// `⟨c, x⟩ + δ_{[lo,hi]}(x)`; infinite bounds are allowed.
#[derive(Debug, Clone)]
pub struct BoxLinear {
    lo: Vec<f64>,
    hi: Vec<f64>,
    c: Vec<f64>,
}

impl BoxLinear {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        check_len(lo.len(), hi.len())?;
        check_len(lo.len(), c.len())?;
        if let Some(i) = lo.iter().zip(&hi).position(|(l, h)| l > h) {
            return Err(invalid(format!("box lower bound exceeds upper bound at coordinate {i}")));
        }
        Ok(Self { lo, hi, c })
    }

    /// `−Σxᵢ + δ_{[0,1]^n}`: the dual objective's linear part for an unbiased SVM.
    pub fn svm_dual(n: usize) -> Self {
        Self {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
            c: vec![-1.0; n],
        }
    }
}

impl ProxFn for BoxLinear {
    fn eval(&self, x: &[f64]) -> f64 {
        let inside = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| in_box(v, l, h));
        if inside {
            dot(&self.c, x)
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_box_linear(v, t, &self.lo, &self.hi, &self.c)
    }

    fn subgradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(self.c.clone())
    }
}
