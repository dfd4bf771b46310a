//! Proximal operators and convex conjugates.
//!
//! `prox_{tf}(v) = argmin_x t f(x) + ½‖x − v‖²`. Every function here receives the
//! combined step coefficient (for example `τλ`); regularization weights are the
//! caller's business.

mod losses;
mod norms;

use std::fmt::Debug;
use std::sync::Arc;

pub use losses::{
    prox_abs_conjugate, prox_box_linear, prox_eps_insensitive_conjugate, prox_hinge_conjugate,
    prox_square_conjugate, AbsLoss, AbsLossConjugate, BoxLinear, EpsInsensitiveConjugate,
    EpsInsensitiveLoss, HalfSquaredNorm, HingeConjugate, ShiftedHinge, SquareLoss,
    SquareLossConjugate, Zero,
};
pub use norms::{
    project_l1_ball, prox_group_l21, prox_l1, prox_l1inf, prox_quadratic, prox_trace_norm,
    GroupL21, GroupL2Balls, L1InfNorm, L1Norm, LinfBall, QuadraticForm, RowL1Balls, PSD_JITTER,
    SpectralBall, TraceNorm,
};

use crate::error::{invalid, Result};
use crate::linalg::norm;

/// Slack used by indicator functions when testing membership.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A proper closed convex function with a computable proximal map.
pub trait ProxFn: Debug + Send + Sync {
    /// Function value; `f64::INFINITY` outside the domain.
    fn eval(&self, x: &[f64]) -> f64;

    /// `prox_{t f}(v)` for `t > 0`.
    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>>;

    /// Some element of `∂f(x)`, when the function exposes one.
    fn subgradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Lipschitz constant of `∇f` for differentiable functions.
    fn gradient_lipschitz(&self) -> Option<f64> {
        None
    }
}

pub(crate) fn check_step(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("prox parameter must be positive and finite, got {t}")))
    }
}

#[inline]
pub(crate) fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// A function and its convex conjugate.
#[derive(Debug, Clone)]
pub struct ConjugatePair {
    pub f: Arc<dyn ProxFn>,
    pub fstar: Arc<dyn ProxFn>,
}

impl ConjugatePair {
    pub fn new(f: impl ProxFn + 'static, fstar: impl ProxFn + 'static) -> Self {
        Self {
            f: Arc::new(f),
            fstar: Arc::new(fstar),
        }
    }
}

/// Moreau decomposition residual `‖v − prox_{tf}(v) − t·prox_{f*/t}(v/t)‖`.
pub fn moreau_check(pair: &ConjugatePair, v: &[f64], t: f64) -> Result<f64> {
    check_step(t)?;
    let p = pair.f.prox(v, t)?;
    let scaled: Vec<f64> = v.iter().map(|x| x / t).collect();
    let q = pair.fstar.prox(&scaled, 1.0 / t)?;
    let r: Vec<f64> = v
        .iter()
        .zip(p.iter().zip(&q))
        .map(|(vi, (pi, qi))| vi - pi - t * qi)
        .collect();
    Ok(norm(&r))
}

/// Prox objective `t f(p) + ½‖p − v‖²`, used by argmin-characterization checks.
pub fn prox_objective(f: &dyn ProxFn, v: &[f64], t: f64, p: &[f64]) -> f64 {
    let fp = f.eval(p);
    if fp == f64::INFINITY {
        return f64::INFINITY;
    }
    t * fp + 0.5 * crate::linalg::dist(p, v).powi(2)
}

/// A partition of `0..n` into non-empty groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Groups {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl Groups {
    pub fn new(n: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for (gi, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(invalid(format!("group {gi} is empty")));
            }
            for &i in g {
                if i >= n {
                    return Err(invalid(format!("group {gi} index {i} out of range {n}")));
                }
                if seen[i] {
                    return Err(invalid(format!("index {i} appears in more than one group")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(invalid(format!("index {i} is not covered by any group")));
        }
        Ok(Self { n, groups })
    }

    /// `count` consecutive groups of equal size over `0..n`.
    pub fn contiguous(n: usize, count: usize) -> Result<Self> {
        if count == 0 || n % count != 0 {
            return Err(invalid(format!("{n} coordinates do not split into {count} equal groups")));
        }
        let size = n / count;
        Self::new(n, (0..count).map(|g| (g * size..(g + 1) * size).collect()).collect())
    }

    /// Rows of a `rows × cols` row-major matrix, one group per row.
    pub fn rows_of(rows: usize, cols: usize) -> Result<Self> {
        if cols == 0 {
            return Err(invalid("matrix has no columns"));
        }
        Self::new(
            rows * cols,
            (0..rows).map(|r| (r * cols..(r + 1) * cols).collect()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.groups.iter().map(Vec::as_slice)
    }

    pub fn count(&self) -> usize {
        self.groups.len()
    }
}
