use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg::DenseMatrix;

/// Sizes and noise for the seeded desk-scale generators.
///
/// `n_groups` is reused per problem as feature groups, tasks, target columns or rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataConfig {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_groups: usize,
    /// Fraction of active rows/groups (or observed entries for matrix factorization).
    pub sparsity: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SyntheticDataConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.n_features == 0 || self.n_groups == 0 {
            return Err(invalid("synthetic data counts must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.sparsity) {
            return Err(invalid(format!("sparsity {} outside [0, 1]", self.sparsity)));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(invalid(format!("noise_sd {} must be non-negative", self.noise_sd)));
        }
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub(crate) fn active_count(&self, n: usize) -> usize {
        ((n as f64 * self.sparsity).round() as usize).clamp(1, n)
    }
}

pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    for i in 0..rows {
        for v in m.row_mut(i) {
            *v = scale * normal(rng);
        }
    }
    m
}

/// `count` distinct indices from `0..n`, sorted.
pub(crate) fn choose(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<usize> {
    let mut v = index::sample(rng, n, count.min(n)).into_vec();
    v.sort_unstable();
    v
}

/// Two overlapping Gaussian classes with labels alternating `+1, −1`.
///
/// Class means are `±μ` with `μ = (1, …, 1)/√d`; spread is `noise_sd`.
pub fn gaussian_blobs(cfg: &SyntheticDataConfig) -> Result<(DenseMatrix, Vec<f64>)> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let (n, d) = (cfg.n_samples, cfg.n_features);
    let mu = 1.0 / (d as f64).sqrt();
    let mut x = DenseMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let b = if i % 2 == 0 { 1.0 } else { -1.0 };
        for v in x.row_mut(i) {
            *v = b * mu + cfg.noise_sd * normal(&mut rng);
        }
        labels.push(b);
    }
    Ok((x, labels))
}
