//! Problem instances for a run: dataset files when given and present, seeded
//! synthetic data otherwise.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use saddle_core::dataio::{binarize_labels, densify, feature_dim, parse_idx_images, parse_libsvm, parse_movielens};
use saddle_core::linalg::DenseMatrix;
use saddle_core::problems::{
    build_multitask, dim_reduction, kernel_svm_dual, kernel_svm_primal, linear_svm, matrix_factorization,
    ratings_to_observations, rbf_kernel, ProblemKind, ProblemSpec,
};

use crate::error::{BenchError, Result};
use crate::spec::RunSpec;

/// Where the instance came from; written to the summary.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic,
    File(String),
    /// A data path was given but the file does not exist.
    SyntheticFallback(String),
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Synthetic => f.write_str("synthetic"),
            DataSource::File(p) => write!(f, "file:{p}"),
            DataSource::SyntheticFallback(p) => write!(f, "synthetic (missing {p})"),
        }
    }
}

/// Side length of the pooled idx images.
pub const POOLED_SIDE: usize = 7;

pub fn load_problem(spec: &RunSpec) -> Result<(ProblemSpec, DataSource)> {
    match &spec.data_path {
        Some(path) if path.exists() => {
            let problem = load_file(spec, path)?;
            Ok((problem, DataSource::File(path.display().to_string())))
        }
        Some(path) => Ok((synthetic(spec)?, DataSource::SyntheticFallback(path.display().to_string()))),
        None => Ok((synthetic(spec)?, DataSource::Synthetic)),
    }
}

fn synthetic(spec: &RunSpec) -> Result<ProblemSpec> {
    let cfg = spec.problem.default_data(spec.seed);
    Ok(match spec.problem {
        ProblemKind::MultiTask => build_multitask(&cfg, spec.tube, spec.lambda)?,
        kind => kind.build(&cfg, spec.lambda)?,
    })
}

fn load_file(spec: &RunSpec, path: &Path) -> Result<ProblemSpec> {
    let open = || File::open(path).map(BufReader::new);
    let cap = spec.problem.default_data(spec.seed).n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.problem {
        ProblemKind::LinearSvm | ProblemKind::KernelSvm | ProblemKind::KernelSvmPrimal => {
            let mut examples = parse_libsvm(open()?)?;
            if examples.len() > cap {
                let mut keep = index::sample(&mut rng, examples.len(), cap).into_vec();
                keep.sort_unstable();
                examples = keep.into_iter().map(|i| examples[i].clone()).collect();
            }
            let labels = binarize_labels(&examples)?;
            let mut x = densify(&examples, feature_dim(&examples))?;
            standardize_columns(&mut x);
            Ok(match spec.problem {
                ProblemKind::LinearSvm => linear_svm(x, labels, spec.lambda)?,
                ProblemKind::KernelSvm => kernel_svm_dual(&rbf_kernel(&x)?, &labels, spec.lambda)?,
                _ => kernel_svm_primal(&rbf_kernel(&x)?, &labels, spec.lambda)?,
            })
        }
        ProblemKind::MatrixFactorization => {
            let ratings = parse_movielens(open()?)?;
            let cfg = spec.problem.default_data(spec.seed);
            let (obs, rows, cols) = ratings_to_observations(&ratings, cfg.n_samples, cfg.n_features)?;
            Ok(matrix_factorization(obs, rows, cols, spec.lambda)?)
        }
        ProblemKind::DimReduction => {
            let images = parse_idx_images(File::open(path)?)?;
            let cfg = spec.problem.default_data(spec.seed);
            compressed_images(&images, cfg.n_samples, cfg.n_groups, cfg.noise_sd, &mut rng, spec.lambda)
        }
        ProblemKind::FeatureSelection | ProblemKind::MultiTask => Err(BenchError::InvalidRun(format!(
            "{} has no dataset format; run it without --data",
            spec.problem
        ))),
    }
}

/// Centers each column and scales it to unit variance (constant columns are left at zero).
pub fn standardize_columns(x: &mut DenseMatrix) {
    let (n, d) = (x.rows(), x.cols());
    if n == 0 {
        return;
    }
    for j in 0..d {
        let mean = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (x.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 0.0 };
        for i in 0..n {
            x.set(i, j, (x.get(i, j) - mean) * scale);
        }
    }
}

/// Average-pools a square image (row of length side²) down to `POOLED_SIDE²` pixels.
pub fn pool_image(pixels: &[f64]) -> Result<Vec<f64>> {
    let side = (pixels.len() as f64).sqrt().round() as usize;
    if side * side != pixels.len() || side < POOLED_SIDE {
        return Err(BenchError::InvalidRun(format!("image of {} pixels is not a square of side ≥ {POOLED_SIDE}", pixels.len())));
    }
    let mut out = vec![0.0; POOLED_SIDE * POOLED_SIDE];
    let mut counts = vec![0usize; out.len()];
    for r in 0..side {
        for c in 0..side {
            let k = (r * POOLED_SIDE / side) * POOLED_SIDE + c * POOLED_SIDE / side;
            out[k] += pixels[r * side + c];
            counts[k] += 1;
        }
    }
    for (o, c) in out.iter_mut().zip(counts) {
        *o /= c as f64;
    }
    Ok(out)
}

/// Recovery of `k` pooled images from `m` Gaussian measurements each:
/// the images are the columns of `X*`, `B = AX* + noise`.
fn compressed_images(
    images: &DenseMatrix,
    m: usize,
    k: usize,
    noise_sd: f64,
    rng: &mut ChaCha8Rng,
    lambda: f64,
) -> Result<ProblemSpec> {
    if images.rows() < k {
        return Err(BenchError::InvalidRun(format!("need at least {k} images, file has {}", images.rows())));
    }
    let d = POOLED_SIDE * POOLED_SIDE;
    let mut x_true = DenseMatrix::zeros(d, k);
    for c in 0..k {
        for (j, v) in pool_image(images.row(c))?.into_iter().enumerate() {
            x_true.set(j, c, v);
        }
    }
    let mut a = DenseMatrix::zeros(m, d);
    let scale = 1.0 / (m as f64).sqrt();
    for i in 0..m {
        for v in a.row_mut(i) {
            *v = scale * rng.sample::<f64, _>(StandardNormal);
        }
    }
    let mut b = a.matmul(&x_true)?;
    for i in 0..m {
        for v in b.row_mut(i) {
            *v += noise_sd * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(dim_reduction(a, b, lambda)?)
}
