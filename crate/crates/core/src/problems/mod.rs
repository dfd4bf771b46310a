//! Builders for the benchmark machine-learning problems.
//!
//! Every builder returns a [`ProblemSpec`] holding the saddle form (for the
//! primal-dual solvers), the composite form (for Fobos and FISTA) and an energy
//! evaluated straight from the data, which tests use to cross-check both forms.
//!
//! Hinge losses are written as `Σ max(0, 1 + zᵢ)` with `z = −diag(b)Ax`, so the
//! dual variable lives in `[0, 1]^N` and `F*(y) = −Σyᵢ + δ(y)`.

mod kernel;
mod synthetic;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use kernel::{build_kernel_svm_dual, build_kernel_svm_primal, kernel_svm_dual, kernel_svm_primal, rbf_kernel};
pub use synthetic::{gaussian_blobs, SyntheticDataConfig};

use crate::dataio::RatingTriple;
use crate::error::{check_len, invalid, Result};
use crate::forms::{CompositeProblem, SaddleProblem};
use crate::linalg::{dot, DenseMatrix};
use crate::operator::{ColumnBlocks, EntrySelection, LeftMultiply, LinearOperator};
use crate::prox::{
    AbsLoss, AbsLossConjugate, EpsInsensitiveConjugate, EpsInsensitiveLoss, GroupL21, Groups,
    HingeConjugate, L1InfNorm, ProxFn, QuadraticForm, ShiftedHinge, SquareLoss,
    SquareLossConjugate, TraceNorm,
};

pub const DEFAULT_EPS_INSENSITIVE: f64 = 0.1;
/// Ratings at or above this map to +1.
pub const RATING_THRESHOLD: u8 = 4;

pub type EnergyFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// User-facing regularization weight. For the kernel-SVM dual it is folded into `Ĥ`.
    pub lambda: f64,
    pub saddle: SaddleProblem,
    pub composite: Option<CompositeProblem>,
    /// Shape of the optimization variable (`n × 1` for vectors), row-major.
    pub shape: (usize, usize),
    direct_energy: EnergyFn,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kind", &self.kind)
            .field("lambda", &self.lambda)
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn dim(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    /// Energy computed directly from the data, independent of either solver form.
    pub fn direct_energy(&self, x: &[f64]) -> f64 {
        (self.direct_energy)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    DimReduction,
    LinearSvm,
    KernelSvm,
    KernelSvmPrimal,
    FeatureSelection,
    MultiTask,
    MatrixFactorization,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 7] = [
        ProblemKind::DimReduction,
        ProblemKind::LinearSvm,
        ProblemKind::KernelSvm,
        ProblemKind::KernelSvmPrimal,
        ProblemKind::FeatureSelection,
        ProblemKind::MultiTask,
        ProblemKind::MatrixFactorization,
    ];

    /// The six benchmark instances (kernel SVM in its dual form).
    pub const BENCHMARK: [ProblemKind; 6] = [
        ProblemKind::DimReduction,
        ProblemKind::LinearSvm,
        ProblemKind::KernelSvm,
        ProblemKind::FeatureSelection,
        ProblemKind::MultiTask,
        ProblemKind::MatrixFactorization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::DimReduction => "dim-reduction",
            ProblemKind::LinearSvm => "linear-svm",
            ProblemKind::KernelSvm => "kernel-svm",
            ProblemKind::KernelSvmPrimal => "kernel-svm-primal",
            ProblemKind::FeatureSelection => "feature-selection",
            ProblemKind::MultiTask => "multitask",
            ProblemKind::MatrixFactorization => "matrix-factorization",
        }
    }

    /// Regularization weights used in the reference convergence plots.
    pub fn default_lambda(self) -> f64 {
        match self {
            ProblemKind::DimReduction => 1.0,
            ProblemKind::LinearSvm => 10.0,
            ProblemKind::KernelSvm | ProblemKind::KernelSvmPrimal => 1.0,
            ProblemKind::FeatureSelection | ProblemKind::MultiTask => 1e-3,
            ProblemKind::MatrixFactorization => 1e-5,
        }
    }

    /// Desk-scale synthetic sizes.
    pub fn default_data(self, seed: u64) -> SyntheticDataConfig {
        let (n_samples, n_features, n_groups, sparsity, noise_sd) = match self {
            ProblemKind::DimReduction => (20, 50, 5, 0.2, 0.01),
            ProblemKind::LinearSvm => (100, 10, 2, 1.0, 1.0),
            ProblemKind::KernelSvm | ProblemKind::KernelSvmPrimal => (100, 5, 2, 1.0, 0.1),
            ProblemKind::FeatureSelection => (50, 40, 8, 0.25, 0.1),
            ProblemKind::MultiTask => (30, 20, 3, 0.25, 0.1),
            ProblemKind::MatrixFactorization => (20, 30, 3, 0.4, 0.1),
        };
        SyntheticDataConfig {
            n_samples,
            n_features,
            n_groups,
            sparsity,
            noise_sd,
            seed,
        }
    }

    /// Builds the synthetic instance for this problem.
    pub fn build(self, data: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
        match self {
            ProblemKind::DimReduction => build_dim_reduction(data, lambda),
            ProblemKind::LinearSvm => build_linear_svm(data, lambda),
            ProblemKind::KernelSvm => build_kernel_svm_dual(data, lambda),
            ProblemKind::KernelSvmPrimal => build_kernel_svm_primal(data, lambda),
            ProblemKind::FeatureSelection => build_feature_selection(data, lambda),
            ProblemKind::MultiTask => build_multitask(data, DEFAULT_EPS_INSENSITIVE, lambda),
            ProblemKind::MatrixFactorization => build_matrix_factorization(data, lambda),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ProblemKind::ALL.iter().map(|k| k.name()).collect();
                invalid(format!("unknown problem '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("lambda must be non-negative, got {lambda}")))
    }
}

pub(crate) fn check_labels(labels: &[f64]) -> Result<()> {
    match labels.iter().position(|&b| b != 1.0 && b != -1.0) {
        Some(i) => Err(invalid(format!("label {} at index {i} is not ±1", labels[i]))),
        None => Ok(()),
    }
}

/// Square loss with ℓ2,1 on the rows of `X`: `½‖AX − B‖_F² + λ Σᵢ ‖Xᵢ‖₂`.
pub fn dim_reduction(a: DenseMatrix, b: DenseMatrix, lambda: f64) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    if a.rows() == 0 || a.cols() == 0 || b.cols() == 0 {
        return Err(invalid("dimensionality reduction needs non-empty A and B"));
    }
    check_len(a.rows(), b.rows())?;
    let (d, k) = (a.cols(), b.cols());
    let op: Arc<dyn LinearOperator> = Arc::new(LeftMultiply::new(a.clone(), k)?);
    let target = b.as_slice().to_vec();
    let loss: Arc<dyn ProxFn> = Arc::new(SquareLoss::new(target.clone()));
    let reg: Arc<dyn ProxFn> = Arc::new(GroupL21::new(Groups::rows_of(d, k)?));
    let saddle = SaddleProblem::new(
        op.clone(),
        loss.clone(),
        Arc::new(SquareLossConjugate::new(target)),
        reg.clone(),
        lambda,
    )?;
    let composite = CompositeProblem::new(op, loss, reg, lambda)?.with_op_norm(saddle.op_norm);
    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        let mut fit = 0.0;
        for i in 0..a.rows() {
            for c in 0..k {
                let pred: f64 = (0..d).map(|j| a.get(i, j) * x[j * k + c]).sum();
                fit += (pred - b.get(i, c)).powi(2);
            }
        }
        let reg: f64 = x.chunks(k).map(|r| dot(r, r).sqrt()).sum();
        0.5 * fit + lambda * reg
    });
    Ok(ProblemSpec {
        kind: ProblemKind::DimReduction,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (d, k),
        direct_energy: direct,
    })
}

/// Gaussian `A` (`m × d`), row-sparse `X*` (`d × k`), `B = AX* + noise`.
pub fn build_dim_reduction(cfg: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let (m, d, k) = (cfg.n_samples, cfg.n_features, cfg.n_groups);
    let a = synthetic::gaussian_matrix(&mut rng, m, d, 1.0 / (m as f64).sqrt());
    let active = synthetic::choose(&mut rng, d, cfg.active_count(d));
    let mut x_true = DenseMatrix::zeros(d, k);
    for &j in &active {
        for c in 0..k {
            x_true.set(j, c, synthetic::normal(&mut rng));
        }
    }
    let mut b = a.matmul(&x_true)?;
    for i in 0..m {
        for v in b.row_mut(i) {
            *v += cfg.noise_sd * synthetic::normal(&mut rng);
        }
    }
    dim_reduction(a, b, lambda)
}

/// Hinge loss with `λxᵀQx`, `Q = I`: `Σ max(0, 1 − bᵢ⟨aᵢ, x⟩) + λ‖x‖²`.
pub fn linear_svm(features: DenseMatrix, labels: Vec<f64>, lambda: f64) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    check_labels(&labels)?;
    check_len(features.rows(), labels.len())?;
    if features.rows() == 0 || features.cols() == 0 {
        return Err(invalid("linear SVM needs at least one sample and one feature"));
    }
    let d = features.cols();
    let k = signed_rows(&features, &labels, -1.0);
    let op: Arc<dyn LinearOperator> = Arc::new(k);
    let reg: Arc<dyn ProxFn> = Arc::new(QuadraticForm::new(DenseMatrix::identity(d))?);
    let saddle = SaddleProblem::new(op.clone(), Arc::new(ShiftedHinge), Arc::new(HingeConjugate), reg.clone(), lambda)?;
    let composite =
        CompositeProblem::new(op, Arc::new(ShiftedHinge), reg, lambda)?.with_op_norm(saddle.op_norm);
    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        let hinge: f64 = (0..features.rows())
            .map(|i| (1.0 - labels[i] * dot(features.row(i), x)).max(0.0))
            .sum();
        hinge + lambda * dot(x, x)
    });
    Ok(ProblemSpec {
        kind: ProblemKind::LinearSvm,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (d, 1),
        direct_energy: direct,
    })
}

pub fn build_linear_svm(cfg: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
    let (x, b) = gaussian_blobs(cfg)?;
    linear_svm(x, b, lambda)
}

/// `scale·diag(b)·A`
pub(crate) fn signed_rows(a: &DenseMatrix, labels: &[f64], scale: f64) -> DenseMatrix {
    let mut k = a.clone();
    for (i, &b) in labels.iter().enumerate() {
        k.row_mut(i).iter_mut().for_each(|v| *v *= scale * b);
    }
    k
}

/// Absolute loss with group lasso: `‖Ax − b‖₁ + λ Σ_g ‖x_g‖₂`.
pub fn feature_selection(a: DenseMatrix, b: Vec<f64>, groups: Groups, lambda: f64) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    check_len(a.rows(), b.len())?;
    check_len(a.cols(), groups.len())?;
    let d = a.cols();
    let op: Arc<dyn LinearOperator> = Arc::new(a.clone());
    let loss: Arc<dyn ProxFn> = Arc::new(AbsLoss::new(b.clone()));
    let reg: Arc<dyn ProxFn> = Arc::new(GroupL21::new(groups.clone()));
    let saddle = SaddleProblem::new(op.clone(), loss.clone(), Arc::new(AbsLossConjugate::new(b.clone())), reg.clone(), lambda)?;
    let composite = CompositeProblem::new(op, loss, reg, lambda)?.with_op_norm(saddle.op_norm);
    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        let fit: f64 = (0..a.rows()).map(|i| (dot(a.row(i), x) - b[i]).abs()).sum();
        let reg: f64 = groups
            .iter()
            .map(|g| g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt())
            .sum();
        fit + lambda * reg
    });
    Ok(ProblemSpec {
        kind: ProblemKind::FeatureSelection,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (d, 1),
        direct_energy: direct,
    })
}

/// Gaussian design with `n_groups` equal feature groups, a few of them active.
pub fn build_feature_selection(cfg: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
    cfg.validate()?;
    let groups = Groups::contiguous(cfg.n_features, cfg.n_groups)?;
    let mut rng = cfg.rng();
    let (m, d) = (cfg.n_samples, cfg.n_features);
    let a = synthetic::gaussian_matrix(&mut rng, m, d, 1.0 / (m as f64).sqrt());
    let active = synthetic::choose(&mut rng, cfg.n_groups, cfg.active_count(cfg.n_groups));
    let mut x_true = vec![0.0; d];
    let size = d / cfg.n_groups;
    for &g in &active {
        for v in &mut x_true[g * size..(g + 1) * size] {
            *v = synthetic::normal(&mut rng);
        }
    }
    let mut b = a.matvec(&x_true)?;
    for v in &mut b {
        *v += cfg.noise_sd * synthetic::normal(&mut rng);
    }
    feature_selection(a, b, groups, lambda)
}

/// ε-insensitive loss per task with `λ‖X‖_{1,∞}`; `X` is `d × T`, column `t` is task `t`.
pub fn multitask(designs: Vec<DenseMatrix>, targets: Vec<Vec<f64>>, eps: f64, lambda: f64) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    if designs.is_empty() {
        return Err(invalid("multi-task learning needs at least one task"));
    }
    check_len(designs.len(), targets.len())?;
    let d = designs[0].cols();
    for (a, b) in designs.iter().zip(&targets) {
        check_len(d, a.cols())?;
        check_len(a.rows(), b.len())?;
    }
    let t_count = designs.len();
    let b_all: Vec<f64> = targets.concat();
    let op: Arc<dyn LinearOperator> = Arc::new(ColumnBlocks::new(designs.clone())?);
    let loss: Arc<dyn ProxFn> = Arc::new(EpsInsensitiveLoss::new(b_all.clone(), eps)?);
    let reg: Arc<dyn ProxFn> = Arc::new(L1InfNorm::new(d, t_count));
    let saddle = SaddleProblem::new(
        op.clone(),
        loss.clone(),
        Arc::new(EpsInsensitiveConjugate::new(b_all, eps)?),
        reg.clone(),
        lambda,
    )?;
    let composite = CompositeProblem::new(op, loss, reg, lambda)?.with_op_norm(saddle.op_norm);
    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        let mut fit = 0.0;
        for (t, (a, b)) in designs.iter().zip(&targets).enumerate() {
            let col: Vec<f64> = (0..d).map(|j| x[j * t_count + t]).collect();
            for i in 0..a.rows() {
                fit += ((dot(a.row(i), &col) - b[i]).abs() - eps).max(0.0);
            }
        }
        let reg: f64 = x
            .chunks(t_count)
            .map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .sum();
        fit + lambda * reg
    });
    Ok(ProblemSpec {
        kind: ProblemKind::MultiTask,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (d, t_count),
        direct_energy: direct,
    })
}

/// `n_groups` tasks sharing a row-sparse weight matrix.
pub fn build_multitask(cfg: &SyntheticDataConfig, eps: f64, lambda: f64) -> Result<ProblemSpec> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let (m, d, t_count) = (cfg.n_samples, cfg.n_features, cfg.n_groups);
    let active = synthetic::choose(&mut rng, d, cfg.active_count(d));
    let mut designs = Vec::with_capacity(t_count);
    let mut targets = Vec::with_capacity(t_count);
    for _ in 0..t_count {
        let a = synthetic::gaussian_matrix(&mut rng, m, d, 1.0 / (m as f64).sqrt());
        let mut w = vec![0.0; d];
        for &j in &active {
            w[j] = synthetic::normal(&mut rng);
        }
        let mut b = a.matvec(&w)?;
        for v in &mut b {
            *v += cfg.noise_sd * synthetic::normal(&mut rng);
        }
        designs.push(a);
        targets.push(b);
    }
    multitask(designs, targets, eps, lambda)
}

/// Hinge loss on observed ±1 entries with trace-norm regularization:
/// `Σ_{(i,j)∈Ω} max(0, 1 − R_ij X_ij) + λ‖X‖_*`.
pub fn matrix_factorization(
    observations: Vec<(usize, usize, f64)>,
    rows: usize,
    cols: usize,
    lambda: f64,
) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    if observations.is_empty() {
        return Err(invalid("matrix factorization needs at least one observed entry"));
    }
    let mut seen = HashSet::new();
    for &(i, j, r) in &observations {
        if r != 1.0 && r != -1.0 {
            return Err(invalid(format!("rating {r} at ({i}, {j}) is not ±1")));
        }
        if !seen.insert((i, j)) {
            return Err(invalid(format!("entry ({i}, {j}) observed twice")));
        }
    }
    let signed: Vec<(usize, usize, f64)> = observations.iter().map(|&(i, j, r)| (i, j, -r)).collect();
    let op: Arc<dyn LinearOperator> = Arc::new(EntrySelection::new(rows, cols, signed)?);
    let reg: Arc<dyn ProxFn> = Arc::new(TraceNorm::new(rows, cols));
    // a selection with distinct entries and unit weights has norm exactly 1
    let saddle = SaddleProblem::new(op.clone(), Arc::new(ShiftedHinge), Arc::new(HingeConjugate), reg.clone(), lambda)?
        .with_op_norm(1.0);
    let composite = CompositeProblem::new(op, Arc::new(ShiftedHinge), reg, lambda)?.with_op_norm(1.0);
    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        let hinge: f64 = observations
            .iter()
            .map(|&(i, j, r)| (1.0 - r * x[i * cols + j]).max(0.0))
            .sum();
        let nuclear = DenseMatrix::new(rows, cols, x.to_vec())
            .and_then(|m| crate::linalg::jacobi_svd(&m))
            .map(|s| s.s.iter().sum::<f64>())
            .unwrap_or(f64::NAN);
        hinge + lambda * nuclear
    });
    Ok(ProblemSpec {
        kind: ProblemKind::MatrixFactorization,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (rows, cols),
        direct_energy: direct,
    })
}

/// Signs of a noisy rank-`n_groups` matrix observed on a random `sparsity` fraction of entries.
pub fn build_matrix_factorization(cfg: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let (rows, cols, rank) = (cfg.n_samples, cfg.n_features, cfg.n_groups);
    let u = synthetic::gaussian_matrix(&mut rng, rows, rank, 1.0);
    let v = synthetic::gaussian_matrix(&mut rng, rank, cols, 1.0);
    let full = u.matmul(&v)?;
    let count = ((rows * cols) as f64 * cfg.sparsity).round().max(1.0) as usize;
    let picked = synthetic::choose(&mut rng, rows * cols, count);
    let mut obs: Vec<(usize, usize, f64)> = picked
        .into_iter()
        .map(|p| {
            let (i, j) = (p / cols, p % cols);
            let val = full.get(i, j) + cfg.noise_sd * synthetic::normal(&mut rng);
            (i, j, if val >= 0.0 { 1.0 } else { -1.0 })
        })
        .collect();
    obs.sort_by_key(|&(i, j, _)| (i, j));
    matrix_factorization(obs, rows, cols, lambda)
}

/// Keeps the `max_users` most active users and `max_items` most rated items,
/// re-indexes them densely and maps ratings `≥ 4` to +1, others to −1.
pub fn ratings_to_observations(
    triples: &[RatingTriple],
    max_users: usize,
    max_items: usize,
) -> Result<(Vec<(usize, usize, f64)>, usize, usize)> {
    fn top(counts: std::collections::HashMap<u32, usize>, n: usize) -> Vec<u32> {
        let mut v: Vec<(u32, usize)> = counts.into_iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut ids: Vec<u32> = v.into_iter().take(n).map(|p| p.0).collect();
        ids.sort_unstable();
        ids
    }
    let mut users = std::collections::HashMap::new();
    let mut items = std::collections::HashMap::new();
    for t in triples {
        *users.entry(t.user).or_insert(0) += 1;
        *items.entry(t.item).or_insert(0) += 1;
    }
    let users = top(users, max_users);
    let items = top(items, max_items);
    let mut obs = Vec::new();
    let mut seen = HashSet::new();
    for t in triples {
        let (Ok(i), Ok(j)) = (users.binary_search(&t.user), items.binary_search(&t.item)) else {
            continue;
        };
        if seen.insert((i, j)) {
            obs.push((i, j, if t.rating >= RATING_THRESHOLD { 1.0 } else { -1.0 }));
        }
    }
    if obs.is_empty() {
        return Err(invalid("no ratings left after selecting users and items"));
    }
    obs.sort_by_key(|&(i, j, _)| (i, j));
    Ok((obs, users.len(), items.len()))
}
