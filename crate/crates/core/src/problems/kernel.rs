use std::sync::Arc;

use super::{check_labels, check_lambda, gaussian_blobs, signed_rows, EnergyFn, ProblemKind, ProblemSpec, SyntheticDataConfig};
use crate::error::{check_len, invalid, Result};
use crate::forms::{CompositeProblem, SaddleProblem};
use crate::linalg::{dist, dot, sym_eigen, DenseMatrix};
use crate::operator::{Identity, LinearOperator};
use crate::prox::{BoxLinear, HalfSquaredNorm, HingeConjugate, ProxFn, QuadraticForm, ShiftedHinge, PSD_JITTER};

/// Gaussian RBF kernel `exp(−‖xᵢ − xⱼ‖²/(2h²))` with `h` the median pairwise distance.
pub fn rbf_kernel(features: &DenseMatrix) -> Result<DenseMatrix> {
    let n = features.rows();
    let mut dists = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            dists.push(dist(features.row(i), features.row(j)));
        }
    }
    dists.sort_by(f64::total_cmp);
    let h = if dists.is_empty() {
        1.0
    } else {
        let mid = dists.len() / 2;
        if dists.len() % 2 == 0 {
            0.5 * (dists[mid - 1] + dists[mid])
        } else {
            dists[mid]
        }
    };
    if h <= 0.0 {
        return Err(invalid("median pairwise distance is zero"));
    }
    let mut k = DenseMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(features.row(i), features.row(j));
            let v = (-d * d / (2.0 * h * h)).exp();
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    Ok(k)
}

/// Unbiased kernel SVM dual: `½xᵀĤx − Σxᵢ + δ_{[0,1]^N}(x)` with `Ĥ = diag(b)·H·diag(b)/(2λ)`.
///
/// The saddle form factors `Ĥ = MᵀM` through its eigendecomposition and pairs
/// `K = M` with `F = F* = ½‖·‖²`; the composite form keeps `Ĥ` explicitly.
pub fn kernel_svm_dual(kernel: &DenseMatrix, labels: &[f64], lambda: f64) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Err(invalid("kernel SVM dual needs a positive lambda"));
    }
    check_labels(labels)?;
    if !kernel.is_square() {
        return Err(invalid("kernel matrix must be square"));
    }
    check_len(kernel.rows(), labels.len())?;
    let n = labels.len();
    let mut h_hat = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h_hat.set(i, j, labels[i] * labels[j] * kernel.get(i, j) / (2.0 * lambda));
        }
    }
    let eig = sym_eigen(&h_hat)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -PSD_JITTER * top.max(1.0) {
        return Err(invalid(format!("kernel matrix is not positive semidefinite (eigenvalue {min:e})")));
    }
    let mut m = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let s = eig.values[k].max(0.0).sqrt();
        for i in 0..n {
            m.set(k, i, s * eig.vectors.get(i, k));
        }
    }
    let reg: Arc<dyn ProxFn> = Arc::new(BoxLinear::svm_dual(n));
    let saddle = SaddleProblem::new(
        Arc::new(m),
        Arc::new(HalfSquaredNorm),
        Arc::new(HalfSquaredNorm),
        reg.clone(),
        1.0,
    )?
    .with_op_norm(top.max(0.0).sqrt());

    let mut half = h_hat.clone();
    for i in 0..n {
        half.row_mut(i).iter_mut().for_each(|v| *v *= 0.5);
    }
    let op: Arc<dyn LinearOperator> = Arc::new(Identity(n));
    let composite = CompositeProblem::new(op, Arc::new(QuadraticForm::new(half)?), reg, 1.0)?.with_op_norm(1.0);

    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        if x.iter().any(|&v| !(-1e-9..=1.0 + 1e-9).contains(&v)) {
            return f64::INFINITY;
        }
        let hx = h_hat.matvec(x).expect("dimension checked by caller");
        0.5 * dot(x, &hx) - x.iter().sum::<f64>()
    });
    Ok(ProblemSpec {
        kind: ProblemKind::KernelSvm,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (n, 1),
        direct_energy: direct,
    })
}

/// Kernel SVM primal in the expansion coefficients: `Σ max(0, 1 − bᵢ(Hx)ᵢ) + λxᵀHx`.
pub fn kernel_svm_primal(kernel: &DenseMatrix, labels: &[f64], lambda: f64) -> Result<ProblemSpec> {
    check_lambda(lambda)?;
    check_labels(labels)?;
    if !kernel.is_square() {
        return Err(invalid("kernel matrix must be square"));
    }
    check_len(kernel.rows(), labels.len())?;
    let n = labels.len();
    let reg: Arc<dyn ProxFn> = Arc::new(QuadraticForm::new(kernel.clone())?);
    let op: Arc<dyn LinearOperator> = Arc::new(signed_rows(kernel, labels, -1.0));
    let saddle = SaddleProblem::new(op.clone(), Arc::new(ShiftedHinge), Arc::new(HingeConjugate), reg.clone(), lambda)?;
    let composite =
        CompositeProblem::new(op, Arc::new(ShiftedHinge), reg, lambda)?.with_op_norm(saddle.op_norm);
    let h = kernel.clone();
    let labels = labels.to_vec();
    let direct: EnergyFn = Arc::new(move |x: &[f64]| {
        let hx = h.matvec(x).expect("dimension checked by caller");
        let hinge: f64 = hx.iter().zip(&labels).map(|(v, b)| (1.0 - b * v).max(0.0)).sum();
        hinge + lambda * dot(x, &hx)
    });
    Ok(ProblemSpec {
        kind: ProblemKind::KernelSvmPrimal,
        lambda,
        saddle,
        composite: Some(composite),
        shape: (n, 1),
        direct_energy: direct,
    })
}

pub fn build_kernel_svm_dual(cfg: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
    let (x, b) = gaussian_blobs(cfg)?;
    kernel_svm_dual(&rbf_kernel(&x)?, &b, lambda)
}

pub fn build_kernel_svm_primal(cfg: &SyntheticDataConfig, lambda: f64) -> Result<ProblemSpec> {
    let (x, b) = gaussian_blobs(cfg)?;
    kernel_svm_primal(&rbf_kernel(&x)?, &b, lambda)
}
