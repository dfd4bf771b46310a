mod common;

use common::{gaussian_matrix, gaussian_vec, rng};
use rand::Rng;
use saddle_core::dataio::RatingTriple;
use saddle_core::linalg::dist;
use saddle_core::operator::adjoint_mismatch;
use saddle_core::problems::*;
use saddle_core::prox::Groups;
use saddle_core::solvers::{fista_solve, pdcp_solve, SolverConfig};
use saddle_core::{estimate_norm, DenseMatrix};

fn cfg(max_iters: usize) -> SolverConfig {
    SolverConfig { max_iters, ..SolverConfig::default() }
}

fn random_point(kind: ProblemKind, r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    match kind {
        ProblemKind::KernelSvm => (0..n).map(|_| r.random::<f64>()).collect(),
        _ => gaussian_vec(r, n, 1.0),
    }
}

#[test]
fn saddle_composite_and_direct_energies_agree() {
    let mut r = rng(55);
    for kind in ProblemKind::ALL {
        let spec = kind.build(&kind.default_data(1), kind.default_lambda()).unwrap();
        let comp = spec.composite.as_ref().unwrap();
        assert_eq!(spec.saddle.primal_dim(), spec.dim());
        for _ in 0..100 {
            let x = random_point(kind, &mut r, spec.dim());
            let es = spec.saddle.energy(&x).unwrap();
            let ec = comp.energy(&x).unwrap();
            let ed = spec.direct_energy(&x);
            let scale = es.abs().max(1.0);
            assert!((es - ec).abs() <= 1e-9 * scale, "{kind}: saddle {es} composite {ec}");
            assert!((es - ed).abs() <= 1e-9 * scale, "{kind}: saddle {es} direct {ed}");
        }
    }
}

#[test]
fn built_operators_pass_adjoint_identity() {
    let mut r = rng(56);
    for kind in ProblemKind::ALL {
        let spec = kind.build(&kind.default_data(2), kind.default_lambda()).unwrap();
        let op = spec.saddle.op.as_ref();
        for _ in 0..20 {
            let x = gaussian_vec(&mut r, op.in_dim(), 1.0);
            let y = gaussian_vec(&mut r, op.out_dim(), 1.0);
            assert!(adjoint_mismatch(op, &x, &y).unwrap() <= 1e-10 * (1.0 + spec.saddle.op_norm * 10.0), "{kind}");
        }
    }
}

#[test]
fn generators_are_deterministic() {
    let mut r = rng(57);
    for kind in ProblemKind::ALL {
        let a = kind.build(&kind.default_data(9), kind.default_lambda()).unwrap();
        let b = kind.build(&kind.default_data(9), kind.default_lambda()).unwrap();
        let c = kind.build(&kind.default_data(10), kind.default_lambda()).unwrap();
        let x = random_point(kind, &mut r, a.dim());
        assert_eq!(a.direct_energy(&x), b.direct_energy(&x));
        assert_ne!(a.direct_energy(&x), c.direct_energy(&x), "{kind}");
    }
}

#[test]
fn problem_names_round_trip() {
    for kind in ProblemKind::ALL {
        assert_eq!(kind.name().parse::<ProblemKind>().unwrap(), kind);
    }
    assert!("svm".parse::<ProblemKind>().is_err());
}

#[test]
fn dim_reduction_examples() {
    let a = DenseMatrix::identity(4);
    let spec = dim_reduction(a, DenseMatrix::zeros(4, 2), 100.0).unwrap();
    let res = pdcp_solve(&spec.saddle, &cfg(100)).unwrap();
    assert!(res.solution.iter().all(|&v| v == 0.0));
    assert_eq!(res.trace.final_energy().unwrap(), 0.0);

    let mut r = rng(1);
    let mut a = gaussian_matrix(&mut r, 3, 3);
    for i in 0..3 {
        a.set(i, i, a.get(i, i) + 3.0);
    }
    let x_true = gaussian_matrix(&mut r, 3, 2);
    let b = a.matmul(&x_true).unwrap();
    let spec = dim_reduction(a, b, 0.0).unwrap();
    let res = fista_solve(spec.composite.as_ref().unwrap(), &cfg(5000)).unwrap();
    assert!(dist(&res.solution, x_true.as_slice()) < 1e-8);
    assert!(dim_reduction(DenseMatrix::zeros(0, 0), DenseMatrix::zeros(0, 1), 1.0).is_err());
}

#[test]
fn linear_svm_examples() {
    let x = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    let spec = linear_svm(x, vec![1.0, -1.0], 1e-3).unwrap();
    let res = pdcp_solve(&spec.saddle, &cfg(20_000)).unwrap();
    let w = &res.solution;
    let hinge = (1.0 - w[0]).max(0.0) + (1.0 - w[0]).max(0.0);
    assert!(hinge < 1e-6, "{w:?}");

    let spec = ProblemKind::LinearSvm.build(&ProblemKind::LinearSvm.default_data(0), 10.0).unwrap();
    assert_eq!(spec.direct_energy(&vec![0.0; spec.dim()]), 100.0);
    assert_eq!(spec.saddle.energy(&vec![0.0; spec.dim()]).unwrap(), 100.0);
    assert!(linear_svm(DenseMatrix::identity(2), vec![1.0, 0.0], 1.0).is_err());
}

#[test]
fn kernel_svm_dual_examples() {
    // H = 2λI makes Ĥ = I; the box optimum is x = 1 with E = −N/2
    let lambda = 0.7;
    let mut h = DenseMatrix::identity(5);
    for i in 0..5 {
        h.set(i, i, 2.0 * lambda);
    }
    let labels = vec![1.0, -1.0, 1.0, 1.0, -1.0];
    let spec = kernel_svm_dual(&h, &labels, lambda).unwrap();
    let res = pdcp_solve(&spec.saddle, &cfg(5000)).unwrap();
    assert!(res.solution.iter().all(|v| (v - 1.0).abs() < 1e-8), "{:?}", res.solution);
    assert!((res.trace.final_energy().unwrap() + 2.5).abs() < 1e-8);
    assert_eq!(spec.direct_energy(&[0.0; 5]), 0.0);
    assert_eq!(spec.saddle.energy(&[0.0; 5]).unwrap(), 0.0);
    assert_eq!(spec.direct_energy(&[1.5, 0.0, 0.0, 0.0, 0.0]), f64::INFINITY);

    let indefinite = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    assert!(kernel_svm_dual(&indefinite, &[1.0, -1.0], 1.0).is_err());
}

#[test]
fn kernel_svm_primal_examples() {
    let mut r = rng(8);
    let labels: Vec<f64> = (0..6).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
    let primal = kernel_svm_primal(&DenseMatrix::identity(6), &labels, 0.4).unwrap();
    let linear = linear_svm(DenseMatrix::identity(6), labels.clone(), 0.4).unwrap();
    for _ in 0..20 {
        let x = gaussian_vec(&mut r, 6, 1.0);
        assert!((primal.direct_energy(&x) - linear.direct_energy(&x)).abs() < 1e-12);
        assert!((primal.saddle.energy(&x).unwrap() - linear.saddle.energy(&x).unwrap()).abs() < 1e-12);
    }
    assert_eq!(primal.direct_energy(&[0.0; 6]), 6.0);
}

#[test]
fn kernel_svm_strong_duality() {
    let data = SyntheticDataConfig { n_samples: 30, ..ProblemKind::KernelSvm.default_data(4) };
    let lambda = 1.0;
    let (x, b) = gaussian_blobs(&data).unwrap();
    let h = rbf_kernel(&x).unwrap();
    let dual = kernel_svm_dual(&h, &b, lambda).unwrap();
    let primal = kernel_svm_primal(&h, &b, lambda).unwrap();
    let d = pdcp_solve(&dual.saddle, &cfg(40_000)).unwrap().trace.best_energy().unwrap();
    let p = pdcp_solve(&primal.saddle, &cfg(40_000)).unwrap().trace.best_energy().unwrap();
    assert!((p + d).abs() <= 1e-3 * p.abs(), "primal {p} dual {d}");
}

#[test]
fn feature_selection_examples() {
    let groups = Groups::contiguous(4, 2).unwrap();
    let spec = feature_selection(DenseMatrix::identity(4), vec![0.0; 4], groups.clone(), 1.0).unwrap();
    let res = pdcp_solve(&spec.saddle, &cfg(100)).unwrap();
    assert!(res.solution.iter().all(|&v| v == 0.0));

    let b = vec![1.5, -0.3, 2.0, 0.7];
    let spec = feature_selection(DenseMatrix::identity(4), b.clone(), groups, 0.0).unwrap();
    let res = pdcp_solve(&spec.saddle, &cfg(20_000)).unwrap();
    assert!(res.trace.best_energy().unwrap() < 1e-6);
    assert!(spec.direct_energy(&b) == 0.0);

    assert!(feature_selection(DenseMatrix::identity(4), vec![0.0; 4], Groups::contiguous(6, 2).unwrap(), 1.0).is_err());
}

#[test]
fn multitask_examples() {
    let mut r = rng(17);
    let designs: Vec<DenseMatrix> = (0..2).map(|_| gaussian_matrix(&mut r, 5, 3)).collect();
    let targets: Vec<Vec<f64>> = (0..2).map(|_| gaussian_vec(&mut r, 5, 0.01)).collect();
    let spec = multitask(designs, targets, 0.1, 1.0).unwrap();
    assert_eq!(spec.direct_energy(&[0.0; 6]), 0.0);
    let res = pdcp_solve(&spec.saddle, &cfg(500)).unwrap();
    assert_eq!(res.trace.best_energy().unwrap(), 0.0);

    // one task, eps = 0: absolute-loss regression with an ℓ1 penalty
    let a = gaussian_matrix(&mut r, 6, 4);
    let b = gaussian_vec(&mut r, 6, 1.0);
    let spec = multitask(vec![a.clone()], vec![b.clone()], 0.0, 0.3).unwrap();
    for _ in 0..20 {
        let x = gaussian_vec(&mut r, 4, 1.0);
        let ax = a.matvec(&x).unwrap();
        let expect: f64 = ax.iter().zip(&b).map(|(p, t)| (p - t).abs()).sum::<f64>()
            + 0.3 * x.iter().map(|v| v.abs()).sum::<f64>();
        assert!((spec.saddle.energy(&x).unwrap() - expect).abs() < 1e-12);
    }

    let bad = multitask(vec![gaussian_matrix(&mut r, 5, 3), gaussian_matrix(&mut r, 5, 4)], vec![vec![0.0; 5]; 2], 0.1, 1.0);
    assert!(bad.is_err());
}

#[test]
fn matrix_factorization_examples() {
    let spec = matrix_factorization(vec![(0, 0, 1.0)], 1, 1, 1e-6).unwrap();
    let res = pdcp_solve(&spec.saddle, &cfg(2000)).unwrap();
    assert!(res.solution[0] >= 1.0 - 1e-3, "{:?}", res.solution);
    assert!(res.trace.best_energy().unwrap() <= 1e-3);

    let spec = ProblemKind::MatrixFactorization
        .build(&ProblemKind::MatrixFactorization.default_data(0), 1e-5)
        .unwrap();
    let observed = (20.0f64 * 30.0 * 0.4).round();
    assert_eq!(spec.direct_energy(&vec![0.0; spec.dim()]), observed);
    let n = estimate_norm(spec.saddle.op.as_ref(), 100, 0).unwrap();
    assert!((n - 1.0).abs() < 1e-12);

    assert!(matrix_factorization(vec![(2, 0, 1.0)], 2, 2, 1.0).is_err());
    assert!(matrix_factorization(vec![(0, 0, 1.0), (0, 0, -1.0)], 2, 2, 1.0).is_err());
    assert!(matrix_factorization(vec![], 2, 2, 1.0).is_err());
}

#[test]
fn ratings_threshold_at_four() {
    let t = |user, item, rating| RatingTriple { user, item, rating, timestamp: 0 };
    let triples = vec![t(1, 10, 5), t(1, 11, 3), t(2, 10, 4), t(3, 12, 1)];
    let (obs, rows, cols) = ratings_to_observations(&triples, 10, 10).unwrap();
    assert_eq!((rows, cols), (3, 3));
    assert_eq!(obs, vec![(0, 0, 1.0), (0, 1, -1.0), (1, 0, 1.0), (2, 2, -1.0)]);
    assert!(matrix_factorization(obs, rows, cols, 1e-5).is_ok());
}
