#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use saddle_core::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::new(rows, cols, gaussian_vec(rng, rows * cols, 1.0)).unwrap()
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Classical two-sided Jacobi rotations on a dense symmetric array.
/// Returns eigenvalues (descending) and eigenvectors as columns of `v[i][k]`.
pub fn symmetric_eigen_oracle(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Singular values (descending) and right singular vectors via the eigenproblem of `AᵀA`.
pub fn singular_oracle(a: &DenseMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.cols();
    let mut ata = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            ata[i][j] = (0..a.rows()).map(|r| a.get(r, i) * a.get(r, j)).sum();
        }
    }
    let (vals, vecs) = symmetric_eigen_oracle(&ata);
    (vals.into_iter().map(|v| v.max(0.0).sqrt()).collect(), vecs)
}

/// Cyclic coordinate descent on `½‖Ax − b‖² + λ‖x‖₁` until no coordinate moves.
pub fn lasso_coordinate_descent(a: &DenseMatrix, b: &[f64], lambda: f64) -> Vec<f64> {
    let (m, n) = (a.rows(), a.cols());
    let mut x = vec![0.0; n];
    let col_sq: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a.get(i, j).powi(2)).sum()).collect();
    for _ in 0..1_000_000 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let mut rho = 0.0;
            for i in 0..m {
                let pred: f64 = (0..n).filter(|&k| k != j).map(|k| a.get(i, k) * x[k]).sum();
                rho += a.get(i, j) * (b[i] - pred);
            }
            let new = if rho > lambda {
                (rho - lambda) / col_sq[j]
            } else if rho < -lambda {
                (rho + lambda) / col_sq[j]
            } else {
                0.0
            };
            moved = moved.max((new - x[j]).abs());
            x[j] = new;
        }
        if moved == 0.0 {
            break;
        }
    }
    x
}

pub fn lasso_energy(a: &DenseMatrix, b: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let r: f64 = (0..a.rows())
        .map(|i| {
            let p: f64 = (0..a.cols()).map(|j| a.get(i, j) * x[j]).sum();
            (p - b[i]).powi(2)
        })
        .sum();
    0.5 * r + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Minimizes a 2-variable function: grid scan over `[lo, hi]²`, then pattern search
/// with a halving step down to 1e-12.
pub fn argmin_2d(f: impl Fn(&[f64]) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let steps = 400;
    let h = (hi - lo) / steps as f64;
    let mut best = vec![lo, lo];
    let mut best_val = f(&best);
    for i in 0..=steps {
        for j in 0..=steps {
            let p = [lo + i as f64 * h, lo + j as f64 * h];
            let v = f(&p);
            if v < best_val {
                best_val = v;
                best = p.to_vec();
            }
        }
    }
    let mut step = h;
    while step > 1e-12 {
        let mut improved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
            let p = [best[0] + dx * step, best[1] + dy * step];
            let v = f(&p);
            if v < best_val {
                best_val = v;
                best = p.to_vec();
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best
}
