use super::{dot, DenseMatrix, JACOBI_MAX_SWEEPS, JACOBI_TOL};
use crate::error::{Error, Result};

/// Thin SVD `A = U diag(s) Vᵀ` with `s` sorted in decreasing order.
///
/// `U` is `m × k` and `V` is `n × k` with `k = min(m, n)`. Columns of `U`
/// belonging to a zero singular value are left at zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
    pub sweeps: usize,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn jacobi_svd(a: &DenseMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        let t = jacobi_svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
            sweeps: t.sweeps,
        });
    }
    // Columns of A stored as rows of `w` (n vectors of length m); `vt` holds Vᵀ.
    let mut w = a.transpose().into_vec();
    let mut vt = DenseMatrix::identity(n).into_vec();
    let mut sweeps = 0;
    let mut off = 0.0;
    let mut converged = n < 2;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                method: "jacobi svd",
                iterations: sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        off = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (wp, wq) = pair_rows(&mut w, m, p, q);
                let alpha = dot(wp, wp);
                let beta = dot(wq, wq);
                let gamma = dot(wp, wq);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let rel = gamma.abs() / (alpha * beta).sqrt();
                off = off.max(rel);
                if rel <= JACOBI_TOL {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(wp, wq, c, s);
                let (vp, vq) = pair_rows(&mut vt, n, p, q);
                rotate(vp, vq, c, s);
            }
        }
        converged = off <= JACOBI_TOL;
    }

    let mut order: Vec<(usize, f64)> = (0..n)
        .map(|j| (j, dot(&w[j * m..(j + 1) * m], &w[j * m..(j + 1) * m]).sqrt()))
        .collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..m {
            if sigma > 0.0 {
                u.set(i, k, w[j * m + i] / sigma);
            }
        }
        for i in 0..n {
            v.set(i, k, vt[j * n + i]);
        }
    }
    Ok(Svd { u, s, v, sweeps })
}

fn pair_rows(buf: &mut [f64], len: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = buf.split_at_mut(q * len);
    (&mut head[p * len..(p + 1) * len], &mut tail[..len])
}

#[inline]
fn rotate(xp: &mut [f64], xq: &mut [f64], c: f64, s: f64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

impl Svd {
    /// `U diag(s') Vᵀ` for replacement singular values `s'`.
    pub fn reconstruct_with(&self, s: &[f64]) -> DenseMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &sk) in s.iter().enumerate() {
            if sk == 0.0 {
                continue;
            }
            for i in 0..m {
                let uik = self.u.get(i, k) * sk;
                if uik == 0.0 {
                    continue;
                }
                let row = out.row_mut(i);
                for (j, r) in row.iter_mut().enumerate() {
                    *r += uik * self.v.get(j, k);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let a = DenseMatrix::from_diag(&[1.0, 3.0]);
        let svd = jacobi_svd(&a).unwrap();
        assert_eq!(svd.s, vec![3.0, 1.0]);
    }

    #[test]
    fn reconstructs_wide_and_tall() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 0.5, -1.0],
            vec![0.0, 1.0, 3.0, 2.0],
            vec![4.0, -2.0, 1.0, 0.0],
        ])
        .unwrap();
        for m in [a.clone(), a.transpose()] {
            let svd = jacobi_svd(&m).unwrap();
            let back = svd.reconstruct_with(&svd.s);
            for (x, y) in back.as_slice().iter().zip(m.as_slice()) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
            assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let svd = jacobi_svd(&a).unwrap();
        assert!((svd.s[0] - 5.0).abs() < 1e-12);
        assert!(svd.s[1].abs() < 1e-12);
    }
}
