use super::{check_step, soft_threshold, Groups, ProxFn, FEASIBILITY_TOL};
use crate::error::{check_len, invalid, Result};
use crate::linalg::{dot, jacobi_svd, sym_eigen, DenseMatrix, SymEigen};

/// Component-wise soft threshold `sign(vᵢ)·max(|vᵢ| − t, 0)`.
pub fn prox_l1(v: &[f64], t: f64) -> Result<Vec<f64>> {
    check_step(t)?;
    Ok(v.iter().map(|&x| soft_threshold(x, t)).collect())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct L1Norm;

impl ProxFn for L1Norm {
    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.abs()).sum()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_l1(v, t)
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| sign0(*v)).collect())
    }
}

/// Indicator of `{‖x‖_∞ ≤ radius}`, the conjugate of `radius·‖·‖₁`.
#[derive(Debug, Clone, Copy)]
pub struct LinfBall {
    radius: f64,
}

impl LinfBall {
    pub fn new(radius: f64) -> Result<Self> {
        if radius > 0.0 {
            Ok(Self { radius })
        } else {
            Err(invalid("ball radius must be positive"))
        }
    }
}

impl ProxFn for LinfBall {
    fn eval(&self, x: &[f64]) -> f64 {
        let lim = self.radius * (1.0 + FEASIBILITY_TOL);
        if x.iter().all(|v| v.abs() <= lim) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        Ok(v.iter().map(|x| x.clamp(-self.radius, self.radius)).collect())
    }
}

/// Block soft threshold `v_g·max(1 − t/‖v_g‖₂, 0)` on every group.
pub fn prox_group_l21(v: &[f64], t: f64, groups: &Groups) -> Result<Vec<f64>> {
    check_step(t)?;
    check_len(groups.len(), v.len())?;
    let mut out = v.to_vec();
    for g in groups.iter() {
        let gn = g.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
        let scale = if gn > t { 1.0 - t / gn } else { 0.0 };
        for &i in g {
            out[i] = v[i] * scale;
        }
    }
    Ok(out)
}

/// `Σ_g ‖x_g‖₂` (ℓ2,1 / group lasso).
#[derive(Debug, Clone)]
pub struct GroupL21 {
    groups: Groups,
}

impl GroupL21 {
    pub fn new(groups: Groups) -> Self {
        Self { groups }
    }
}

impl ProxFn for GroupL21 {
    fn eval(&self, x: &[f64]) -> f64 {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt())
            .sum()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        prox_group_l21(v, t, &self.groups)
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        for g in self.groups.iter() {
            let gn = g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
            if gn > 0.0 {
                for &i in g {
                    out[i] = x[i] / gn;
                }
            }
        }
        Some(out)
    }
}

/// Indicator of `{‖x_g‖₂ ≤ 1 for every g}`, the conjugate of [`GroupL21`].
#[derive(Debug, Clone)]
pub struct GroupL2Balls {
    groups: Groups,
}

impl GroupL2Balls {
    pub fn new(groups: Groups) -> Self {
        Self { groups }
    }
}

impl ProxFn for GroupL2Balls {
    fn eval(&self, x: &[f64]) -> f64 {
        let ok = self
            .groups
            .iter()
            .all(|g| g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt() <= 1.0 + FEASIBILITY_TOL);
        if ok {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.groups.len(), v.len())?;
        let mut out = v.to_vec();
        for g in self.groups.iter() {
            let gn = g.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
            if gn > 1.0 {
                for &i in g {
                    out[i] = v[i] / gn;
                }
            }
        }
        Ok(out)
    }
}

/// Euclidean projection onto `{z : ‖z‖₁ ≤ radius}` by sorting magnitudes.
pub fn project_l1_ball(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!("l1 ball radius must be positive, got {radius}")));
    }
    Ok(project_l1_ball_unchecked(v, radius))
}

fn project_l1_ball_unchecked(v: &[f64], radius: f64) -> Vec<f64> {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - radius) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}

/// Prox of `t·Σ_rows max_j |v_ij|`: each row minus its projection onto the ℓ1 ball of radius `t`.
pub fn prox_l1inf(v: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    check_step(t)?;
    let data = l1inf_prox_rows(v.as_slice(), v.rows(), v.cols(), t);
    DenseMatrix::new(v.rows(), v.cols(), data)
}

fn l1inf_prox_rows(v: &[f64], rows: usize, cols: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let row = &v[r * cols..(r + 1) * cols];
        let proj = project_l1_ball_unchecked(row, t);
        out.extend(row.iter().zip(&proj).map(|(a, b)| a - b));
    }
    out
}

/// `‖X‖_{1,∞} = Σ_rows max_j |X_ij|` for a row-major `rows × cols` variable.
#[derive(Debug, Clone, Copy)]
pub struct L1InfNorm {
    rows: usize,
    cols: usize,
}

impl L1InfNorm {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }
}

impl ProxFn for L1InfNorm {
    fn eval(&self, x: &[f64]) -> f64 {
        x.chunks(self.cols)
            .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .sum()
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.rows * self.cols, v.len())?;
        Ok(l1inf_prox_rows(v, self.rows, self.cols, t))
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        for (r, row) in x.chunks(self.cols).enumerate() {
            let (j, m) = row
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bj, bm), (j, v)| if v.abs() > bm { (j, v.abs()) } else { (bj, bm) });
            if m > 0.0 {
                out[r * self.cols + j] = sign0(row[j]);
            }
        }
        Some(out)
    }
}

/// Indicator of `{‖row‖₁ ≤ 1 for every row}`, the conjugate of [`L1InfNorm`].
#[derive(Debug, Clone, Copy)]
pub struct RowL1Balls {
    rows: usize,
    cols: usize,
}

impl RowL1Balls {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }
}

impl ProxFn for RowL1Balls {
    fn eval(&self, x: &[f64]) -> f64 {
        let ok = x
            .chunks(self.cols)
            .all(|row| row.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + FEASIBILITY_TOL);
        if ok {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.rows * self.cols, v.len())?;
        Ok(v.chunks(self.cols)
            .flat_map(|row| project_l1_ball_unchecked(row, 1.0))
            .collect())
    }
}

/// Singular value soft-thresholding `U·max(Σ − t, 0)·Vᵀ`.
pub fn prox_trace_norm(v: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    check_step(t)?;
    let svd = jacobi_svd(v)?;
    let s: Vec<f64> = svd.s.iter().map(|&s| (s - t).max(0.0)).collect();
    Ok(svd.reconstruct_with(&s))
}

/// Nuclear norm of a row-major `rows × cols` variable.
#[derive(Debug, Clone, Copy)]
pub struct TraceNorm {
    rows: usize,
    cols: usize,
}

impl TraceNorm {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    fn matrix(&self, x: &[f64]) -> Result<DenseMatrix> {
        DenseMatrix::new(self.rows, self.cols, x.to_vec())
    }
}

impl ProxFn for TraceNorm {
    fn eval(&self, x: &[f64]) -> f64 {
        match self.matrix(x).and_then(|m| jacobi_svd(&m)) {
            Ok(svd) => svd.s.iter().sum(),
            Err(_) => f64::NAN,
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        Ok(prox_trace_norm(&self.matrix(v)?, t)?.into_vec())
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let svd = jacobi_svd(&self.matrix(x).ok()?).ok()?;
        let s: Vec<f64> = svd.s.iter().map(|&s| if s > 0.0 { 1.0 } else { 0.0 }).collect();
        Some(svd.reconstruct_with(&s).into_vec())
    }
}

/// Indicator of the unit spectral-norm ball, the conjugate of [`TraceNorm`].
#[derive(Debug, Clone, Copy)]
pub struct SpectralBall {
    rows: usize,
    cols: usize,
}

impl SpectralBall {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }
}

impl ProxFn for SpectralBall {
    fn eval(&self, x: &[f64]) -> f64 {
        let Ok(m) = DenseMatrix::new(self.rows, self.cols, x.to_vec()) else {
            return f64::NAN;
        };
        match jacobi_svd(&m) {
            Ok(svd) if svd.s.first().copied().unwrap_or(0.0) <= 1.0 + FEASIBILITY_TOL => 0.0,
            Ok(_) => f64::INFINITY,
            Err(_) => f64::NAN,
        }
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        let svd = jacobi_svd(&DenseMatrix::new(self.rows, self.cols, v.to_vec())?)?;
        let s: Vec<f64> = svd.s.iter().map(|&s| s.min(1.0)).collect();
        Ok(svd.reconstruct_with(&s).into_vec())
    }
}

/// Solves `(I + 2tQ) x = v` by Cholesky factorization.
pub fn prox_quadratic(v: &[f64], t: f64, q: &DenseMatrix) -> Result<Vec<f64>> {
    check_step(t)?;
    if !q.is_square() {
        return Err(invalid("quadratic form needs a square matrix"));
    }
    check_len(q.rows(), v.len())?;
    let n = q.rows();
    let mut m = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, m.get(i, j) + 2.0 * t * q.get(i, j));
        }
    }
    m.cholesky()?.solve(v)
}

/// `xᵀQx` for a symmetric positive-semidefinite `Q`.
///
/// The eigendecomposition of `Q` is computed once, so each prox costs two
/// matrix-vector products regardless of the step.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    q: DenseMatrix,
    eig: SymEigen,
}

/// Eigenvalues below `−PSD_JITTER·max(1, λ_max)` reject a matrix as indefinite.
pub const PSD_JITTER: f64 = 1e-8;

impl QuadraticForm {
    pub fn new(q: DenseMatrix) -> Result<Self> {
        let mut eig = sym_eigen(&q)?;
        let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
        if let Some(&min) = eig.values.last() {
            if min < -PSD_JITTER * top {
                return Err(invalid(format!("matrix is not positive semidefinite (eigenvalue {min:e})")));
            }
        }
        eig.values.iter_mut().for_each(|l| *l = l.max(0.0));
        Ok(Self { q, eig })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.q
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig.values.first().copied().unwrap_or(0.0)
    }
}

impl ProxFn for QuadraticForm {
    fn eval(&self, x: &[f64]) -> f64 {
        let mut qx = vec![0.0; x.len()];
        self.q.matvec_into(x, &mut qx);
        dot(x, &qx)
    }

    fn prox(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        check_step(t)?;
        check_len(self.q.rows(), v.len())?;
        let basis = &self.eig.vectors;
        let mut coef = vec![0.0; v.len()];
        basis.matvec_t_into(v, &mut coef);
        for (c, l) in coef.iter_mut().zip(&self.eig.values) {
            *c /= 1.0 + 2.0 * t * l;
        }
        let mut out = vec![0.0; v.len()];
        basis.matvec_into(&coef, &mut out);
        Ok(out)
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut g = vec![0.0; x.len()];
        self.q.matvec_into(x, &mut g);
        g.iter_mut().for_each(|v| *v *= 2.0);
        Some(g)
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(2.0 * self.max_eigenvalue())
    }
}

#[inline]
pub(crate) fn sign0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
