//! Linear maps `K : X → Y` with their adjoints, and power-iteration norm estimates.

use std::fmt::Debug;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_len, invalid, Result};
use crate::linalg::{dot, norm, DenseMatrix};

pub const DEFAULT_POWER_ITERS: usize = 100;
pub const DEFAULT_POWER_SEED: u64 = 0;
/// Multiplied onto norm estimates before they enter step-size bounds.
pub const NORM_SAFETY: f64 = 1.02;

/// A linear map with its adjoint. Implementations are immutable after construction.
pub trait LinearOperator: Debug + Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;

    /// `out = K x`. Lengths are the caller's responsibility.
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    /// `out = K* y`.
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]);

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.in_dim(), x.len())?;
        let mut out = vec![0.0; self.out_dim()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.out_dim(), y.len())?;
        let mut out = vec![0.0; self.in_dim()];
        self.adjoint_into(y, &mut out);
        Ok(out)
    }
}

/// Power iteration on `K*K` from a seeded Gaussian start; returns `√λ_max` estimate.
///
/// The returned value is the running maximum of the per-iteration Rayleigh
/// estimates, so it is non-decreasing in `iters` for a fixed seed.
pub fn estimate_norm(op: &dyn LinearOperator, iters: usize, seed: u64) -> Result<f64> {
    if iters == 0 {
        return Err(invalid("power iteration needs at least one iteration"));
    }
    let n = op.in_dim();
    if n == 0 || op.out_dim() == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let v0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= v0);

    let mut kv = vec![0.0; op.out_dim()];
    let mut w = vec![0.0; n];
    let mut best = 0.0f64;
    for _ in 0..iters {
        op.apply_into(&v, &mut kv);
        op.adjoint_into(&kv, &mut w);
        let lambda = norm(&w);
        if lambda == 0.0 {
            break;
        }
        best = best.max(lambda);
        w.iter().zip(v.iter_mut()).for_each(|(wi, vi)| *vi = wi / lambda);
    }
    Ok(best.sqrt())
}

impl LinearOperator for DenseMatrix {
    fn in_dim(&self) -> usize {
        self.cols()
    }

    fn out_dim(&self) -> usize {
        self.rows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.matvec_into(x, out);
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.matvec_t_into(y, out);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn in_dim(&self) -> usize {
        self.0
    }

    fn out_dim(&self) -> usize {
        self.0
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroOperator {
    pub in_dim: usize,
    pub out_dim: usize,
}

impl LinearOperator for ZeroOperator {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn apply_into(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn adjoint_into(&self, _y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
}

/// `X ↦ A X` for a `d × k` matrix variable stored row-major; output is `m × k` row-major.
#[derive(Debug, Clone)]
pub struct LeftMultiply {
    a: DenseMatrix,
    k: usize,
}

impl LeftMultiply {
    pub fn new(a: DenseMatrix, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("matrix variable needs at least one column"));
        }
        Ok(Self { a, k })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }
}

impl LinearOperator for LeftMultiply {
    fn in_dim(&self) -> usize {
        self.a.cols() * self.k
    }

    fn out_dim(&self) -> usize {
        self.a.rows() * self.k
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let k = self.k;
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.a.rows() {
            let orow = &mut out[i * k..(i + 1) * k];
            for (j, &aij) in self.a.row(i).iter().enumerate() {
                if aij == 0.0 {
                    continue;
                }
                for (o, xv) in orow.iter_mut().zip(&x[j * k..(j + 1) * k]) {
                    *o += aij * xv;
                }
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let k = self.k;
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..self.a.rows() {
            let yrow = &y[i * k..(i + 1) * k];
            for (j, &aij) in self.a.row(i).iter().enumerate() {
                if aij == 0.0 {
                    continue;
                }
                for (o, yv) in out[j * k..(j + 1) * k].iter_mut().zip(yrow) {
                    *o += aij * yv;
                }
            }
        }
    }
}

/// Block-diagonal map on a `d × T` matrix variable (row-major): column `t` is sent
/// through `blocks[t]`, and the outputs are concatenated task by task.
#[derive(Debug, Clone)]
pub struct ColumnBlocks {
    blocks: Vec<DenseMatrix>,
    d: usize,
    offsets: Vec<usize>,
}

impl ColumnBlocks {
    pub fn new(blocks: Vec<DenseMatrix>) -> Result<Self> {
        let d = blocks
            .first()
            .ok_or_else(|| invalid("need at least one block"))?
            .cols();
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        for b in &blocks {
            check_len(d, b.cols())?;
            offsets.push(offsets.last().unwrap() + b.rows());
        }
        Ok(Self { blocks, d, offsets })
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }
}

impl LinearOperator for ColumnBlocks {
    fn in_dim(&self) -> usize {
        self.d * self.blocks.len()
    }

    fn out_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let t_count = self.blocks.len();
        for (t, b) in self.blocks.iter().enumerate() {
            for i in 0..b.rows() {
                let row = b.row(i);
                let mut s = 0.0;
                for (j, &bij) in row.iter().enumerate() {
                    s += bij * x[j * t_count + t];
                }
                out[self.offsets[t] + i] = s;
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let t_count = self.blocks.len();
        out.iter_mut().for_each(|o| *o = 0.0);
        for (t, b) in self.blocks.iter().enumerate() {
            for i in 0..b.rows() {
                let yi = y[self.offsets[t] + i];
                if yi == 0.0 {
                    continue;
                }
                for (j, &bij) in b.row(i).iter().enumerate() {
                    out[j * t_count + t] += bij * yi;
                }
            }
        }
    }
}

/// Weighted entry selection `X ↦ (w_k X[i_k, j_k])_k` on a `rows × cols` matrix variable.
#[derive(Debug, Clone)]
pub struct EntrySelection {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl EntrySelection {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, w) in &entries {
            if i >= rows || j >= cols {
                return Err(invalid(format!(
                    "entry ({i}, {j}) outside {rows}x{cols} matrix"
                )));
            }
            if !w.is_finite() {
                return Err(invalid("entry weight is not finite"));
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }
}

impl LinearOperator for EntrySelection {
    fn in_dim(&self) -> usize {
        self.rows * self.cols
    }

    fn out_dim(&self) -> usize {
        self.entries.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, &(i, j, w)) in out.iter_mut().zip(&self.entries) {
            *o = w * x[i * self.cols + j];
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&yk, &(i, j, w)) in y.iter().zip(&self.entries) {
            out[i * self.cols + j] += w * yk;
        }
    }
}

/// Relative mismatch `|⟨Kx, y⟩ − ⟨x, K*y⟩| / max(‖Kx‖‖y‖, ‖x‖‖K*y‖, tiny)`.
pub fn adjoint_mismatch(op: &dyn LinearOperator, x: &[f64], y: &[f64]) -> Result<f64> {
    let kx = op.apply(x)?;
    let kty = op.adjoint_apply(y)?;
    let lhs = dot(&kx, y);
    let rhs = dot(x, &kty);
    let scale = (norm(&kx) * norm(y))
        .max(norm(x) * norm(&kty))
        .max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).abs() / scale)
}
