//! Fobos, FISTA, the Chambolle-Pock primal-dual method (PD CP) and its online
//! step-size variant. All solvers start from the zero vector and emit a [`Trace`].

mod fista;
mod fobos;
mod gap;
mod pdcp;
mod smoothing;

use std::time::Instant;

pub use fista::{fista_momentum, fista_solve};
pub use fobos::{fobos_solve, fobos_solve_from, fobos_step};
pub use gap::{optimal_ratio_hint, partial_gap, GapOracle};
pub use pdcp::{curvature_estimate, pdcp_online_solve, pdcp_solve, pdcp_solve_with, smooth_norm_estimate, OnlineDiagnostics};
pub use smoothing::{smooth_loss, MoreauEnvelope};

use crate::error::{Error, Result};

/// Energies above this abort a run as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
pub const DEFAULT_KAPPA: f64 = 0.618;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Over-relaxation of the primal extrapolation, in `[0, 1]`.
    pub theta: f64,
    /// `a = √(τ/σ)`
    pub a_ratio: f64,
    /// Fobos step constant: `ηₙ = C/√n`.
    pub fobos_c: f64,
    /// Moreau-envelope width used by FISTA on non-smooth losses.
    pub smooth_eps: Option<f64>,
    pub kappa: f64,
    /// Initial norm estimate for the online variant; `None` means `0.1·‖K‖`.
    pub online_l0: Option<f64>,
    pub record_every: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            theta: 1.0,
            a_ratio: 1.0,
            fobos_c: 1.0,
            smooth_eps: None,
            kappa: DEFAULT_KAPPA,
            online_l0: None,
            record_every: 1,
            seed: 0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        positive("a_ratio", self.a_ratio)?;
        positive("fobos_c", self.fobos_c)?;
        positive("kappa", self.kappa)?;
        if let Some(eps) = self.smooth_eps {
            positive("smooth_eps", eps)?;
        }
        if let Some(l0) = self.online_l0 {
            positive("online_l0", l0)?;
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub energy: f64,
    /// Lowest energy seen at any iteration up to and including this one.
    pub best_energy: f64,
    pub elapsed_seconds: f64,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_energy(&self) -> Option<f64> {
        self.last().map(|r| r.energy)
    }

    pub fn best_energy(&self) -> Option<f64> {
        self.last().map(|r| r.best_energy)
    }

    /// First recorded iteration whose energy is at most `target`.
    pub fn first_reaching(&self, target: f64) -> Option<usize> {
        self.records.iter().find(|r| r.energy <= target).map(|r| r.iter)
    }

    pub fn energies(&self) -> Vec<(usize, f64)> {
        self.records.iter().map(|r| (r.iter, r.energy)).collect()
    }

    pub fn best_energies(&self) -> Vec<(usize, f64)> {
        self.records.iter().map(|r| (r.iter, r.best_energy)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub solution: Vec<f64>,
    /// Final dual iterate (primal-dual solvers only).
    pub dual: Option<Vec<f64>>,
    pub trace: Trace,
    pub online: Option<OnlineDiagnostics>,
}

/// Energy bookkeeping shared by all solvers: best-so-far tracking, divergence
/// guard and sparse recording.
pub(crate) struct Recorder {
    start: Instant,
    every: usize,
    max_iters: usize,
    best: f64,
    trace: Trace,
}

impl Recorder {
    pub(crate) fn new(config: &SolverConfig) -> Self {
        Self {
            start: Instant::now(),
            every: config.record_every,
            max_iters: config.max_iters,
            best: f64::INFINITY,
            trace: Trace::default(),
        }
    }

    pub(crate) fn wants(&self, iter: usize) -> bool {
        iter % self.every == 0 || iter == self.max_iters
    }

    pub(crate) fn record(&mut self, iter: usize, energy: f64, gap: Option<f64>) -> Result<()> {
        if !energy.is_finite() || energy > DIVERGENCE_LIMIT {
            return Err(Error::Diverged { iter, energy });
        }
        self.best = self.best.min(energy);
        self.trace.records.push(TraceRecord {
            iter,
            energy,
            best_energy: self.best,
            elapsed_seconds: self.start.elapsed().as_secs_f64(),
            gap,
        });
        Ok(())
    }

    pub(crate) fn finish(self) -> Trace {
        self.trace
    }
}
