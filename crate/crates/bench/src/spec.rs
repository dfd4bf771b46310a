//! Run descriptions and the `key = value` grid file format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use saddle_core::problems::{ProblemKind, DEFAULT_EPS_INSENSITIVE};
use saddle_core::solvers::{SolverConfig, DEFAULT_KAPPA};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Pdcp,
    PdcpOnline,
    Fobos,
    Fista,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Pdcp, SolverKind::PdcpOnline, SolverKind::Fobos, SolverKind::Fista];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Pdcp => "pdcp",
            SolverKind::PdcpOnline => "pdcp-online",
            SolverKind::Fobos => "fobos",
            SolverKind::Fista => "fista",
        }
    }

    /// Whether the solver takes part in the comparison for `problem`.
    ///
    /// Fobos is compared only where both terms are non-smooth and on the kernel-SVM
    /// dual; with a Lipschitz loss gradient it degenerates to a proximal-gradient method.
    pub fn compared_on(self, problem: ProblemKind) -> bool {
        match self {
            SolverKind::Pdcp | SolverKind::PdcpOnline | SolverKind::Fista => true,
            SolverKind::Fobos => matches!(
                problem,
                ProblemKind::KernelSvm
                    | ProblemKind::FeatureSelection
                    | ProblemKind::MultiTask
                    | ProblemKind::MatrixFactorization
            ),
        }
    }

    /// Parameter tuned by the sweep mode, if any.
    pub fn sweep_param(self) -> SweepParam {
        match self {
            SolverKind::Pdcp | SolverKind::PdcpOnline => SweepParam::A,
            SolverKind::Fobos => SweepParam::FobosC,
            SolverKind::Fista => SweepParam::SmoothEps,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            BenchError::InvalidRun(format!("unknown solver '{s}' (expected pdcp, pdcp-online, fobos or fista)"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    A,
    FobosC,
    SmoothEps,
}

impl SweepParam {
    pub const GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::A => "a",
            SweepParam::FobosC => "fobos_c",
            SweepParam::SmoothEps => "eps",
        }
    }

    pub fn apply(self, spec: &RunSpec, value: f64) -> RunSpec {
        let mut s = spec.clone();
        match self {
            SweepParam::A => s.a_ratio = value,
            SweepParam::FobosC => s.fobos_c = value,
            SweepParam::SmoothEps => s.smooth_eps = value,
        }
        s
    }
}

/// One solver run on one problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemKind,
    pub solver: SolverKind,
    pub lambda: f64,
    pub max_iters: usize,
    pub a_ratio: f64,
    pub fobos_c: f64,
    pub smooth_eps: f64,
    pub kappa: f64,
    pub theta: f64,
    pub seed: u64,
    pub data_path: Option<PathBuf>,
    pub record_every: usize,
    /// ε-insensitive width for multi-task learning.
    pub tube: f64,
    /// Run the parameter sweep for this solver and keep the best setting.
    pub sweep: bool,
}

impl RunSpec {
    pub fn new(problem: ProblemKind, solver: SolverKind) -> Self {
        Self {
            problem,
            solver,
            lambda: problem.default_lambda(),
            max_iters: 10_000,
            a_ratio: 1.0,
            fobos_c: 1.0,
            smooth_eps: 1e-2,
            kappa: DEFAULT_KAPPA,
            theta: 1.0,
            seed: 0,
            data_path: None,
            record_every: 1,
            tube: DEFAULT_EPS_INSENSITIVE,
            sweep: false,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            theta: self.theta,
            a_ratio: self.a_ratio,
            fobos_c: self.fobos_c,
            smooth_eps: Some(self.smooth_eps),
            kappa: self.kappa,
            online_l0: None,
            record_every: self.record_every,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(BenchError::InvalidRun(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if self.max_iters == 0 {
            return Err(BenchError::InvalidRun("max_iters must be at least 1".into()));
        }
        if !(self.tube >= 0.0 && self.tube.is_finite()) {
            return Err(BenchError::InvalidRun(format!("tube must be non-negative, got {}", self.tube)));
        }
        self.solver_config().validate()?;
        Ok(())
    }

    /// Stable identifier used for output file names.
    pub fn label(&self, index: usize) -> String {
        format!("{index:03}_{}_{}", self.problem, self.solver)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value.parse().map_err(|_| format!("bad value '{value}' for {key}"))
        }
        match key {
            "problem" => self.problem = value.parse().map_err(|e: saddle_core::Error| e.to_string())?,
            "solver" => self.solver = value.parse().map_err(|e: BenchError| e.to_string())?,
            "lambda" => self.lambda = num(key, value)?,
            "max_iters" | "max-iters" => self.max_iters = num(key, value)?,
            "a" => self.a_ratio = num(key, value)?,
            "fobos_c" | "fobos-c" => self.fobos_c = num(key, value)?,
            "eps" => self.smooth_eps = num(key, value)?,
            "kappa" => self.kappa = num(key, value)?,
            "theta" => self.theta = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "data" => self.data_path = Some(PathBuf::from(value)),
            "record_every" | "record-every" => self.record_every = num(key, value)?,
            "tube" => self.tube = num(key, value)?,
            "sweep" => self.sweep = num(key, value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

/// Parses a grid file: blocks of `key = value` lines separated by blank lines.
/// `#` starts a comment. Every block needs `problem` and `solver`; unset keys
/// take the defaults of [`RunSpec::new`] (lambda defaults per problem).
pub fn parse_grid(text: &str) -> Result<Vec<RunSpec>> {
    let mut specs = Vec::new();
    let mut block: Vec<(usize, String, String)> = Vec::new();
    let mut flush = |block: &mut Vec<(usize, String, String)>| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let first = block[0].0;
        let find = |k: &str| block.iter().find(|(_, key, _)| key == k).map(|(l, _, v)| (*l, v.clone()));
        let (pl, problem) = find("problem").ok_or(BenchError::Spec { line: first, msg: "block has no problem".into() })?;
        let (sl, solver) = find("solver").ok_or(BenchError::Spec { line: first, msg: "block has no solver".into() })?;
        let problem: ProblemKind = problem.parse().map_err(|e: saddle_core::Error| BenchError::Spec { line: pl, msg: e.to_string() })?;
        let solver: SolverKind = solver.parse().map_err(|e: BenchError| BenchError::Spec { line: sl, msg: e.to_string() })?;
        let mut spec = RunSpec::new(problem, solver);
        for (line, key, value) in block.iter() {
            spec.set(key, value).map_err(|msg| BenchError::Spec { line: *line, msg })?;
        }
        spec.validate().map_err(|e| BenchError::Spec { line: first, msg: e.to_string() })?;
        specs.push(spec);
        block.clear();
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            // a comment-only line does not end a block
            if raw.trim().is_empty() {
                flush(&mut block)?;
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(BenchError::Spec {
            line: i + 1,
            msg: format!("expected key = value, got '{line}'"),
        })?;
        block.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    flush(&mut block)?;
    Ok(specs)
}

/// The default comparison grid: every compared solver on every benchmark problem.
pub fn default_grid(max_iters: usize, seed: u64) -> Vec<RunSpec> {
    let mut specs = Vec::new();
    for problem in ProblemKind::BENCHMARK {
        for solver in SolverKind::ALL {
            if solver.compared_on(problem) {
                let mut s = RunSpec::new(problem, solver);
                s.max_iters = max_iters;
                s.seed = seed;
                s.sweep = true;
                specs.push(s);
            }
        }
    }
    specs
}
