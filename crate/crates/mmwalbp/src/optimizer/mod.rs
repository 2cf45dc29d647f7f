//! Population metaheuristics over continuous positions: fish school
//! search (vanilla and with the stagnation avoidance routine) and
//! constriction-factor PSO, sharing one problem interface and one
//! trace format.

pub mod fss;
pub mod pso;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{decode, BalancingSolution, DecodeError};
use crate::model::Instance;
use crate::objective::{self, FitnessValue};
use crate::precedence::{build_complete_matrix, CompletePrecedenceMatrix};

pub use fss::{Fish, FssConfig, FssState};
pub use pso::{constriction_factor, Particle, PsoConfig, PsoState};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Rectangular search region, one interval per dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Default search interval applied to every dimension.
pub const DEFAULT_BOUNDS: (f64, f64) = (-100.0, 100.0);

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SolverError> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(SolverError::InvalidConfig(
                "search space bounds must be non-empty and of equal length".into(),
            ));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(SolverError::InvalidConfig(format!(
                    "dimension {d}: lower bound {lo} must be below upper bound {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dims: usize, lo: f64, hi: f64) -> Result<Self, SolverError> {
        Self::new(vec![lo; dims], vec![hi; dims])
    }

    /// Default region for an instance with `dims` tasks.
    pub fn default_for(dims: usize) -> Self {
        Self::uniform(dims, DEFAULT_BOUNDS.0, DEFAULT_BOUNDS.1).expect("static bounds are valid")
    }

    pub fn dimensions(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (d, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[d], self.upper[d]);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(d, &v)| v >= self.lower[d] && v <= self.upper[d])
    }
}

/// Anything a swarm can optimize: a pure, thread-safe mapping from a
/// position vector to a fitness value.
pub trait Problem: Sync {
    fn dimensions(&self) -> usize;
    fn evaluate(&self, position: &[f64]) -> Result<FitnessValue, DecodeError>;
}

/// The balancing problem seen as a continuous objective: decode the
/// position and score the schedule.
pub struct DecodeProblem<'a> {
    pub instance: &'a Instance,
    pub matrix: &'a CompletePrecedenceMatrix,
}

impl Problem for DecodeProblem<'_> {
    fn dimensions(&self) -> usize {
        self.instance.task_count()
    }

    fn evaluate(&self, position: &[f64]) -> Result<FitnessValue, DecodeError> {
        decode(position, self.instance, self.matrix).map(|sol| sol.fitness)
    }
}

/// One line of the convergence trace. `school_weight` is the total fish
/// weight for FSS variants and absent for PSO.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub best_primary: f64,
    pub best_workload: f64,
    pub best_m: usize,
    pub school_weight: Option<f64>,
}

/// Result of a generic swarm run over any [`Problem`].
#[derive(Debug, Clone)]
pub struct GenericOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: FitnessValue,
    pub trace: Vec<TraceRow>,
    pub evaluations: u64,
}

/// Best-ever tracker shared by the optimizers; ties resolve towards the
/// earlier record so results are order-independent.
#[derive(Debug, Clone, Default)]
pub(crate) struct BestRecord {
    pub position: Vec<f64>,
    pub fitness: Option<FitnessValue>,
}

impl BestRecord {
    pub fn observe(&mut self, position: &[f64], fitness: FitnessValue) {
        let improves = match &self.fitness {
            None => true,
            Some(best) => objective::better(&fitness, best),
        };
        if improves {
            self.position = position.to_vec();
            self.fitness = Some(fitness);
        }
    }
}

/// Algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgorithmKind {
    FssVanilla,
    FssSar,
    Pso,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 3] =
        [AlgorithmKind::FssVanilla, AlgorithmKind::FssSar, AlgorithmKind::Pso];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::FssVanilla => "fss-v",
            AlgorithmKind::FssSar => "fss-sar",
            AlgorithmKind::Pso => "pso",
        }
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fss-v" | "fss-vanilla" => Ok(AlgorithmKind::FssVanilla),
            "fss-sar" => Ok(AlgorithmKind::FssSar),
            "pso" => Ok(AlgorithmKind::Pso),
            other => Err(format!(
                "unknown algorithm {other:?} (expected fss-v, fss-sar or pso)"
            )),
        }
    }
}

/// Full solver configuration for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SolverConfig {
    Fss(FssConfig),
    Pso(PsoConfig),
}

impl SolverConfig {
    /// Defaults used throughout the benchmark suite: population 30,
    /// 500 iterations, the FSS parameter set with `w_scale` 1000 and
    /// both steps at 20, PSO with c1 = c2 = 2.1.
    pub fn for_algorithm(kind: AlgorithmKind, seed: u64) -> Self {
        match kind {
            AlgorithmKind::FssVanilla => SolverConfig::Fss(FssConfig::vanilla(seed)),
            AlgorithmKind::FssSar => SolverConfig::Fss(FssConfig::sar(seed)),
            AlgorithmKind::Pso => SolverConfig::Pso(PsoConfig::new(seed)),
        }
    }

    pub fn algorithm(&self) -> AlgorithmKind {
        match self {
            SolverConfig::Fss(c) if c.sar_enabled => AlgorithmKind::FssSar,
            SolverConfig::Fss(_) => AlgorithmKind::FssVanilla,
            SolverConfig::Pso(_) => AlgorithmKind::Pso,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SolverConfig::Fss(c) => c.rng_seed,
            SolverConfig::Pso(c) => c.rng_seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            SolverConfig::Fss(c) => c.rng_seed = seed,
            SolverConfig::Pso(c) => c.rng_seed = seed,
        }
    }

    pub fn set_iterations(&mut self, iterations: usize) {
        match self {
            SolverConfig::Fss(c) => c.iterations = iterations,
            SolverConfig::Pso(c) => c.iterations = iterations,
        }
    }

    pub fn set_population(&mut self, population: usize) {
        match self {
            SolverConfig::Fss(c) => c.population = population,
            SolverConfig::Pso(c) => c.population = population,
        }
    }
}

/// Result of a solver run on a balancing instance.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub solution: BalancingSolution,
    pub fitness: FitnessValue,
    pub trace: Vec<TraceRow>,
    pub evaluations: u64,
}

/// Runs the configured optimizer over a problem in its default search
/// space and returns the best-ever position with its trace.
pub fn run_generic(
    cfg: &SolverConfig,
    space: &SearchSpace,
    problem: &impl Problem,
) -> Result<GenericOutcome, SolverError> {
    match cfg {
        SolverConfig::Fss(c) => fss::run(c, space, problem),
        SolverConfig::Pso(c) => pso::run(c, space, problem),
    }
}

/// Solves a balancing instance: optimize in `[-100, 100]^n`, then decode
/// the best-ever position into its schedule.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<RunOutcome, SolverError> {
    let matrix = build_complete_matrix(inst.edges(), inst.task_count())
        .expect("instance precedence is validated acyclic");
    let problem = DecodeProblem {
        instance: inst,
        matrix: &matrix,
    };
    let space = SearchSpace::default_for(inst.task_count());
    let out = run_generic(cfg, &space, &problem)?;
    let solution = decode(&out.best_position, inst, &matrix)?;
    Ok(RunOutcome {
        solution,
        fitness: out.best_fitness,
        trace: out.trace,
        evaluations: out.evaluations,
    })
}

/// Writes a convergence trace as CSV (`iteration,best_primary,
/// best_workload,best_m,school_weight`).
pub fn write_trace_csv<W: std::io::Write>(trace: &[TraceRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace {
        w.serialize(row)?;
    }
    w.flush()
}
