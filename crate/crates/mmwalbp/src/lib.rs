//! Solver library and benchmark harness for the mixed-model workplace
//! time-dependent assembly line balancing problem, type 1 (MMWALBP-1):
//! minimize the number of open workplaces for a fixed cycle time.
//!
//! The pipeline, end to end:
//!
//! 1. [`alb`] parses single-model `.alb` instance files.
//! 2. [`benchgen`] derives mixed-model instances from them (seeded zone
//!    labels, task-model incidence, production plans) and emits JSON
//!    manifests ([`manifest`]).
//! 3. [`model`] reduces the mixed model to a single virtual model
//!    (demand-weighted mean times, joint precedence graph).
//! 4. [`decoder`] maps continuous positions to feasible schedules via
//!    random keys, precedence repair ([`precedence`]) and a
//!    workplace-aware assignment with displacement-time correction.
//! 5. [`optimizer`] searches the continuous space with fish school
//!    search (vanilla and stagnation-avoidance variants) or constriction
//!    PSO, scoring candidates with [`objective`].
//! 6. [`experiment`] orchestrates repeated runs and [`stats`] compares
//!    algorithms with one-way ANOVA and pooled confidence intervals.
//!
//! With the default `parallel` feature, fitness batches and experiment
//! runs fan out over rayon; disabling it yields a fully sequential build
//! with identical results (all randomness is derived from per-agent,
//! per-iteration substreams, never from evaluation order).

pub mod alb;
pub mod benchgen;
pub mod decoder;
pub mod experiment;
pub mod manifest;
pub mod model;
pub mod objective;
pub mod optimizer;
pub mod parallel;
pub mod precedence;
pub mod rng;
pub mod stats;
pub mod validate;

pub use decoder::{decode, BalancingSolution};
pub use model::{DisplacementMatrix, Instance, Task, Zone};
pub use objective::FitnessValue;
pub use optimizer::{solve, AlgorithmKind, SolverConfig};

/// Absolute tolerance for time comparisons throughout the crate.
pub const TIME_EPS: f64 = 1e-9;
