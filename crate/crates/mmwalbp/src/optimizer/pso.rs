//! Constriction-factor particle swarm: velocities are damped by Clerc's
//! factor, which keeps the dynamics bounded whenever the two
//! acceleration coefficients sum to at least 4.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BestRecord, GenericOutcome, Problem, SearchSpace, SolverError, TraceRow};
use crate::objective::{self, FitnessValue};
use crate::parallel::map_indexed;
use crate::rng::{agent_stream, Phase};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsoConfig {
    pub population: usize,
    pub iterations: usize,
    /// Cognitive acceleration coefficient.
    pub c1: f64,
    /// Social acceleration coefficient.
    pub c2: f64,
    pub rng_seed: u64,
}

impl PsoConfig {
    /// Benchmark defaults: 30 particles, 500 iterations, c1 = c2 = 2.1.
    pub fn new(seed: u64) -> Self {
        Self {
            population: 30,
            iterations: 500,
            c1: 2.1,
            c2: 2.1,
            rng_seed: seed,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.population == 0 {
            return Err(SolverError::InvalidConfig("population must be positive".into()));
        }
        constriction_factor(self.c1, self.c2).map(|_| ())
    }
}

/// Clerc's constriction factor
/// `chi = 2 / |2 - phi - sqrt(phi (phi - 4))|` with `phi = c1 + c2`,
/// defined for `c1 + c2 >= 4`.
pub fn constriction_factor(c1: f64, c2: f64) -> Result<f64, SolverError> {
    let phi = c1 + c2;
    if !(phi >= 4.0) {
        return Err(SolverError::InvalidConfig(format!(
            "c1 + c2 must be at least 4, got {phi}"
        )));
    }
    Ok(2.0 / (2.0 - phi - (phi * (phi - 4.0)).sqrt()).abs())
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: FitnessValue,
}

/// Swarm state, advanced one iteration at a time.
#[derive(Debug, Clone)]
pub struct PsoState {
    cfg: PsoConfig,
    space: SearchSpace,
    pub chi: f64,
    pub particles: Vec<Particle>,
    pub iteration: usize,
    pub evaluations: u64,
    gbest: BestRecord,
}

impl PsoState {
    pub fn new(
        cfg: PsoConfig,
        space: SearchSpace,
        problem: &impl Problem,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        let chi = constriction_factor(cfg.c1, cfg.c2)?;
        let dims = space.dimensions();
        let positions: Vec<Vec<f64>> = (0..cfg.population)
            .map(|i| {
                let mut rng = agent_stream(cfg.rng_seed, 0, Phase::Init, i);
                (0..dims)
                    .map(|d| rng.random_range(space.lower()[d]..=space.upper()[d]))
                    .collect()
            })
            .collect();
        let fits = map_indexed(cfg.population, |i| problem.evaluate(&positions[i]));
        let mut gbest = BestRecord::default();
        let mut particles = Vec::with_capacity(cfg.population);
        for (position, fit) in positions.into_iter().zip(fits) {
            let fit = fit?;
            gbest.observe(&position, fit);
            particles.push(Particle {
                velocity: vec![0.0; dims],
                best_position: position.clone(),
                best_fitness: fit,
                position,
            });
        }
        Ok(Self {
            evaluations: cfg.population as u64,
            iteration: 0,
            chi,
            particles,
            gbest,
            cfg,
            space,
        })
    }

    pub fn gbest(&self) -> (&[f64], FitnessValue) {
        (
            &self.gbest.position,
            self.gbest.fitness.expect("initial swarm was evaluated"),
        )
    }

    /// One synchronous iteration: move every particle against the
    /// current global best, evaluate, then refresh personal and global
    /// bests.
    pub fn iterate(&mut self, problem: &impl Problem) -> Result<(), SolverError> {
        let t = self.iteration;
        let dims = self.space.dimensions();
        let gbest_position = self.gbest.position.clone();
        for (i, particle) in self.particles.iter_mut().enumerate() {
            let mut rng = agent_stream(self.cfg.rng_seed, t, Phase::Velocity, i);
            for d in 0..dims {
                let r1: f64 = rng.random_range(0.0..1.0);
                let r2: f64 = rng.random_range(0.0..1.0);
                particle.velocity[d] = self.chi
                    * (particle.velocity[d]
                        + self.cfg.c1 * r1 * (particle.best_position[d] - particle.position[d])
                        + self.cfg.c2 * r2 * (gbest_position[d] - particle.position[d]));
                particle.position[d] += particle.velocity[d];
            }
            self.space.clamp(&mut particle.position);
        }

        let particles = &self.particles;
        let fits = map_indexed(particles.len(), |i| problem.evaluate(&particles[i].position));
        self.evaluations += self.particles.len() as u64;
        for (i, fit) in fits.into_iter().enumerate() {
            let fit = fit?;
            let particle = &mut self.particles[i];
            if objective::better(&fit, &particle.best_fitness) {
                particle.best_fitness = fit;
                particle.best_position = particle.position.clone();
            }
            self.gbest.observe(&particle.position, fit);
        }
        self.iteration += 1;
        Ok(())
    }

    fn trace_row(&self) -> TraceRow {
        let (_, fitness) = self.gbest();
        TraceRow {
            iteration: self.iteration,
            best_primary: fitness.primary,
            best_workload: fitness.workload,
            best_m: fitness.open,
            school_weight: None,
        }
    }
}

/// Full run: seed, iterate, return the global best with its trace.
pub fn run(
    cfg: &PsoConfig,
    space: &SearchSpace,
    problem: &impl Problem,
) -> Result<GenericOutcome, SolverError> {
    let mut state = PsoState::new(cfg.clone(), space.clone(), problem)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(state.trace_row());
    for _ in 0..cfg.iterations {
        state.iterate(problem)?;
        trace.push(state.trace_row());
    }
    let (position, fitness) = state.gbest();
    Ok(GenericOutcome {
        best_position: position.to_vec(),
        best_fitness: fitness,
        trace,
        evaluations: state.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::test_support::Sphere;

    #[test]
    fn constriction_matches_closed_form() {
        let phi: f64 = 4.2;
        let expected = 2.0 / (2.0 - phi - (phi * (phi - 4.0)).sqrt()).abs();
        assert!((constriction_factor(2.1, 2.1).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn low_coefficients_rejected() {
        assert!(constriction_factor(1.0, 1.0).is_err());
        assert!(PsoConfig {
            c1: 1.9,
            c2: 2.0,
            ..PsoConfig::new(0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn particle_at_both_bests_with_zero_velocity_stays() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let cfg = PsoConfig {
            population: 1,
            iterations: 0,
            ..PsoConfig::new(3)
        };
        let mut state = PsoState::new(cfg, space, &problem).unwrap();
        let before = state.particles[0].position.clone();
        // pb == gb == x and v == 0 by construction of a fresh swarm
        state.iterate(&problem).unwrap();
        assert_eq!(state.particles[0].position, before);
    }

    #[test]
    fn gbest_is_monotone_on_sphere() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -100.0, 100.0).unwrap();
        let cfg = PsoConfig {
            population: 20,
            iterations: 80,
            ..PsoConfig::new(17)
        };
        let out = run(&cfg, &space, &problem).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1].best_primary <= w[0].best_primary + 1e-12);
        }
        assert!(out.trace.last().unwrap().best_primary < out.trace[0].best_primary);
        assert!(out.best_position.iter().all(|x| x.abs() <= 100.0));
    }

    #[test]
    fn same_seed_same_trace() {
        let problem = Sphere { dims: 3 };
        let space = SearchSpace::uniform(3, -50.0, 50.0).unwrap();
        let cfg = PsoConfig {
            population: 10,
            iterations: 40,
            ..PsoConfig::new(23)
        };
        let a = run(&cfg, &space, &problem).unwrap();
        let b = run(&cfg, &space, &problem).unwrap();
        assert_eq!(a.trace, b.trace);
    }
}
