//! Fish school search: individual movement with greedy acceptance,
//! weight feeding, collective-instinctive drift and collective-volitive
//! contraction/expansion around the weighted barycenter. The stagnation
//! avoidance routine (SAR) additionally lets a worsening individual move
//! through with probability `alpha`, which decays exponentially over the
//! iterations; fish moved that way are excluded from the instinctive
//! drift.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BestRecord, GenericOutcome, Problem, SearchSpace, SolverError, TraceRow};
use crate::objective::FitnessValue;
use crate::parallel::map_indexed;
use crate::rng::{agent_stream, Phase};

/// Denominators and weight deltas below this are treated as zero.
const ZERO_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FssConfig {
    pub population: usize,
    /// `It_max`: iteration budget and divisor of the linear step decay.
    pub iterations: usize,
    pub step_ind_initial: f64,
    pub step_vol_initial: f64,
    pub w_scale: f64,
    pub sar_enabled: bool,
    /// Initial worsening-acceptance probability (SAR only).
    pub alpha0: f64,
    /// Exponential decay rate of alpha per iteration.
    pub alpha_decay_rate: f64,
    /// Draw the individual-step noise per dimension (true) or one scalar
    /// per fish (false).
    pub individual_rand_per_dim: bool,
    /// Draw the volitive step factor per dimension (true) or one scalar
    /// per fish (false).
    pub volitive_rand_per_dim: bool,
    pub rng_seed: u64,
}

impl FssConfig {
    /// Vanilla FSS with the benchmark defaults: 30 fish, 500 iterations,
    /// both steps 20, weight scale 1000.
    pub fn vanilla(seed: u64) -> Self {
        Self {
            population: 30,
            iterations: 500,
            step_ind_initial: 20.0,
            step_vol_initial: 20.0,
            w_scale: 1000.0,
            sar_enabled: false,
            alpha0: 0.8,
            alpha_decay_rate: 0.007,
            individual_rand_per_dim: true,
            volitive_rand_per_dim: false,
            rng_seed: seed,
        }
    }

    /// SAR variant: same defaults plus the alpha schedule
    /// `0.8 * exp(-0.007 t)`.
    pub fn sar(seed: u64) -> Self {
        Self {
            sar_enabled: true,
            ..Self::vanilla(seed)
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.population == 0 {
            return Err(SolverError::InvalidConfig("population must be positive".into()));
        }
        if !(self.step_ind_initial > 0.0) || !(self.step_vol_initial > 0.0) {
            return Err(SolverError::InvalidConfig("step sizes must be positive".into()));
        }
        if !(self.w_scale > 1.0) {
            return Err(SolverError::InvalidConfig("w_scale must exceed 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha0) || self.alpha_decay_rate < 0.0 {
            return Err(SolverError::InvalidConfig(
                "alpha0 must be in [0, 1] and its decay rate non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Worsening-acceptance probability at iteration `t`.
pub fn alpha_schedule(alpha0: f64, decay_rate: f64, t: usize) -> f64 {
    alpha0 * (-decay_rate * t as f64).exp()
}

/// Linear step decay with a floor at zero.
pub fn step_decay(step: f64, initial: f64, it_max: usize) -> f64 {
    (step - initial / it_max as f64).max(0.0)
}

#[derive(Debug, Clone)]
pub struct Fish {
    pub position: Vec<f64>,
    pub weight: f64,
    /// Displacement of the last individual move (zero if the fish stayed).
    pub delta_x: Vec<f64>,
    /// Fitness variation of the last individual move, improvement-positive.
    pub delta_f: f64,
    /// Whether the last individual move strictly improved fitness; only
    /// such fish drive the instinctive drift under SAR.
    pub improved: bool,
}

/// School state, advanced one iteration at a time. Exposed so tests and
/// the harness can inspect weights, positions and steps mid-run.
#[derive(Debug, Clone)]
pub struct FssState {
    cfg: FssConfig,
    space: SearchSpace,
    pub fish: Vec<Fish>,
    pub step_ind: f64,
    pub step_vol: f64,
    pub prev_total_weight: f64,
    pub iteration: usize,
    pub evaluations: u64,
    best: BestRecord,
}

impl FssState {
    /// Seeds the school and scores the initial population.
    pub fn new(
        cfg: FssConfig,
        space: SearchSpace,
        problem: &impl Problem,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        let dims = space.dimensions();
        let fish: Vec<Fish> = (0..cfg.population)
            .map(|i| {
                let mut rng = agent_stream(cfg.rng_seed, 0, Phase::Init, i);
                let position: Vec<f64> = (0..dims)
                    .map(|d| rng.random_range(space.lower()[d]..=space.upper()[d]))
                    .collect();
                Fish {
                    position,
                    weight: cfg.w_scale / 2.0,
                    delta_x: vec![0.0; dims],
                    delta_f: 0.0,
                    improved: false,
                }
            })
            .collect();
        let prev_total_weight = cfg.population as f64 * cfg.w_scale / 2.0;
        let mut state = Self {
            step_ind: cfg.step_ind_initial,
            step_vol: cfg.step_vol_initial,
            prev_total_weight,
            iteration: 0,
            evaluations: 0,
            best: BestRecord::default(),
            fish,
            cfg,
            space,
        };
        let initial = state.evaluate_positions(problem, |i| &state.fish[i].position)?;
        for (i, fit) in initial.iter().enumerate() {
            state.best.observe(&state.fish[i].position, *fit);
        }
        state.evaluations += state.fish.len() as u64;
        Ok(state)
    }

    pub fn best(&self) -> (&[f64], FitnessValue) {
        (
            &self.best.position,
            self.best.fitness.expect("initial population was evaluated"),
        )
    }

    pub fn total_weight(&self) -> f64 {
        self.fish.iter().map(|f| f.weight).sum()
    }

    /// Alpha in effect for the coming iteration (zero without SAR).
    pub fn current_alpha(&self) -> f64 {
        if self.cfg.sar_enabled {
            alpha_schedule(self.cfg.alpha0, self.cfg.alpha_decay_rate, self.iteration)
        } else {
            0.0
        }
    }

    fn evaluate_positions<'a>(
        &'a self,
        problem: &impl Problem,
        position_of: impl Fn(usize) -> &'a [f64] + Sync,
    ) -> Result<Vec<FitnessValue>, SolverError> {
        let results = map_indexed(self.fish.len(), |i| problem.evaluate(position_of(i)));
        results
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(SolverError::from)
    }

    /// One full iteration: evaluate, individual move (with re-evaluation),
    /// feeding, instinctive drift, volitive move, step decay.
    pub fn iterate(&mut self, problem: &impl Problem) -> Result<(), SolverError> {
        let t = self.iteration;
        let n = self.fish.len();
        let dims = self.space.dimensions();
        let alpha = self.current_alpha();

        // fitness of the current positions
        let pre = self.evaluate_positions(problem, |i| &self.fish[i].position)?;
        self.evaluations += n as u64;
        for (i, fit) in pre.iter().enumerate() {
            self.best.observe(&self.fish[i].position, *fit);
        }

        // individual movement: propose, evaluate, accept on improvement
        // (or with probability alpha under SAR)
        let seed = self.cfg.rng_seed;
        let step_ind = self.step_ind;
        let per_dim = self.cfg.individual_rand_per_dim;
        let sar = self.cfg.sar_enabled;
        let space = &self.space;
        let fish = &self.fish;
        let proposals = map_indexed(n, |i| {
            let mut rng = agent_stream(seed, t, Phase::Individual, i);
            let mut candidate = fish[i].position.clone();
            if per_dim {
                for value in candidate.iter_mut() {
                    *value += rng.random_range(-1.0..=1.0) * step_ind;
                }
            } else {
                let noise = rng.random_range(-1.0..=1.0) * step_ind;
                for value in candidate.iter_mut() {
                    *value += noise;
                }
            }
            space.clamp(&mut candidate);
            let fitness = problem.evaluate(&candidate)?;
            let improved = fitness.primary < pre[i].primary;
            let accepted =
                improved || (sar && alpha > 0.0 && rng.random_range(0.0..1.0) < alpha);
            Ok::<_, crate::decoder::DecodeError>((candidate, fitness, accepted, improved))
        });
        self.evaluations += n as u64;
        for (i, proposal) in proposals.into_iter().enumerate() {
            let (candidate, fitness, accepted, improved) = proposal?;
            self.best.observe(&candidate, fitness);
            let fish = &mut self.fish[i];
            if accepted {
                for d in 0..dims {
                    fish.delta_x[d] = candidate[d] - fish.position[d];
                }
                fish.delta_f = pre[i].primary - fitness.primary;
                fish.position = candidate;
                fish.improved = improved;
            } else {
                fish.delta_x.iter_mut().for_each(|d| *d = 0.0);
                fish.delta_f = 0.0;
                fish.improved = false;
            }
        }

        self.feed();
        self.collective_instinctive();
        self.collective_volitive(t);

        self.step_ind = step_decay(self.step_ind, self.cfg.step_ind_initial, self.cfg.iterations);
        self.step_vol = step_decay(self.step_vol, self.cfg.step_vol_initial, self.cfg.iterations);
        self.iteration += 1;
        Ok(())
    }

    /// Weight update: normalize by the largest fitness variation, skip
    /// entirely when nothing moved.
    fn feed(&mut self) {
        let max_abs = self
            .fish
            .iter()
            .map(|f| f.delta_f.abs())
            .fold(0.0f64, f64::max);
        if max_abs <= ZERO_EPS {
            return;
        }
        let w_scale = self.cfg.w_scale;
        for fish in &mut self.fish {
            fish.weight = (fish.weight + fish.delta_f / max_abs).clamp(1.0, w_scale);
        }
    }

    /// Drift every fish by the improvement-weighted mean displacement of
    /// the fish that improved.
    fn collective_instinctive(&mut self) {
        let dims = self.space.dimensions();
        let mut numerator = vec![0.0; dims];
        let mut denominator = 0.0;
        for fish in self.fish.iter().filter(|f| f.improved) {
            for d in 0..dims {
                numerator[d] += fish.delta_x[d] * fish.delta_f;
            }
            denominator += fish.delta_f;
        }
        if denominator.abs() <= ZERO_EPS {
            return;
        }
        for fish in &mut self.fish {
            for d in 0..dims {
                fish.position[d] += numerator[d] / denominator;
            }
            self.space.clamp(&mut fish.position);
        }
    }

    /// Contract towards the weighted barycenter when the school gained
    /// weight, expand away from it otherwise.
    fn collective_volitive(&mut self, t: usize) {
        let dims = self.space.dimensions();
        let total_weight = self.total_weight();
        let mut barycenter = vec![0.0; dims];
        for fish in &self.fish {
            for d in 0..dims {
                barycenter[d] += fish.position[d] * fish.weight;
            }
        }
        for b in barycenter.iter_mut() {
            *b /= total_weight;
        }
        let attract = total_weight > self.prev_total_weight;
        let seed = self.cfg.rng_seed;
        for (i, fish) in self.fish.iter_mut().enumerate() {
            let distance = fish
                .position
                .iter()
                .zip(&barycenter)
                .map(|(x, b)| (x - b) * (x - b))
                .sum::<f64>()
                .sqrt();
            if distance < ZERO_EPS {
                continue;
            }
            let mut rng = agent_stream(seed, t, Phase::Volitive, i);
            let scalar = if self.cfg.volitive_rand_per_dim {
                f64::NAN // drawn per dimension below
            } else {
                rng.random_range(0.0..1.0)
            };
            for d in 0..dims {
                let r = if self.cfg.volitive_rand_per_dim {
                    rng.random_range(0.0..1.0)
                } else {
                    scalar
                };
                let pull = self.step_vol * r * (fish.position[d] - barycenter[d]) / distance;
                if attract {
                    fish.position[d] -= pull;
                } else {
                    fish.position[d] += pull;
                }
            }
            self.space.clamp(&mut fish.position);
        }
        self.prev_total_weight = total_weight;
    }

    fn trace_row(&self) -> TraceRow {
        let (_, fitness) = self.best();
        TraceRow {
            iteration: self.iteration,
            best_primary: fitness.primary,
            best_workload: fitness.workload,
            best_m: fitness.open,
            school_weight: Some(self.total_weight()),
        }
    }
}

/// Full run: seed, iterate `cfg.iterations` times, return the best-ever
/// position and the per-iteration trace (row 0 is the initial school).
pub fn run(
    cfg: &FssConfig,
    space: &SearchSpace,
    problem: &impl Problem,
) -> Result<GenericOutcome, SolverError> {
    let mut state = FssState::new(cfg.clone(), space.clone(), problem)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(state.trace_row());
    for _ in 0..cfg.iterations {
        state.iterate(problem)?;
        trace.push(state.trace_row());
    }
    let (position, fitness) = state.best();
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
    use approx::assert_relative_eq;

    fn small_cfg(seed: u64, sar: bool) -> FssConfig {
        FssConfig {
            population: 12,
            iterations: 60,
            step_ind_initial: 2.0,
            step_vol_initial: 2.0,
            w_scale: 100.0,
            sar_enabled: sar,
            ..FssConfig::vanilla(seed)
        }
    }

    #[test]
    fn alpha_schedule_values() {
        assert_eq!(alpha_schedule(0.8, 0.007, 0), 0.8);
        assert_relative_eq!(
            alpha_schedule(0.8, 0.007, 100),
            0.8 * (-0.7f64).exp(),
            epsilon = 1e-12
        );
        let mut last = f64::INFINITY;
        for t in 0..50 {
            let a = alpha_schedule(0.8, 0.007, t);
            assert!(a < last);
            last = a;
        }
    }

    #[test]
    fn step_decay_is_linear_with_floor() {
        // high-level step 20 over 500 iterations decays by 0.04 per step
        let mut step = 20.0;
        for t in 1..=500 {
            step = step_decay(step, 20.0, 500);
            assert_relative_eq!(step, 20.0 - 0.04 * t as f64, epsilon = 1e-9);
        }
        assert_relative_eq!(step, 0.0, epsilon = 1e-9);
        assert_eq!(step_decay(step, 20.0, 500), 0.0);
    }

    #[test]
    fn sphere_run_improves_and_stays_bounded() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -100.0, 100.0).unwrap();
        let cfg = FssConfig {
            population: 30,
            iterations: 100,
            step_ind_initial: 20.0,
            step_vol_initial: 20.0,
            ..FssConfig::vanilla(99)
        };
        let out = run(&cfg, &space, &problem).unwrap();
        let first = out.trace.first().unwrap().best_primary;
        let last = out.trace.last().unwrap().best_primary;
        assert!(last < first, "no improvement on the sphere: {first} -> {last}");
        // best-so-far is non-increasing
        for w in out.trace.windows(2) {
            assert!(w[1].best_primary <= w[0].best_primary + 1e-12);
        }
        assert!(out.best_position.iter().all(|x| x.abs() <= 100.0));
    }

    #[test]
    fn weights_remain_in_bounds() {
        let problem = Sphere { dims: 3 };
        let space = SearchSpace::uniform(3, -10.0, 10.0).unwrap();
        let mut state = FssState::new(small_cfg(5, true), space, &problem).unwrap();
        for _ in 0..60 {
            state.iterate(&problem).unwrap();
            for fish in &state.fish {
                assert!(fish.weight >= 1.0 && fish.weight <= 100.0);
                assert!(state.space.contains(&fish.position));
            }
        }
    }

    #[test]
    fn feeding_normalizes_by_max_delta() {
        let problem = Sphere { dims: 1 };
        let space = SearchSpace::uniform(1, -1.0, 1.0).unwrap();
        let mut state = FssState::new(small_cfg(1, false), space, &problem).unwrap();
        state.fish[0].delta_f = 2.0;
        state.fish[1].delta_f = -1.0;
        let w0 = state.fish[0].weight;
        let w1 = state.fish[1].weight;
        state.feed();
        assert_relative_eq!(state.fish[0].weight, w0 + 1.0);
        assert_relative_eq!(state.fish[1].weight, w1 - 0.5);
    }

    #[test]
    fn feeding_skips_on_zero_deltas() {
        let problem = Sphere { dims: 1 };
        let space = SearchSpace::uniform(1, -1.0, 1.0).unwrap();
        let mut state = FssState::new(small_cfg(1, false), space, &problem).unwrap();
        let before: Vec<f64> = state.fish.iter().map(|f| f.weight).collect();
        state.feed();
        let after: Vec<f64> = state.fish.iter().map(|f| f.weight).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn instinctive_single_mover_drifts_by_its_displacement() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let mut state = FssState::new(small_cfg(2, false), space, &problem).unwrap();
        for fish in &mut state.fish {
            fish.improved = false;
            fish.delta_f = 0.0;
            fish.delta_x = vec![0.0, 0.0];
        }
        state.fish[3].improved = true;
        state.fish[3].delta_f = 0.25;
        state.fish[3].delta_x = vec![0.5, -0.75];
        let before: Vec<Vec<f64>> = state.fish.iter().map(|f| f.position.clone()).collect();
        state.collective_instinctive();
        for (fish, old) in state.fish.iter().zip(&before) {
            let expected = [
                (old[0] + 0.5).clamp(-10.0, 10.0),
                (old[1] - 0.75).clamp(-10.0, 10.0),
            ];
            assert_relative_eq!(fish.position[0], expected[0], epsilon = 1e-12);
            assert_relative_eq!(fish.position[1], expected[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn instinctive_matches_weighted_mean_oracle() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -50.0, 50.0).unwrap();
        let mut state = FssState::new(small_cfg(3, false), space, &problem).unwrap();
        let deltas = [
            (true, 0.5, [1.0, -2.0]),
            (true, 1.5, [0.25, 0.5]),
            (false, 0.0, [0.0, 0.0]),
            (true, 0.25, [-3.0, 1.0]),
        ];
        for (i, &(improved, df, dx)) in deltas.iter().enumerate() {
            state.fish[i].improved = improved;
            state.fish[i].delta_f = df;
            state.fish[i].delta_x = dx.to_vec();
        }
        for fish in state.fish.iter_mut().skip(deltas.len()) {
            fish.improved = false;
            fish.delta_f = 0.0;
        }
        // independent computation of the drift vector
        let den: f64 = 0.5 + 1.5 + 0.25;
        let drift = [
            (1.0 * 0.5 + 0.25 * 1.5 + -3.0 * 0.25) / den,
            (-2.0 * 0.5 + 0.5 * 1.5 + 1.0 * 0.25) / den,
        ];
        let before: Vec<f64> = state.fish[7].position.clone();
        state.collective_instinctive();
        assert_relative_eq!(state.fish[7].position[0], before[0] + drift[0], epsilon = 1e-12);
        assert_relative_eq!(state.fish[7].position[1], before[1] + drift[1], epsilon = 1e-12);
    }

    #[test]
    fn instinctive_noop_when_nobody_moved() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let mut state = FssState::new(small_cfg(4, false), space, &problem).unwrap();
        for fish in &mut state.fish {
            fish.improved = false;
            fish.delta_f = 0.0;
        }
        let before: Vec<Vec<f64>> = state.fish.iter().map(|f| f.position.clone()).collect();
        state.collective_instinctive();
        let after: Vec<Vec<f64>> = state.fish.iter().map(|f| f.position.clone()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn barycenter_is_centroid_for_equal_weights() {
        let problem = Sphere { dims: 1 };
        let space = SearchSpace::uniform(1, -10.0, 10.0).unwrap();
        let state = FssState::new(small_cfg(6, false), space, &problem).unwrap();
        // equal weights at init: barycenter equals the plain centroid and
        // lies within the coordinate range
        let total: f64 = state.fish.iter().map(|f| f.weight).sum();
        let bary: f64 = state
            .fish
            .iter()
            .map(|f| f.position[0] * f.weight)
            .sum::<f64>()
            / total;
        let centroid: f64 =
            state.fish.iter().map(|f| f.position[0]).sum::<f64>() / state.fish.len() as f64;
        assert_relative_eq!(bary, centroid, epsilon = 1e-9);
        let min = state.fish.iter().map(|f| f.position[0]).fold(f64::INFINITY, f64::min);
        let max = state.fish.iter().map(|f| f.position[0]).fold(f64::NEG_INFINITY, f64::max);
        assert!(bary >= min && bary <= max);
    }

    #[test]
    fn volitive_attraction_shrinks_distances() {
        let problem = Sphere { dims: 3 };
        let space = SearchSpace::uniform(3, -50.0, 50.0).unwrap();
        let mut state = FssState::new(small_cfg(7, false), space, &problem).unwrap();
        // force attraction: pretend the school weighed less before
        state.prev_total_weight = 0.0;
        state.step_vol = 1.0;
        let total: f64 = state.fish.iter().map(|f| f.weight).sum();
        let mut bary = [0.0f64; 3];
        for fish in &state.fish {
            for d in 0..3 {
                bary[d] += fish.position[d] * fish.weight / total;
            }
        }
        let dist = |p: &[f64]| -> f64 {
            p.iter()
                .zip(&bary)
                .map(|(x, b)| (x - b) * (x - b))
                .sum::<f64>()
                .sqrt()
        };
        let before: Vec<f64> = state.fish.iter().map(|f| dist(&f.position)).collect();
        state.collective_volitive(0);
        for (fish, old) in state.fish.iter().zip(&before) {
            assert!(dist(&fish.position) <= old + 1e-9);
        }
    }

    #[test]
    fn volitive_single_fish_does_not_move() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let cfg = FssConfig {
            population: 1,
            ..small_cfg(8, false)
        };
        let mut state = FssState::new(cfg, space, &problem).unwrap();
        let before = state.fish[0].position.clone();
        state.collective_volitive(0);
        assert_eq!(state.fish[0].position, before);
    }

    #[test]
    fn sar_alpha_one_always_moves() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let cfg = FssConfig {
            alpha0: 1.0,
            alpha_decay_rate: 0.0,
            ..small_cfg(9, true)
        };
        let mut state = FssState::new(cfg, space, &problem).unwrap();
        let before: Vec<Vec<f64>> = state.fish.iter().map(|f| f.position.clone()).collect();
        state.iterate(&problem).unwrap();
        // every fish accepted its individual proposal (delta_x nonzero
        // unless the draw was exactly zero, which does not happen here)
        for (fish, old) in state.fish.iter().zip(&before) {
            assert!(
                fish.delta_x.iter().any(|&d| d != 0.0),
                "fish stayed despite alpha = 1: {old:?}"
            );
        }
    }

    #[test]
    fn vanilla_rejects_worsening_moves() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let mut state = FssState::new(small_cfg(10, false), space, &problem).unwrap();
        for _ in 0..30 {
            let pre: Vec<f64> = state
                .fish
                .iter()
                .map(|f| problem.evaluate(&f.position).unwrap().primary)
                .collect();
            // after the individual phase alone, no fish may be worse;
            // run a full iterate and check the recorded deltas instead
            state.iterate(&problem).unwrap();
            for (fish, _) in state.fish.iter().zip(&pre) {
                assert!(fish.delta_f >= 0.0, "vanilla accepted a worsening move");
            }
        }
    }

    #[test]
    fn sar_with_zero_alpha_matches_vanilla_trace() {
        let problem = Sphere { dims: 4 };
        let space = SearchSpace::uniform(4, -100.0, 100.0).unwrap();
        let vanilla = small_cfg(11, false);
        let sar_zero = FssConfig {
            sar_enabled: true,
            alpha0: 0.0,
            ..small_cfg(11, false)
        };
        let a = run(&vanilla, &space, &problem).unwrap();
        let b = run(&sar_zero, &space, &problem).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best_position, b.best_position);
    }

    #[test]
    fn same_seed_same_trace() {
        let problem = Sphere { dims: 3 };
        let space = SearchSpace::uniform(3, -100.0, 100.0).unwrap();
        let cfg = small_cfg(12, true);
        let a = run(&cfg, &space, &problem).unwrap();
        let b = run(&cfg, &space, &problem).unwrap();
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn zero_iterations_returns_initial_best() {
        let problem = Sphere { dims: 2 };
        let space = SearchSpace::uniform(2, -10.0, 10.0).unwrap();
        let cfg = FssConfig {
            iterations: 0,
            ..small_cfg(13, false)
        };
        let out = run(&cfg, &space, &problem).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.evaluations, 12);
        // the best equals the best initial fish
        let mut best = f64::INFINITY;
        for i in 0..12 {
            let mut rng = agent_stream(13, 0, Phase::Init, i);
            let pos: Vec<f64> = (0..2).map(|_| rng.random_range(-10.0..=10.0)).collect();
            best = best.min(problem.evaluate(&pos).unwrap().primary);
        }
        assert_relative_eq!(out.best_fitness.primary, best, epsilon = 1e-12);
    }
}
