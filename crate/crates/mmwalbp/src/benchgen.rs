//! Derives mixed-model benchmark instances from single-model `.alb`
//! sources: seeded random zone labels, a random task-model incidence
//! matrix and an equal-share production plan, reduced to a virtual
//! single model and written out as an instance manifest.

use std::path::PathBuf;

use rand::Rng;
use thiserror::Error;

use crate::alb::{load_alb, AlbFile, ParseError};
use crate::manifest::{GeneratorInfo, InstanceManifest};
use crate::model::{
    build_mean_model, DisplacementMatrix, Instance, MixedModelSpec, ModelError, Task, Zone,
    TASK_ZONES,
};
use crate::rng::substream;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("production plan is empty")]
    EmptyPlan,
    #[error("task {0}: could not draw a non-empty model row in 1000 attempts")]
    CoverageGuard(usize),
}

/// Generation recipe. Identical specs (same seeds) produce byte-identical
/// manifests.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub source: PathBuf,
    pub production: Vec<u64>,
    pub zone_seed: u64,
    pub incidence_seed: u64,
    /// Reserved; source task times are kept unchanged per model.
    pub time_seed: u64,
    pub cycle_time: f64,
    pub max_workplaces: usize,
    /// Redraw incidence rows until every task appears in at least one
    /// model. Disabled, a fully absent task keeps zero mean time.
    pub require_coverage: bool,
}

impl GenSpec {
    /// Standard recipe: equal-share plan for the requested model count,
    /// cycle time 1000, at most 3 workplaces per workstation.
    pub fn standard(source: PathBuf, n_models: usize, seed: u64) -> Self {
        Self {
            source,
            production: equal_plan(n_models),
            zone_seed: crate::rng::derive(seed, &[1]),
            incidence_seed: crate::rng::derive(seed, &[2]),
            time_seed: crate::rng::derive(seed, &[3]),
            cycle_time: 1000.0,
            max_workplaces: 3,
            require_coverage: true,
        }
    }
}

/// Equal-share production plan: total 200 over 4 models, total 998 over
/// 50 models (19 per model plus one extra unit round-robin), and an even
/// split with round-robin remainder for any other count.
pub fn equal_plan(n_models: usize) -> Vec<u64> {
    assert!(n_models > 0, "model count must be positive");
    let total: u64 = match n_models {
        4 => 200,
        50 => 998,
        other => 50 * other as u64,
    };
    let base = total / n_models as u64;
    let remainder = (total % n_models as u64) as usize;
    (0..n_models)
        .map(|m| base + u64::from(m < remainder))
        .collect()
}

/// Output of one generation: the mixed-model data and the reduced
/// single-model manifest.
#[derive(Debug, Clone)]
pub struct Generated {
    pub mixed: MixedModelSpec,
    pub manifest: InstanceManifest,
    pub instance: Instance,
}

/// Loads the source and generates.
pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    let text = std::fs::read_to_string(&spec.source)?;
    let alb = load_alb(&text)?;
    generate_from(&alb, spec)
}

/// Generates from an already-parsed source.
pub fn generate_from(alb: &AlbFile, spec: &GenSpec) -> Result<Generated, GenError> {
    if spec.production.is_empty() {
        return Err(GenError::EmptyPlan);
    }
    let n = alb.task_count;
    let models = spec.production.len();

    // zone per task, uniform over the eight non-interior zones
    let mut zone_rng = substream(spec.zone_seed, &[]);
    let zones: Vec<Zone> = (0..n)
        .map(|_| TASK_ZONES[zone_rng.random_range(0..TASK_ZONES.len())])
        .collect();

    // task-model incidence, Bernoulli(1/2) per entry
    let mut inc_rng = substream(spec.incidence_seed, &[]);
    let mut incidence: Vec<Vec<bool>> = Vec::with_capacity(n);
    for task in 0..n {
        let mut row: Vec<bool> = (0..models).map(|_| inc_rng.random_range(0..2u8) == 1).collect();
        if spec.require_coverage {
            let mut attempts = 0;
            while row.iter().all(|&x| !x) {
                attempts += 1;
                if attempts > 1000 {
                    return Err(GenError::CoverageGuard(task + 1));
                }
                row = (0..models).map(|_| inc_rng.random_range(0..2u8) == 1).collect();
            }
        }
        incidence.push(row);
    }

    // per-model times are the source times where the task is present
    let model_times: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..models)
                .map(|m| if incidence[j][m] { alb.times[j] } else { 0.0 })
                .collect()
        })
        .collect();

    // per-model precedence: source edges restricted to present tasks
    let per_model_edges: Vec<Vec<(usize, usize)>> = (0..models)
        .map(|m| {
            alb.edges
                .iter()
                .copied()
                .filter(|&(a, b)| incidence[a - 1][m] && incidence[b - 1][m])
                .collect()
        })
        .collect();

    let mixed = MixedModelSpec::new(model_times, incidence, spec.production.clone(), per_model_edges)?;
    let (mean_times, joint_edges) = build_mean_model(&mixed)?;

    let tasks: Vec<Task> = mean_times
        .iter()
        .zip(&zones)
        .enumerate()
        .map(|(i, (&base_time, &zone))| Task {
            id: i + 1,
            base_time,
            zone,
        })
        .collect();
    let instance = Instance::new(
        tasks,
        joint_edges,
        spec.cycle_time,
        DisplacementMatrix::standard(),
        spec.max_workplaces,
    )?;

    let source_name = spec
        .source
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.source.display().to_string());
    let id = format!("{}_{}M", source_name.trim_end_matches(".alb"), models);
    let manifest = InstanceManifest::from_instance(
        id,
        &instance,
        Some(GeneratorInfo {
            source: source_name,
            n_models: models,
            plan: spec.production.clone(),
            zone_seed: spec.zone_seed,
            incidence_seed: spec.incidence_seed,
            time_seed: spec.time_seed,
        }),
    );
    Ok(Generated {
        mixed,
        manifest,
        instance,
    })
}
