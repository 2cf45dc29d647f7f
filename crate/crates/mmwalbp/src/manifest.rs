//! JSON interchange formats: the instance manifest (the canonical way
//! instances travel between the generator, solver and validator) and the
//! solution export.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::BalancingSolution;
use crate::model::{DisplacementMatrix, Instance, ModelError, Task, Zone};

/// Version stamp carried by every file this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestTask {
    pub id: usize,
    pub base_time: f64,
    pub zone: Zone,
}

/// Provenance block written by the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub source: String,
    pub n_models: usize,
    pub plan: Vec<u64>,
    pub zone_seed: u64,
    pub incidence_seed: u64,
    /// Reserved for per-model time perturbation; generation currently
    /// keeps source times unchanged.
    pub time_seed: u64,
}

/// Serialized instance: everything the solver needs plus generator
/// provenance and derived workload figures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub schema_version: u32,
    pub id: String,
    pub cycle_time: f64,
    pub max_workplaces: usize,
    pub tasks: Vec<ManifestTask>,
    pub edges: Vec<(usize, usize)>,
    pub displacement: Vec<Vec<f64>>,
    /// Sum of (mean-model) base times.
    pub workload: f64,
    pub workload_cycle_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
}

impl InstanceManifest {
    pub fn from_instance(id: String, inst: &Instance, generator: Option<GeneratorInfo>) -> Self {
        let workload = inst.total_base_time();
        Self {
            schema_version: SCHEMA_VERSION,
            id,
            cycle_time: inst.cycle_time(),
            max_workplaces: inst.max_workplaces(),
            tasks: inst
                .tasks()
                .iter()
                .map(|t| ManifestTask {
                    id: t.id,
                    base_time: t.base_time,
                    zone: t.zone,
                })
                .collect(),
            edges: inst.edges().to_vec(),
            displacement: inst
                .displacement()
                .raw()
                .iter()
                .map(|row| row.to_vec())
                .collect(),
            workload,
            workload_cycle_ratio: workload / inst.cycle_time(),
            generator,
        }
    }

    /// Rebuilds (and re-validates) the instance.
    pub fn to_instance(&self) -> Result<Instance, ManifestError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ManifestError::SchemaVersion(self.schema_version));
        }
        let mut cost = [[0.0; 9]; 9];
        for (i, row) in self.displacement.iter().enumerate().take(9) {
            for (j, &c) in row.iter().enumerate().take(9) {
                cost[i][j] = c;
            }
        }
        let tasks = self
            .tasks
            .iter()
            .map(|t| Task {
                id: t.id,
                base_time: t.base_time,
                zone: t.zone,
            })
            .collect();
        Ok(Instance::new(
            tasks,
            self.edges.clone(),
            self.cycle_time,
            DisplacementMatrix::new(cost)?,
            self.max_workplaces,
        )?)
    }

    /// Stable, byte-reproducible JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        let manifest: Self = serde_json::from_str(&text)?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(ManifestError::SchemaVersion(manifest.schema_version));
        }
        Ok(manifest)
    }
}

/// Solution export with enough provenance to validate it later.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub instance_id: String,
    pub algorithm: String,
    pub seed: u64,
    pub iterations: usize,
    pub solution: BalancingSolution,
}

impl SolutionFile {
    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        let json = serde_json::to_string_pretty(self).expect("solution serializes") + "\n";
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        let file: Self = serde_json::from_str(&text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(ManifestError::SchemaVersion(file.schema_version));
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DisplacementMatrix;

    fn sample_instance() -> Instance {
        let tasks = vec![
            Task { id: 1, base_time: 3.0, zone: 0 },
            Task { id: 2, base_time: 4.5, zone: 5 },
        ];
        Instance::new(tasks, vec![(1, 2)], 10.0, DisplacementMatrix::standard(), 3).unwrap()
    }

    #[test]
    fn manifest_round_trip() {
        let inst = sample_instance();
        let manifest = InstanceManifest::from_instance("sample".into(), &inst, None);
        let json = manifest.to_json();
        let back: InstanceManifest = serde_json::from_str(&json).unwrap();
        let rebuilt = back.to_instance().unwrap();
        assert_eq!(rebuilt.task_count(), 2);
        assert_eq!(rebuilt.cycle_time(), 10.0);
        assert_eq!(rebuilt.edges(), inst.edges());
        assert_eq!(back.workload, 7.5);
    }

    #[test]
    fn rendering_is_stable() {
        let inst = sample_instance();
        let manifest = InstanceManifest::from_instance("sample".into(), &inst, None);
        assert_eq!(manifest.to_json(), manifest.to_json());
    }

    #[test]
    fn wrong_schema_rejected() {
        let inst = sample_instance();
        let mut manifest = InstanceManifest::from_instance("sample".into(), &inst, None);
        manifest.schema_version = 99;
        assert!(matches!(
            manifest.to_instance(),
            Err(ManifestError::SchemaVersion(99))
        ));
    }

    #[test]
    fn solution_file_round_trip_and_schema_check() {
        use crate::decoder::assign;
        let inst = sample_instance();
        let sol = assign(&[1, 2], &inst).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let file = SolutionFile {
            schema_version: SCHEMA_VERSION,
            instance_id: "sample".into(),
            algorithm: "fss-v".into(),
            seed: 7,
            iterations: 10,
            solution: sol.clone(),
        };
        file.save(&path).unwrap();
        let back = SolutionFile::load(&path).unwrap();
        assert_eq!(back.solution, sol);
        let mut bad = file;
        bad.schema_version = 0;
        bad.save(&path).unwrap();
        assert!(matches!(
            SolutionFile::load(&path),
            Err(ManifestError::SchemaVersion(0))
        ));
    }
}
