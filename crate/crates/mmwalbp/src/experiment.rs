//! Experiment orchestration: repeated seeded solver runs over a set of
//! instances, an incrementally written raw results table, and report
//! generation (best-m table, ANOVA F table, pooled-CI series, JSON
//! summary).

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::manifest::{InstanceManifest, ManifestError, SCHEMA_VERSION};
use crate::model::Instance;
use crate::objective;
use crate::optimizer::{solve, AlgorithmKind, SolverConfig};
use crate::parallel::map_indexed;
use crate::rng::derive;
use crate::stats::{one_way_anova, pool_samples, AnovaResult, StatsError};
use crate::validate;

/// Comment line opening every CSV this module writes.
const RAW_SCHEMA_COMMENT: &str = "# mmwalbp.raw.v1";
const REPORT_SCHEMA_COMMENT: &str = "# mmwalbp.report.v1";

/// The paper-era reference threshold carried alongside the recomputed
/// quantile in reports.
pub const LEGACY_F_REF: f64 = 4.89;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("instance {path}: {source}")]
    InstanceLoad {
        path: PathBuf,
        source: ManifestError,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("plan: {0}")]
    InvalidPlan(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// What to run: instances x algorithms x runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<AlgorithmKind>,
    pub runs_per_cell: usize,
    pub group_size: usize,
    pub iterations: usize,
    pub population: usize,
    pub base_seed: u64,
    /// Check every best solution with the independent validator and
    /// record failures.
    pub validate_solutions: bool,
}

impl ExperimentPlan {
    /// Paper-scale defaults: 450 runs pooled in groups of 15, 500
    /// iterations, 30 agents.
    pub fn new(instances: Vec<PathBuf>, algorithms: Vec<AlgorithmKind>, base_seed: u64) -> Self {
        Self {
            instances,
            algorithms,
            runs_per_cell: 450,
            group_size: 15,
            iterations: 500,
            population: 30,
            base_seed,
            validate_solutions: true,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.group_size == 0 || self.runs_per_cell % self.group_size != 0 {
            return Err(ExperimentError::InvalidPlan(format!(
                "runs_per_cell {} must be divisible by group_size {}",
                self.runs_per_cell, self.group_size
            )));
        }
        if self.algorithms.is_empty() {
            return Err(ExperimentError::InvalidPlan("no algorithms selected".into()));
        }
        Ok(())
    }
}

/// One raw result row. Column order is fixed by this struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub instance_id: String,
    pub algorithm: String,
    pub run: usize,
    pub seed: u64,
    pub m: usize,
    pub fitness: f64,
    pub smoothness: f64,
    pub workload: f64,
    pub seconds: f64,
}

/// A run that errored; kept out of the raw table, reported in the
/// summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedRun {
    pub instance_id: String,
    pub algorithm: String,
    pub run: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub rows: Vec<RawRow>,
    pub failures: Vec<FailedRun>,
}

fn run_seed(base: u64, instance_idx: usize, algorithm: AlgorithmKind, run: usize) -> u64 {
    let algo_tag = match algorithm {
        AlgorithmKind::FssVanilla => 0u64,
        AlgorithmKind::FssSar => 1,
        AlgorithmKind::Pso => 2,
    };
    derive(base, &[instance_idx as u64, algo_tag, run as u64])
}

fn execute_run(
    inst: &Instance,
    instance_id: &str,
    algorithm: AlgorithmKind,
    run: usize,
    seed: u64,
    iterations: usize,
    population: usize,
    validate_solution: bool,
) -> Result<RawRow, String> {
    let mut cfg = SolverConfig::for_algorithm(algorithm, seed);
    cfg.set_iterations(iterations);
    cfg.set_population(population);
    let started = Instant::now();
    let outcome = solve(inst, &cfg).map_err(|e| e.to_string())?;
    let seconds = started.elapsed().as_secs_f64();
    if validate_solution {
        let violations = validate::check(inst, &outcome.solution);
        if !violations.is_empty() {
            return Err(format!("solution failed validation: {}", violations[0]));
        }
    }
    Ok(RawRow {
        instance_id: instance_id.to_string(),
        algorithm: algorithm.name().to_string(),
        run,
        seed,
        m: outcome.fitness.open,
        fitness: outcome.fitness.primary,
        smoothness: objective::smoothness(&outcome.solution, inst.cycle_time()),
        workload: outcome.fitness.workload,
        seconds,
    })
}

/// Reads rows already present in a raw CSV (for crash resume).
pub fn read_raw_csv(path: &Path) -> Result<Vec<RawRow>, ExperimentError> {
    let file = std::fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Runs the plan, appending to `raw_csv` as cells complete. Rows for
/// (instance, algorithm, run) triples already present in the file are
/// kept and not recomputed; recomputed seeds are pure functions of the
/// plan's base seed, so a resumed table equals a fresh one.
pub fn run_experiment(
    plan: &ExperimentPlan,
    raw_csv: &Path,
) -> Result<ExperimentOutcome, ExperimentError> {
    plan.validate()?;

    let mut existing: Vec<RawRow> = Vec::new();
    let mut done: HashSet<(String, String, usize)> = HashSet::new();
    let fresh = !raw_csv.exists();
    if !fresh {
        existing = read_raw_csv(raw_csv)?;
        for row in &existing {
            done.insert((row.instance_id.clone(), row.algorithm.clone(), row.run));
        }
    }

    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(raw_csv)?;
    if fresh {
        writeln!(file, "{RAW_SCHEMA_COMMENT}")?;
        writeln!(
            file,
            "instance_id,algorithm,run,seed,m,fitness,smoothness,workload,seconds"
        )?;
        file.flush()?;
    }

    let mut outcome = ExperimentOutcome {
        rows: existing,
        failures: Vec::new(),
    };
    for (instance_idx, path) in plan.instances.iter().enumerate() {
        let manifest = InstanceManifest::load(path).map_err(|source| {
            ExperimentError::InstanceLoad {
                path: path.clone(),
                source,
            }
        })?;
        let inst = manifest
            .to_instance()
            .map_err(|source| ExperimentError::InstanceLoad {
                path: path.clone(),
                source,
            })?;
        for &algorithm in &plan.algorithms {
            let missing: Vec<usize> = (0..plan.runs_per_cell)
                .filter(|run| {
                    !done.contains(&(
                        manifest.id.clone(),
                        algorithm.name().to_string(),
                        *run,
                    ))
                })
                .collect();
            if missing.is_empty() {
                continue;
            }
            let results = map_indexed(missing.len(), |k| {
                let run = missing[k];
                let seed = run_seed(plan.base_seed, instance_idx, algorithm, run);
                (
                    run,
                    seed,
                    execute_run(
                        &inst,
                        &manifest.id,
                        algorithm,
                        run,
                        seed,
                        plan.iterations,
                        plan.population,
                        plan.validate_solutions,
                    ),
                )
            });
            let mut writer = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut file);
            for (run, seed, result) in results {
                match result {
                    Ok(row) => {
                        writer.serialize(&row)?;
                        outcome.rows.push(row);
                    }
                    Err(error) => outcome.failures.push(FailedRun {
                        instance_id: manifest.id.clone(),
                        algorithm: algorithm.name().to_string(),
                        run,
                        seed,
                        error,
                    }),
                }
            }
            writer.flush()?;
            drop(writer);
            file.flush()?;
        }
    }
    outcome
        .rows
        .sort_by(|a, b| (&a.instance_id, &a.algorithm, a.run).cmp(&(&b.instance_id, &b.algorithm, b.run)));
    Ok(outcome)
}

/// Pooled-CI data point for one (criterion, instance, algorithm) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CiPoint {
    pub criterion: String,
    pub instance_id: String,
    pub algorithm: String,
    pub samples: usize,
    pub pooled_mean: f64,
    pub ci_half_width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestMRow {
    pub instance_id: String,
    pub algorithm: String,
    pub runs: usize,
    pub best_m: usize,
    pub best_fitness: f64,
    pub best_workload: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnovaReportRow {
    pub criterion: String,
    pub instance_id: String,
    pub f_calculated: f64,
    pub f_ref: f64,
    pub f_ref_legacy: f64,
    /// F exceeds the recomputed 95% quantile.
    pub significant: bool,
    /// F exceeds the legacy threshold of 4.89.
    pub significant_legacy: bool,
}

/// Everything render_report writes, also returned for inspection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSummary {
    pub schema_version: u32,
    pub group_size: usize,
    pub best_m: Vec<BestMRow>,
    pub anova: Vec<AnovaReportRow>,
    pub ci_series: Vec<CiPoint>,
    pub failures: Vec<FailedRun>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub anova_details: Vec<(String, String, AnovaResult)>,
}

/// The two pooled comparison criteria.
const CRITERIA: [&str; 2] = ["smoothness", "workload"];

fn criterion_value(row: &RawRow, criterion: &str) -> f64 {
    match criterion {
        "smoothness" => row.smoothness,
        "workload" => row.workload,
        other => unreachable!("unknown criterion {other}"),
    }
}

/// Builds the report tables from raw rows: a best-m table, one ANOVA per
/// (criterion, instance) across algorithms on pooled sample means, and
/// the pooled-CI series. Instances or cells that cannot be pooled or
/// compared are skipped with a note.
pub fn build_report(
    rows: &[RawRow],
    failures: &[FailedRun],
    group_size: usize,
) -> Result<ReportSummary, ExperimentError> {
    let mut summary = ReportSummary {
        schema_version: SCHEMA_VERSION,
        group_size,
        best_m: Vec::new(),
        anova: Vec::new(),
        ci_series: Vec::new(),
        failures: failures.to_vec(),
        notes: vec![
            "pooled sample means are assumed normal; no normality test is applied".to_string(),
            format!(
                "significance uses the recomputed F(0.95) quantile; the legacy threshold {LEGACY_F_REF} is reported alongside"
            ),
        ],
        anova_details: Vec::new(),
    };

    let mut instances: Vec<String> = rows.iter().map(|r| r.instance_id.clone()).collect();
    instances.sort();
    instances.dedup();
    let mut algorithms: Vec<String> = rows.iter().map(|r| r.algorithm.clone()).collect();
    algorithms.sort();
    algorithms.dedup();

    for instance in &instances {
        for algorithm in &algorithms {
            let cell: Vec<&RawRow> = rows
                .iter()
                .filter(|r| &r.instance_id == instance && &r.algorithm == algorithm)
                .collect();
            if cell.is_empty() {
                continue;
            }
            let best = cell
                .iter()
                .min_by(|a, b| {
                    (a.m, a.fitness, a.workload)
                        .partial_cmp(&(b.m, b.fitness, b.workload))
                        .unwrap()
                })
                .unwrap();
            summary.best_m.push(BestMRow {
                instance_id: instance.clone(),
                algorithm: algorithm.clone(),
                runs: cell.len(),
                best_m: best.m,
                best_fitness: best.fitness,
                best_workload: best.workload,
            });
        }

        for criterion in CRITERIA {
            let mut groups: Vec<Vec<f64>> = Vec::new();
            let mut pooled_ok = true;
            for algorithm in &algorithms {
                let values: Vec<f64> = rows
                    .iter()
                    .filter(|r| &r.instance_id == instance && &r.algorithm == algorithm)
                    .map(|r| criterion_value(r, criterion))
                    .collect();
                if values.is_empty() {
                    continue;
                }
                match pool_samples(&values, group_size) {
                    Ok(means) => groups.push(means),
                    Err(e) => {
                        summary.notes.push(format!(
                            "{instance}/{algorithm}/{criterion}: not pooled ({e})"
                        ));
                        pooled_ok = false;
                    }
                }
            }
            if !pooled_ok || groups.len() < 2 {
                continue;
            }
            let anova = one_way_anova(&groups)?;
            summary.anova.push(AnovaReportRow {
                criterion: criterion.to_string(),
                instance_id: instance.clone(),
                f_calculated: anova.f_calculated,
                f_ref: anova.f_ref,
                f_ref_legacy: LEGACY_F_REF,
                significant: anova.f_calculated > anova.f_ref,
                significant_legacy: anova.f_calculated > LEGACY_F_REF,
            });
            debug_assert_eq!(anova.group_means.len(), groups.len());
            let mut group_iter = 0;
            for algorithm in &algorithms {
                let values: Vec<f64> = rows
                    .iter()
                    .filter(|r| &r.instance_id == instance && &r.algorithm == algorithm)
                    .map(|r| criterion_value(r, criterion))
                    .collect();
                if values.is_empty() {
                    continue;
                }
                summary.ci_series.push(CiPoint {
                    criterion: criterion.to_string(),
                    instance_id: instance.clone(),
                    algorithm: algorithm.clone(),
                    samples: groups[group_iter].len(),
                    pooled_mean: anova.group_means[group_iter],
                    ci_half_width: anova.ci_half_widths[group_iter],
                });
                group_iter += 1;
            }
            summary
                .anova_details
                .push((criterion.to_string(), instance.clone(), anova));
        }
    }
    Ok(summary)
}

/// Writes the report files: `best_m.csv`, `anova_f.csv`,
/// `ci_series.csv` and `summary.json`.
pub fn render_report(summary: &ReportSummary, out_dir: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(out_dir)?;

    let mut file = std::fs::File::create(out_dir.join("best_m.csv"))?;
    writeln!(file, "{REPORT_SCHEMA_COMMENT}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(["instance_id", "algorithm", "runs", "best_m", "best_fitness", "best_workload"])?;
    for row in &summary.best_m {
        w.serialize(row)?;
    }
    w.flush()?;

    let mut file = std::fs::File::create(out_dir.join("anova_f.csv"))?;
    writeln!(file, "{REPORT_SCHEMA_COMMENT}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record([
        "criterion",
        "instance_id",
        "f_calculated",
        "f_ref",
        "f_ref_legacy",
        "significant",
        "significant_legacy",
    ])?;
    for row in &summary.anova {
        w.serialize(row)?;
    }
    w.flush()?;

    let mut file = std::fs::File::create(out_dir.join("ci_series.csv"))?;
    writeln!(file, "{REPORT_SCHEMA_COMMENT}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record([
        "criterion",
        "instance_id",
        "algorithm",
        "samples",
        "pooled_mean",
        "ci_half_width",
    ])?;
    for row in &summary.ci_series {
        w.serialize(row)?;
    }
    w.flush()?;

    let json = serde_json::to_string_pretty(summary)? + "\n";
    std::fs::write(out_dir.join("summary.json"), json)?;
    Ok(())
}
