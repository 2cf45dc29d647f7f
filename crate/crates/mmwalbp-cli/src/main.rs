//! Command line front end: instance generation, solving, experiment
//! orchestration, report rendering and solution validation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible
//! solution or instance, 4 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use mmwalbp::benchgen::{generate, GenError, GenSpec};
use mmwalbp::decoder::{render_gantt, DecodeError};
use mmwalbp::experiment::{
    build_report, read_raw_csv, render_report, run_experiment, ExperimentError, ExperimentPlan,
};
use mmwalbp::manifest::{InstanceManifest, SolutionFile, SCHEMA_VERSION};
use mmwalbp::optimizer::{
    solve, write_trace_csv, AlgorithmKind, FssConfig, PsoConfig, SolverConfig, SolverError,
};
use mmwalbp::{parallel, validate};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }

    fn infeasible(message: impl Into<String>) -> Self {
        Self { code: EXIT_INFEASIBLE, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self { code: EXIT_INTERNAL, message: message.into() }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidConfig(_) => CliError::usage(e.to_string()),
            SolverError::Decode(DecodeError::InfeasibleTask { .. }) => {
                CliError::infeasible(e.to_string())
            }
            SolverError::Decode(_) => CliError::internal(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::InvalidPlan(_) => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "mmwalbp",
    about = "Mixed-model workplace time-dependent assembly line balancing (type 1): \
             instance generation, swarm solvers and a statistical benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive a mixed-model instance manifest from a single-model .alb file
    Generate(GenerateArgs),
    /// Solve an instance manifest with one algorithm
    Solve(SolveArgs),
    /// Run repeated seeded experiments over instances and algorithms
    Experiment(ExperimentArgs),
    /// Pool a raw results table and render the comparison reports
    Report(ReportArgs),
    /// Check a solution file against its instance manifest
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Source .alb file
    #[arg(long)]
    source: PathBuf,
    /// Number of models (4 or 50 unless --plan is given)
    #[arg(long, default_value_t = 4)]
    models: usize,
    /// Master seed; zone/incidence/time seeds derive from it
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit production plan, e.g. 50,50,50,50 (overrides --models)
    #[arg(long, value_delimiter = ',')]
    plan: Option<Vec<u64>>,
    #[arg(long, default_value_t = 1000.0)]
    cycle_time: f64,
    #[arg(long, default_value_t = 3)]
    max_workplaces: usize,
    /// Allow tasks that appear in no model (zero mean time)
    #[arg(long)]
    allow_uncovered_tasks: bool,
    /// Output manifest path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolverParamArgs {
    /// Population size (fish / particles)
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    step_ind: Option<f64>,
    #[arg(long)]
    step_vol: Option<f64>,
    #[arg(long)]
    w_scale: Option<f64>,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    alpha_decay: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    /// JSON file with the same keys as the config structs; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance manifest (JSON)
    instance: PathBuf,
    /// fss-v | fss-sar | pso
    #[arg(long, default_value = "fss-sar")]
    algo: AlgorithmKind,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    /// RNG seed (drawn and printed when omitted)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    params: SolverParamArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Instance manifests
    #[arg(long, value_delimiter = ',', required = true)]
    instances: Vec<PathBuf>,
    /// Comma-separated algorithms
    #[arg(long, value_delimiter = ',', default_values_t = [AlgorithmKind::FssVanilla, AlgorithmKind::FssSar, AlgorithmKind::Pso])]
    algos: Vec<AlgorithmKind>,
    #[arg(long, default_value_t = 450)]
    runs: usize,
    #[arg(long, default_value_t = 15)]
    group_size: usize,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 30)]
    population: usize,
    /// Base seed (drawn and printed when omitted)
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the per-run solution validation
    #[arg(long)]
    no_validate: bool,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Raw results CSV produced by `experiment`
    #[arg(long)]
    raw: PathBuf,
    #[arg(long, default_value_t = 15)]
    group_size: usize,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    parallel::init_workers_from_env();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Report(args) => cmd_report(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn drawn_seed(seed: Option<u64>, label: &str) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::rng().random();
            println!("{label}: {s}");
            s
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let seed = drawn_seed(args.seed, "seed");
    let mut spec = GenSpec::standard(args.source, args.models, seed);
    match args.plan {
        Some(plan) => {
            if plan.is_empty() {
                return Err(CliError::usage("--plan must not be empty"));
            }
            spec.production = plan;
        }
        None => {
            if args.models != 4 && args.models != 50 {
                return Err(CliError::usage(format!(
                    "--models {} is not a standard production level (use 4 or 50, or give --plan)",
                    args.models
                )));
            }
        }
    }
    spec.cycle_time = args.cycle_time;
    spec.max_workplaces = args.max_workplaces;
    spec.require_coverage = !args.allow_uncovered_tasks;
    let out = generate(&spec)?;
    out.manifest
        .save(&args.out)
        .map_err(|e| CliError::data(e.to_string()))?;
    println!(
        "wrote {} (n={}, workload {:.2}, workload/cycle {:.2})",
        args.out.display(),
        out.manifest.tasks.len(),
        out.manifest.workload,
        out.manifest.workload_cycle_ratio
    );
    Ok(())
}

/// Optional override file mirroring the solver config fields.
#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SolverFileConfig {
    population: Option<usize>,
    iterations: Option<usize>,
    step_ind_initial: Option<f64>,
    step_vol_initial: Option<f64>,
    w_scale: Option<f64>,
    alpha0: Option<f64>,
    alpha_decay_rate: Option<f64>,
    individual_rand_per_dim: Option<bool>,
    volitive_rand_per_dim: Option<bool>,
    c1: Option<f64>,
    c2: Option<f64>,
}

fn build_solver_config(
    algo: AlgorithmKind,
    seed: u64,
    iters: usize,
    params: &SolverParamArgs,
) -> Result<SolverConfig, CliError> {
    let file_cfg: SolverFileConfig = match &params.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        }
        None => SolverFileConfig::default(),
    };
    let population = params.population.or(file_cfg.population);
    let cfg = match algo {
        AlgorithmKind::FssVanilla | AlgorithmKind::FssSar => {
            let mut c = if algo == AlgorithmKind::FssSar {
                FssConfig::sar(seed)
            } else {
                FssConfig::vanilla(seed)
            };
            c.iterations = file_cfg.iterations.unwrap_or(iters);
            if let Some(v) = population {
                c.population = v;
            }
            if let Some(v) = params.step_ind.or(file_cfg.step_ind_initial) {
                c.step_ind_initial = v;
            }
            if let Some(v) = params.step_vol.or(file_cfg.step_vol_initial) {
                c.step_vol_initial = v;
            }
            if let Some(v) = params.w_scale.or(file_cfg.w_scale) {
                c.w_scale = v;
            }
            if let Some(v) = params.alpha0.or(file_cfg.alpha0) {
                c.alpha0 = v;
            }
            if let Some(v) = params.alpha_decay.or(file_cfg.alpha_decay_rate) {
                c.alpha_decay_rate = v;
            }
            if let Some(v) = file_cfg.individual_rand_per_dim {
                c.individual_rand_per_dim = v;
            }
            if let Some(v) = file_cfg.volitive_rand_per_dim {
                c.volitive_rand_per_dim = v;
            }
            SolverConfig::Fss(c)
        }
        AlgorithmKind::Pso => {
            let mut c = PsoConfig::new(seed);
            c.iterations = file_cfg.iterations.unwrap_or(iters);
            if let Some(v) = population {
                c.population = v;
            }
            if let Some(v) = params.c1.or(file_cfg.c1) {
                c.c1 = v;
            }
            if let Some(v) = params.c2.or(file_cfg.c2) {
                c.c2 = v;
            }
            SolverConfig::Pso(c)
        }
    };
    Ok(cfg)
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let manifest =
        InstanceManifest::load(&args.instance).map_err(|e| CliError::data(e.to_string()))?;
    let inst = manifest
        .to_instance()
        .map_err(|e| CliError::data(e.to_string()))?;
    let seed = drawn_seed(args.seed, "seed");
    let cfg = build_solver_config(args.algo, seed, args.iters, &args.params)?;
    let outcome = solve(&inst, &cfg).map_err(|e| match &e {
        SolverError::Decode(DecodeError::InfeasibleTask { task, .. }) => CliError::infeasible(
            format!("task {task} cannot be scheduled: {e}"),
        ),
        _ => CliError::from(e),
    })?;

    std::fs::create_dir_all(&args.out_dir)?;
    let solution_path = args.out_dir.join("solution.json");
    SolutionFile {
        schema_version: SCHEMA_VERSION,
        instance_id: manifest.id.clone(),
        algorithm: args.algo.name().to_string(),
        seed,
        iterations: args.iters,
        solution: outcome.solution.clone(),
    }
    .save(&solution_path)
    .map_err(|e| CliError::data(e.to_string()))?;
    std::fs::write(args.out_dir.join("gantt.txt"), render_gantt(&outcome.solution, &inst))?;
    let trace_file = std::fs::File::create(args.out_dir.join("trace.csv"))?;
    write_trace_csv(&outcome.trace, trace_file)?;

    println!(
        "{}: m={} fitness={:.4} workload={:.2} ({} evaluations)",
        manifest.id, outcome.fitness.open, outcome.fitness.primary, outcome.fitness.workload,
        outcome.evaluations
    );
    println!("wrote {}", solution_path.display());
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let seed = drawn_seed(args.seed, "base seed");
    let plan = ExperimentPlan {
        instances: args.instances,
        algorithms: args.algos,
        runs_per_cell: args.runs,
        group_size: args.group_size,
        iterations: args.iters,
        population: args.population,
        base_seed: seed,
        validate_solutions: !args.no_validate,
    };
    std::fs::create_dir_all(&args.out_dir)?;
    let raw_path = args.out_dir.join("raw.csv");
    let outcome = run_experiment(&plan, &raw_path)?;
    println!(
        "{} rows in {} ({} failures)",
        outcome.rows.len(),
        raw_path.display(),
        outcome.failures.len()
    );
    let summary = build_report(&outcome.rows, &outcome.failures, plan.group_size)?;
    render_report(&summary, &args.out_dir)?;
    println!("reports in {}", args.out_dir.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let rows = read_raw_csv(&args.raw)?;
    let summary = build_report(&rows, &[], args.group_size)?;
    render_report(&summary, &args.out_dir)?;
    for row in &summary.anova {
        println!(
            "{} / {}: F = {:.2} (ref {:.2}, legacy {:.2}) -> {}",
            row.instance_id,
            row.criterion,
            row.f_calculated,
            row.f_ref,
            row.f_ref_legacy,
            if row.significant { "different" } else { "inconclusive" }
        );
    }
    println!("reports in {}", args.out_dir.display());
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let manifest =
        InstanceManifest::load(&args.instance).map_err(|e| CliError::data(e.to_string()))?;
    let inst = manifest
        .to_instance()
        .map_err(|e| CliError::data(e.to_string()))?;
    let solution =
        SolutionFile::load(&args.solution).map_err(|e| CliError::data(e.to_string()))?;
    if solution.instance_id != manifest.id {
        println!(
            "note: solution was produced for {:?}, manifest is {:?}",
            solution.instance_id, manifest.id
        );
    }
    let violations = validate::check(&inst, &solution.solution);
    if violations.is_empty() {
        println!("valid: {} open workplaces, fitness {:.4}",
            solution.solution.open_workplaces, solution.solution.fitness.primary);
        Ok(())
    } else {
        for violation in &violations {
            println!("violation: {violation}");
        }
        Err(CliError::infeasible(format!(
            "{} violation(s) found",
            violations.len()
        )))
    }
}
