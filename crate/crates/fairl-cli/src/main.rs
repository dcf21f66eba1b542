//! `fairl`: generate environments, train reward learners, run the
//! experiment sweeps, and score recovered rewards.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fairl_cli::config::{
    EnvSpec, ExperimentConfig, GenerateConfig, LearnerConfig, TrainJobConfig,
};
use fairl_cli::experiments::{
    accuracy::run_accuracy, cop::run_cop, demos_from_truth, extension::run_extension,
    scalability::run_scalability,
};
use fairl_cli::io::{read_json, read_reward_vector, write_json, Checkpoint};
use fairl_cli::table::{write_csv, ResultRow};
use fairl_core::envs::{cop, objectworld, EnvBundle};
use fairl_core::learn::TrainStep;
use fairl_core::metrics::pearson_correlation;

#[derive(Parser)]
#[command(
    name = "fairl",
    version,
    about = "Reward learning from demonstrations without an inner planning loop"
)]
struct Cli {
    /// Overrides the seed found in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing (default "out").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an environment bundle (dynamics, features, ground-truth
    /// reward) as JSON.
    Generate,
    /// Train one learner on one environment; writes checkpoint.json and a
    /// per-iteration trace.csv.
    Train,
    /// Run an experiment sweep; writes results.csv.
    Bench {
        #[arg(value_enum)]
        family: BenchFamily,
    },
    /// Run the instructed-motion benchmark; writes results.csv.
    Cop,
    /// Print the Pearson correlation between two reward JSON files.
    Score { left: PathBuf, right: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BenchFamily {
    Accuracy,
    Scalability,
    Extension,
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Generate => generate(&cli, &out_dir),
        Command::Train => train(&cli, &out_dir),
        Command::Bench { family } => bench(&cli, &out_dir, *family),
        Command::Cop => cop_bench(&cli, &out_dir),
        Command::Score { left, right } => score(left, right),
    }
}

fn require_config(cli: &Cli) -> Result<&Path> {
    cli.config
        .as_deref()
        .ok_or_else(|| anyhow!("this subcommand needs --config <json path>"))
}

fn build_env(spec: &EnvSpec, seed: u64) -> Result<EnvBundle> {
    match spec {
        EnvSpec::Objectworld(cfg) => {
            objectworld::generate(cfg, seed).context("generating objectworld")
        }
        EnvSpec::Cop(cfg) => {
            cop::generate(cfg, seed).context("generating the instructed-motion environment")
        }
    }
}

fn generate(cli: &Cli, out_dir: &Path) -> Result<()> {
    let mut cfg: GenerateConfig = match &cli.config {
        Some(path) => read_json(path)?,
        None => GenerateConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let bundle = build_env(&cfg.env, cfg.seed)?;
    let path = out_dir.join("bundle.json");
    write_json(&path, &bundle)?;
    println!(
        "wrote {} ({} states, {} actions, seed {})",
        path.display(),
        bundle.mdp.n_states(),
        bundle.mdp.n_actions(),
        cfg.seed
    );
    Ok(())
}

fn train(cli: &Cli, out_dir: &Path) -> Result<()> {
    let mut cfg: TrainJobConfig = match &cli.config {
        Some(path) => read_json(path)?,
        None => TrainJobConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.sampling.validate()?;

    let bundle = build_env(&cfg.env, cfg.seed)?;
    let demos = demos_from_truth(
        &bundle,
        cfg.sampling.b,
        cfg.sampling.trajectories,
        cfg.sampling.horizon,
        cfg.seed.wrapping_add(1),
    )?;

    // Per-iteration trace: objective, gradient norm, cumulative seconds.
    let started = Instant::now();
    let mut trace = String::from("iteration,loglik,grad_norm,seconds\n");
    let observe = |step: TrainStep| {
        trace.push_str(&format!(
            "{},{},{},{:.6}\n",
            step.iteration,
            step.objective,
            step.grad_norm,
            started.elapsed().as_secs_f64()
        ));
    };

    let checkpoint = run_train_job(&cfg, &bundle, &demos, observe)?;

    let trace_path = out_dir.join("trace.csv");
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    std::fs::write(&trace_path, &trace)
        .with_context(|| format!("writing {}", trace_path.display()))?;

    let checkpoint_path = out_dir.join("checkpoint.json");
    write_json(&checkpoint_path, &checkpoint)?;

    let corr = pearson_correlation(&checkpoint.reward, &bundle.true_reward)
        .map(|c| c.value)
        .unwrap_or(f64::NAN);
    println!(
        "wrote {} and {} ({} iterations, final loglik {:.6}, truth correlation {corr:.4})",
        checkpoint_path.display(),
        trace_path.display(),
        checkpoint.report.iterations,
        checkpoint
            .report
            .loglik_history
            .last()
            .copied()
            .unwrap_or(f64::NAN),
    );
    Ok(())
}

fn run_train_job(
    cfg: &TrainJobConfig,
    bundle: &EnvBundle,
    demos: &[fairl_core::Trajectory],
    observe: impl FnMut(TrainStep),
) -> Result<Checkpoint> {
    // The sweeps derive per-cell seeds; a single train job uses the config
    // seed directly for the learner stream.
    let mut observe = observe;
    let (params, result) = match &cfg.learner {
        LearnerConfig::Nn(spec) => {
            let spec = fairl_core::learn::NnSpec {
                hidden_layers: spec.hidden_layers.clone(),
                seed: cfg.seed,
            };
            let d = bundle.features.dim();
            let mut sizes = vec![d];
            match &spec.hidden_layers {
                Some(h) => sizes.extend_from_slice(h),
                None => sizes.extend_from_slice(&[d, d, d]),
            }
            sizes.push(1);
            let mut net = fairl_core::approx::Mlp::new(&sizes, spec.seed)?;
            let result = fairl_core::learn::train(
                &mut net,
                &bundle.mdp,
                &bundle.features,
                demos,
                &cfg.train,
                &mut observe,
            )?;
            (fairl_core::VrFunction::params(&net), result)
        }
        LearnerConfig::Gp(spec) => {
            let mut gp = fairl_core::approx::SparseGp::with_random_support(
                &bundle.features,
                &spec.gp,
                cfg.seed,
            )?;
            let result = fairl_core::learn::train(
                &mut gp,
                &bundle.mdp,
                &bundle.features,
                demos,
                &cfg.train,
                &mut observe,
            )?;
            (fairl_core::VrFunction::params(&gp), result)
        }
    };
    Ok(Checkpoint {
        learner: cfg.learner.label().to_string(),
        seed: cfg.seed,
        train: cfg.train.clone(),
        params,
        reward: result.reward,
        value: result.v,
        report: result.report,
    })
}

fn load_experiment(cli: &Cli) -> Result<ExperimentConfig> {
    let path = require_config(cli)?;
    let mut cfg: ExperimentConfig = read_json(path)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    Ok(cfg)
}

fn finish_sweep(out_dir: &Path, rows: &[ResultRow]) -> Result<()> {
    let path = out_dir.join("results.csv");
    write_csv(&path, rows)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

fn bench(cli: &Cli, out_dir: &Path, family: BenchFamily) -> Result<()> {
    let cfg = load_experiment(cli)?;
    let rows = match (family, cfg) {
        (BenchFamily::Accuracy, ExperimentConfig::Accuracy(c)) => run_accuracy(&c)?,
        (BenchFamily::Scalability, ExperimentConfig::Scalability(c)) => run_scalability(&c)?,
        (BenchFamily::Extension, ExperimentConfig::Extension(c)) => run_extension(&c)?,
        (_, other) => bail!(
            "config file is for the {} experiment, which does not match `bench {:?}`",
            other.kind(),
            family
        ),
    };
    finish_sweep(out_dir, &rows)
}

fn cop_bench(cli: &Cli, out_dir: &Path) -> Result<()> {
    let cfg = load_experiment(cli)?;
    let kind = cfg.kind();
    let ExperimentConfig::Cop(c) = cfg else {
        bail!("config file is for the {kind} experiment, not cop");
    };
    let rows = run_cop(&c)?;
    finish_sweep(out_dir, &rows)
}

fn score(left: &Path, right: &Path) -> Result<()> {
    let a = read_reward_vector(left)?;
    let b = read_reward_vector(right)?;
    let corr = pearson_correlation(&a, &b)?;
    println!("{:?}", corr.value);
    Ok(())
}
