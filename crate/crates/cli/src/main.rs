//! `mfcollab`: simulate, evaluate, estimate and analyse the collaboration
//! model from the command line.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags, unknown or
//! invalid configuration), 1 on runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Seed used when neither the config nor `--seed` provides one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "mfcollab", version, about = "Mean-field model of academic collaboration")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = "mfcollab-out")]
    out: PathBuf,

    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print the files written (-v) and timings (-vv) to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

/// Where the experiment config comes from and how it is amended.
#[derive(Debug, Args, Clone, Default)]
pub struct ConfigOpts {
    /// TOML experiment config.
    #[arg(long, conflicts_with = "name")]
    config: Option<PathBuf>,

    /// Builtin config (fig2 … fig11).
    #[arg(long)]
    name: Option<String>,

    /// Override a config key, e.g. `--set law.p=0.02`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Master seed; overrides the config's.
    #[arg(long)]
    seed: Option<u64>,

    /// Poisson tail mass dropped by truncated series; overrides the config's.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one replicate: timeline, co-author sets and yearly indices.
    Simulate(SimulateArgs),
    /// Exact quantities: H_t/G_t, small-window limits, expected co-author
    /// counts and expected yearly indices.
    Theory(TheoryArgs),
    /// Estimate the co-authorship law and the intensity from one run.
    Estimate(EstimateArgs),
    /// Monte Carlo experiment: per-year mean and standard error of the indices.
    Experiment(ExperimentArgs),
    /// Analyse an arXiv metadata snapshot (JSON lines).
    Arxiv(ArxivArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    config: ConfigOpts,

    /// Replicate index; replicate r of an experiment with the same seed.
    #[arg(long, default_value_t = 0)]
    replicate: u64,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    config: ConfigOpts,

    /// Times at which H_t, G_t and the small-window limits are evaluated;
    /// default the middle of the horizon.
    #[arg(long = "at", value_delimiter = ',')]
    at: Vec<f64>,

    /// Largest co-author count k in the limits table.
    #[arg(long, default_value_t = 3)]
    k_max: usize,

    /// Length of the expected co-author curve (linear laws).
    #[arg(long)]
    n_max: Option<usize>,

    /// Skip G_t and the covariance limits.
    #[arg(long)]
    no_joint: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    config: ConfigOpts,

    /// Run CSV (as written by `simulate`); default: simulate one replicate.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Replicate simulated when no input is given.
    #[arg(long, default_value_t = 0)]
    replicate: u64,

    /// Prior joint-paper counts k of the F̂_n(k) series.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [0usize, 1])]
    ks: Vec<usize>,

    /// Kernel bandwidth (months) of the intensity estimate; no estimate
    /// without it.
    #[arg(long)]
    bandwidth: Option<f64>,

    /// Intensity kernel: box, triangular or epanechnikov.
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,

    /// Grid step (months) of the intensity estimate.
    #[arg(long, default_value_t = 1.0)]
    step: f64,

    /// Run a coverage study over pool sizes instead (comma-separated L).
    #[arg(long, value_delimiter = ',')]
    study_authors: Vec<usize>,

    /// Event index of the study.
    #[arg(long, default_value_t = 5)]
    study_n: usize,

    /// Study replicates; default the config's.
    #[arg(long)]
    study_replicates: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    config: ConfigOpts,

    /// Run every builtin into its own subdirectory.
    #[arg(long, conflicts_with_all = ["config", "name"])]
    all: bool,
}

#[derive(Debug, Args)]
pub struct ArxivArgs {
    /// Metadata snapshot, one JSON object per line.
    #[arg(long)]
    input: PathBuf,

    /// `physics` or comma-separated category patterns (`cs`, `math.*`, …).
    #[arg(long, default_value = "cs")]
    discipline: String,

    /// Number of most productive authors followed individually.
    #[arg(long, default_value_t = 100)]
    top_k: usize,

    /// Authors sampled for the count correlations.
    #[arg(long, default_value_t = 1000)]
    sample_size: usize,

    /// Window length (months) of the count correlations.
    #[arg(long, default_value_t = 12)]
    delta_months: u32,

    /// Prior joint-paper counts k of the F̂_n(k) series.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [0usize, 1, 2, 3])]
    ks: Vec<usize>,

    /// Candidate universe for k = 0: event-month or global-max.
    #[arg(long, default_value = "event-month")]
    universe: String,

    /// Seed of the correlation sample.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Intervals have level 1 − level.
    #[arg(long, default_value_t = 0.05)]
    level: f64,
}

/// Marks an error as a usage error (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn is_usage(err: &anyhow::Error) -> bool {
    use mfcollab::Error as E;
    let core = |e: &E| matches!(e, E::Usage(_) | E::Validation(_) | E::UnknownConfig(_) | E::Config(_));
    err.chain().any(|cause| {
        if cause.is::<UsageError>() {
            return true;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return core(e);
        }
        match cause.downcast_ref::<mfcollab_arxiv::Error>() {
            Some(mfcollab_arxiv::Error::Usage(_)) => true,
            Some(mfcollab_arxiv::Error::Model(e)) => core(e),
            _ => false,
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = commands::Context::new(cli.global.out, cli.global.verbose);
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(&ctx, &a),
        Command::Theory(a) => commands::theory(&ctx, &a),
        Command::Estimate(a) => commands::estimate(&ctx, &a),
        Command::Experiment(a) => commands::experiment(&ctx, &a),
        Command::Arxiv(a) => commands::arxiv(&ctx, &a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").trim_end());
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
