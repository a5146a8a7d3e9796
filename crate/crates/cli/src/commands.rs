use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context as _, Result};
use mfcollab::closed_form::{
    expected_coauthors_closed_form, expected_coauthors_recursion, expected_index_table, ht,
    ht_gt, theorem1_limits, TheoryLimits,
};
use mfcollab::collab_model::{attach_event_times, simulate_coauthor_sets_with, LawKind, SimulationRun};
use mfcollab::estimators::{estimate_f_series, estimate_linear, write_estimate_series, EventSnapshot};
use mfcollab::experiments::*;
use mfcollab::indices::{index_value, yearly_window_counts, Phi};
use mfcollab::process::{estimate_intensity_kernel, sample_event_times_with, Kernel};
use mfcollab::seed::replicate_rng;
use mfcollab_arxiv::pipeline::{run_pipeline, PipelineOptions};
use mfcollab_arxiv::stats::UniverseRule;
use mfcollab_arxiv::Discipline;

use crate::{ArxivArgs, ConfigOpts, EstimateArgs, ExperimentArgs, SimulateArgs, TheoryArgs, UsageError};

pub struct Context {
    out: PathBuf,
    verbose: u8,
    started: Instant,
}

impl Context {
    pub fn new(out: PathBuf, verbose: u8) -> Self {
        Self {
            out,
            verbose,
            started: Instant::now(),
        }
    }

    fn create_in(&self, dir: &Path, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.note(&path);
        Ok(BufWriter::new(file))
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        self.create_in(&self.out, name)
    }

    fn note(&self, path: &Path) {
        match self.verbose {
            0 => {}
            1 => eprintln!("wrote {}", path.display()),
            _ => eprintln!(
                "wrote {} ({:.2}s)",
                path.display(),
                self.started.elapsed().as_secs_f64()
            ),
        }
    }

    fn info(&self, msg: &str) {
        if self.verbose > 0 {
            eprintln!("{msg}");
        }
    }
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn config_text(opts: &ConfigOpts) -> Result<String> {
    match (&opts.config, &opts.name) {
        (Some(path), _) => {
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
        }
        (None, Some(name)) => Ok(builtin_config_toml(name)?),
        (None, None) => Err(UsageError("give --config <file> or --name <builtin>".into()).into()),
    }
}

fn overrides(opts: &ConfigOpts) -> Vec<String> {
    let mut all = opts.overrides.clone();
    if let Some(seed) = opts.seed {
        all.push(format!("seed={seed}"));
    }
    if let Some(eps) = opts.epsilon {
        all.push(format!("epsilon={eps:?}"));
    }
    all
}

fn load_config(opts: &ConfigOpts) -> Result<ExperimentConfig> {
    let text = config_text(opts)?;
    Ok(ExperimentConfig::from_toml_with_overrides(&text, &overrides(opts))?)
}

fn year_windows(cfg: &ExperimentConfig) -> Vec<(f64, f64)> {
    let years = (cfg.horizon / cfg.year_length).ceil() as usize;
    (0..years)
        .map(|j| {
            let s = j as f64 * cfg.year_length;
            (s, ((j + 1) as f64 * cfg.year_length).min(cfg.horizon))
        })
        .collect()
}

fn simulate_replicate(cfg: &ExperimentConfig, replicate: u64) -> Result<SimulationRun> {
    let f = cfg.intensity()?;
    let law = cfg.law()?;
    let mut rng = replicate_rng(cfg.seed, replicate);
    let timeline = sample_event_times_with(&f, cfg.horizon, &mut rng)?;
    let run = simulate_coauthor_sets_with(&law, timeline.len(), &mut rng)?;
    Ok(attach_event_times(run, &timeline))
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let run = simulate_replicate(&cfg, args.replicate)?;

    let w = ctx.create("timeline.csv")?;
    run.timeline().expect("simulated runs carry event times").write_csv(w)?;
    run.write_csv(ctx.create("run.csv")?)?;

    let mut w = csv::Writer::from_writer(ctx.create("index_series.csv")?);
    w.write_record(["year", "start", "end", "papers", "ci", "dc", "cc"])?;
    for (year, counts) in yearly_window_counts(&run, cfg.year_length)?.iter().enumerate() {
        let mut row = vec![
            year.to_string(),
            counts.start.to_string(),
            counts.end.to_string(),
            counts.n_total.to_string(),
        ];
        row.extend(Phi::STANDARD.iter().map(|phi| opt(index_value(counts, phi))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn theory(ctx: &Context, args: &TheoryArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let f = cfg.intensity()?;
    let law = cfg.law()?;
    let eps = cfg.epsilon;
    let times = if args.at.is_empty() {
        vec![cfg.horizon / 2.0]
    } else {
        args.at.clone()
    };

    let limits = times
        .iter()
        .map(|&t| {
            if args.no_joint {
                ht(&law, &f, t, eps)
            } else {
                ht_gt(&law, &f, t, eps)
            }
        })
        .collect::<mfcollab::Result<Vec<TheoryLimits>>>()?;

    let mut w = csv::Writer::from_writer(ctx.create("ht_gt.csv")?);
    w.write_record(["quantity", "t", "k", "k_prime", "value"])?;
    for lim in &limits {
        let t = lim.t.to_string();
        for (k, v) in lim.h.iter().enumerate() {
            w.write_record(["H", &t, &k.to_string(), "", &v.to_string()])?;
        }
        if let Some(g) = &lim.g {
            for (k, row) in g.iter().enumerate() {
                for (kp, v) in row.iter().enumerate() {
                    w.write_record(["G", &t, &k.to_string(), &kp.to_string(), &v.to_string()])?;
                }
            }
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(ctx.create("small_window_limits.csv")?);
    w.write_record([
        "t",
        "rate",
        "mass",
        "tail",
        "k",
        "k_prime",
        "mean_var_rate",
        "cov_coeff",
        "corr_coeff",
    ])?;
    let k_max = args.k_max.min(law.authors());
    for lim in &limits {
        for k in 0..=k_max {
            let partners = if args.no_joint { k..=k } else { k..=k_max };
            for kp in partners {
                let l = theorem1_limits(lim, k, kp)?;
                w.write_record([
                    lim.t.to_string(),
                    lim.rate.to_string(),
                    lim.mass.to_string(),
                    lim.tail.to_string(),
                    k.to_string(),
                    kp.to_string(),
                    l.mean_var_rate.to_string(),
                    opt(l.cov_coeff),
                    opt(l.corr_coeff),
                ])?;
            }
        }
    }
    w.flush()?;

    match law.kind() {
        LawKind::Linear(params) => {
            let n_max = args
                .n_max
                .or(cfg.outputs.coauthor_curve)
                .unwrap_or(30)
                .min(params.len());
            let recursion = expected_coauthors_recursion(params, law.authors(), n_max)?;
            let mut w = csv::Writer::from_writer(ctx.create("coauthor_curve.csv")?);
            w.write_record(["n", "recursion", "closed_form"])?;
            for (i, r) in recursion.iter().enumerate() {
                let closed = expected_coauthors_closed_form(params, law.authors(), i + 1)?;
                w.write_record([(i + 1).to_string(), r.to_string(), closed.to_string()])?;
            }
            w.flush()?;
        }
        _ => ctx.info("law is not linear in the prior count; no co-author curve"),
    }

    let windows = year_windows(&cfg);
    let table = expected_index_table(&f, &law, &Phi::STANDARD, &windows, eps)?;
    let mut w = csv::Writer::from_writer(ctx.create("expected_index.csv")?);
    w.write_record(["year", "start", "end", "index", "unconditional", "given_nonempty", "tail"])?;
    for (year, (row, (s, t))) in table.iter().zip(&windows).enumerate() {
        for (e, phi) in row.iter().zip(&Phi::STANDARD) {
            w.write_record([
                year.to_string(),
                s.to_string(),
                t.to_string(),
                phi.short_name().to_string(),
                e.unconditional.to_string(),
                opt(e.given_nonempty),
                e.tail.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn estimate(ctx: &Context, args: &EstimateArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let law = cfg.law()?;

    if !args.study_authors.is_empty() {
        let reps = args.study_replicates.unwrap_or(cfg.replicates);
        let mut rows = Vec::new();
        for &k in &args.ks {
            rows.extend(run_estimator_study(
                law.kind(),
                args.study_n,
                k,
                &args.study_authors,
                reps,
                cfg.seed,
                cfg.level,
            )?);
        }
        return finish_study(ctx, &rows);
    }

    let run = match &args.input {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            SimulationRun::read_csv(std::io::BufReader::new(file), law.clone(), cfg.horizon)?
        }
        None => simulate_replicate(&cfg, args.replicate)?,
    };

    for &k in &args.ks {
        let series = estimate_f_series(&run, k, cfg.level)?;
        write_estimate_series(ctx.create(&format!("f_hat_k{k}.csv"))?, k, &series)?;
    }

    let mut w = csv::Writer::from_writer(ctx.create("linear_estimates.csv")?);
    w.write_record(["n", "a", "a_se", "a_lo", "a_hi", "b", "b_se", "b_lo", "b_hi"])?;
    for n in 2..=run.len() {
        let (a, b) = estimate_linear(&EventSnapshot::from_run(&run, n)?, cfg.level)?;
        w.write_record([
            n.to_string(),
            a.value.to_string(),
            opt(a.se),
            opt(a.interval.map(|i| i.0)),
            opt(a.interval.map(|i| i.1)),
            b.value.to_string(),
            opt(b.se),
            opt(b.interval.map(|i| i.0)),
            opt(b.interval.map(|i| i.1)),
        ])?;
    }
    w.flush()?;

    if let Some(h) = args.bandwidth {
        let kernel: Kernel = args.kernel.parse()?;
        if !(args.step > 0.0) {
            return Err(UsageError("--step must be positive".into()).into());
        }
        let timeline = run
            .timeline()
            .ok_or_else(|| UsageError("the run has no event times; cannot estimate the intensity".into()))?;
        let f = cfg.intensity()?;
        let mut w = csv::Writer::from_writer(ctx.create("intensity.csv")?);
        w.write_record(["t", "estimate", "rate"])?;
        let steps = (timeline.horizon() / args.step).floor() as usize;
        for i in 0..=steps {
            let t = i as f64 * args.step;
            let est = estimate_intensity_kernel(timeline, t, h, kernel)?;
            w.write_record([t.to_string(), est.to_string(), f.rate(t).to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn finish_study(ctx: &Context, rows: &[StudyRow]) -> Result<()> {
    if rows.iter().any(|r| r.low_replicates) {
        eprintln!(
            "warning: fewer than {LOW_REPLICATES} replicates; coverage figures are unreliable"
        );
    }
    write_study_csv(rows, ctx.create("study.csv")?)?;
    Ok(())
}

fn write_experiment(ctx: &Context, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
    let result = run_experiment(cfg)?;
    finish({
        let mut w = ctx.create_in(dir, "config.toml")?;
        w.write_all(cfg.to_toml_string()?.as_bytes())?;
        w
    })?;
    write_index_csv(&result, ctx.create_in(dir, "index.csv")?)?;
    write_replicates_csv(&result, ctx.create_in(dir, "replicates.csv")?)?;
    if !result.estimator_series.is_empty() {
        write_estimator_series_csv(&result, ctx.create_in(dir, "estimator_series.csv")?)?;
    }
    if !result.coauthor_curve.is_empty() {
        write_coauthor_curve_csv(&result, ctx.create_in(dir, "coauthor_curve.csv")?)?;
    }
    Ok(())
}

pub fn experiment(ctx: &Context, args: &ExperimentArgs) -> Result<()> {
    if args.all {
        for name in BUILTIN_NAMES {
            let text = builtin_config_toml(name)?;
            let cfg = ExperimentConfig::from_toml_with_overrides(&text, &overrides(&args.config))?;
            ctx.info(&format!("running {name}"));
            write_experiment(ctx, &ctx.out.join(name), &cfg)?;
        }
        return Ok(());
    }
    let cfg = load_config(&args.config)?;
    write_experiment(ctx, &ctx.out, &cfg)
}

pub fn arxiv(ctx: &Context, args: &ArxivArgs) -> Result<()> {
    let universe: UniverseRule = args.universe.parse()?;
    let opts = PipelineOptions {
        discipline: Discipline::parse(&args.discipline),
        top_k: args.top_k,
        ks: args.ks.clone(),
        universe,
        sample_size: args.sample_size,
        delta_months: args.delta_months,
        seed: args.seed,
        level: args.level,
    };
    let summary = run_pipeline(&args.input, &ctx.out, &opts)?;
    for path in &summary.written {
        ctx.note(path);
    }
    ctx.info(&format!(
        "{} records read, {} skipped, {} in the discipline, {} authors sampled",
        summary.stats.records,
        summary.stats.skipped(),
        summary.kept,
        summary.sampled
    ));
    Ok(())
}
