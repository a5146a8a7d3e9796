//! Config-driven Monte Carlo experiments.
//!
//! An experiment simulates independent replicates of the ego's publication
//! history on `[0, horizon]`, computes the three standard indices per year,
//! and reports the across-replicate mean and standard error next to the
//! exact expected index.
//!
//! Replicate `r` draws from [`replicate_rng`]`(seed, r)`, so results do not
//! depend on the number of threads.
//!
//! # Config schema (TOML)
//!
//! ```toml
//! name = "fig3"          # optional label
//! authors = 100          # L
//! horizon = 360.0        # months
//! replicates = 10
//! seed = 3
//! year_length = 12.0     # optional, default 12
//! epsilon = 1e-12        # optional, series truncation tolerance
//! level = 0.05           # optional, q of the 1 - q intervals
//!
//! [intensity]            # kind = constant | piecewise_constant | piecewise
//! kind = "constant"
//! rate = 0.5
//!
//! [law]                  # kind = constant | affine_in_count | affine_in_event
//! kind = "constant"      #        | linear | log_schedule | rows
//! p = 0.01
//!
//! [outputs]              # all optional
//! theory = true          # exact expected index columns
//! estimator_k = [0, 1]   # F̂_n(k) series averaged over replicates
//! estimator_n_max = 50
//! coauthor_curve = 30    # mean #C_n for n ≤ 30 against E #C_n (linear laws)
//! ```

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{
    expected_coauthors_recursion, expected_index_table, per_author_pmf, DEFAULT_EPSILON,
};
use crate::collab_model::{
    attach_event_times, simulate_coauthor_sets_with, CoauthorshipLaw, LawKind, LinearParams,
    LogBase, Table,
};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_f_nonparam, estimate_linear, DeltaMethodContext, EventSnapshot, DEFAULT_LEVEL,
};
use crate::indices::{index_value, yearly_window_counts, Phi};
use crate::process::{sample_event_times_with, IntensityFunction, RateForm, Segment};
use crate::seed::{derive_seed, replicate_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntensitySpec {
    Constant {
        rate: f64,
    },
    /// `rates[i]` on `[breaks[i-1], breaks[i])`, the last rate unbounded.
    PiecewiseConstant {
        breaks: Vec<f64>,
        rates: Vec<f64>,
    },
    /// Contiguous segments starting at 0, each `min(slope t + intercept, cap)`.
    Piecewise {
        segments: Vec<SegmentSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub start: f64,
    /// Unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
    #[serde(default)]
    pub slope: f64,
    #[serde(default)]
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

impl IntensitySpec {
    pub fn build(&self) -> Result<IntensityFunction> {
        match self {
            IntensitySpec::Constant { rate } => IntensityFunction::constant(*rate),
            IntensitySpec::PiecewiseConstant { breaks, rates } => {
                IntensityFunction::piecewise_constant(breaks, rates)
            }
            IntensitySpec::Piecewise { segments } => IntensityFunction::new(
                segments
                    .iter()
                    .map(|s| Segment {
                        start: s.start,
                        end: s.end.unwrap_or(f64::INFINITY),
                        form: if s.slope == 0.0 && s.cap.is_none() {
                            RateForm::Constant(s.intercept)
                        } else {
                            RateForm::Linear {
                                slope: s.slope,
                                intercept: s.intercept,
                                cap: s.cap,
                            }
                        },
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBaseSpec {
    #[default]
    Natural,
    Ten,
}

impl From<LogBaseSpec> for LogBase {
    fn from(b: LogBaseSpec) -> Self {
        match b {
            LogBaseSpec::Natural => LogBase::Natural,
            LogBaseSpec::Ten => LogBase::Ten,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Constant {
        p: f64,
    },
    /// `(slope k + intercept) ∧ 1 ∨ 0`.
    AffineInCount {
        slope: f64,
        intercept: f64,
    },
    /// `(slope n + intercept) ∧ 1 ∨ 0`.
    AffineInEvent {
        slope: f64,
        intercept: f64,
    },
    /// `a_n k + b_n` with explicit coefficients; `clamp` maps values into
    /// `[0, 1]` instead of requiring admissibility.
    Linear {
        a: Vec<f64>,
        b: Vec<f64>,
        #[serde(default)]
        clamp: bool,
    },
    /// `a_n = p / n`, `b_n = q (1 - 1 / log(n + 2))`.
    LogSchedule {
        p: f64,
        q: f64,
        #[serde(default)]
        base: LogBaseSpec,
        #[serde(default)]
        clamp: bool,
    },
    /// `rows[n-1][k] = F_n(k)`.
    Rows {
        rows: Vec<Vec<f64>>,
    },
}

impl LawSpec {
    /// Builds the law; rule-based linear laws get coefficients for
    /// `n ≤ n_max`.
    pub fn build(&self, authors: usize, n_max: usize) -> Result<CoauthorshipLaw> {
        let kind = match self {
            LawSpec::Constant { p } => LawKind::Constant(*p),
            LawSpec::AffineInCount { slope, intercept } => LawKind::Tabulated(Table::AffineInCount {
                slope: *slope,
                intercept: *intercept,
            }),
            LawSpec::AffineInEvent { slope, intercept } => LawKind::Tabulated(Table::AffineInEvent {
                slope: *slope,
                intercept: *intercept,
            }),
            LawSpec::Linear { a, b, clamp } => {
                let params = LinearParams::unchecked(a.clone(), b.clone())?;
                linear_kind(params, *clamp)
            }
            LawSpec::LogSchedule { p, q, base, clamp } => {
                let params = LinearParams::log_schedule_raw(*p, *q, (*base).into(), n_max)?;
                linear_kind(params, *clamp)
            }
            LawSpec::Rows { rows } => LawKind::Tabulated(Table::Rows(rows.clone())),
        };
        CoauthorshipLaw::new(kind, authors)
    }
}

fn linear_kind(params: LinearParams, clamp: bool) -> LawKind {
    if clamp {
        LawKind::Tabulated(Table::ClampedLinear(params))
    } else {
        LawKind::Linear(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "yes")]
    pub theory: bool,
    #[serde(default)]
    pub estimator_k: Vec<usize>,
    #[serde(default = "default_estimator_n")]
    pub estimator_n_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coauthor_curve: Option<usize>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            theory: true,
            estimator_k: Vec::new(),
            estimator_n_max: default_estimator_n(),
            coauthor_curve: None,
        }
    }
}

fn yes() -> bool {
    true
}

fn default_estimator_n() -> usize {
    50
}

fn default_year() -> f64 {
    12.0
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_level() -> f64 {
    DEFAULT_LEVEL
}

fn default_name() -> String {
    "custom".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub authors: usize,
    pub horizon: f64,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_year")]
    pub year_length: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_level")]
    pub level: f64,
    pub intensity: IntensitySpec,
    pub law: LawSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses `text` after applying `key=value` overrides; dotted keys reach
    /// into tables (`law.p=0.02`).
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::validation("replicates must be at least 1"));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::validation("horizon must be positive and finite"));
        }
        if !(self.year_length > 0.0) {
            return Err(Error::validation("year_length must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::validation("epsilon must lie in (0, 1)"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::validation("level must lie in (0, 1)"));
        }
        let f = self.intensity()?;
        if self.horizon > f.domain_end() {
            return Err(Error::validation("horizon exceeds the intensity's domain"));
        }
        self.law()?;
        Ok(())
    }

    pub fn intensity(&self) -> Result<IntensityFunction> {
        self.intensity.build()
    }

    /// Number of events the law is materialised for: far beyond any
    /// plausible count on `[0, horizon]`.
    pub fn event_capacity(&self) -> Result<usize> {
        let mass = self.intensity()?.cumulative(self.horizon)?;
        Ok((mass + 12.0 * mass.sqrt() + 64.0).ceil() as usize)
    }

    pub fn law(&self) -> Result<CoauthorshipLaw> {
        self.law.build(self.authors, self.event_capacity()?)
    }
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not key=value")))?;
    let value: toml::Value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut cur = table;
    for p in path {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{p}` in `{key}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

const FIG2: &str = r#"
name = "fig2"
authors = 100
horizon = 360.0
replicates = 10
seed = 2

[intensity]
kind = "constant"
rate = 0.5

[law]
kind = "log_schedule"
p = 0.4
q = 0.05
base = "natural"

[outputs]
coauthor_curve = 30
"#;

const CONSTANT_RATE: &str = r#"
[intensity]
kind = "constant"
rate = 0.5
"#;

const STEP_RATE: &str = r#"
[intensity]
kind = "piecewise_constant"
breaks = [100.0, 200.0]
rates = [0.16666666666666666, 0.3333333333333333, 0.5]
"#;

fn ramp_rate(cap: f64) -> String {
    format!(
        r#"
[intensity]
kind = "piecewise"
segments = [
  {{ start = 0.0, end = 100.0, slope = 0.005 }},
  {{ start = 100.0, end = 200.0, slope = 0.0025 }},
  {{ start = 200.0, slope = 0.001388888888888889, cap = {cap:?} }},
]
"#
    )
}

const LAW_FLAT: &str = "[law]\nkind = \"constant\"\np = 0.01\n";
const LAW_BY_COUNT: &str = "[law]\nkind = \"affine_in_count\"\nslope = 0.05\nintercept = 0.005\n";
const LAW_BY_EVENT: &str = "[law]\nkind = \"affine_in_event\"\nslope = 0.005555555555555556\nintercept = 0.0\n";

/// Names of the builtin experiments.
pub const BUILTIN_NAMES: [&str; 10] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
];

/// TOML text of a builtin experiment.
pub fn builtin_config_toml(name: &str) -> Result<String> {
    let (rate, law) = match name {
        "fig2" => return Ok(FIG2.trim_start().to_string()),
        "fig3" => (CONSTANT_RATE.to_string(), LAW_FLAT),
        "fig4" => (CONSTANT_RATE.to_string(), LAW_BY_COUNT),
        "fig5" => (CONSTANT_RATE.to_string(), LAW_BY_EVENT),
        "fig6" => (STEP_RATE.to_string(), LAW_FLAT),
        "fig7" => (STEP_RATE.to_string(), LAW_BY_COUNT),
        "fig8" => (STEP_RATE.to_string(), LAW_BY_EVENT),
        "fig9" => (ramp_rate(1.0), LAW_FLAT),
        "fig10" => (ramp_rate(1.0), LAW_BY_COUNT),
        "fig11" => (ramp_rate(0.5), LAW_BY_EVENT),
        other => return Err(Error::UnknownConfig(other.to_string())),
    };
    let seed: u64 = name[3..].parse().expect("builtin names end in a number");
    Ok(format!(
        "name = \"{name}\"\nauthors = 100\nhorizon = 360.0\nreplicates = 10\nseed = {seed}\n{rate}\n{law}"
    ))
}

pub fn builtin_config(name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::from_toml_str(&builtin_config_toml(name)?)
}

pub fn builtin_configs() -> Vec<(&'static str, ExperimentConfig)> {
    BUILTIN_NAMES
        .iter()
        .map(|&n| (n, builtin_config(n).expect("builtin configs are valid")))
        .collect()
}

/// Mean and standard error over the replicates that produced a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation over `√runs`; needs two runs.
    pub se: Option<f64>,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let v: Vec<f64> = values.into_iter().flatten().collect();
        let runs = v.len();
        if runs == 0 {
            return Self {
                runs,
                mean: None,
                se: None,
            };
        }
        let mean = v.iter().sum::<f64>() / runs as f64;
        let se = (runs >= 2).then(|| {
            let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (runs - 1) as f64).sqrt() / (runs as f64).sqrt()
        });
        Self {
            runs,
            mean: Some(mean),
            se,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearRow {
    pub year: usize,
    /// Per index, in [`Phi::STANDARD`] order.
    pub summaries: [Summary; 3],
    /// `E[I | N > 0]` per index.
    pub theory: Option<[Option<f64>; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSeriesRow {
    pub n: usize,
    pub k: usize,
    pub summary: Summary,
    pub truth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub n: usize,
    pub summary: Summary,
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    pub years: Vec<YearRow>,
    /// `per_replicate[r][year][index]`.
    pub per_replicate: Vec<Vec<[Option<f64>; 3]>>,
    pub estimator_series: Vec<EstimatorSeriesRow>,
    pub coauthor_curve: Vec<CurveRow>,
}

struct ReplicateOutput {
    yearly: Vec<[Option<f64>; 3]>,
    sizes: Vec<usize>,
    /// `estimates[k_idx][n-1]`.
    estimates: Vec<Vec<Option<f64>>>,
}

fn run_replicate(
    cfg: &ExperimentConfig,
    f: &IntensityFunction,
    law: &CoauthorshipLaw,
    index: usize,
) -> Result<ReplicateOutput> {
    let mut rng = replicate_rng(cfg.seed, index as u64);
    let timeline = sample_event_times_with(f, cfg.horizon, &mut rng)?;
    let run = simulate_coauthor_sets_with(law, timeline.len(), &mut rng)?;
    let run = attach_event_times(run, &timeline);
    let yearly = yearly_window_counts(&run, cfg.year_length)?
        .iter()
        .map(|w| {
            let mut v = [None; 3];
            for (slot, phi) in v.iter_mut().zip(&Phi::STANDARD) {
                *slot = index_value(w, phi);
            }
            v
        })
        .collect();
    let curve_n = cfg.outputs.coauthor_curve.unwrap_or(0);
    let sizes = run.sizes().take(curve_n).collect();
    let est_n = cfg.outputs.estimator_n_max.min(run.len());
    let mut estimates = vec![Vec::with_capacity(est_n); cfg.outputs.estimator_k.len()];
    if !cfg.outputs.estimator_k.is_empty() {
        for n in 1..=est_n {
            let snap = EventSnapshot::from_run(&run, n)?;
            for (slot, &k) in estimates.iter_mut().zip(&cfg.outputs.estimator_k) {
                let e = estimate_f_nonparam(&snap, k, cfg.level)?;
                slot.push((e.support_count > 0).then_some(e.value));
            }
        }
    }
    Ok(ReplicateOutput {
        yearly,
        sizes,
        estimates,
    })
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

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let f = cfg.intensity()?;
    let law = cfg.law()?;
    let outputs: Vec<ReplicateOutput> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, &f, &law, r))
        .collect::<Result<_>>()?;

    let windows = year_windows(cfg);
    let theory = if cfg.outputs.theory {
        Some(expected_index_table(&f, &law, &Phi::STANDARD, &windows, cfg.epsilon)?)
    } else {
        None
    };
    let years = (0..windows.len())
        .map(|y| {
            let summaries = std::array::from_fn(|i| {
                Summary::of(outputs.iter().map(|o| o.yearly.get(y).and_then(|v| v[i])))
            });
            YearRow {
                year: y,
                summaries,
                theory: theory
                    .as_ref()
                    .map(|t| std::array::from_fn(|i| t[y][i].given_nonempty)),
            }
        })
        .collect();

    let mut estimator_series = Vec::new();
    for (ki, &k) in cfg.outputs.estimator_k.iter().enumerate() {
        let longest = outputs.iter().map(|o| o.estimates[ki].len()).max().unwrap_or(0);
        for n in 1..=longest {
            estimator_series.push(EstimatorSeriesRow {
                n,
                k,
                summary: Summary::of(
                    outputs
                        .iter()
                        .map(|o| o.estimates[ki].get(n - 1).copied().flatten()),
                ),
                truth: law.prob(n, k),
            });
        }
    }

    let mut coauthor_curve = Vec::new();
    if let Some(curve_n) = cfg.outputs.coauthor_curve {
        let exact = match law.kind() {
            LawKind::Linear(p) => Some(expected_coauthors_recursion(p, law.authors(), curve_n)?),
            _ => None,
        };
        for n in 1..=curve_n {
            coauthor_curve.push(CurveRow {
                n,
                summary: Summary::of(outputs.iter().map(|o| o.sizes.get(n - 1).map(|&s| s as f64))),
                theory: exact.as_ref().map(|e| e[n - 1]),
            });
        }
    }

    Ok(ExperimentResult {
        name: cfg.name.clone(),
        years,
        per_replicate: outputs.into_iter().map(|o| o.yearly).collect(),
        estimator_series,
        coauthor_curve,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Header comment of the index-series CSV.
pub const INDEX_CSV_NOTE: &str = "# mean and se are over replicates whose year window holds at least one paper (runs); se = sample sd / sqrt(runs), empty when runs < 2; theory = exact E[index | at least one paper]";

pub fn write_index_csv<W: Write>(result: &ExperimentResult, mut out: W) -> Result<()> {
    writeln!(out, "{INDEX_CSV_NOTE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "year", "runs", "mean_ci", "se_ci", "mean_dc", "se_dc", "mean_cc", "se_cc", "theory_ci",
        "theory_dc", "theory_cc",
    ])?;
    for row in &result.years {
        let s = &row.summaries;
        let th = |i: usize| opt(row.theory.and_then(|t| t[i]));
        w.write_record([
            row.year.to_string(),
            s[0].runs.to_string(),
            opt(s[0].mean),
            opt(s[0].se),
            opt(s[1].mean),
            opt(s[1].se),
            opt(s[2].mean),
            opt(s[2].se),
            th(0),
            th(1),
            th(2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_replicates_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "year", "ci", "dc", "cc"])?;
    for (r, years) in result.per_replicate.iter().enumerate() {
        for (y, v) in years.iter().enumerate() {
            w.write_record([r.to_string(), y.to_string(), opt(v[0]), opt(v[1]), opt(v[2])])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_estimator_series_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "k", "runs", "mean", "se", "truth"])?;
    for row in &result.estimator_series {
        w.write_record([
            row.n.to_string(),
            row.k.to_string(),
            row.summary.runs.to_string(),
            opt(row.summary.mean),
            opt(row.summary.se),
            row.truth.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coauthor_curve_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "runs", "mean", "se", "theory"])?;
    for row in &result.coauthor_curve {
        w.write_record([
            row.n.to_string(),
            row.summary.runs.to_string(),
            opt(row.summary.mean),
            opt(row.summary.se),
            opt(row.theory),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Which estimator a study row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// `F̂_n(k)`.
    F,
    /// `â_n`.
    A,
    /// `b̂_n`.
    B,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::F => "F",
            EstimatorKind::A => "a",
            EstimatorKind::B => "b",
        }
    }
}

/// Fewer replicates than this make coverage figures unreliable.
pub const LOW_REPLICATES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub authors: usize,
    pub n: usize,
    pub k: usize,
    pub estimator: EstimatorKind,
    pub replicates: usize,
    pub truth: f64,
    /// Share of replicates whose interval covers the truth; a replicate
    /// without an interval counts as not covering.
    pub coverage: f64,
    pub rmse: f64,
    /// Mean plug-in standard error on the `√L` scale.
    pub mean_se: Option<f64>,
    /// `L` times the across-replicate variance of the estimate.
    pub var_scaled: f64,
    /// Limit of `var_scaled`.
    pub sigma2_theory: Option<f64>,
    pub low_replicates: bool,
}

/// Coverage and error of `F̂_n(k)`, `â_n` and `b̂_n` over `replicates`
/// simulations for each pool size in `authors_grid`.
pub fn run_estimator_study(
    kind: &LawKind,
    n: usize,
    k: usize,
    authors_grid: &[usize],
    replicates: usize,
    seed: u64,
    level: f64,
) -> Result<Vec<StudyRow>> {
    if replicates == 0 {
        return Err(Error::validation("replicates must be at least 1"));
    }
    if n < 2 || k >= n {
        return Err(Error::validation("study needs n ≥ 2 and k < n"));
    }
    let mut rows = Vec::new();
    for &authors in authors_grid {
        let law = CoauthorshipLaw::new(kind.clone(), authors)?;
        let pop = DeltaMethodContext::population(&law, n)?;
        let f_true = law.prob(n, k);
        let p_k = per_author_pmf(&law, n - 1)?.prob(k);
        let stream_seed = derive_seed(seed, authors as u64);
        let draws: Vec<[(f64, Option<f64>, bool); 3]> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = replicate_rng(stream_seed, r as u64);
                let run = simulate_coauthor_sets_with(&law, n, &mut rng)?;
                let snap = EventSnapshot::from_run(&run, n)?;
                let f = estimate_f_nonparam(&snap, k, level)?;
                let (a, b) = estimate_linear(&snap, level)?;
                Ok([
                    (f.value, f.se, f.covers(f_true)),
                    (a.value, a.se, a.covers(pop.beta)),
                    (b.value, b.se, b.covers(pop.alpha)),
                ])
            })
            .collect::<Result<_>>()?;
        let specs = [
            (EstimatorKind::F, f_true, (p_k > 0.0).then(|| f_true * (1.0 - f_true) / p_k)),
            (EstimatorKind::A, pop.beta, Some(pop.sigma_a2())),
            (EstimatorKind::B, pop.alpha, Some(pop.sigma_b2())),
        ];
        for (i, (estimator, truth, sigma2)) in specs.into_iter().enumerate() {
            let values: Vec<f64> = draws.iter().map(|d| d[i].0).collect();
            let reps = replicates as f64;
            let mean = values.iter().sum::<f64>() / reps;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / reps;
            let mse = values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / reps;
            let ses: Vec<f64> = draws.iter().filter_map(|d| d[i].1).collect();
            rows.push(StudyRow {
                authors,
                n,
                k,
                estimator,
                replicates,
                truth,
                coverage: draws.iter().filter(|d| d[i].2).count() as f64 / reps,
                rmse: mse.sqrt(),
                mean_se: (!ses.is_empty()).then(|| ses.iter().sum::<f64>() / ses.len() as f64),
                var_scaled: var * authors as f64,
                sigma2_theory: sigma2,
                low_replicates: replicates < LOW_REPLICATES,
            });
        }
    }
    Ok(rows)
}

pub fn write_study_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "authors",
        "n",
        "k",
        "estimator",
        "replicates",
        "truth",
        "coverage",
        "rmse",
        "mean_se",
        "var_scaled",
        "sigma2_theory",
        "low_replicates",
    ])?;
    for r in rows {
        w.write_record([
            r.authors.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.estimator.name().to_string(),
            r.replicates.to_string(),
            r.truth.to_string(),
            r.coverage.to_string(),
            r.rmse.to_string(),
            opt(r.mean_se),
            r.var_scaled.to_string(),
            opt(r.sigma2_theory),
            r.low_replicates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
