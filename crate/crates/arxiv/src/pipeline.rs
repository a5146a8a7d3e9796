//! The full two-pass analysis of a metadata file.
//!
//! Pass one reads every record of the discipline to collect yearly indices,
//! paper counts per author and monthly activity. Pass two, with the top
//! authors and the correlation sample now known, builds their timelines and
//! window counts.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use crate::discipline::Discipline;
use crate::error::{Error, Result};
use crate::record::{ParseStats, RecordReader};
use crate::stats::*;

pub const YEARLY_CSV: &str = "yearly_indices.csv";
pub const YEARLY_TOP_CSV: &str = "yearly_indices_top.csv";
pub const TOP_CSV: &str = "top_authors.csv";
pub const KTH_CSV: &str = "coauthors_per_kth_paper.csv";
pub const F_HAT_CSV: &str = "f_hat.csv";
pub const CORRELATION_CSV: &str = "correlation.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub discipline: Discipline,
    pub top_k: usize,
    /// Values of `k` for `F̂_n(k)`.
    pub ks: Vec<usize>,
    pub universe: UniverseRule,
    pub sample_size: usize,
    pub delta_months: u32,
    pub seed: u64,
    pub level: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            discipline: Discipline::parse("cs"),
            top_k: 100,
            ks: vec![0, 1, 2, 3],
            universe: UniverseRule::EventMonth,
            sample_size: 1000,
            delta_months: 12,
            seed: 0,
            level: mfcollab::estimators::DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub stats: ParseStats,
    /// Records in the discipline.
    pub kept: u64,
    pub top: TopAuthors,
    pub sampled: usize,
    pub written: Vec<PathBuf>,
}

fn for_each_record(path: &Path, discipline: &Discipline, mut f: impl FnMut(&crate::PaperRecord)) -> Result<ParseStats> {
    let file = File::open(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let mut reader = RecordReader::new(BufReader::new(file));
    for r in reader.by_ref() {
        let r = r?;
        if discipline.matches(&r) {
            f(&r);
        }
    }
    Ok(reader.stats())
}

fn create(out_dir: &Path, name: &str, written: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = out_dir.join(name);
    let file = File::create(&path)?;
    written.push(path);
    Ok(BufWriter::new(file))
}

pub fn run_pipeline(input: &Path, out_dir: &Path, opts: &PipelineOptions) -> Result<PipelineSummary> {
    if opts.top_k == 0 {
        return Err(Error::Usage("top-k needs k ≥ 1".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let mut yearly = YearlyAccumulator::new();
    let mut counter = AuthorCounter::new();
    let mut activity = MonthlyActivity::new();
    let mut kept = 0u64;
    let stats = for_each_record(input, &opts.discipline, |r| {
        kept += 1;
        yearly.push(r);
        counter.push(r);
        activity.push(r);
    })?;

    let top = counter.top(opts.top_k)?;
    let sample = sample_authors(&counter, opts.sample_size, opts.seed)?;
    let mut yearly_top = YearlyAccumulator::for_authors(top.keys());
    let mut timelines = TimelineCollector::new(top.keys());
    let mut correlations = CorrelationAccumulator::new(&sample, opts.delta_months)?;
    for_each_record(input, &opts.discipline, |r| {
        yearly_top.push(r);
        timelines.push(r);
        correlations.push(r);
    })?;
    let timelines = timelines.finish();

    let mut written = Vec::new();
    write_yearly_csv(&yearly.finish(), create(out_dir, YEARLY_CSV, &mut written)?)?;
    write_yearly_csv(&yearly_top.finish(), create(out_dir, YEARLY_TOP_CSV, &mut written)?)?;
    write_top_csv(&top, create(out_dir, TOP_CSV, &mut written)?)?;
    let kth = if timelines.is_empty() {
        Vec::new()
    } else {
        coauthors_per_kth_paper(&timelines)?
    };
    write_kth_paper_csv(&kth, create(out_dir, KTH_CSV, &mut written)?)?;
    let mut f_rows = Vec::new();
    for &k in &opts.ks {
        f_rows.extend(estimate_f_empirical(&timelines, &activity, k, opts.universe, opts.level)?);
    }
    write_empirical_f_csv(&f_rows, create(out_dir, F_HAT_CSV, &mut written)?)?;
    write_correlation_csv(&correlations.finish(), create(out_dir, CORRELATION_CSV, &mut written)?)?;

    Ok(PipelineSummary {
        stats,
        kept,
        top,
        sampled: sample.len(),
        written,
    })
}
