//! Empirical collaboration statistics over a stream of records.
//!
//! Each statistic has an accumulator fed one record at a time, so a corpus
//! can be processed from disk with memory bounded by per-author state. The
//! free functions run an accumulator over an in-memory slice.
//!
//! Author identity is exact match on the normalised name string. Homonyms
//! are merged and name variants are split; no disambiguation is attempted.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;

use mfcollab::estimators::{estimate_f_from_counts, EstimateWithCI};
use mfcollab::indices::{index_value, Phi, WindowCounts};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::record::{PaperRecord, YearMonth};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Indices of one calendar year.
#[derive(Debug, Clone, PartialEq)]
pub struct YearIndices {
    pub year: u16,
    pub counts: WindowCounts,
}

impl YearIndices {
    pub fn papers(&self) -> u64 {
        self.counts.n_total
    }

    /// `I_CI`, `I_DC`, `I_CC`.
    pub fn indices(&self) -> [Option<f64>; 3] {
        std::array::from_fn(|i| index_value(&self.counts, &Phi::STANDARD[i]))
    }
}

/// Per-year author-count histograms. Without an author set every paper
/// counts once; with one, a paper counts once per member among its
/// authors, so that each member contributes their own papers.
#[derive(Debug, Clone, Default)]
pub struct YearlyAccumulator {
    members: Option<HashSet<String>>,
    years: BTreeMap<u16, WindowCounts>,
}

impl YearlyAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_authors<S: AsRef<str>>(authors: impl IntoIterator<Item = S>) -> Self {
        Self {
            members: Some(authors.into_iter().map(|a| a.as_ref().to_string()).collect()),
            years: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, record: &PaperRecord) {
        let weight = match &self.members {
            None => 1,
            Some(m) => record.authors.iter().filter(|a| m.contains(*a)).count(),
        };
        if weight == 0 {
            return;
        }
        let y = record.year_month.year;
        let w = self
            .years
            .entry(y)
            .or_insert_with(|| WindowCounts::empty(f64::from(y), f64::from(y) + 1.0));
        for _ in 0..weight {
            w.add_paper(record.size());
        }
    }

    pub fn finish(self) -> Vec<YearIndices> {
        self.years
            .into_iter()
            .map(|(year, counts)| YearIndices { year, counts })
            .collect()
    }
}

pub fn yearly_indices<'a>(records: impl IntoIterator<Item = &'a PaperRecord>) -> Vec<YearIndices> {
    let mut acc = YearlyAccumulator::new();
    records.into_iter().for_each(|r| acc.push(r));
    acc.finish()
}

pub fn write_yearly_csv<W: Write>(rows: &[YearIndices], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["year", "papers", "ci", "dc", "cc"])?;
    for r in rows {
        let [ci, dc, cc] = r.indices();
        w.write_record([r.year.to_string(), r.papers().to_string(), opt(ci), opt(dc), opt(cc)])?;
    }
    w.flush()?;
    Ok(())
}

/// Papers per author.
#[derive(Debug, Clone, Default)]
pub struct AuthorCounter {
    counts: HashMap<String, u64>,
}

/// The most productive authors, by paper count and then by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopAuthors {
    pub authors: Vec<(String, u64)>,
    /// Fewer authors exist than were requested.
    pub short: bool,
}

impl TopAuthors {
    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.authors.iter().map(|(a, _)| a.as_str())
    }
}

impl AuthorCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: &PaperRecord) {
        for a in &record.authors {
            *self.counts.entry(a.clone()).or_default() += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn papers(&self, author: &str) -> u64 {
        self.counts.get(author).copied().unwrap_or(0)
    }

    /// Sorted author keys.
    pub fn authors(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.counts.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    /// Top `k`; ties at equal paper counts go to the lexicographically
    /// smaller name.
    pub fn top(&self, k: usize) -> Result<TopAuthors> {
        if k == 0 {
            return Err(Error::Usage("top-k needs k ≥ 1".into()));
        }
        let mut all: Vec<(&String, &u64)> = self.counts.iter().collect();
        all.sort_unstable_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        Ok(TopAuthors {
            short: all.len() < k,
            authors: all.into_iter().take(k).map(|(a, &c)| (a.clone(), c)).collect(),
        })
    }
}

pub fn top_productive_authors<'a>(records: impl IntoIterator<Item = &'a PaperRecord>, k: usize) -> Result<TopAuthors> {
    let mut c = AuthorCounter::new();
    records.into_iter().for_each(|r| c.push(r));
    c.top(k)
}

pub fn write_top_csv<W: Write>(top: &TopAuthors, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "author", "papers"])?;
    for (i, (a, c)) in top.authors.iter().enumerate() {
        w.write_record([(i + 1).to_string(), a.clone(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Distinct authors with a paper in each month.
#[derive(Debug, Clone, Default)]
pub struct MonthlyActivity {
    active: BTreeMap<u32, HashSet<String>>,
}

impl MonthlyActivity {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: &PaperRecord) {
        let set = self.active.entry(record.year_month.index()).or_default();
        for a in &record.authors {
            if !set.contains(a) {
                set.insert(a.clone());
            }
        }
    }

    pub fn count(&self, month: YearMonth) -> usize {
        self.active.get(&month.index()).map_or(0, HashSet::len)
    }

    /// Largest monthly count.
    pub fn max(&self) -> usize {
        self.active.values().map(HashSet::len).max().unwrap_or(0)
    }
}

pub fn monthly_activity<'a>(records: impl IntoIterator<Item = &'a PaperRecord>) -> MonthlyActivity {
    let mut m = MonthlyActivity::new();
    records.into_iter().for_each(|r| m.push(r));
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineEntry {
    pub year_month: YearMonth,
    pub id: String,
    pub coauthors: Vec<String>,
}

/// An author's papers in submission order; papers of the same month are
/// ordered by identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorTimeline {
    pub author: String,
    pub entries: Vec<TimelineEntry>,
}

/// Builds timelines for a fixed set of authors.
#[derive(Debug, Clone)]
pub struct TimelineCollector {
    timelines: BTreeMap<String, Vec<TimelineEntry>>,
}

impl TimelineCollector {
    pub fn new<S: AsRef<str>>(authors: impl IntoIterator<Item = S>) -> Self {
        Self {
            timelines: authors
                .into_iter()
                .map(|a| (a.as_ref().to_string(), Vec::new()))
                .collect(),
        }
    }

    pub fn push(&mut self, record: &PaperRecord) {
        for a in &record.authors {
            if let Some(t) = self.timelines.get_mut(a) {
                t.push(TimelineEntry {
                    year_month: record.year_month,
                    id: record.id.clone(),
                    coauthors: record.authors.iter().filter(|b| *b != a).cloned().collect(),
                });
            }
        }
    }

    pub fn finish(self) -> Vec<AuthorTimeline> {
        self.timelines
            .into_iter()
            .map(|(author, mut entries)| {
                entries.sort_by(|x, y| x.year_month.cmp(&y.year_month).then_with(|| x.id.cmp(&y.id)));
                AuthorTimeline { author, entries }
            })
            .collect()
    }
}

pub fn author_timelines<'a, S: AsRef<str>>(
    records: impl IntoIterator<Item = &'a PaperRecord>,
    authors: impl IntoIterator<Item = S>,
) -> Vec<AuthorTimeline> {
    let mut c = TimelineCollector::new(authors);
    records.into_iter().for_each(|r| c.push(r));
    c.finish()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KthPaperRow {
    /// 1-based paper index.
    pub k: usize,
    /// Authors with at least `k` papers.
    pub authors: usize,
    pub mean_coauthors: f64,
}

/// Mean number of co-authors on each author's `k`-th paper.
pub fn coauthors_per_kth_paper(timelines: &[AuthorTimeline]) -> Result<Vec<KthPaperRow>> {
    if timelines.is_empty() {
        return Err(Error::Usage("author set is empty".into()));
    }
    let longest = timelines.iter().map(|t| t.entries.len()).max().unwrap_or(0);
    Ok((1..=longest)
        .map(|k| {
            let sizes: Vec<usize> = timelines
                .iter()
                .filter_map(|t| t.entries.get(k - 1).map(|e| e.coauthors.len()))
                .collect();
            KthPaperRow {
                k,
                authors: sizes.len(),
                mean_coauthors: sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
            }
        })
        .collect())
}

pub fn write_kth_paper_csv<W: Write>(rows: &[KthPaperRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "authors", "mean_coauthors"])?;
    for r in rows {
        w.write_record([r.k.to_string(), r.authors.to_string(), r.mean_coauthors.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// How the pool of potential co-authors `M` is measured when estimating
/// `F̂_n(0)`. Authors who never write with the ego are not observed, so
/// their number is estimated as `M` minus the observed ones at count zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UniverseRule {
    /// Productive authors in the month of event `n`.
    #[default]
    EventMonth,
    /// Largest monthly count of productive authors over the corpus.
    GlobalMax,
}

impl std::str::FromStr for UniverseRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "event-month" => Ok(Self::EventMonth),
            "global-max" => Ok(Self::GlobalMax),
            other => Err(Error::Usage(format!(
                "unknown universe rule `{other}` (expected event-month or global-max)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalFRow {
    pub n: usize,
    pub k: usize,
    /// Egos with at least `n` papers.
    pub egos: usize,
    pub successes: u64,
    /// Observed co-authors with `k` earlier joint papers.
    pub support: u64,
    /// `support`, plus the estimated unobserved pool when `k = 0`.
    pub denominator: u64,
    /// `None` when the denominator is zero. Its `se` is on the scale of the
    /// denominator: the interval half-width is `z · se / √denominator`.
    pub estimate: Option<EstimateWithCI>,
}

/// `F̂_n(k)` pooled over the egos of `timelines`: successes and
/// denominators are summed over egos at each event index `n`.
pub fn estimate_f_empirical(
    timelines: &[AuthorTimeline],
    activity: &MonthlyActivity,
    k: usize,
    rule: UniverseRule,
    q: f64,
) -> Result<Vec<EmpiricalFRow>> {
    let longest = timelines.iter().map(|t| t.entries.len()).max().unwrap_or(0);
    let mut rows: Vec<EmpiricalFRow> = (1..=longest)
        .map(|n| EmpiricalFRow {
            n,
            k,
            egos: 0,
            successes: 0,
            support: 0,
            denominator: 0,
            estimate: None,
        })
        .collect();
    let global = activity.max() as u64;
    for t in timelines {
        let universe: HashSet<&str> = t
            .entries
            .iter()
            .flat_map(|e| e.coauthors.iter().map(String::as_str))
            .collect();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for (idx, e) in t.entries.iter().enumerate() {
            let support = if k == 0 {
                (universe.len() - counts.len()) as u64
            } else {
                counts.values().filter(|&&c| c == k).count() as u64
            };
            let successes = e
                .coauthors
                .iter()
                .filter(|a| counts.get(a.as_str()).copied().unwrap_or(0) == k)
                .count() as u64;
            let denominator = if k == 0 {
                let m = match rule {
                    UniverseRule::EventMonth => activity.count(e.year_month) as u64,
                    UniverseRule::GlobalMax => global,
                };
                support.max(m)
            } else {
                support
            };
            let row = &mut rows[idx];
            row.egos += 1;
            row.successes += successes;
            row.support += support;
            row.denominator += denominator;
            for a in &e.coauthors {
                *counts.entry(a.as_str()).or_default() += 1;
            }
        }
    }
    for row in &mut rows {
        if row.denominator > 0 {
            row.estimate = Some(estimate_f_from_counts(row.successes, row.denominator, row.denominator, q)?);
        }
    }
    Ok(rows)
}

pub fn write_empirical_f_csv<W: Write>(rows: &[EmpiricalFRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "k", "egos", "successes", "support", "denominator", "value", "se", "lo", "hi"])?;
    for r in rows {
        let e = r.estimate.as_ref();
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.egos.to_string(),
            r.successes.to_string(),
            r.support.to_string(),
            r.denominator.to_string(),
            opt(e.map(|e| e.value)),
            opt(e.and_then(|e| e.se)),
            opt(e.and_then(|e| e.interval).map(|i| i.0)),
            opt(e.and_then(|e| e.interval).map(|i| i.1)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `sample_size` distinct authors drawn uniformly with a seeded generator;
/// all authors when there are fewer.
pub fn sample_authors(counter: &AuthorCounter, sample_size: usize, seed: u64) -> Result<Vec<String>> {
    if sample_size < 2 {
        return Err(Error::Usage("correlations need a sample of at least 2 authors".into()));
    }
    let all = counter.authors();
    if all.len() <= sample_size {
        return Ok(all.into_iter().map(str::to_string).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = sample(&mut rng, all.len(), sample_size).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| all[i].to_string()).collect())
}

/// Largest author count tracked by [`CorrelationAccumulator`].
pub const MAX_TRACKED_SIZE: usize = 5;

/// Per-window counts `X_k[t, t + δ]` of a fixed author sample. Windows are
/// `δ` months long and aligned to January of year 0, so `δ = 12` gives
/// calendar years.
#[derive(Debug, Clone)]
pub struct CorrelationAccumulator {
    sample: HashMap<String, usize>,
    delta: u32,
    windows: BTreeMap<u32, Vec<[u32; MAX_TRACKED_SIZE + 1]>>,
    range: Option<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub start: YearMonth,
    pub k: usize,
    pub authors: usize,
    /// Pearson correlation of `X_1` and `X_k` across the sample; `None` when
    /// either has zero variance.
    pub correlation: Option<f64>,
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

impl CorrelationAccumulator {
    pub fn new(sample: &[String], delta_months: u32) -> Result<Self> {
        if delta_months == 0 {
            return Err(Error::Usage("window length must be at least one month".into()));
        }
        Ok(Self {
            sample: sample.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect(),
            delta: delta_months,
            windows: BTreeMap::new(),
            range: None,
        })
    }

    pub fn push(&mut self, record: &PaperRecord) {
        let w = record.year_month.index() / self.delta;
        self.range = Some(match self.range {
            None => (w, w),
            Some((lo, hi)) => (lo.min(w), hi.max(w)),
        });
        let size = record.size();
        if size > MAX_TRACKED_SIZE {
            return;
        }
        for a in &record.authors {
            if let Some(&i) = self.sample.get(a) {
                let n = self.sample.len();
                self.windows.entry(w).or_insert_with(|| vec![[0; MAX_TRACKED_SIZE + 1]; n])[i][size] += 1;
            }
        }
    }

    /// Rows for every window between the first and last record seen and
    /// every `k` in `2..=5`.
    pub fn finish(self) -> Vec<CorrelationRow> {
        let Some((lo, hi)) = self.range else {
            return Vec::new();
        };
        let n = self.sample.len();
        let zeros = vec![[0u32; MAX_TRACKED_SIZE + 1]; n];
        let mut rows = Vec::new();
        for w in lo..=hi {
            let counts = self.windows.get(&w).unwrap_or(&zeros);
            let x1: Vec<f64> = counts.iter().map(|c| f64::from(c[1])).collect();
            for k in 2..=MAX_TRACKED_SIZE {
                let xk: Vec<f64> = counts.iter().map(|c| f64::from(c[k])).collect();
                rows.push(CorrelationRow {
                    start: YearMonth::from_index(w * self.delta),
                    k,
                    authors: n,
                    correlation: pearson(&x1, &xk),
                });
            }
        }
        rows
    }
}

/// Samples authors and computes the correlation series in two passes.
pub fn correlation_series(
    records: &[PaperRecord],
    sample_size: usize,
    delta_months: u32,
    seed: u64,
) -> Result<Vec<CorrelationRow>> {
    let mut counter = AuthorCounter::new();
    records.iter().for_each(|r| counter.push(r));
    let picked = sample_authors(&counter, sample_size, seed)?;
    let mut acc = CorrelationAccumulator::new(&picked, delta_months)?;
    records.iter().for_each(|r| acc.push(r));
    Ok(acc.finish())
}

pub fn write_correlation_csv<W: Write>(rows: &[CorrelationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["start", "k", "authors", "correlation"])?;
    for r in rows {
        w.write_record([r.start.to_string(), r.k.to_string(), r.authors.to_string(), opt(r.correlation)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, authors: &[&str]) -> PaperRecord {
        PaperRecord::new(id, vec!["cs.AI".into()], authors.iter().map(|a| a.to_string()).collect()).unwrap()
    }

    #[test]
    fn yearly_hand_example() {
        let rows = yearly_indices(&[rec("0801.0001", &["A"]), rec("0802.0001", &["A", "B", "C"])]);
        assert_eq!(rows.len(), 1);
        let [ci, dc, cc] = rows[0].indices();
        assert_eq!((ci, dc), (Some(1.0), Some(0.5)));
        assert!((cc.unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let solo = yearly_indices(&[rec("0801.0001", &["A"]), rec("0801.0002", &["B"])]);
        assert_eq!(solo[0].indices(), [Some(0.0); 3]);
    }

    #[test]
    fn top_k_ties_and_shortfall() {
        let recs = [rec("0801.0001", &["B", "A"]), rec("0801.0002", &["C"])];
        let top = top_productive_authors(&recs, 2).unwrap();
        assert_eq!(top.authors, [("A".to_string(), 1), ("B".to_string(), 1)]);
        assert!(!top.short);
        let all = top_productive_authors(&recs, 5).unwrap();
        assert_eq!(all.authors.len(), 3);
        assert!(all.short);
        assert!(top_productive_authors(&recs, 0).is_err());
    }

    #[test]
    fn kth_paper_means() {
        let recs = [
            rec("0801.0001", &["A"]),
            rec("0802.0001", &["A", "X", "Y"]),
            rec("0803.0001", &["A", "X", "Y", "Z", "W"]),
        ];
        let t = author_timelines(&recs, ["A"]);
        let rows = coauthors_per_kth_paper(&t).unwrap();
        let means: Vec<f64> = rows.iter().map(|r| r.mean_coauthors).collect();
        assert_eq!(means, [0.0, 2.0, 4.0]);

        let recs = [
            rec("0801.0001", &["P"]),
            rec("0801.0002", &["Q", "U", "V"]),
            rec("0802.0001", &["P", "R", "S"]),
        ];
        let rows = coauthors_per_kth_paper(&author_timelines(&recs, ["P", "Q"])).unwrap();
        assert_eq!(rows[0].mean_coauthors, 1.0);
        assert_eq!((rows[1].mean_coauthors, rows[1].authors), (2.0, 1));
        assert!(coauthors_per_kth_paper(&[]).is_err());
    }

    #[test]
    fn same_month_papers_follow_identifier_order() {
        let recs = [rec("0801.0002", &["A", "B"]), rec("0801.0001", &["A"])];
        let t = author_timelines(&recs, ["A"]);
        assert_eq!(t[0].entries[0].id, "0801.0001");
    }

    #[test]
    fn pearson_hand_values() {
        assert_eq!(pearson(&[0.0, 0.0], &[1.0, 2.0]), None);
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        let rows = correlation_series(&[rec("0801.0001", &["A", "B"])], 2, 12, 0).unwrap();
        assert!(rows.iter().all(|r| r.correlation.is_none()));
        assert!(correlation_series(&[], 1, 12, 0).is_err());
    }

    #[test]
    fn empirical_f_uses_pool_only_at_zero() {
        let recs = [
            rec("0801.0001", &["E", "A"]),
            rec("0801.0002", &["X", "Y", "Z"]),
            rec("0802.0001", &["E", "A", "B"]),
        ];
        let t = author_timelines(&recs, ["E"]);
        let act = monthly_activity(&recs);
        let k1 = estimate_f_empirical(&t, &act, 1, UniverseRule::EventMonth, 0.05).unwrap();
        assert_eq!((k1[1].successes, k1[1].denominator), (1, 1));
        let k0 = estimate_f_empirical(&t, &act, 0, UniverseRule::EventMonth, 0.05).unwrap();
        // event 1: observed pool {A, B} at zero, 5 productive authors in 2008-01
        assert_eq!((k0[0].successes, k0[0].support, k0[0].denominator), (1, 2, 5));
        // event 2: only B at zero, 3 productive authors in 2008-02
        assert_eq!((k0[1].successes, k0[1].support, k0[1].denominator), (1, 1, 3));
        let g = estimate_f_empirical(&t, &act, 0, UniverseRule::GlobalMax, 0.05).unwrap();
        assert_eq!(g[1].denominator, 5);
    }
}
