//! Co-authorship laws `F_n(k)` and event-by-event simulation of co-author
//! sets.
//!
//! At event `n` author `i` joins the ego's paper with probability
//! `F_n(m_{n-1,i})`, independently of every other author, where `m_{n-1,i}`
//! is the number of earlier papers the two wrote together. Event indices are
//! 1-based; author ids are `0..L`.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::process::EventTimeline;
use crate::seed::rng_from_seed;

/// Logarithm base of the `q (1 - 1/log(n + 2))` intercept schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Ten => x.log10(),
        }
    }
}

/// Coefficients of the linear sub-model `F_n(k) = a_n k + b_n` for
/// `n = 1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LinearParams {
    /// Admissible coefficients: `b_n ∈ [0, 1]` and, for `n ≥ 2`,
    /// `-b_n/(n-1) ≤ a_n ≤ (1-b_n)/(n-1)`.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let params = Self::unchecked(a, b)?;
        params.check_admissible()?;
        Ok(params)
    }

    /// Same shape checks as [`LinearParams::new`] without admissibility, for
    /// use under a clamp.
    pub fn unchecked(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::validation(
                "linear law needs equally long, non-empty a and b sequences",
            ));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::validation("linear coefficients must be finite"));
        }
        Ok(Self { a, b })
    }

    pub fn from_fn(n_max: usize, mut coef: impl FnMut(usize) -> (f64, f64)) -> Result<Self> {
        let (a, b) = (1..=n_max).map(&mut coef).unzip();
        Self::new(a, b)
    }

    /// `a_n = p / n`, `b_n = q (1 - 1 / log(n + 2))`, unvalidated.
    pub fn log_schedule_raw(p: f64, q: f64, base: LogBase, n_max: usize) -> Result<Self> {
        let (a, b) = (1..=n_max)
            .map(|n| {
                let n = n as f64;
                (p / n, q * (1.0 - 1.0 / base.log(n + 2.0)))
            })
            .unzip();
        Self::unchecked(a, b)
    }

    pub fn log_schedule(p: f64, q: f64, base: LogBase, n_max: usize) -> Result<Self> {
        let params = Self::log_schedule_raw(p, q, base, n_max)?;
        params.check_admissible()?;
        Ok(params)
    }

    pub fn check_admissible(&self) -> Result<()> {
        for (idx, (&a, &b)) in self.a.iter().zip(&self.b).enumerate() {
            let n = idx + 1;
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::validation(format!("b_{n} = {b} outside [0, 1]")));
            }
            if n >= 2 {
                let span = (n - 1) as f64;
                let tol = 1e-12;
                if a < -b / span - tol || a > (1.0 - b) / span + tol {
                    return Err(Error::validation(format!(
                        "a_{n} = {a} outside [{}, {}]",
                        -b / span,
                        (1.0 - b) / span
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_n`, 1-based.
    pub fn a(&self, n: usize) -> f64 {
        self.a[n - 1]
    }

    /// `b_n`, 1-based.
    pub fn b(&self, n: usize) -> f64 {
        self.b[n - 1]
    }

    pub fn a_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn b_slice(&self) -> &[f64] {
        &self.b
    }
}

/// Laws given by a rule or a table. Rule-based variants clamp to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    /// Row `n - 1` holds `F_n(0), …, F_n(n-1)`.
    Rows(Vec<Vec<f64>>),
    /// `(slope * k + intercept) ∧ 1 ∨ 0`.
    AffineInCount { slope: f64, intercept: f64 },
    /// `(slope * n + intercept) ∧ 1 ∨ 0`, free of `k`.
    AffineInEvent { slope: f64, intercept: f64 },
    /// `(a_n k + b_n) ∧ 1 ∨ 0`.
    ClampedLinear(LinearParams),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    Constant(f64),
    Linear(LinearParams),
    Tabulated(Table),
}

/// The family `{F_n(k)}` together with the author-pool size `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoauthorshipLaw {
    kind: LawKind,
    authors: usize,
}

impl CoauthorshipLaw {
    pub fn new(kind: LawKind, authors: usize) -> Result<Self> {
        match &kind {
            LawKind::Constant(p) if !(0.0..=1.0).contains(p) => {
                return Err(Error::validation(format!("probability {p} outside [0, 1]")));
            }
            LawKind::Linear(params) => params.check_admissible()?,
            LawKind::Tabulated(Table::Rows(rows)) => {
                for (idx, row) in rows.iter().enumerate() {
                    if row.len() != idx + 1 {
                        return Err(Error::validation(format!(
                            "table row for n = {} needs {} entries, found {}",
                            idx + 1,
                            idx + 1,
                            row.len()
                        )));
                    }
                    if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                        return Err(Error::validation(format!(
                            "table row for n = {} has a value outside [0, 1]",
                            idx + 1
                        )));
                    }
                }
            }
            LawKind::Tabulated(Table::AffineInCount { slope, intercept })
            | LawKind::Tabulated(Table::AffineInEvent { slope, intercept })
                if !slope.is_finite() || !intercept.is_finite() =>
            {
                return Err(Error::validation("affine coefficients must be finite"));
            }
            _ => {}
        }
        Ok(Self { kind, authors })
    }

    pub fn constant(p: f64, authors: usize) -> Result<Self> {
        Self::new(LawKind::Constant(p), authors)
    }

    pub fn linear(params: LinearParams, authors: usize) -> Result<Self> {
        Self::new(LawKind::Linear(params), authors)
    }

    pub fn tabulated(table: Table, authors: usize) -> Result<Self> {
        Self::new(LawKind::Tabulated(table), authors)
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn authors(&self) -> usize {
        self.authors
    }

    /// Largest event index the law is defined for, if finite.
    pub fn max_events(&self) -> Option<usize> {
        match &self.kind {
            LawKind::Linear(p) | LawKind::Tabulated(Table::ClampedLinear(p)) => Some(p.len()),
            LawKind::Tabulated(Table::Rows(rows)) => Some(rows.len()),
            _ => None,
        }
    }

    pub fn check_events(&self, n: usize) -> Result<()> {
        match self.max_events() {
            Some(max) if n > max => Err(Error::domain(format!(
                "law is defined for at most {max} events, {n} requested"
            ))),
            _ => Ok(()),
        }
    }

    /// `F_n(k)`; zero outside the support `k ≤ n - 1`.
    ///
    /// Panics if `n` is zero or beyond [`CoauthorshipLaw::max_events`].
    pub fn prob(&self, n: usize, k: usize) -> f64 {
        assert!(n >= 1, "event indices start at 1");
        if k >= n {
            return 0.0;
        }
        let kf = k as f64;
        match &self.kind {
            LawKind::Constant(p) => *p,
            LawKind::Linear(p) => p.a(n) * kf + p.b(n),
            LawKind::Tabulated(table) => match table {
                Table::Rows(rows) => rows[n - 1][k],
                Table::AffineInCount { slope, intercept } => clamp01(slope * kf + intercept),
                Table::AffineInEvent { slope, intercept } => clamp01(slope * n as f64 + intercept),
                Table::ClampedLinear(p) => clamp01(p.a(n) * kf + p.b(n)),
            },
        }
    }

    /// `Some(p)` when `F_n(k) = p` for every `n` and every `k` in the support.
    pub fn constant_probability(&self) -> Option<f64> {
        match self.kind {
            LawKind::Constant(p) => Some(p),
            _ => None,
        }
    }
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `F_n(k)` under `law`.
pub fn evaluate_f(law: &CoauthorshipLaw, n: usize, k: usize) -> f64 {
    law.prob(n, k)
}

/// Joint-paper counts `m_{n,i}` after `n` events, with an index from count
/// value to the authors holding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    counts: Vec<u32>,
    buckets: Vec<Vec<u32>>,
    slot: Vec<u32>,
    events: usize,
}

impl History {
    pub fn new(authors: usize) -> Self {
        Self {
            counts: vec![0; authors],
            buckets: vec![(0..authors as u32).collect()],
            slot: (0..authors as u32).collect(),
            events: 0,
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn events(&self) -> usize {
        self.events
    }

    /// Authors with exactly `k` joint papers, in no particular order.
    pub fn authors_with(&self, k: usize) -> &[u32] {
        self.buckets.get(k).map_or(&[], Vec::as_slice)
    }

    /// Applies one event with co-author set `set`.
    pub fn record(&mut self, set: &[u32]) {
        for &i in set {
            let i = i as usize;
            let k = self.counts[i] as usize;
            let pos = self.slot[i] as usize;
            let bucket = &mut self.buckets[k];
            bucket.swap_remove(pos);
            if let Some(&moved) = bucket.get(pos) {
                self.slot[moved as usize] = pos as u32;
            }
            if self.buckets.len() <= k + 1 {
                self.buckets.push(Vec::new());
            }
            self.slot[i] = self.buckets[k + 1].len() as u32;
            self.buckets[k + 1].push(i as u32);
            self.counts[i] += 1;
        }
        self.events += 1;
    }
}

/// Realized co-author sets `C_1, …, C_N`, optionally aligned with event times.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    law: CoauthorshipLaw,
    sets: Vec<Vec<u32>>,
    history: History,
    timeline: Option<EventTimeline>,
}

impl SimulationRun {
    /// Builds a run from recorded sets. Sets are sorted; ids must be `< L`.
    pub fn from_sets(law: CoauthorshipLaw, mut sets: Vec<Vec<u32>>) -> Result<Self> {
        let authors = law.authors();
        let mut history = History::new(authors);
        for (idx, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::validation(format!(
                    "event {} lists an author twice",
                    idx + 1
                )));
            }
            if set.last().is_some_and(|&i| i as usize >= authors) {
                return Err(Error::validation(format!(
                    "event {} has an author id outside 0..{authors}",
                    idx + 1
                )));
            }
            history.record(set);
        }
        Ok(Self {
            law,
            sets,
            history,
            timeline: None,
        })
    }

    pub fn law(&self) -> &CoauthorshipLaw {
        &self.law
    }

    pub fn authors(&self) -> usize {
        self.law.authors()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn coauthor_sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// `C_n`, 1-based.
    pub fn set(&self, n: usize) -> &[u32] {
        &self.sets[n - 1]
    }

    /// `#C_n` for `n = 1..=len`.
    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.iter().map(Vec::len)
    }

    /// Counts after the last event.
    pub fn history(&self) -> &History {
        &self.history
    }

    /// Counts `m_{n,·}` after `n` events, replayed from the sets.
    pub fn history_at(&self, n: usize) -> History {
        let mut h = History::new(self.authors());
        for set in &self.sets[..n.min(self.sets.len())] {
            h.record(set);
        }
        h
    }

    pub fn timeline(&self) -> Option<&EventTimeline> {
        self.timeline.as_ref()
    }

    /// `(E_n, #C_n)` pairs; `None` when no times are attached.
    pub fn timed_sizes(&self) -> Option<impl Iterator<Item = (f64, usize)> + '_> {
        let tl = self.timeline.as_ref()?;
        Some(tl.times().iter().copied().zip(self.sizes()))
    }

    /// CSV with columns `event_index,event_time,coauthor_ids`; ids joined by `;`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["event_index", "event_time", "coauthor_ids"])?;
        let times = self.timeline.as_ref().map(EventTimeline::times);
        for (idx, set) in self.sets.iter().enumerate() {
            let time = times.map_or(String::new(), |t| t[idx].to_string());
            let ids = set.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
            wtr.write_record([(idx + 1).to_string(), time, ids])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads the format of [`SimulationRun::write_csv`]. Event times, when
    /// present on every row, are attached with the given horizon.
    pub fn read_csv<R: Read>(input: R, law: CoauthorshipLaw, horizon: f64) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut sets = Vec::new();
        let mut times = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad =
                |what: &str| Error::validation(format!("run CSV row {}: bad {what}", row + 1));
            let index: usize = rec
                .get(0)
                .ok_or_else(|| bad("index"))?
                .trim()
                .parse()
                .map_err(|_| bad("index"))?;
            if index != row + 1 {
                return Err(bad("index order"));
            }
            let time = rec.get(1).unwrap_or_default().trim();
            if !time.is_empty() {
                times.push(time.parse::<f64>().map_err(|_| bad("time"))?);
            }
            let ids = rec.get(2).unwrap_or_default().trim();
            let set = if ids.is_empty() {
                Vec::new()
            } else {
                ids.split(';')
                    .map(|s| s.trim().parse::<u32>().map_err(|_| bad("author id")))
                    .collect::<Result<Vec<_>>>()?
            };
            sets.push(set);
        }
        let run = Self::from_sets(law, sets)?;
        if times.is_empty() {
            Ok(run)
        } else if times.len() == run.len() {
            Ok(attach_event_times(
                run,
                &EventTimeline::new(times, horizon)?,
            ))
        } else {
            Err(Error::validation(
                "event_time must be given on every row or on none",
            ))
        }
    }
}

/// Simulates `num_events` co-author sets, reproducibly from `seed`.
pub fn simulate_coauthor_sets(
    law: &CoauthorshipLaw,
    num_events: usize,
    seed: u64,
) -> Result<SimulationRun> {
    simulate_coauthor_sets_with(law, num_events, &mut rng_from_seed(seed))
}

pub fn simulate_coauthor_sets_with<R: Rng + ?Sized>(
    law: &CoauthorshipLaw,
    num_events: usize,
    rng: &mut R,
) -> Result<SimulationRun> {
    law.check_events(num_events)?;
    let authors = law.authors();
    let mut history = History::new(authors);
    let mut sets = Vec::with_capacity(num_events);
    let mut probs = Vec::new();
    for n in 1..=num_events {
        probs.clear();
        probs.extend((0..n).map(|k| law.prob(n, k)));
        let set: Vec<u32> = history
            .counts()
            .iter()
            .enumerate()
            .filter(|&(_, &m)| rng.random::<f64>() < probs[m as usize])
            .map(|(i, _)| i as u32)
            .collect();
        history.record(&set);
        sets.push(set);
    }
    Ok(SimulationRun {
        law: law.clone(),
        sets,
        history,
        timeline: None,
    })
}

/// Aligns event `n` with `E_n`. Events beyond the timeline are dropped.
pub fn attach_event_times(run: SimulationRun, timeline: &EventTimeline) -> SimulationRun {
    let len = run.len().min(timeline.len());
    let SimulationRun {
        law,
        mut sets,
        history,
        ..
    } = run;
    let history = if len == sets.len() {
        history
    } else {
        sets.truncate(len);
        let mut h = History::new(law.authors());
        for set in &sets {
            h.record(set);
        }
        h
    };
    SimulationRun {
        law,
        sets,
        history,
        timeline: Some(timeline.truncated(len)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let c = CoauthorshipLaw::constant(0.01, 100).unwrap();
        assert_eq!(evaluate_f(&c, 7, 3), 0.01);
        assert_eq!(evaluate_f(&c, 3, 3), 0.0);

        let flat = LinearParams::new(vec![0.0; 10], vec![0.3; 10]).unwrap();
        let lin = CoauthorshipLaw::linear(flat, 10).unwrap();
        assert_eq!(evaluate_f(&lin, 5, 2), 0.3);

        let clamp = CoauthorshipLaw::tabulated(
            Table::AffineInCount {
                slope: 0.05,
                intercept: 0.005,
            },
            100,
        )
        .unwrap();
        assert_eq!(evaluate_f(&clamp, 40, 25), 1.0);
        assert!((evaluate_f(&clamp, 40, 2) - 0.105).abs() < 1e-15);
    }

    #[test]
    fn inadmissible_linear_is_rejected() {
        assert!(LinearParams::new(vec![0.0, 0.9], vec![0.1, 0.2]).is_err());
        assert!(LinearParams::new(vec![0.0], vec![1.2]).is_err());
        assert!(LinearParams::new(vec![0.0, -0.3], vec![0.1, 0.2]).is_err());
        assert!(LinearParams::new(vec![0.0, 0.8], vec![0.1, 0.2]).is_ok());
        // Base-10 logarithm makes the intercept negative for small n.
        assert!(LinearParams::log_schedule(0.4, 0.05, LogBase::Ten, 30).is_err());
        assert!(LinearParams::log_schedule(0.4, 0.05, LogBase::Natural, 500).is_ok());
    }

    #[test]
    fn table_rows_shape_checked() {
        assert!(CoauthorshipLaw::tabulated(Table::Rows(vec![vec![0.1], vec![0.2]]), 3).is_err());
        assert!(
            CoauthorshipLaw::tabulated(Table::Rows(vec![vec![0.1], vec![0.2, 1.5]]), 3).is_err()
        );
        let law =
            CoauthorshipLaw::tabulated(Table::Rows(vec![vec![0.1], vec![0.2, 0.7]]), 3).unwrap();
        assert_eq!(law.max_events(), Some(2));
        assert!(simulate_coauthor_sets(&law, 3, 0).is_err());
    }

    #[test]
    fn degenerate_laws() {
        let never = CoauthorshipLaw::constant(0.0, 5).unwrap();
        let run = simulate_coauthor_sets(&never, 4, 9).unwrap();
        assert!(run.coauthor_sets().iter().all(Vec::is_empty));

        let always = CoauthorshipLaw::constant(1.0, 5).unwrap();
        let run = simulate_coauthor_sets(&always, 4, 9).unwrap();
        assert!(run.coauthor_sets().iter().all(|s| s.len() == 5));
        assert!(run.history().counts().iter().all(|&m| m == 4));
    }

    #[test]
    fn history_index_matches_counts() {
        let law = CoauthorshipLaw::tabulated(
            Table::AffineInCount {
                slope: 0.2,
                intercept: 0.1,
            },
            50,
        )
        .unwrap();
        let run = simulate_coauthor_sets(&law, 12, 4).unwrap();
        let h = run.history();
        assert_eq!(h, &run.history_at(12));
        for k in 0..=12 {
            let mut from_index: Vec<u32> = h.authors_with(k).to_vec();
            from_index.sort_unstable();
            let direct: Vec<u32> = (0..50u32)
                .filter(|&i| h.counts()[i as usize] as usize == k)
                .collect();
            assert_eq!(from_index, direct);
        }
    }

    #[test]
    fn attach_truncates() {
        let law = CoauthorshipLaw::constant(0.3, 10).unwrap();
        let run = simulate_coauthor_sets(&law, 5, 1).unwrap();
        let tl = EventTimeline::new(vec![1.0, 2.0, 3.0], 10.0).unwrap();
        let joined = attach_event_times(run.clone(), &tl);
        assert_eq!(joined.len(), 3);
        assert_eq!(joined.history(), &run.history_at(3));
        assert_eq!(joined.timeline().unwrap().len(), 3);

        let empty = attach_event_times(run, &EventTimeline::empty(10.0));
        assert!(empty.is_empty());
        assert_eq!(empty.history().counts(), &[0; 10]);

        let none = simulate_coauthor_sets(&law, 0, 1).unwrap();
        assert!(attach_event_times(none, &tl).is_empty());
    }

    #[test]
    fn run_csv_round_trip() {
        let law = CoauthorshipLaw::constant(0.2, 8).unwrap();
        let run = simulate_coauthor_sets(&law, 6, 2).unwrap();
        let tl = EventTimeline::new(vec![0.5, 1.0, 2.5, 3.0, 7.25, 9.0], 12.0).unwrap();
        let run = attach_event_times(run, &tl);
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let back = SimulationRun::read_csv(buf.as_slice(), law, 12.0).unwrap();
        assert_eq!(run, back);
    }
}
