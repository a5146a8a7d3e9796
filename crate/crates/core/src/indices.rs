//! Window counts `X_k[s, t]`, `N[s, t]` and the generalised collaboration
//! index `I_φ = Σ_k φ(k) X_k / N`.
//!
//! `k` is the number of authors on a paper, ego included, so a paper with
//! co-author set `C_n` has `k = #C_n + 1`. An index over a window without
//! papers is undefined and reported as `None`.

use std::collections::BTreeMap;

use crate::collab_model::SimulationRun;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WindowCounts {
    pub start: f64,
    pub end: f64,
    pub n_total: u64,
    /// `k → X_k`, only for `k` with at least one paper.
    pub by_size: BTreeMap<usize, u64>,
}

impl WindowCounts {
    pub fn empty(start: f64, end: f64) -> Self {
        Self {
            start,
            end,
            n_total: 0,
            by_size: BTreeMap::new(),
        }
    }

    pub fn from_author_counts(start: f64, end: f64, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut w = Self::empty(start, end);
        for k in sizes {
            w.add_paper(k);
        }
        w
    }

    pub fn add_paper(&mut self, authors: usize) {
        *self.by_size.entry(authors).or_default() += 1;
        self.n_total += 1;
    }

    /// `X_k`.
    pub fn count(&self, k: usize) -> u64 {
        self.by_size.get(&k).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &WindowCounts) {
        for (&k, &c) in &other.by_size {
            *self.by_size.entry(k).or_default() += c;
        }
        self.n_total += other.n_total;
        self.start = self.start.min(other.start);
        self.end = self.end.max(other.end);
    }
}

/// Weight function of a generalised index. Non-decreasing with `φ(1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Phi {
    /// `φ(k) = k - 1`, the mean number of co-authors.
    CollaborativeIndex,
    /// `φ(k) = 1{k ≥ 2}`, the fraction of multi-author papers.
    DegreeOfCollaboration,
    /// `φ(k) = 1 - 1/k`.
    CollaborativeCoefficient,
    /// `values[k - 1] = φ(k)`; constant beyond the last value.
    Custom(Vec<f64>),
}

impl Phi {
    pub const STANDARD: [Phi; 3] = [
        Phi::CollaborativeIndex,
        Phi::DegreeOfCollaboration,
        Phi::CollaborativeCoefficient,
    ];

    pub fn custom(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            Some(&v) if v == 0.0 => {}
            _ => return Err(Error::validation("custom φ needs φ(1) = 0")),
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::validation("custom φ must be finite and non-decreasing"));
        }
        Ok(Phi::Custom(values))
    }

    /// `φ(k)` for `k ≥ 1` authors.
    pub fn eval(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self {
            Phi::CollaborativeIndex => k as f64 - 1.0,
            Phi::DegreeOfCollaboration => {
                if k >= 2 {
                    1.0
                } else {
                    0.0
                }
            }
            Phi::CollaborativeCoefficient => 1.0 - 1.0 / k as f64,
            Phi::Custom(values) => values[(k - 1).min(values.len() - 1)],
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            Phi::CollaborativeIndex => "ci",
            Phi::DegreeOfCollaboration => "dc",
            Phi::CollaborativeCoefficient => "cc",
            Phi::Custom(_) => "custom",
        }
    }
}

/// `I_φ` over the window, `None` when it holds no papers.
pub fn index_value(counts: &WindowCounts, phi: &Phi) -> Option<f64> {
    if counts.n_total == 0 {
        return None;
    }
    let weighted: f64 = counts
        .by_size
        .iter()
        .map(|(&k, &x)| phi.eval(k) * x as f64)
        .sum();
    Some(weighted / counts.n_total as f64)
}

fn require_times(run: &SimulationRun) -> Result<impl Iterator<Item = (f64, usize)> + '_> {
    run.timed_sizes()
        .ok_or_else(|| Error::Usage("run has no event times attached".into()))
}

/// Counts over the closed window `[s, t]`.
pub fn window_counts(run: &SimulationRun, s: f64, t: f64) -> Result<WindowCounts> {
    if t < s {
        return Err(Error::domain(format!("window [{s}, {t}] is reversed")));
    }
    let sizes = require_times(run)?
        .filter(|&(e, _)| e >= s && e <= t)
        .map(|(_, c)| c + 1);
    Ok(WindowCounts::from_author_counts(s, t, sizes))
}

/// Counts over consecutive windows `[j y, (j + 1) y)` covering the run's
/// horizon; the last window may be partial.
pub fn yearly_window_counts(run: &SimulationRun, year_length: f64) -> Result<Vec<WindowCounts>> {
    if !(year_length > 0.0) {
        return Err(Error::validation(format!("year length must be positive, got {year_length}")));
    }
    let horizon = run
        .timeline()
        .ok_or_else(|| Error::Usage("run has no event times attached".into()))?
        .horizon();
    let years = (horizon / year_length).ceil().max(0.0) as usize;
    let mut windows: Vec<WindowCounts> = (0..years)
        .map(|j| WindowCounts::empty(j as f64 * year_length, (j + 1) as f64 * year_length))
        .collect();
    for (e, c) in require_times(run)? {
        let j = (e / year_length).floor() as usize;
        // An event exactly at the horizon belongs to the last window.
        if let Some(w) = windows.get_mut(j.min(years.saturating_sub(1))) {
            w.add_paper(c + 1);
        }
    }
    Ok(windows)
}

/// `(year index, I_φ)` for each yearly window.
pub fn yearly_index_series(
    run: &SimulationRun,
    phi: &Phi,
    year_length: f64,
) -> Result<Vec<(usize, Option<f64>)>> {
    Ok(yearly_window_counts(run, year_length)?
        .iter()
        .enumerate()
        .map(|(j, w)| (j, index_value(w, phi)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collab_model::{attach_event_times, CoauthorshipLaw};
    use crate::process::EventTimeline;

    fn two_paper_run() -> SimulationRun {
        let law = CoauthorshipLaw::constant(0.5, 4).unwrap();
        let run = SimulationRun::from_sets(law, vec![vec![], vec![0, 2]]).unwrap();
        attach_event_times(run, &EventTimeline::new(vec![1.0, 2.0], 24.0).unwrap())
    }

    #[test]
    fn hand_enumerated_window() {
        let w = window_counts(&two_paper_run(), 0.0, 3.0).unwrap();
        assert_eq!(w.n_total, 2);
        assert_eq!(w.by_size, BTreeMap::from([(1, 1), (3, 1)]));

        let empty = window_counts(&two_paper_run(), 5.0, 6.0).unwrap();
        assert_eq!(empty.n_total, 0);
        assert!(empty.by_size.is_empty());
        assert_eq!(index_value(&empty, &Phi::CollaborativeIndex), None);
    }

    #[test]
    fn hand_evaluated_indices() {
        let w = WindowCounts::from_author_counts(0.0, 1.0, [1, 3]);
        assert_eq!(index_value(&w, &Phi::CollaborativeIndex), Some(1.0));
        assert_eq!(index_value(&w, &Phi::DegreeOfCollaboration), Some(0.5));
        let cc = index_value(&w, &Phi::CollaborativeCoefficient).unwrap();
        assert!((cc - 1.0 / 3.0).abs() < 1e-15);

        let solo = WindowCounts::from_author_counts(0.0, 1.0, [1, 1, 1]);
        for phi in &Phi::STANDARD {
            assert_eq!(index_value(&solo, phi), Some(0.0));
        }
    }

    #[test]
    fn custom_phi_validation() {
        assert!(Phi::custom(vec![0.1, 0.2]).is_err());
        assert!(Phi::custom(vec![0.0, 0.5, 0.4]).is_err());
        let phi = Phi::custom(vec![0.0, 0.5, 2.0]).unwrap();
        assert_eq!(phi.eval(10), 2.0);
    }

    #[test]
    fn yearly_series_shape() {
        let run = two_paper_run();
        let series = yearly_index_series(&run, &Phi::CollaborativeIndex, 12.0).unwrap();
        assert_eq!(series, vec![(0, Some(1.0)), (1, None)]);

        let law = CoauthorshipLaw::constant(0.5, 4).unwrap();
        let none = SimulationRun::from_sets(law, vec![]).unwrap();
        let none = attach_event_times(none, &EventTimeline::empty(30.0));
        let series = yearly_index_series(&none, &Phi::DegreeOfCollaboration, 12.0).unwrap();
        assert_eq!(series.len(), 3);
        assert!(series.iter().all(|(_, v)| v.is_none()));
    }

    #[test]
    fn untimed_run_is_a_usage_error() {
        let law = CoauthorshipLaw::constant(0.5, 4).unwrap();
        let run = SimulationRun::from_sets(law, vec![vec![1]]).unwrap();
        assert!(matches!(window_counts(&run, 0.0, 1.0), Err(Error::Usage(_))));
    }
}
