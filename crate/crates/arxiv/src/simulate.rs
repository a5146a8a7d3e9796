//! Synthetic corpora drawn from the model, for validating the pipeline.

use mfcollab::collab_model::{attach_event_times, simulate_coauthor_sets_with, CoauthorshipLaw, SimulationRun};
use mfcollab::process::{sample_event_times_with, IntensityFunction};
use mfcollab::seed::replicate_rng;

use crate::error::{Error, Result};
use crate::record::{PaperRecord, YearMonth};

/// Records of a synthetic corpus and the runs behind them. Run `r` is the
/// history of author `Ego r`; its pool members are `Coauthor r-i`.
#[derive(Debug, Clone)]
pub struct SimulatedCorpus {
    pub records: Vec<PaperRecord>,
    pub runs: Vec<SimulationRun>,
    pub start_year: u16,
}

pub fn ego_name(r: usize) -> String {
    format!("Ego {r}")
}

pub fn coauthor_name(r: usize, i: u32) -> String {
    format!("Coauthor {r}-{i}")
}

/// Simulates `egos` independent egos over `[0, horizon]` months, month 0
/// being January of `start_year`. Event time `t` is filed under month
/// `⌊t⌋`, and an event at the horizon under the last month. Identifiers are
/// new-style with a 5-digit sequence number per month.
pub fn simulate_corpus(
    law: &CoauthorshipLaw,
    f: &IntensityFunction,
    horizon: f64,
    egos: usize,
    seed: u64,
    start_year: u16,
) -> Result<SimulatedCorpus> {
    if !(horizon > 0.0) {
        return Err(Error::Usage(format!("horizon must be positive, got {horizon}")));
    }
    let months = horizon.ceil() as u32;
    let origin = u32::from(start_year) * 12;
    if start_year < 2007 || origin + months > 2100 * 12 {
        return Err(Error::Usage("synthetic identifiers need years in 2007..2100".into()));
    }
    let mut sequence = vec![0u32; months as usize];
    let mut records = Vec::new();
    let mut runs = Vec::with_capacity(egos);
    for r in 0..egos {
        let mut rng = replicate_rng(seed, r as u64);
        let timeline = sample_event_times_with(f, horizon, &mut rng)?;
        let run = simulate_coauthor_sets_with(law, timeline.len(), &mut rng)?;
        let run = attach_event_times(run, &timeline);
        for (&t, set) in timeline.times().iter().zip(run.coauthor_sets()) {
            let month = (t.floor() as u32).min(months - 1);
            let ym = YearMonth::from_index(origin + month);
            sequence[month as usize] += 1;
            let seq = sequence[month as usize];
            if seq > 99_999 {
                return Err(Error::Usage(format!("more than 99999 papers in {ym}")));
            }
            let id = format!("{:02}{:02}.{seq:05}", ym.year % 100, ym.month);
            let mut authors = vec![ego_name(r)];
            authors.extend(set.iter().map(|&i| coauthor_name(r, i)));
            records.push(PaperRecord::new(&id, vec!["cs.SI".into()], authors)?);
        }
        runs.push(run);
    }
    records.sort_by(|a, b| a.year_month.cmp(&b.year_month).then_with(|| a.id.cmp(&b.id)));
    Ok(SimulatedCorpus {
        records,
        runs,
        start_year,
    })
}
