//! A million-record stream through every accumulator, with peak memory far
//! below what holding the corpus would need.

use std::io::{BufRead, BufReader, Read};

use mfcollab_arxiv::record::RecordReader;
use mfcollab_arxiv::stats::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RECORDS: u64 = 1_000_000;
const POOL: usize = 1000;

/// JSON lines produced on demand.
struct Synthetic {
    rng: ChaCha8Rng,
    next: u64,
    buf: Vec<u8>,
    pos: usize,
}

impl Read for Synthetic {
    fn read(&mut self, out: &mut [u8]) -> std::io::Result<usize> {
        if self.pos == self.buf.len() {
            if self.next == RECORDS {
                return Ok(0);
            }
            let month = self.next * 120 / RECORDS;
            let (yy, mm) = (10 + month / 12, month % 12 + 1);
            let n = self.rng.random_range(1..=4);
            let authors: Vec<String> = (0..n).map(|_| format!("\"Author {}\"", self.rng.random_range(0..POOL))).collect();
            self.buf = format!(
                "{{\"id\":\"{yy:02}{mm:02}.{:05}\",\"categories\":\"cs.DS\",\"authors\":[{}]}}\n",
                self.next % 100_000,
                authors.join(",")
            )
            .into_bytes();
            self.pos = 0;
            self.next += 1;
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))?
        .split_whitespace()
        .nth(1)?
        .parse()
        .ok()
}

#[test]
fn million_records_stream_in_bounded_memory() {
    let input = BufReader::new(Synthetic {
        rng: ChaCha8Rng::seed_from_u64(1),
        next: 0,
        buf: Vec::new(),
        pos: 0,
    });
    let sample: Vec<String> = (0..100).map(|i| format!("Author {i}")).collect();
    let mut reader = RecordReader::new(input);
    let mut yearly = YearlyAccumulator::new();
    let mut counter = AuthorCounter::new();
    let mut activity = MonthlyActivity::new();
    let mut timelines = TimelineCollector::new(["Author 0", "Author 1"]);
    let mut corr = CorrelationAccumulator::new(&sample, 12).unwrap();
    for r in reader.by_ref() {
        let r = r.unwrap();
        yearly.push(&r);
        counter.push(&r);
        activity.push(&r);
        timelines.push(&r);
        corr.push(&r);
    }
    assert_eq!(reader.stats().records, RECORDS);
    assert_eq!(counter.len(), POOL);
    let years = yearly.finish();
    assert_eq!(years.len(), 10);
    assert_eq!(years.iter().map(|y| y.papers()).sum::<u64>(), RECORDS);
    assert_eq!(corr.finish().len(), 10 * 4);
    assert!(timelines.finish()[0].entries.len() > 1000);
    if let Some(peak) = peak_rss_kib() {
        // The parsed corpus alone would take several hundred MiB.
        assert!(peak < 128 * 1024, "peak RSS {peak} KiB");
    }
}

#[test]
fn reader_is_line_buffered() {
    let mut input = BufReader::with_capacity(
        16,
        Synthetic { rng: ChaCha8Rng::seed_from_u64(2), next: RECORDS - 3, buf: Vec::new(), pos: 0 },
    );
    assert!(input.fill_buf().unwrap().len() <= 16);
    assert_eq!(RecordReader::new(input).count(), 3);
}
