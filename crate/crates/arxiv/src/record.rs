//! Metadata records and their JSON-lines reader.
//!
//! Each input line is one JSON object with at least `id`, `categories` and
//! `authors`. `categories` may be a space-separated string (the snapshot
//! format) or an array. `authors` may be a string in the snapshot's
//! `"A. One, B. Two and C. Three"` style or an array of names; when an
//! `authors_parsed` array of `[last, first, suffix]` triples is present it
//! takes precedence.

use std::fmt;
use std::io::{BufRead, Write};

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Submission month encoded in an identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: u16,
    /// 1-based.
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: u16, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Id(format!("month {month} out of range")));
        }
        Ok(Self { year, month })
    }

    /// Months since January of year 0.
    pub fn index(self) -> u32 {
        u32::from(self.year) * 12 + u32::from(self.month) - 1
    }

    pub fn from_index(index: u32) -> Self {
        Self {
            year: (index / 12) as u16,
            month: (index % 12) as u8 + 1,
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

fn two_digits(s: &str) -> Option<u8> {
    (s.len() == 2 && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok())?
}

/// Submission month of an identifier. New-style ids are `YYMM.NNNN` or
/// `YYMM.NNNNN` (from April 2007), optionally with a version suffix;
/// old-style ids are `archive/YYMMNNN` or `archive.SUB/YYMMNNN`, with years
/// 91–99 in the 1900s.
pub fn parse_year_month(id: &str) -> Result<YearMonth> {
    let bad = || Error::Id(format!("unrecognised identifier `{id}`"));
    let id = id.trim();
    let id = id.strip_prefix("arXiv:").unwrap_or(id);
    if let Some((archive, rest)) = id.split_once('/') {
        if archive.is_empty() || rest.len() < 7 || !rest[..7].bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let yy = two_digits(&rest[..2]).ok_or_else(bad)?;
        let mm = two_digits(&rest[2..4]).ok_or_else(bad)?;
        let year = if yy >= 91 { 1900 + u16::from(yy) } else { 2000 + u16::from(yy) };
        return YearMonth::new(year, mm).map_err(|_| bad());
    }
    let (head, tail) = id.split_once('.').ok_or_else(bad)?;
    let digits = tail.split('v').next().unwrap_or("");
    if head.len() != 4 || !(4..=5).contains(&digits.len()) || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let yy = two_digits(&head[..2]).ok_or_else(bad)?;
    let mm = two_digits(&head[2..]).ok_or_else(bad)?;
    YearMonth::new(2000 + u16::from(yy), mm).map_err(|_| bad())
}

/// Trims and collapses internal whitespace; `"Last, First"` becomes
/// `"First Last"`.
pub fn normalize_author(name: &str) -> String {
    let collapse = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    match name.split_once(',') {
        Some((last, first))
            if !first.contains(',') && !first.trim().is_empty() && !last.trim().is_empty() =>
        {
            collapse(&format!("{first} {last}"))
        }
        _ => collapse(&name.replace(',', " ")),
    }
}

fn strip_parentheses(s: &str) -> String {
    let mut depth = 0usize;
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

/// Splits a snapshot-style author string on commas and the word `and`,
/// dropping parenthesised affiliations.
pub fn split_author_string(s: &str) -> Vec<String> {
    let cleaned = strip_parentheses(s).replace('\n', " ");
    cleaned
        .split(',')
        .flat_map(|part| {
            let part = part.trim();
            let part = part.strip_prefix("and ").unwrap_or(part);
            part.split(" and ").map(str::to_string).collect::<Vec<_>>()
        })
        .map(|p| p.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|p| !p.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperRecord {
    pub id: String,
    pub year_month: YearMonth,
    pub categories: Vec<String>,
    /// Normalised, distinct, in input order.
    pub authors: Vec<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Value,
    #[serde(default)]
    categories: Value,
    #[serde(default)]
    authors: Value,
    #[serde(default)]
    authors_parsed: Option<Vec<Vec<String>>>,
}

/// Why a line was skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    Malformed,
    BadId,
    NoAuthors,
}

fn dedup(names: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for n in names {
        if !n.is_empty() && !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

impl PaperRecord {
    pub fn new(id: &str, categories: Vec<String>, authors: Vec<String>) -> Result<Self> {
        let year_month = parse_year_month(id)?;
        let authors = dedup(authors.iter().map(|a| normalize_author(a)));
        if authors.is_empty() {
            return Err(Error::Usage(format!("record `{id}` has no authors")));
        }
        Ok(Self {
            id: id.trim().to_string(),
            year_month,
            categories,
            authors,
        })
    }

    /// Parses one JSON line.
    pub fn from_json_line(line: &str) -> std::result::Result<Self, SkipReason> {
        let raw: RawRecord = serde_json::from_str(line).map_err(|_| SkipReason::Malformed)?;
        let id = match raw.id {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            _ => return Err(SkipReason::Malformed),
        };
        let year_month = parse_year_month(&id).map_err(|_| SkipReason::BadId)?;
        let categories = match raw.categories {
            Value::String(s) => s.split_whitespace().map(str::to_string).collect(),
            Value::Array(v) => v
                .into_iter()
                .filter_map(|c| c.as_str().map(|s| s.trim().to_string()))
                .filter(|c| !c.is_empty())
                .collect(),
            Value::Null => Vec::new(),
            _ => return Err(SkipReason::Malformed),
        };
        let names: Vec<String> = match (raw.authors_parsed, raw.authors) {
            (Some(parsed), _) if !parsed.is_empty() => parsed
                .iter()
                .map(|parts| {
                    let last = parts.first().map(String::as_str).unwrap_or("");
                    let first = parts.get(1).map(String::as_str).unwrap_or("");
                    let suffix = parts.get(2).map(String::as_str).unwrap_or("");
                    format!("{first} {last} {suffix}")
                })
                .collect(),
            (_, Value::String(s)) => split_author_string(&s),
            (_, Value::Array(v)) => v
                .into_iter()
                .filter_map(|a| a.as_str().map(str::to_string))
                .collect(),
            (_, Value::Null) => Vec::new(),
            _ => return Err(SkipReason::Malformed),
        };
        let authors = dedup(names.iter().map(|a| normalize_author(a)));
        if authors.is_empty() {
            return Err(SkipReason::NoAuthors);
        }
        Ok(Self {
            id: id.trim().to_string(),
            year_month,
            categories,
            authors,
        })
    }

    /// One JSON line, readable by [`PaperRecord::from_json_line`].
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "id": self.id,
            "categories": self.categories.join(" "),
            "authors": self.authors,
        })
        .to_string()
    }

    /// Number of authors on the paper.
    pub fn size(&self) -> usize {
        self.authors.len()
    }
}

pub fn write_jsonl<'a, W: Write>(mut out: W, records: impl IntoIterator<Item = &'a PaperRecord>) -> Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    out.flush()?;
    Ok(())
}

/// Line and skip counters of a [`RecordReader`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub lines: u64,
    pub blank: u64,
    pub records: u64,
    pub malformed: u64,
    pub bad_id: u64,
    pub no_authors: u64,
}

impl ParseStats {
    pub fn skipped(&self) -> u64 {
        self.malformed + self.bad_id + self.no_authors
    }
}

/// Streams records from JSON lines, skipping and counting bad lines. Only
/// I/O failures are returned as errors.
pub struct RecordReader<R> {
    input: R,
    line: String,
    stats: ParseStats,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(input: R) -> Self {
        Self {
            input,
            line: String::new(),
            stats: ParseStats::default(),
        }
    }

    pub fn stats(&self) -> ParseStats {
        self.stats
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<PaperRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.line.clear();
            match self.input.read_line(&mut self.line) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.stats.lines += 1;
            let text = self.line.trim();
            if text.is_empty() {
                self.stats.blank += 1;
                continue;
            }
            match PaperRecord::from_json_line(text) {
                Ok(r) => {
                    self.stats.records += 1;
                    return Some(Ok(r));
                }
                Err(SkipReason::Malformed) => self.stats.malformed += 1,
                Err(SkipReason::BadId) => self.stats.bad_id += 1,
                Err(SkipReason::NoAuthors) => self.stats.no_authors += 1,
            }
        }
    }
}

/// Reads every record of a JSON-lines source.
pub fn parse_metadata<R: BufRead>(input: R) -> Result<(Vec<PaperRecord>, ParseStats)> {
    let mut reader = RecordReader::new(input);
    let records = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((records, reader.stats()))
}
