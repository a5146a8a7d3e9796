//! arXiv metadata ingestion and the empirical counterparts of the model's
//! quantities: yearly collaboration indices, the most productive authors,
//! co-authors per `k`-th paper, correlations of window counts and the
//! estimated co-authorship probabilities `F̂_n(k)`.
//!
//! Input is the JSON-lines metadata snapshot. Records are streamed; see
//! [`record::RecordReader`].

pub mod discipline;
pub mod error;
pub mod pipeline;
pub mod record;
pub mod simulate;
pub mod stats;

pub use discipline::{discipline_filter, Discipline};
pub use error::{Error, Result};
pub use record::{parse_metadata, PaperRecord, ParseStats, RecordReader, YearMonth};
