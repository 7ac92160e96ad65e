//! Core library for the conversation-analytics toolkit.
//!
//! Everything in here is pure computation: WebVTT ingestion, utterance
//! reconstruction, volatility and turn-taking metrics, longitudinal trends,
//! and a small synthetic-meeting simulator. Persistence, rendering and
//! transport live in sibling crates.
//!
//! Time is carried as integer milliseconds (`u64`) end to end; seconds
//! (`f64`) appear only at presentation boundaries. Metrics that cannot be
//! computed from the available data are *absent* (`None`), never zero.

pub mod config;
pub mod corpus;
pub mod metrics;
pub mod model;
pub mod published;
pub mod sim;
pub mod trend;
pub mod turns;
pub mod volatility;
pub mod vtt;

pub use config::{AnalysisConfig, SplitRule, StddevMode};
pub use corpus::{CorpusSnapshot, MeetingSummary, SegmentTriple, SpeakerSummary};
pub use metrics::{analyze_meeting, MeetingMetrics, SpeakerMetrics};
pub use model::{Meeting, Utterance};
pub use volatility::Segment;
pub use vtt::{parse_transcript, RawCue, TranscriptParseReport};
