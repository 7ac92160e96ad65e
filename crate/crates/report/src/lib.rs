//! Serialization and rendering for conversation metrics: canonical JSON,
//! CSV exports, and static SVG/HTML report pages.
//!
//! JSON output is *canonical*: object keys in lexicographic order, metric
//! values at exactly three decimals, absent values as explicit `null`.
//! Canonical text is the interchange format the rest of the toolkit trusts —
//! cached copies are compared byte-for-byte and cohort statistics are
//! computed from the values as serialized, so anyone holding the JSON can
//! reproduce every downstream aggregate exactly.

pub mod canon;
pub mod csv;
pub mod html;
pub mod json;
pub mod svg;

pub use json::{
    emit_cohort_json, emit_meeting_json, emit_sweep_json, emit_trend_json, emit_warnings_json,
    MeetingReport, ReportError, SCHEMA_VERSION,
};
