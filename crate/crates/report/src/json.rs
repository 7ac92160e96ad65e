//! Canonical JSON documents: per-meeting reports, cohort aggregates,
//! student trends, sweep tables, and parse-warning payloads.
//!
//! Every document carries `schema_version` and the config fingerprint it was
//! computed under. Emission is hand-rolled (fixed key order, fixed decimal
//! formatting); parsing uses serde.

use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use convo_core::corpus::{CorpusSnapshot, MeetingSummary, SegmentTriple, SpeakerSummary};
use convo_core::metrics::MeetingMetrics;
use convo_core::sim::{SweepRow, RNG_NAME};
use convo_core::trend::{
    cohort_slope_stats, corpus_characteristics, ordinal_average_mcv, StudentTrend,
};
use convo_core::turns::TransitionMatrix;
use convo_core::volatility::Segment;
use convo_core::vtt::TranscriptParseReport;

use crate::canon::{fmt_metric, fmt_opt_metric, json_string};

/// Version stamped into every emitted document.
pub const SCHEMA_VERSION: u32 = 1;

/// Method string recorded alongside quartile-based aggregates.
pub const QUARTILE_METHOD: &str = "linear interpolation between closest ranks";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report document: {0}")]
    Malformed(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
}

/// Whole/first/second values as serialized.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleValues {
    pub first_half: Option<f64>,
    pub second_half: Option<f64>,
    pub whole: Option<f64>,
}

impl TripleValues {
    fn to_triple(self) -> SegmentTriple {
        SegmentTriple {
            whole: self.whole,
            first_half: self.first_half,
            second_half: self.second_half,
        }
    }
}

/// One speaker's serialized row.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerRow {
    pub icv: TripleValues,
    pub n_utterances: usize,
    pub share: Option<f64>,
    pub speaker: String,
    pub speech_seconds: f64,
}

/// Serialized transition matrix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionsDoc {
    pub counts: Vec<Vec<u64>>,
    pub speakers: Vec<String>,
}

/// The per-meeting report document. Field values are exactly what the
/// canonical text carries (3-decimal metrics), so a parsed report re-emits
/// byte-identically.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeetingReport {
    pub config_fingerprint: String,
    /// ISO date, e.g. `2026-01-15`.
    pub date: String,
    pub duration_seconds: f64,
    pub mcv: TripleValues,
    pub meeting_id: String,
    pub n_utterances: usize,
    pub schema_version: u32,
    /// Sorted by speaker id.
    pub speakers: Vec<SpeakerRow>,
    pub transitions: TransitionsDoc,
}

/// Round through the canonical 3-decimal representation — the value a reader
/// of the serialized report would see.
fn canonical(v: f64) -> f64 {
    fmt_metric(v).parse().expect("canonical metric text parses")
}

fn canonical_opt(v: Option<f64>) -> Option<f64> {
    v.map(canonical)
}

fn canonical_triple(values: Option<f64>, first: Option<f64>, second: Option<f64>) -> TripleValues {
    TripleValues {
        first_half: canonical_opt(first),
        second_half: canonical_opt(second),
        whole: canonical_opt(values),
    }
}

impl MeetingReport {
    /// Build the report for computed metrics, rounding every metric to its
    /// canonical 3-decimal value.
    pub fn from_metrics(m: &MeetingMetrics, fingerprint: &str) -> MeetingReport {
        MeetingReport {
            config_fingerprint: fingerprint.to_string(),
            date: m.date.to_string(),
            duration_seconds: canonical(m.duration_seconds),
            mcv: canonical_triple(
                m.meeting_cv.whole.value,
                m.meeting_cv.first_half.value,
                m.meeting_cv.second_half.value,
            ),
            meeting_id: m.meeting_id.clone(),
            n_utterances: m.n_utterances,
            schema_version: SCHEMA_VERSION,
            speakers: m
                .speakers
                .iter()
                .map(|(name, s)| SpeakerRow {
                    icv: canonical_triple(
                        s.cv.whole.value,
                        s.cv.first_half.value,
                        s.cv.second_half.value,
                    ),
                    n_utterances: s.n_utterances,
                    share: canonical_opt(s.share),
                    speaker: name.clone(),
                    speech_seconds: canonical(s.speech_seconds),
                })
                .collect(),
            transitions: TransitionsDoc {
                counts: m.transitions.counts.clone(),
                speakers: m.transitions.speakers.clone(),
            },
        }
    }

    /// Parse canonical text back into a report.
    pub fn parse(text: &str) -> Result<MeetingReport, ReportError> {
        let report: MeetingReport =
            serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(ReportError::SchemaVersion(report.schema_version));
        }
        Ok(report)
    }

    /// Convert to the corpus-snapshot form used by longitudinal statistics.
    pub fn to_summary(&self) -> Result<MeetingSummary, ReportError> {
        let date = self
            .date
            .parse()
            .map_err(|e| ReportError::Malformed(format!("bad date {:?}: {e}", self.date)))?;
        Ok(MeetingSummary {
            meeting_id: self.meeting_id.clone(),
            date,
            n_utterances: self.n_utterances,
            duration_seconds: self.duration_seconds,
            speakers: self
                .speakers
                .iter()
                .map(|s| {
                    (
                        s.speaker.clone(),
                        SpeakerSummary {
                            share: s.share,
                            speech_seconds: s.speech_seconds,
                            n_utterances: s.n_utterances,
                            icv: s.icv.to_triple(),
                        },
                    )
                })
                .collect(),
            mcv: self.mcv.to_triple(),
            transitions: TransitionMatrix {
                speakers: self.transitions.speakers.clone(),
                counts: self.transitions.counts.clone(),
            },
        })
    }
}

fn write_triple(out: &mut String, t: &TripleValues) {
    let _ = write!(
        out,
        "{{\"first_half\":{},\"second_half\":{},\"whole\":{}}}",
        fmt_opt_metric(t.first_half),
        fmt_opt_metric(t.second_half),
        fmt_opt_metric(t.whole)
    );
}

/// Emit the canonical per-meeting JSON document.
pub fn emit_meeting_json(report: &MeetingReport) -> String {
    let mut out = String::with_capacity(1024);
    let _ = write!(
        out,
        "{{\"config_fingerprint\":{},\"date\":{},\"duration_seconds\":{},\"mcv\":",
        json_string(&report.config_fingerprint),
        json_string(&report.date),
        fmt_metric(report.duration_seconds),
    );
    write_triple(&mut out, &report.mcv);
    let _ = write!(
        out,
        ",\"meeting_id\":{},\"n_utterances\":{},\"schema_version\":{},\"speakers\":[",
        json_string(&report.meeting_id),
        report.n_utterances,
        report.schema_version,
    );
    for (i, s) in report.speakers.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"icv\":");
        write_triple(&mut out, &s.icv);
        let _ = write!(
            out,
            ",\"n_utterances\":{},\"share\":{},\"speaker\":{},\"speech_seconds\":{}}}",
            s.n_utterances,
            fmt_opt_metric(s.share),
            json_string(&s.speaker),
            fmt_metric(s.speech_seconds),
        );
    }
    out.push_str("],\"transitions\":{\"counts\":[");
    for (i, row) in report.transitions.counts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, c) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{c}");
        }
        out.push(']');
    }
    out.push_str("],\"speakers\":[");
    for (i, s) in report.transitions.speakers.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&json_string(s));
    }
    out.push_str("]}}");
    out
}

/// Emit a student's trend document.
pub fn emit_trend_json(trend: &StudentTrend, fingerprint: &str) -> String {
    let mut out = String::with_capacity(256);
    let _ = write!(
        out,
        "{{\"config_fingerprint\":{},\"points\":[",
        json_string(fingerprint)
    );
    for (i, p) in trend.points.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"icv\":{},\"meeting_id\":{},\"ordinal\":{}}}",
            fmt_metric(p.icv),
            json_string(&p.meeting_id),
            p.ordinal
        );
    }
    let _ = write!(
        out,
        "],\"schema_version\":{SCHEMA_VERSION},\"segment\":{},\"slope\":{},\"student_id\":{},\"x_mean\":{},\"y_mean\":{}}}",
        json_string(trend.segment.as_str()),
        fmt_opt_metric(trend.slope),
        json_string(&trend.student_id),
        fmt_opt_metric(trend.x_mean),
        fmt_opt_metric(trend.y_mean),
    );
    out
}

/// Emit cohort aggregates for one segment: corpus characteristics, mean m-CV
/// by meeting ordinal, and the distribution of per-student trend slopes.
pub fn emit_cohort_json(corpus: &CorpusSnapshot, segment: Segment) -> String {
    let c = corpus_characteristics(corpus);
    let ordinals = ordinal_average_mcv(corpus);
    let slopes = cohort_slope_stats(corpus, segment).ok();

    let mut out = String::with_capacity(1024);
    let _ = write!(
        out,
        "{{\"characteristics\":{{\"mean_icv\":{},\"mean_mcv\":{},\"mean_meeting_duration_seconds\":{},\"mean_participants\":{},\"mean_student_share\":{},\"n_meetings\":{},\"n_students\":{},\"total_duration_seconds\":{}}}",
        fmt_opt_metric(c.mean_icv),
        fmt_opt_metric(c.mean_mcv),
        fmt_opt_metric(c.mean_meeting_duration_seconds),
        fmt_opt_metric(c.mean_participants),
        fmt_opt_metric(c.mean_student_share),
        c.n_meetings,
        c.n_students,
        fmt_metric(c.total_duration_seconds),
    );
    let _ = write!(
        out,
        ",\"config_fingerprint\":{},\"ordinal_average_mcv\":[",
        json_string(&corpus.config_fingerprint)
    );
    for (i, row) in ordinals.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"mean_mcv\":{},\"n_meetings\":{},\"ordinal\":{}}}",
            fmt_metric(row.mean_mcv),
            row.n_meetings,
            row.ordinal
        );
    }
    let _ = write!(
        out,
        "],\"quartile_method\":{},\"schema_version\":{SCHEMA_VERSION},\"segment\":{},\"slope_stats\":",
        json_string(QUARTILE_METHOD),
        json_string(segment.as_str()),
    );
    match slopes {
        None => out.push_str("null"),
        Some(s) => {
            let _ = write!(
                out,
                "{{\"mean\":{},\"n_excluded\":{},\"n_students\":{},\"summary\":{{\"max\":{},\"mean\":{},\"median\":{},\"min\":{},\"n\":{},\"q1\":{},\"q3\":{}}}}}",
                fmt_metric(s.mean),
                s.n_excluded,
                s.n_students,
                fmt_metric(s.summary.max),
                fmt_metric(s.summary.mean),
                fmt_metric(s.summary.median),
                fmt_metric(s.summary.min),
                s.summary.n,
                fmt_metric(s.summary.q1),
                fmt_metric(s.summary.q3),
            );
        }
    }
    out.push('}');
    out
}

/// Emit a simulator sweep table.
pub fn emit_sweep_json(rows: &[SweepRow], seed: u64, fingerprint: &str) -> String {
    let mut out = String::with_capacity(256);
    let n_runs = rows.first().map(|r| r.n_runs).unwrap_or(0);
    let _ = write!(
        out,
        "{{\"config_fingerprint\":{},\"metadata\":{{\"n_runs\":{n_runs},\"rng\":{},\"seed\":{seed}}},\"rows\":[",
        json_string(fingerprint),
        json_string(RNG_NAME),
    );
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"backchannel_rate\":{},\"mean_icv\":{},\"mean_mcv\":{}}}",
            fmt_metric(r.backchannel_rate),
            fmt_opt_metric(r.mean_icv),
            fmt_opt_metric(r.mean_mcv),
        );
    }
    let _ = write!(out, "],\"schema_version\":{SCHEMA_VERSION}}}");
    out
}

/// Emit a transcript-ingestion result: warnings plus the source checksum.
pub fn emit_warnings_json(report: &TranscriptParseReport) -> String {
    let mut out = String::with_capacity(128);
    let _ = write!(
        out,
        "{{\"schema_version\":{SCHEMA_VERSION},\"source_checksum\":{},\"warnings\":[",
        json_string(&report.source_checksum)
    );
    for (i, w) in report.warnings.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(
            out,
            "{{\"line\":{},\"message\":{}}}",
            w.line,
            json_string(&w.message)
        );
    }
    out.push_str("]}");
    out
}
