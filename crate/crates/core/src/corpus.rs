//! In-memory view of an analyzed corpus.
//!
//! A [`CorpusSnapshot`] holds, per meeting, exactly the values that appear
//! in the meeting's serialized report — longitudinal statistics are defined
//! over reported (3-decimal) metric values so that anyone holding the
//! per-meeting reports can reproduce every aggregate bit for bit.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::metrics::MeetingMetrics;
use crate::turns::TransitionMatrix;
use crate::volatility::Segment;

/// Whole/first-half/second-half values of one metric, each possibly absent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegmentTriple {
    pub whole: Option<f64>,
    pub first_half: Option<f64>,
    pub second_half: Option<f64>,
}

impl SegmentTriple {
    pub fn get(&self, segment: Segment) -> Option<f64> {
        match segment {
            Segment::Whole => self.whole,
            Segment::FirstHalf => self.first_half,
            Segment::SecondHalf => self.second_half,
        }
    }
}

/// One speaker's reported per-meeting metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerSummary {
    /// Fraction of total speaking time; absent when the meeting had none.
    pub share: Option<f64>,
    pub speech_seconds: f64,
    pub n_utterances: usize,
    pub icv: SegmentTriple,
}

/// One meeting's reported metrics, as they appear in its serialized report.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingSummary {
    pub meeting_id: String,
    pub date: NaiveDate,
    pub n_utterances: usize,
    pub duration_seconds: f64,
    /// Keyed by resolved speaker id.
    pub speakers: BTreeMap<String, SpeakerSummary>,
    pub mcv: SegmentTriple,
    pub transitions: TransitionMatrix,
}

impl MeetingSummary {
    /// Build a summary directly from in-memory metrics, keeping full float
    /// precision. The store builds summaries from serialized reports instead
    /// (3-decimal values); this constructor serves tests and ad-hoc callers.
    pub fn from_metrics(m: &MeetingMetrics) -> MeetingSummary {
        MeetingSummary {
            meeting_id: m.meeting_id.clone(),
            date: m.date,
            n_utterances: m.n_utterances,
            duration_seconds: m.duration_seconds,
            speakers: m
                .speakers
                .iter()
                .map(|(k, s)| {
                    (
                        k.clone(),
                        SpeakerSummary {
                            share: s.share,
                            speech_seconds: s.speech_seconds,
                            n_utterances: s.n_utterances,
                            icv: SegmentTriple {
                                whole: s.cv.whole.value,
                                first_half: s.cv.first_half.value,
                                second_half: s.cv.second_half.value,
                            },
                        },
                    )
                })
                .collect(),
            mcv: SegmentTriple {
                whole: m.meeting_cv.whole.value,
                first_half: m.meeting_cv.first_half.value,
                second_half: m.meeting_cv.second_half.value,
            },
            transitions: m.transitions.clone(),
        }
    }
}

/// A loaded corpus: the tracked cohort plus every analyzable meeting.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSnapshot {
    /// Tracked student ids, sorted. When no registry exists this is every
    /// speaker id observed in the corpus.
    pub students: Vec<String>,
    /// Sorted by (date, meeting_id) — the corpus-wide chronological order.
    pub meetings: Vec<MeetingSummary>,
    /// Fingerprint of the analysis config the metrics were computed under.
    pub config_fingerprint: String,
}

impl CorpusSnapshot {
    /// Assemble a snapshot, sorting meetings chronologically and deriving
    /// the student list from observed speakers when `students` is empty.
    pub fn new(students: Vec<String>, mut meetings: Vec<MeetingSummary>, config_fingerprint: String) -> Self {
        meetings.sort_by(|a, b| (a.date, &a.meeting_id).cmp(&(b.date, &b.meeting_id)));
        let mut students = students;
        if students.is_empty() {
            students = meetings
                .iter()
                .flat_map(|m| m.speakers.keys().cloned())
                .collect();
        }
        students.sort();
        students.dedup();
        CorpusSnapshot { students, meetings, config_fingerprint }
    }

    /// This student's meetings in chronological order — the basis for
    /// meeting ordinals.
    pub fn student_meetings(&self, student: &str) -> Vec<&MeetingSummary> {
        self.meetings
            .iter()
            .filter(|m| m.speakers.contains_key(student))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(id: &str, date: (i32, u32, u32), speakers: &[&str]) -> MeetingSummary {
        MeetingSummary {
            meeting_id: id.to_string(),
            date: NaiveDate::from_ymd_opt(date.0, date.1, date.2).unwrap(),
            n_utterances: 0,
            duration_seconds: 0.0,
            speakers: speakers
                .iter()
                .map(|s| {
                    (
                        s.to_string(),
                        SpeakerSummary {
                            share: None,
                            speech_seconds: 0.0,
                            n_utterances: 0,
                            icv: SegmentTriple::default(),
                        },
                    )
                })
                .collect(),
            mcv: SegmentTriple::default(),
            transitions: TransitionMatrix { speakers: vec![], counts: vec![] },
        }
    }

    #[test]
    fn meetings_sort_by_date_then_id() {
        let snap = CorpusSnapshot::new(
            vec![],
            vec![
                summary("b", (2026, 2, 1), &["s1"]),
                summary("a", (2026, 2, 1), &["s1"]),
                summary("c", (2026, 1, 1), &["s1"]),
            ],
            "fp".to_string(),
        );
        let ids: Vec<&str> = snap.meetings.iter().map(|m| m.meeting_id.as_str()).collect();
        assert_eq!(ids, vec!["c", "a", "b"]);
    }

    #[test]
    fn empty_registry_falls_back_to_observed_speakers() {
        let snap = CorpusSnapshot::new(
            vec![],
            vec![summary("a", (2026, 1, 1), &["s2", "s1"]), summary("b", (2026, 1, 2), &["s1", "s3"])],
            "fp".to_string(),
        );
        assert_eq!(snap.students, vec!["s1", "s2", "s3"]);
    }

    #[test]
    fn explicit_registry_is_kept_sorted() {
        let snap = CorpusSnapshot::new(
            vec!["zoe".to_string(), "ada".to_string()],
            vec![summary("a", (2026, 1, 1), &["ext-partner"])],
            "fp".to_string(),
        );
        assert_eq!(snap.students, vec!["ada", "zoe"]);
    }

    #[test]
    fn student_meetings_filters_by_participation() {
        let snap = CorpusSnapshot::new(
            vec![],
            vec![
                summary("a", (2026, 1, 1), &["s1", "s2"]),
                summary("b", (2026, 1, 2), &["s2"]),
                summary("c", (2026, 1, 3), &["s1"]),
            ],
            "fp".to_string(),
        );
        let ids: Vec<&str> = snap.student_meetings("s1").iter().map(|m| m.meeting_id.as_str()).collect();
        assert_eq!(ids, vec!["a", "c"]);
    }
}
