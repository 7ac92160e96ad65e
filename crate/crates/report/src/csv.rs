//! CSV exports: one row per (meeting, speaker) and one row per meeting.
//! Values match the canonical JSON (3-decimal metrics, empty cell for
//! absent).

use std::fmt::Write as _;

use crate::canon::fmt_metric;
use crate::json::MeetingReport;

/// Quote a field only when it needs it (comma, quote, or newline).
fn field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_metric).unwrap_or_default()
}

/// Per-speaker table across the given meetings.
pub fn speakers_csv(reports: &[MeetingReport]) -> String {
    let mut out = String::from("meeting_id,speaker,share,speech_s,n_utt,icv_whole,icv_h1,icv_h2\n");
    for r in reports {
        for s in &r.speakers {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                field(&r.meeting_id),
                field(&s.speaker),
                opt(s.share),
                fmt_metric(s.speech_seconds),
                s.n_utterances,
                opt(s.icv.whole),
                opt(s.icv.first_half),
                opt(s.icv.second_half),
            );
        }
    }
    out
}

/// Per-meeting table.
pub fn meetings_csv(reports: &[MeetingReport]) -> String {
    let mut out = String::from("meeting_id,date,n_utt,duration_s,mcv_whole,mcv_h1,mcv_h2\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            field(&r.meeting_id),
            field(&r.date),
            r.n_utterances,
            fmt_metric(r.duration_seconds),
            opt(r.mcv.whole),
            opt(r.mcv.first_half),
            opt(r.mcv.second_half),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use convo_core::config::AnalysisConfig;
    use convo_core::metrics::analyze_meeting;
    use convo_core::model::{Meeting, Utterance};

    fn utt(speaker: &str, start_ms: u64, end_ms: u64) -> Utterance {
        Utterance {
            speaker: speaker.to_string(),
            start_ms,
            end_ms,
            text: "x".to_string(),
            source_cues: vec![],
        }
    }

    fn report() -> MeetingReport {
        let m = Meeting::from_utterances(
            "mtg01",
            NaiveDate::from_ymd_opt(2026, 1, 15).unwrap(),
            vec![utt("ana", 0, 30_000), utt("ben", 30_000, 60_000)],
        );
        MeetingReport::from_metrics(&analyze_meeting(&m, &AnalysisConfig::default()), "fp")
    }

    #[test]
    fn speaker_rows_carry_shares_and_blanks_for_absent() {
        let text = speakers_csv(&[report()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "meeting_id,speaker,share,speech_s,n_utt,icv_whole,icv_h1,icv_h2");
        assert_eq!(lines.len(), 3);
        // One utterance each → every i-CV absent → trailing blanks.
        assert_eq!(lines[1], "mtg01,ana,0.500,30.000,1,,,");
        assert_eq!(lines[2], "mtg01,ben,0.500,30.000,1,,,");
    }

    #[test]
    fn meeting_rows_one_per_report() {
        let text = meetings_csv(&[report(), report()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "meeting_id,date,n_utt,duration_s,mcv_whole,mcv_h1,mcv_h2");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("mtg01,2026-01-15,2,60.000,"));
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(field("plain"), "plain");
    }
}
