//! Self-contained HTML reports: one page per meeting (four embedded SVG
//! panels plus metric tables) and one cohort overview page.
//!
//! Pages embed everything inline — styles and SVG — and reference no
//! external resources, so a report file can be archived or mailed as-is.
//! Output is a pure function of the inputs: re-rendering the same data
//! yields byte-identical pages.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use convo_core::corpus::{CorpusSnapshot, SegmentTriple};
use convo_core::metrics::MeetingMetrics;
use convo_core::model::Meeting;
use convo_core::trend::{
    cohort_slope_stats, cohort_slopes, corpus_characteristics, five_number_summary,
    group_mcv_by_ordinal, ordinal_average_mcv, FiveNumberSummary,
};
use convo_core::turns::chord_data;
use convo_core::volatility::{Segment, SegmentedCv};

use crate::svg::{
    render_boxplot_svg, render_chord_svg, render_cv_bars_svg, render_pie_svg,
    render_timeline_svg,
};

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Absent values render as an em dash, never as zero.
fn metric_cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "—".to_string(),
    }
}

fn share_cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.1}%", x * 100.0),
        None => "—".to_string(),
    }
}

const STYLE: &str = "<style>\
body{font-family:sans-serif;margin:2rem auto;max-width:1060px;color:#222;background:#fff}\
h1{font-size:1.5rem}h2{font-size:1.15rem;margin-top:2rem}\
table{border-collapse:collapse;margin:0.75rem 0}\
th,td{border:1px solid #ccc;padding:0.35rem 0.7rem;text-align:right}\
th:first-child,td:first-child{text-align:left}\
thead th{background:#f2f2f2}\
figure{margin:1rem 0;padding:0}\
figcaption{font-size:0.85rem;color:#555;margin-bottom:0.3rem}\
svg{max-width:100%;height:auto}\
.placeholder{border:1px dashed #bbb;color:#888;padding:2.5rem;text-align:center}\
footer{margin-top:2.5rem;font-size:0.8rem;color:#777;border-top:1px solid #ddd;padding-top:0.5rem}\
</style>";

fn panel(out: &mut String, caption: &str, body: Result<String, String>) {
    let _ = write!(out, "<figure><figcaption>{}</figcaption>", esc(caption));
    match body {
        Ok(svg) => out.push_str(&svg),
        Err(reason) => {
            let _ = write!(out, "<div class=\"placeholder\">{}</div>", esc(&reason));
        }
    }
    out.push_str("</figure>");
}

fn footer(out: &mut String, fingerprint: &str, schema_version: u32) {
    let _ = write!(
        out,
        "<footer>config {} · schema version {}</footer>",
        esc(fingerprint),
        schema_version
    );
}

fn triple_of(cv: &SegmentedCv) -> SegmentTriple {
    SegmentTriple {
        whole: cv.whole.value,
        first_half: cv.first_half.value,
        second_half: cv.second_half.value,
    }
}

/// Render the per-meeting report page: timeline, participation pie,
/// volatility bars, and turn-taking chord, plus the speaker metric table.
pub fn emit_meeting_html(meeting: &Meeting, metrics: &MeetingMetrics, fingerprint: &str) -> String {
    let mut out = String::with_capacity(8192);
    out.push_str("<!DOCTYPE html><html lang=\"en\"><head><meta charset=\"utf-8\">");
    let _ = write!(out, "<title>Meeting {}</title>", esc(&metrics.meeting_id));
    out.push_str(STYLE);
    out.push_str("</head><body>");
    let _ = write!(
        out,
        "<h1>Meeting {}</h1><p>{} · {} utterances · {:.1} s</p>",
        esc(&metrics.meeting_id),
        metrics.date,
        metrics.n_utterances,
        metrics.duration_seconds
    );

    panel(
        &mut out,
        "Speaker timeline",
        render_timeline_svg(meeting).map_err(|_| "no utterances".to_string()),
    );

    let shares: BTreeMap<String, f64> = metrics
        .speakers
        .iter()
        .filter_map(|(name, s)| s.share.map(|v| (name.clone(), v)))
        .collect();
    panel(
        &mut out,
        "Participation shares",
        if shares.is_empty() {
            Err("no speaking time".to_string())
        } else {
            render_pie_svg(&shares).map_err(|_| "no speaking time".to_string())
        },
    );

    panel(
        &mut out,
        "Conversational volatility (whole / first half / second half)",
        Ok(render_cv_bars_svg(&triple_of(&metrics.meeting_cv))),
    );

    panel(
        &mut out,
        "Turn-taking",
        chord_data(&metrics.transitions)
            .map_err(|_| "no speaker transitions".to_string())
            .and_then(|c| render_chord_svg(&c).map_err(|_| "no flows to draw".to_string())),
    );

    out.push_str(
        "<h2>Speakers</h2><table><thead><tr><th>Speaker</th><th>Share</th>\
         <th>Speech (s)</th><th>Utterances</th><th>i-CV whole</th>\
         <th>i-CV first half</th><th>i-CV second half</th></tr></thead><tbody>",
    );
    for (name, s) in &metrics.speakers {
        let _ = write!(
            out,
            "<tr><td>{}</td><td>{}</td><td>{:.3}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
            esc(name),
            share_cell(s.share),
            s.speech_seconds,
            s.n_utterances,
            metric_cell(s.cv.whole.value),
            metric_cell(s.cv.first_half.value),
            metric_cell(s.cv.second_half.value),
        );
    }
    out.push_str("</tbody></table>");

    let _ = write!(
        out,
        "<p>Meeting volatility: whole {} · first half {} · second half {}</p>",
        metric_cell(metrics.meeting_cv.whole.value),
        metric_cell(metrics.meeting_cv.first_half.value),
        metric_cell(metrics.meeting_cv.second_half.value),
    );

    footer(&mut out, fingerprint, crate::json::SCHEMA_VERSION);
    out.push_str("</body></html>");
    out
}

/// Render the cohort overview page: corpus characteristics, mean meeting
/// volatility by ordinal (table and box plots), and the distribution of
/// per-student volatility-trend slopes for each segment.
pub fn emit_cohort_html(corpus: &CorpusSnapshot) -> String {
    let c = corpus_characteristics(corpus);
    let ordinals = ordinal_average_mcv(corpus);

    let mut out = String::with_capacity(8192);
    out.push_str("<!DOCTYPE html><html lang=\"en\"><head><meta charset=\"utf-8\">");
    out.push_str("<title>Cohort report</title>");
    out.push_str(STYLE);
    out.push_str("</head><body><h1>Cohort report</h1>");

    out.push_str("<h2>Corpus characteristics</h2><table><tbody>");
    let _ = write!(out, "<tr><td>Students</td><td>{}</td></tr>", c.n_students);
    let _ = write!(out, "<tr><td>Meetings</td><td>{}</td></tr>", c.n_meetings);
    let _ = write!(
        out,
        "<tr><td>Total recorded time</td><td>{:.1} s</td></tr>",
        c.total_duration_seconds
    );
    let _ = write!(
        out,
        "<tr><td>Mean meeting duration</td><td>{}</td></tr>",
        c.mean_meeting_duration_seconds
            .map(|v| format!("{:.1} s", v))
            .unwrap_or_else(|| "—".to_string())
    );
    let _ = write!(
        out,
        "<tr><td>Mean participants per meeting</td><td>{}</td></tr>",
        c.mean_participants.map(|v| format!("{v:.1}")).unwrap_or_else(|| "—".to_string())
    );
    let _ = write!(
        out,
        "<tr><td>Mean student participation share</td><td>{}</td></tr>",
        share_cell(c.mean_student_share)
    );
    let _ = write!(out, "<tr><td>Mean meeting volatility</td><td>{}</td></tr>", metric_cell(c.mean_mcv));
    let _ = write!(out, "<tr><td>Mean individual volatility</td><td>{}</td></tr>", metric_cell(c.mean_icv));
    out.push_str("</tbody></table>");

    out.push_str(
        "<h2>Meeting volatility by ordinal</h2><table><thead><tr><th>Meeting #</th>\
         <th>Mean m-CV</th><th>Meetings</th></tr></thead><tbody>",
    );
    for row in &ordinals {
        let _ = write!(
            out,
            "<tr><td>{}</td><td>{:.3}</td><td>{}</td></tr>",
            row.ordinal, row.mean_mcv, row.n_meetings
        );
    }
    out.push_str("</tbody></table>");

    let ordinal_boxes: Vec<(String, FiveNumberSummary)> = group_mcv_by_ordinal(corpus)
        .iter()
        .filter_map(|(ord, values)| {
            five_number_summary(values).ok().map(|s| (format!("meeting {ord}"), s))
        })
        .collect();
    panel(
        &mut out,
        "Distribution of meeting volatility by ordinal",
        if ordinal_boxes.is_empty() {
            Err("no meeting volatility values".to_string())
        } else {
            render_boxplot_svg(&ordinal_boxes).map_err(|e| e.to_string())
        },
    );

    out.push_str("<h2>Per-student volatility trends</h2>");
    let mut slope_boxes: Vec<(String, FiveNumberSummary)> = Vec::new();
    let mut rows = String::new();
    for segment in Segment::ALL {
        let label = match segment {
            Segment::Whole => "whole",
            Segment::FirstHalf => "first half",
            Segment::SecondHalf => "second half",
        };
        match cohort_slope_stats(corpus, segment) {
            Ok(stats) => {
                slope_boxes.push((label.to_string(), stats.summary));
                let _ = write!(
                    rows,
                    "<tr><td>{}</td><td>{}</td><td>{}</td><td>{:.3}</td><td>{:.3}</td><td>{:.3}</td><td>{:.3}</td><td>{:.3}</td><td>{:.3}</td></tr>",
                    label,
                    stats.n_students,
                    stats.n_excluded,
                    stats.mean,
                    stats.summary.min,
                    stats.summary.q1,
                    stats.summary.median,
                    stats.summary.q3,
                    stats.summary.max,
                );
            }
            Err(_) => {
                let (_, excluded) = cohort_slopes(corpus, segment);
                let _ = write!(
                    rows,
                    "<tr><td>{label}</td><td>0</td><td>{excluded}</td><td>—</td><td>—</td><td>—</td><td>—</td><td>—</td><td>—</td></tr>",
                );
            }
        }
    }
    out.push_str(
        "<table><thead><tr><th>Segment</th><th>Students</th><th>Excluded</th><th>Mean slope</th>\
         <th>Min</th><th>Q1</th><th>Median</th><th>Q3</th><th>Max</th></tr></thead><tbody>",
    );
    out.push_str(&rows);
    out.push_str("</tbody></table>");

    panel(
        &mut out,
        "Distribution of per-student trend slopes by segment",
        if slope_boxes.is_empty() {
            Err("no students with enough meetings for a trend".to_string())
        } else {
            render_boxplot_svg(&slope_boxes).map_err(|e| e.to_string())
        },
    );

    footer(&mut out, &corpus.config_fingerprint, crate::json::SCHEMA_VERSION);
    out.push_str("</body></html>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use convo_core::config::AnalysisConfig;
    use convo_core::corpus::MeetingSummary;
    use convo_core::metrics::analyze_meeting;
    use convo_core::model::Utterance;

    fn utt(speaker: &str, start_ms: u64, end_ms: u64) -> Utterance {
        Utterance {
            speaker: speaker.to_string(),
            start_ms,
            end_ms,
            text: "hello".to_string(),
            source_cues: vec![],
        }
    }

    fn meeting(id: &str, day: u32, seq: &[(&str, u64, u64)]) -> Meeting {
        Meeting::from_utterances(
            id,
            NaiveDate::from_ymd_opt(2026, 1, day).unwrap(),
            seq.iter().map(|(s, a, b)| utt(s, *a, *b)).collect(),
        )
    }

    fn busy_meeting(id: &str, day: u32) -> Meeting {
        meeting(
            id,
            day,
            &[
                ("ana", 0, 4_000),
                ("ben", 4_500, 6_000),
                ("ana", 6_500, 9_000),
                ("ben", 9_500, 17_000),
                ("ana", 17_500, 18_500),
                ("ben", 19_000, 24_000),
            ],
        )
    }

    fn page_for(m: &Meeting) -> String {
        let config = AnalysisConfig::default();
        let metrics = analyze_meeting(m, &config);
        emit_meeting_html(m, &metrics, &config.fingerprint())
    }

    #[test]
    fn meeting_page_has_exactly_four_svg_panels() {
        let page = page_for(&busy_meeting("mtg01", 15));
        assert_eq!(page.matches("<svg").count(), 4);
        assert_eq!(page.matches("class=\"placeholder\"").count(), 0);
        assert!(page.contains("<table>"));
        assert!(page.contains("gap1000ms-sample-explicit"));
    }

    #[test]
    fn meeting_page_is_deterministic() {
        let m = busy_meeting("mtg01", 15);
        assert_eq!(page_for(&m), page_for(&m));
    }

    #[test]
    fn meeting_page_references_no_external_resources() {
        let page = page_for(&busy_meeting("mtg01", 15));
        for marker in ["http://", "https://", "<script", "<link", "@import", "url("] {
            let hits = page.matches(marker).count();
            let allowed = if marker == "http://" {
                // Only the SVG namespace declaration.
                page.matches("http://www.w3.org/2000/svg").count()
            } else {
                0
            };
            assert_eq!(hits, allowed, "unexpected {marker}");
        }
    }

    #[test]
    fn empty_meeting_page_uses_placeholders() {
        let m = meeting("empty", 15, &[]);
        let page = page_for(&m);
        // Volatility bars always render (three n/a slots); the other three
        // panels degrade to placeholders.
        assert_eq!(page.matches("<svg").count(), 1);
        assert_eq!(page.matches("class=\"placeholder\"").count(), 3);
    }

    #[test]
    fn meeting_page_escapes_speaker_names() {
        let m = meeting("esc", 15, &[("a<b>&c", 0, 2_000), ("d", 3_000, 5_000)]);
        let page = page_for(&m);
        assert!(!page.contains("a<b>&c"));
        assert!(page.contains("a&lt;b&gt;&amp;c"));
    }

    fn snapshot(n_students: usize, meetings_per: usize) -> CorpusSnapshot {
        let config = AnalysisConfig::default();
        let mut summaries = Vec::new();
        let mut students = Vec::new();
        for s in 0..n_students {
            let sid = format!("s{s:02}");
            students.push(sid.clone());
            for k in 0..meetings_per {
                let m = meeting(
                    &format!("{sid}-m{k}"),
                    (1 + s * meetings_per + k) as u32,
                    &[
                        (sid.as_str(), 0, 2_000 + 1_000 * k as u64),
                        ("tutor", 3_000, 6_000),
                        (sid.as_str(), 7_000, 8_000 + 2_000 * (k as u64 % 3)),
                        ("tutor", 9_000, 15_000),
                        (sid.as_str(), 15_500, 17_000 + 500 * k as u64),
                        ("tutor", 18_000, 21_000),
                    ],
                );
                let metrics = analyze_meeting(&m, &config);
                let report =
                    crate::json::MeetingReport::from_metrics(&metrics, &config.fingerprint());
                summaries.push(report.to_summary().unwrap());
            }
        }
        CorpusSnapshot::new(students, summaries, config.fingerprint())
    }

    #[test]
    fn cohort_page_has_tables_and_boxplots() {
        let page = emit_cohort_html(&snapshot(4, 3));
        // One ordinal box plot + one slope box plot.
        assert_eq!(page.matches("<svg").count(), 2);
        assert!(page.contains("Corpus characteristics"));
        assert!(page.contains("Meeting volatility by ordinal"));
        assert!(page.contains("meeting 1"));
        assert!(page.contains("second half"));
        assert!(page.contains("gap1000ms-sample-explicit"));
    }

    #[test]
    fn cohort_page_is_deterministic() {
        let a = emit_cohort_html(&snapshot(3, 3));
        let b = emit_cohort_html(&snapshot(3, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn cohort_page_empty_corpus_degrades_gracefully() {
        let corpus = CorpusSnapshot::new(vec![], vec![], "fp".to_string());
        let page = emit_cohort_html(&corpus);
        assert_eq!(page.matches("<svg").count(), 0);
        assert_eq!(page.matches("class=\"placeholder\"").count(), 2);
        assert!(page.contains("<td>Students</td><td>0</td>"));
    }

    #[test]
    fn cohort_page_single_meeting_students_have_no_slopes() {
        let page = emit_cohort_html(&snapshot(3, 1));
        // Ordinal box plot still renders; slope panel is a placeholder.
        assert_eq!(page.matches("<svg").count(), 1);
        assert!(page.contains("no students with enough meetings"));
    }

    fn summary_with(id: &str, day: u32, mcv: Option<f64>) -> MeetingSummary {
        use convo_core::corpus::{SegmentTriple, SpeakerSummary};
        use convo_core::turns::TransitionMatrix;
        MeetingSummary {
            meeting_id: id.to_string(),
            date: NaiveDate::from_ymd_opt(2026, 2, day).unwrap(),
            n_utterances: 4,
            duration_seconds: 300.0,
            speakers: std::iter::once((
                "s00".to_string(),
                SpeakerSummary {
                    share: Some(0.5),
                    speech_seconds: 150.0,
                    n_utterances: 2,
                    icv: SegmentTriple { whole: Some(1.0), first_half: None, second_half: None },
                },
            ))
            .collect(),
            mcv: SegmentTriple { whole: mcv, first_half: None, second_half: None },
            transitions: TransitionMatrix { speakers: vec![], counts: vec![] },
        }
    }

    #[test]
    fn cohort_ordinal_boxplot_skips_valueless_ordinals() {
        // Second meeting of the only student has an absent m-CV: ordinal 2
        // exists but has no values, so only ordinal 1 is drawn.
        let corpus = CorpusSnapshot::new(
            vec!["s00".to_string()],
            vec![summary_with("a", 1, Some(2.0)), summary_with("b", 2, None)],
            "fp".to_string(),
        );
        let page = emit_cohort_html(&corpus);
        assert!(page.contains("meeting 1"));
        assert!(!page.contains("meeting 2"));
    }
}
