//! Longitudinal statistics: how engagement evolves across a student's
//! meetings and across the cohort.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::CorpusSnapshot;
use crate::volatility::Segment;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrendError {
    #[error("student {0:?} is not in the corpus")]
    UnknownStudent(String),
    #[error("need at least two points to fit a slope")]
    InsufficientPoints,
    #[error("all x values are identical — slope is undefined")]
    DegenerateX,
    #[error("no values to summarize")]
    EmptyInput,
    #[error("no student has enough meetings for a trend")]
    NoSlopes,
}

/// Ordinary least-squares slope of y on x:
/// `Σ (x−x̄)(y−ȳ) / Σ (x−x̄)²`, computed in two passes.
pub fn regression_slope(points: &[(f64, f64)]) -> Result<f64, TrendError> {
    if points.len() < 2 {
        return Err(TrendError::InsufficientPoints);
    }
    let n = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(TrendError::DegenerateX);
    }
    Ok(sxy / sxx)
}

/// One (meeting ordinal, i-CV) observation in a student's history.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendPoint {
    /// 1-based position of the meeting in the student's chronology. Ordinals
    /// are assigned before filtering, so meetings with an absent i-CV leave
    /// gaps rather than renumbering later meetings.
    pub ordinal: u32,
    pub icv: f64,
    pub meeting_id: String,
}

/// A student's volatility trajectory for one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentTrend {
    pub student_id: String,
    pub segment: Segment,
    pub points: Vec<TrendPoint>,
    /// OLS slope of i-CV on ordinal; absent with fewer than two points.
    pub slope: Option<f64>,
    pub x_mean: Option<f64>,
    pub y_mean: Option<f64>,
}

/// Fit one student's i-CV-over-time trend.
pub fn student_trend(
    corpus: &CorpusSnapshot,
    student: &str,
    segment: Segment,
) -> Result<StudentTrend, TrendError> {
    if !corpus.students.iter().any(|s| s == student) {
        return Err(TrendError::UnknownStudent(student.to_string()));
    }
    let mut points = Vec::new();
    for (i, meeting) in corpus.student_meetings(student).iter().enumerate() {
        let icv = meeting.speakers.get(student).and_then(|s| s.icv.get(segment));
        if let Some(icv) = icv {
            points.push(TrendPoint {
                ordinal: (i + 1) as u32,
                icv,
                meeting_id: meeting.meeting_id.clone(),
            });
        }
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.ordinal as f64, p.icv)).collect();
    let slope = regression_slope(&xy).ok();
    let (x_mean, y_mean) = if xy.is_empty() {
        (None, None)
    } else {
        let n = xy.len() as f64;
        (
            Some(xy.iter().map(|p| p.0).sum::<f64>() / n),
            Some(xy.iter().map(|p| p.1).sum::<f64>() / n),
        )
    };
    Ok(StudentTrend { student_id: student.to_string(), segment, points, slope, x_mean, y_mean })
}

/// Mean whole-meeting volatility at each meeting ordinal across the cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalAverage {
    pub ordinal: u32,
    pub mean_mcv: f64,
    /// Number of (student, meeting) observations behind the mean.
    pub n_meetings: usize,
}

/// Average m-CV by meeting ordinal: for each student, their k-th meeting
/// contributes to ordinal k. Ordinals nobody reached are omitted.
pub fn ordinal_average_mcv(corpus: &CorpusSnapshot) -> Vec<OrdinalAverage> {
    group_mcv_by_ordinal(corpus)
        .into_iter()
        .map(|(ordinal, values)| OrdinalAverage {
            ordinal,
            mean_mcv: values.iter().sum::<f64>() / values.len() as f64,
            n_meetings: values.len(),
        })
        .collect()
}

/// The m-CV observations behind each ordinal, for distribution plots.
pub fn group_mcv_by_ordinal(corpus: &CorpusSnapshot) -> BTreeMap<u32, Vec<f64>> {
    let mut acc: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for student in &corpus.students {
        for (i, meeting) in corpus.student_meetings(student).iter().enumerate() {
            if let Some(mcv) = meeting.mcv.whole {
                acc.entry((i + 1) as u32).or_default().push(mcv);
            }
        }
    }
    acc
}

/// Classic five-number summary plus mean and count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub n: usize,
}

/// Quartiles by linear interpolation between closest ranks: quantile q sits
/// at position `q * (n − 1)` in the sorted values.
pub fn five_number_summary(values: &[f64]) -> Result<FiveNumberSummary, TrendError> {
    if values.is_empty() {
        return Err(TrendError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in summary input"));
    let quantile = |q: f64| -> f64 {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    };
    Ok(FiveNumberSummary {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        n: sorted.len(),
    })
}

/// Distribution of per-student trend slopes across the cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortSlopeStats {
    pub summary: FiveNumberSummary,
    pub mean: f64,
    /// Students contributing a slope.
    pub n_students: usize,
    /// Students skipped for having fewer than two usable points.
    pub n_excluded: usize,
}

/// Per-student slopes for one segment, in student order, plus exclusions.
pub fn cohort_slopes(corpus: &CorpusSnapshot, segment: Segment) -> (Vec<(String, f64)>, usize) {
    let mut slopes = Vec::new();
    let mut excluded = 0;
    for student in &corpus.students {
        match student_trend(corpus, student, segment) {
            Ok(trend) => match trend.slope {
                Some(s) => slopes.push((student.clone(), s)),
                None => excluded += 1,
            },
            Err(_) => excluded += 1,
        }
    }
    (slopes, excluded)
}

/// Summarize the cohort's slope distribution for one segment.
pub fn cohort_slope_stats(
    corpus: &CorpusSnapshot,
    segment: Segment,
) -> Result<CohortSlopeStats, TrendError> {
    let (slopes, n_excluded) = cohort_slopes(corpus, segment);
    if slopes.is_empty() {
        return Err(TrendError::NoSlopes);
    }
    let values: Vec<f64> = slopes.iter().map(|s| s.1).collect();
    let summary = five_number_summary(&values)?;
    Ok(CohortSlopeStats { summary, mean: summary.mean, n_students: slopes.len(), n_excluded })
}

/// Corpus-level descriptive statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusCharacteristics {
    pub n_students: usize,
    pub n_meetings: usize,
    pub total_duration_seconds: f64,
    pub mean_meeting_duration_seconds: Option<f64>,
    pub mean_participants: Option<f64>,
    /// Mean participation share of tracked students over their meetings.
    pub mean_student_share: Option<f64>,
    pub mean_mcv: Option<f64>,
    pub mean_icv: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Describe the corpus: sizes, durations, and average engagement values.
/// Means are over present values only.
pub fn corpus_characteristics(corpus: &CorpusSnapshot) -> CorpusCharacteristics {
    let total: f64 = corpus.meetings.iter().map(|m| m.duration_seconds).sum();
    let participants: Vec<f64> =
        corpus.meetings.iter().map(|m| m.speakers.len() as f64).collect();
    let mcvs: Vec<f64> = corpus.meetings.iter().filter_map(|m| m.mcv.whole).collect();
    let mut shares = Vec::new();
    let mut icvs = Vec::new();
    for student in &corpus.students {
        for meeting in corpus.student_meetings(student) {
            let speaker = &meeting.speakers[student];
            if let Some(share) = speaker.share {
                shares.push(share);
            }
            if let Some(icv) = speaker.icv.whole {
                icvs.push(icv);
            }
        }
    }
    CorpusCharacteristics {
        n_students: corpus.students.len(),
        n_meetings: corpus.meetings.len(),
        total_duration_seconds: total,
        mean_meeting_duration_seconds: if corpus.meetings.is_empty() {
            None
        } else {
            Some(total / corpus.meetings.len() as f64)
        },
        mean_participants: mean(&participants),
        mean_student_share: mean(&shares),
        mean_mcv: mean(&mcvs),
        mean_icv: mean(&icvs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{MeetingSummary, SegmentTriple, SpeakerSummary};
    use crate::turns::TransitionMatrix;
    use chrono::NaiveDate;

    /// Meeting where each (speaker, icv?) pair is given directly.
    fn summary(id: &str, day: u32, mcv: Option<f64>, speakers: &[(&str, Option<f64>)]) -> MeetingSummary {
        MeetingSummary {
            meeting_id: id.to_string(),
            date: NaiveDate::from_ymd_opt(2026, 1, day).unwrap(),
            n_utterances: 10,
            duration_seconds: 600.0,
            speakers: speakers
                .iter()
                .map(|(s, icv)| {
                    (
                        s.to_string(),
                        SpeakerSummary {
                            share: Some(1.0 / speakers.len() as f64),
                            speech_seconds: 100.0,
                            n_utterances: 5,
                            icv: SegmentTriple { whole: *icv, first_half: *icv, second_half: *icv },
                        },
                    )
                })
                .collect(),
            mcv: SegmentTriple { whole: mcv, first_half: mcv, second_half: mcv },
            transitions: TransitionMatrix { speakers: vec![], counts: vec![] },
        }
    }

    fn snapshot(meetings: Vec<MeetingSummary>) -> CorpusSnapshot {
        CorpusSnapshot::new(vec![], meetings, "fp".to_string())
    }

    #[test]
    fn slope_of_perfect_line_is_exact() {
        let points: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 2.0 + 3.0 * i as f64)).collect();
        assert!((regression_slope(&points).unwrap() - 3.0).abs() < 1e-12);
        let down: Vec<(f64, f64)> = (1..=4).map(|i| (i as f64, 10.0 - i as f64)).collect();
        assert!((regression_slope(&down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn slope_of_constant_y_is_zero() {
        let points = [(1.0, 4.2), (2.0, 4.2), (3.0, 4.2)];
        assert_eq!(regression_slope(&points).unwrap(), 0.0);
    }

    #[test]
    fn slope_error_cases() {
        assert_eq!(regression_slope(&[(1.0, 1.0)]).unwrap_err(), TrendError::InsufficientPoints);
        assert_eq!(
            regression_slope(&[(2.0, 1.0), (2.0, 5.0)]).unwrap_err(),
            TrendError::DegenerateX
        );
    }

    #[test]
    fn student_trend_fits_ordinals() {
        let snap = snapshot(vec![
            summary("m1", 1, Some(1.0), &[("s1", Some(2.0))]),
            summary("m2", 2, Some(1.0), &[("s1", Some(3.0))]),
            summary("m3", 3, Some(1.0), &[("s1", Some(4.0))]),
            summary("m4", 4, Some(1.0), &[("s1", Some(5.0))]),
        ]);
        let trend = student_trend(&snap, "s1", Segment::Whole).unwrap();
        assert!((trend.slope.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(trend.points.len(), 4);
        assert_eq!(trend.x_mean, Some(2.5));
        assert_eq!(trend.y_mean, Some(3.5));
    }

    #[test]
    fn absent_icv_skips_point_without_renumbering() {
        // Meeting 2 has no usable i-CV: points keep ordinals 1, 3, 4.
        let snap = snapshot(vec![
            summary("m1", 1, Some(1.0), &[("s1", Some(2.0))]),
            summary("m2", 2, Some(1.0), &[("s1", None)]),
            summary("m3", 3, Some(1.0), &[("s1", Some(4.0))]),
            summary("m4", 4, Some(1.0), &[("s1", Some(5.0))]),
        ]);
        let trend = student_trend(&snap, "s1", Segment::Whole).unwrap();
        let ordinals: Vec<u32> = trend.points.iter().map(|p| p.ordinal).collect();
        assert_eq!(ordinals, vec![1, 3, 4]);
    }

    #[test]
    fn single_point_trend_has_no_slope() {
        let snap = snapshot(vec![summary("m1", 1, Some(1.0), &[("s1", Some(2.0))])]);
        let trend = student_trend(&snap, "s1", Segment::Whole).unwrap();
        assert_eq!(trend.slope, None);
        assert_eq!(trend.points.len(), 1);
        assert_eq!(trend.y_mean, Some(2.0));
    }

    #[test]
    fn unknown_student_is_an_error() {
        let snap = snapshot(vec![summary("m1", 1, Some(1.0), &[("s1", Some(2.0))])]);
        assert_eq!(
            student_trend(&snap, "nobody", Segment::Whole).unwrap_err(),
            TrendError::UnknownStudent("nobody".to_string())
        );
    }

    #[test]
    fn ordinal_average_combines_students() {
        // s1's meetings: m1, m3. s2's: m2, m3. Ordinal 1 gets m1 (4.0) from
        // s1 and m2 (6.0) from s2 → mean 5.0, n 2.
        let snap = snapshot(vec![
            summary("m1", 1, Some(4.0), &[("s1", Some(1.0))]),
            summary("m2", 2, Some(6.0), &[("s2", Some(1.0))]),
            summary("m3", 3, Some(10.0), &[("s1", Some(1.0)), ("s2", Some(1.0))]),
        ]);
        let rows = ordinal_average_mcv(&snap);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].ordinal, 1);
        assert!((rows[0].mean_mcv - 5.0).abs() < 1e-12);
        assert_eq!(rows[0].n_meetings, 2);
        assert_eq!(rows[1].ordinal, 2);
        assert!((rows[1].mean_mcv - 10.0).abs() < 1e-12);
    }

    #[test]
    fn ordinal_average_of_empty_corpus_is_empty() {
        assert!(ordinal_average_mcv(&snapshot(vec![])).is_empty());
    }

    #[test]
    fn five_number_interpolates_between_ranks() {
        let s = five_number_summary(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 1.75, 2.5, 3.25, 4.0));
        assert_eq!(s.n, 4);
        assert!((s.mean - 2.5).abs() < 1e-12);
    }

    #[test]
    fn five_number_of_single_value_collapses() {
        let s = five_number_summary(&[5.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (5.0, 5.0, 5.0, 5.0, 5.0));
    }

    #[test]
    fn five_number_with_ties() {
        let s = five_number_summary(&[1.0, 1.0, 1.0, 9.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 1.0, 1.0, 3.0, 9.0));
    }

    #[test]
    fn five_number_empty_is_an_error() {
        assert_eq!(five_number_summary(&[]).unwrap_err(), TrendError::EmptyInput);
    }

    #[test]
    fn cohort_slopes_skip_short_histories() {
        let snap = snapshot(vec![
            summary("m1", 1, Some(1.0), &[("s1", Some(2.0)), ("s2", Some(1.0))]),
            summary("m2", 2, Some(1.0), &[("s1", Some(4.0))]),
        ]);
        let stats = cohort_slope_stats(&snap, Segment::Whole).unwrap();
        // s1 contributes slope 2.0; s2 has one point and is excluded.
        assert_eq!(stats.n_students, 1);
        assert_eq!(stats.n_excluded, 1);
        assert!((stats.mean - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cohort_slope_distribution_summary() {
        let snap = snapshot(vec![
            summary("m1", 1, Some(1.0), &[("s1", Some(1.0)), ("s2", Some(5.0)), ("s3", Some(3.0))]),
            summary("m2", 2, Some(1.0), &[("s1", Some(2.0)), ("s2", Some(4.0)), ("s3", Some(3.0))]),
        ]);
        // Slopes: s1 → +1, s2 → −1, s3 → 0.
        let stats = cohort_slope_stats(&snap, Segment::Whole).unwrap();
        assert_eq!(stats.summary.min, -1.0);
        assert_eq!(stats.summary.median, 0.0);
        assert_eq!(stats.summary.max, 1.0);
        assert!((stats.mean - 0.0).abs() < 1e-12);
    }

    #[test]
    fn no_slopes_is_an_error() {
        let snap = snapshot(vec![summary("m1", 1, Some(1.0), &[("s1", Some(2.0))])]);
        assert_eq!(cohort_slope_stats(&snap, Segment::Whole).unwrap_err(), TrendError::NoSlopes);
    }

    #[test]
    fn characteristics_of_small_corpus() {
        let snap = snapshot(vec![
            summary("m1", 1, Some(4.0), &[("s1", Some(1.0)), ("s2", Some(2.0))]),
            summary("m2", 2, None, &[("s1", None)]),
        ]);
        let c = corpus_characteristics(&snap);
        assert_eq!(c.n_students, 2);
        assert_eq!(c.n_meetings, 2);
        assert!((c.total_duration_seconds - 1200.0).abs() < 1e-9);
        assert_eq!(c.mean_meeting_duration_seconds, Some(600.0));
        assert_eq!(c.mean_participants, Some(1.5));
        // Only m1's mcv is present.
        assert_eq!(c.mean_mcv, Some(4.0));
        // i-CVs present: s1@m1 (1.0), s2@m1 (2.0).
        assert_eq!(c.mean_icv, Some(1.5));
    }

    #[test]
    fn characteristics_of_empty_corpus_are_absent() {
        let c = corpus_characteristics(&snapshot(vec![]));
        assert_eq!(c.n_meetings, 0);
        assert_eq!(c.mean_meeting_duration_seconds, None);
        assert_eq!(c.mean_mcv, None);
        assert_eq!(c.mean_icv, None);
        assert_eq!(c.mean_student_share, None);
    }
}
