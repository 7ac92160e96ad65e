//! Conversational volatility.
//!
//! Volatility is the standard deviation of the first differences of a
//! duration series: how much consecutive utterance lengths jump around.
//! Computed over every utterance in a meeting it is the meeting-level value
//! (m-CV); restricted to one speaker's utterances it is that speaker's
//! individual value (i-CV). High volatility means speech alternates between
//! long turns and short interjections; a steady sequence of similar turns
//! scores near zero.
//!
//! A value that cannot be computed (too few utterances) is reported as
//! absent, never as zero — zero means "perfectly steady", which is a real
//! measurement.

use thiserror::Error;

use crate::config::StddevMode;
use crate::model::Meeting;

/// Which part of a meeting a metric describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    Whole,
    FirstHalf,
    SecondHalf,
}

impl Segment {
    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Whole => "whole",
            Segment::FirstHalf => "first_half",
            Segment::SecondHalf => "second_half",
        }
    }

    pub const ALL: [Segment; 3] = [Segment::Whole, Segment::FirstHalf, Segment::SecondHalf];
}

impl std::str::FromStr for Segment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whole" => Ok(Segment::Whole),
            "first_half" | "h1" => Ok(Segment::FirstHalf),
            "second_half" | "h2" => Ok(Segment::SecondHalf),
            other => Err(format!("unknown segment {other:?} (expected whole, h1 or h2)")),
        }
    }
}

/// A volatility measurement plus enough context to judge it.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityResult {
    /// Absent when the series has too few points for the chosen mode.
    pub value: Option<f64>,
    /// Utterances in the series the measurement was taken over.
    pub n_utterances: usize,
    /// First differences that fed the standard deviation.
    pub n_diffs: usize,
    pub mode: StddevMode,
}

impl VolatilityResult {
    fn absent(n_utterances: usize, n_diffs: usize, mode: StddevMode) -> Self {
        VolatilityResult { value: None, n_utterances, n_diffs, mode }
    }
}

/// Whole/first-half/second-half volatility for one series owner.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedCv {
    pub whole: VolatilityResult,
    pub first_half: VolatilityResult,
    pub second_half: VolatilityResult,
}

impl SegmentedCv {
    pub fn get(&self, segment: Segment) -> &VolatilityResult {
        match segment {
            Segment::Whole => &self.whole,
            Segment::FirstHalf => &self.first_half,
            Segment::SecondHalf => &self.second_half,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VolatilityError {
    #[error("speaker {0:?} does not appear in the meeting")]
    UnknownSpeaker(String),
}

/// Consecutive differences `values[i+1] - values[i]`. Empty for series
/// shorter than two.
pub fn first_differences(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Two-pass standard deviation. `None` when the series is too short for the
/// mode (sample needs two points, population one).
pub fn stddev(values: &[f64], mode: StddevMode) -> Option<f64> {
    let n = values.len();
    let min_n = match mode {
        StddevMode::Sample => 2,
        StddevMode::Population => 1,
    };
    if n < min_n {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let denom = match mode {
        StddevMode::Sample => (n - 1) as f64,
        StddevMode::Population => n as f64,
    };
    Some((ss / denom).sqrt())
}

/// Volatility of a duration series: stddev of its first differences.
pub fn conversational_volatility(durations: &[f64], mode: StddevMode) -> VolatilityResult {
    let diffs = first_differences(durations);
    VolatilityResult {
        value: stddev(&diffs, mode),
        n_utterances: durations.len(),
        n_diffs: diffs.len(),
        mode,
    }
}

/// Meeting-level volatility over all utterances in chronological order,
/// speakers interleaved.
pub fn meeting_cv(meeting: &Meeting, mode: StddevMode) -> VolatilityResult {
    conversational_volatility(&meeting.durations_seconds(), mode)
}

/// One speaker's volatility over only their utterances (chronological).
pub fn individual_cv(
    meeting: &Meeting,
    speaker: &str,
    mode: StddevMode,
) -> Result<VolatilityResult, VolatilityError> {
    if !meeting.participants.iter().any(|p| p == speaker)
        && !meeting.utterances.iter().any(|u| u.speaker == speaker)
    {
        return Err(VolatilityError::UnknownSpeaker(speaker.to_string()));
    }
    let durations: Vec<f64> = meeting
        .utterances
        .iter()
        .filter(|u| u.speaker == speaker)
        .map(|u| u.duration_seconds())
        .collect();
    Ok(conversational_volatility(&durations, mode))
}

/// Meeting plus per-speaker segmented volatility, computed over the meeting
/// and the two halves produced by `split`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingVolatility {
    pub meeting: SegmentedCv,
    /// Keyed by participant, in participant order.
    pub speakers: std::collections::BTreeMap<String, SegmentedCv>,
}

/// Compute whole/h1/h2 volatility for the meeting and every participant.
///
/// `halves` are the two meetings produced by the configured split rule; the
/// caller picks the rule so this stays a pure function of its inputs.
pub fn segmented_cvs(meeting: &Meeting, halves: &(Meeting, Meeting), mode: StddevMode) -> MeetingVolatility {
    let (h1, h2) = halves;
    let meeting_seg = SegmentedCv {
        whole: meeting_cv(meeting, mode),
        first_half: meeting_cv(h1, mode),
        second_half: meeting_cv(h2, mode),
    };
    let mut speakers = std::collections::BTreeMap::new();
    for p in &meeting.participants {
        let per = |m: &Meeting| {
            individual_cv(m, p, mode).unwrap_or(VolatilityResult::absent(0, 0, mode))
        };
        speakers.insert(
            p.clone(),
            SegmentedCv { whole: per(meeting), first_half: per(h1), second_half: per(h2) },
        );
    }
    MeetingVolatility { meeting: meeting_seg, speakers }
}
