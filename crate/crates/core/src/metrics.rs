//! Per-meeting metric composition: one call that produces everything a
//! meeting report needs.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::config::{AnalysisConfig, SplitRule};
use crate::model::{
    participation_shares, split_meeting, split_meeting_at_midpoint, Meeting,
};
use crate::turns::{transition_counts, TransitionMatrix};
use crate::volatility::{segmented_cvs, SegmentedCv};

/// One speaker's computed metrics within a meeting.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerMetrics {
    /// Fraction of total speaking time; absent when the meeting has none.
    pub share: Option<f64>,
    pub speech_seconds: f64,
    pub n_utterances: usize,
    pub cv: SegmentedCv,
}

/// Everything computed for one meeting.
#[derive(Debug, Clone, PartialEq)]
pub struct MeetingMetrics {
    pub meeting_id: String,
    pub date: NaiveDate,
    pub n_utterances: usize,
    /// Meeting span (first start to last end), seconds. Zero when empty.
    pub duration_seconds: f64,
    pub speakers: BTreeMap<String, SpeakerMetrics>,
    pub meeting_cv: SegmentedCv,
    pub transitions: TransitionMatrix,
}

/// Run the full per-meeting analysis under one config.
pub fn analyze_meeting(meeting: &Meeting, config: &AnalysisConfig) -> MeetingMetrics {
    let halves = match config.split_rule {
        SplitRule::Explicit => split_meeting(meeting),
        SplitRule::Midpoint => split_meeting_at_midpoint(meeting),
    };
    let vol = segmented_cvs(meeting, &halves, config.stddev_mode);
    let shares = participation_shares(meeting).ok();

    let mut speakers = BTreeMap::new();
    for p in &meeting.participants {
        let speech_ms: u64 = meeting
            .utterances
            .iter()
            .filter(|u| u.speaker == *p)
            .map(|u| u.duration_ms())
            .sum();
        let n_utterances = meeting.utterances.iter().filter(|u| u.speaker == *p).count();
        speakers.insert(
            p.clone(),
            SpeakerMetrics {
                share: shares.as_ref().map(|s| s[p]),
                speech_seconds: speech_ms as f64 / 1000.0,
                n_utterances,
                cv: vol.speakers[p].clone(),
            },
        );
    }

    MeetingMetrics {
        meeting_id: meeting.id.clone(),
        date: meeting.date,
        n_utterances: meeting.utterances.len(),
        duration_seconds: meeting.duration_seconds(),
        speakers,
        meeting_cv: vol.meeting,
        transitions: transition_counts(meeting),
    }
}
