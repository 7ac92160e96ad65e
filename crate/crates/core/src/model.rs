//! Conversation model: utterances, meetings, merging and splitting.
//!
//! Platform exports slice speech into short cues. Analysis wants
//! *utterances* — maximal runs of consecutive same-speaker cues whose gaps
//! are at most the configured threshold. All derived metrics are computed
//! over utterances, never raw cues.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vtt::{RawCue, UNKNOWN_SPEAKER};

/// A maximal merged run of same-speaker cues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: String,
    pub start_ms: u64,
    pub end_ms: u64,
    /// Constituent cue texts joined with single spaces.
    pub text: String,
    /// Indices into the source cue list this utterance was merged from.
    pub source_cues: Vec<usize>,
}

impl Utterance {
    pub fn duration_ms(&self) -> u64 {
        self.end_ms.saturating_sub(self.start_ms)
    }

    pub fn duration_seconds(&self) -> f64 {
        self.duration_ms() as f64 / 1000.0
    }

    pub fn start_seconds(&self) -> f64 {
        self.start_ms as f64 / 1000.0
    }

    pub fn end_seconds(&self) -> f64 {
        self.end_ms as f64 / 1000.0
    }
}

/// One meeting: identity, participants, and its utterances in chronological
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meeting {
    pub id: String,
    pub date: NaiveDate,
    /// Distinct speaker ids, sorted. Every `utterance.speaker` appears here;
    /// silent participants may appear too.
    pub participants: Vec<String>,
    pub utterances: Vec<Utterance>,
    /// Optional explicit boundary between meeting halves.
    pub split_point_ms: Option<u64>,
    /// Optional labels for the two halves, e.g. activity names.
    pub segment_labels: Option<(String, String)>,
}

impl Meeting {
    /// Build a meeting from utterances, deriving the participant list.
    pub fn from_utterances(id: impl Into<String>, date: NaiveDate, utterances: Vec<Utterance>) -> Meeting {
        let mut participants: Vec<String> =
            utterances.iter().map(|u| u.speaker.clone()).collect();
        participants.sort();
        participants.dedup();
        Meeting {
            id: id.into(),
            date,
            participants,
            utterances,
            split_point_ms: None,
            segment_labels: None,
        }
    }

    /// Earliest utterance start and latest utterance end, when any speech
    /// exists. The latest end need not belong to the last utterance —
    /// overlapping speech can end later than it starts.
    pub fn span_ms(&self) -> Option<(u64, u64)> {
        let first = self.utterances.iter().map(|u| u.start_ms).min()?;
        let last = self.utterances.iter().map(|u| u.end_ms).max()?;
        Some((first, last))
    }

    pub fn duration_seconds(&self) -> f64 {
        match self.span_ms() {
            Some((a, b)) => (b - a) as f64 / 1000.0,
            None => 0.0,
        }
    }

    /// Utterance durations in seconds, chronological.
    pub fn durations_seconds(&self) -> Vec<f64> {
        self.utterances.iter().map(|u| u.duration_seconds()).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("meeting has no recorded speech")]
    NoSpeech,
}

/// Merge consecutive same-speaker cues into utterances.
///
/// Cues must be sorted by start time (as `parse_transcript` returns them).
/// A cue extends the previous utterance when the speaker matches and the
/// silence between them is at most `gap_threshold_ms`; overlap counts as
/// zero gap. A speaker change always starts a new utterance, even mid-overlap.
pub fn merge_cues(cues: &[RawCue], gap_threshold_ms: u64) -> Vec<Utterance> {
    let mut out: Vec<Utterance> = Vec::new();
    for (i, cue) in cues.iter().enumerate() {
        let speaker = cue.speaker.clone().unwrap_or_else(|| UNKNOWN_SPEAKER.to_string());
        let extend = out.last().is_some_and(|last| {
            last.speaker == speaker
                && cue.start_ms <= last.end_ms.saturating_add(gap_threshold_ms)
        });
        if extend {
            let last = out.last_mut().unwrap();
            last.end_ms = last.end_ms.max(cue.end_ms);
            if !cue.text.is_empty() {
                if !last.text.is_empty() {
                    last.text.push(' ');
                }
                last.text.push_str(&cue.text);
            }
            last.source_cues.push(i);
        } else {
            out.push(Utterance {
                speaker,
                start_ms: cue.start_ms,
                end_ms: cue.end_ms,
                text: cue.text.clone(),
                source_cues: vec![i],
            });
        }
    }
    out
}

/// Fraction of total speaking time per speaker.
///
/// Includes silent participants (share 0.0). Errors when the meeting has no
/// positive speaking time at all — shares would be 0/0.
pub fn participation_shares(meeting: &Meeting) -> Result<BTreeMap<String, f64>, ModelError> {
    let mut totals: BTreeMap<String, u64> = BTreeMap::new();
    for p in &meeting.participants {
        totals.insert(p.clone(), 0);
    }
    for u in &meeting.utterances {
        *totals.entry(u.speaker.clone()).or_insert(0) += u.duration_ms();
    }
    let grand: u64 = totals.values().sum();
    if grand == 0 {
        return Err(ModelError::NoSpeech);
    }
    Ok(totals
        .into_iter()
        .map(|(k, v)| (k, v as f64 / grand as f64))
        .collect())
}

/// Split a meeting into halves at its explicit split point, falling back to
/// the temporal midpoint.
pub fn split_meeting(meeting: &Meeting) -> (Meeting, Meeting) {
    split_at(meeting, meeting.split_point_ms)
}

/// Split at the temporal midpoint regardless of any explicit split point.
pub fn split_meeting_at_midpoint(meeting: &Meeting) -> (Meeting, Meeting) {
    split_at(meeting, None)
}

fn split_at(meeting: &Meeting, explicit_ms: Option<u64>) -> (Meeting, Meeting) {
    // Compare 2*start against 2*split so the midpoint (first + last) / 2
    // never has to be divided: an utterance belongs to the first half iff
    // start < split, i.e. 2*start < first + last.
    let doubled_split: u128 = match (explicit_ms, meeting.span_ms()) {
        (Some(s), _) => 2 * s as u128,
        (None, Some((first, last))) => first as u128 + last as u128,
        (None, None) => 0,
    };
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for u in &meeting.utterances {
        if 2 * (u.start_ms as u128) < doubled_split {
            first.push(u.clone());
        } else {
            second.push(u.clone());
        }
    }
    let half = |label: &str, utterances: Vec<Utterance>| Meeting {
        id: format!("{}#{label}", meeting.id),
        date: meeting.date,
        participants: meeting.participants.clone(),
        utterances,
        split_point_ms: None,
        segment_labels: None,
    };
    (half("h1", first), half("h2", second))
}

/// Per-speaker speaking bands: start/end pairs with overlapping (not merely
/// touching) bands of the same speaker coalesced. Used by timeline renderers.
pub fn speaker_timeline(meeting: &Meeting) -> BTreeMap<String, Vec<(u64, u64)>> {
    let mut bands: BTreeMap<String, Vec<(u64, u64)>> = BTreeMap::new();
    for u in &meeting.utterances {
        bands.entry(u.speaker.clone()).or_default().push((u.start_ms, u.end_ms));
    }
    for list in bands.values_mut() {
        list.sort();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(list.len());
        for &(s, e) in list.iter() {
            match merged.last_mut() {
                Some(last) if s < last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        *list = merged;
    }
    bands
}
