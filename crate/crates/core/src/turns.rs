//! Turn-taking structure: who speaks after whom.

use thiserror::Error;

use crate::model::Meeting;

/// Square matrix of counts: `counts[a][b]` is how often speaker `a`'s
/// utterance was immediately followed by speaker `b`'s. The diagonal counts
/// re-takes — the same speaker producing the next utterance after a gap
/// too long to merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    /// Row/column order; the meeting's participant order.
    pub speakers: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn off_diagonal_total(&self) -> u64 {
        let mut sum = 0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if i != j {
                    sum += c;
                }
            }
        }
        sum
    }
}

/// Count consecutive-utterance transitions. With `n` utterances there are
/// exactly `n - 1` transitions (0 for empty or single-utterance meetings).
pub fn transition_counts(meeting: &Meeting) -> TransitionMatrix {
    let mut speakers = meeting.participants.clone();
    for u in &meeting.utterances {
        if !speakers.iter().any(|s| s == &u.speaker) {
            speakers.push(u.speaker.clone());
        }
    }
    let idx = |name: &str| speakers.iter().position(|s| s == name).unwrap();
    let n = speakers.len();
    let mut counts = vec![vec![0u64; n]; n];
    for pair in meeting.utterances.windows(2) {
        counts[idx(&pair[0].speaker)][idx(&pair[1].speaker)] += 1;
    }
    TransitionMatrix { speakers, counts }
}

/// One chord-diagram ribbon: a directed speaker-change flow, weighted as a
/// fraction of all speaker changes.
#[derive(Debug, Clone, PartialEq)]
pub struct Ribbon {
    pub from: String,
    pub to: String,
    pub weight: f64,
}

/// Self-transition annotation: the share of a speaker's outgoing transitions
/// that return to themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfLoop {
    pub speaker: String,
    pub fraction: f64,
}

/// Normalized chord-diagram inputs derived from a transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordData {
    pub speakers: Vec<String>,
    /// Off-diagonal flows, row-major order, zero-count pairs omitted.
    /// Weights sum to 1 whenever any speaker change happened.
    pub ribbons: Vec<Ribbon>,
    /// One entry per speaker with outgoing transitions.
    pub self_loops: Vec<SelfLoop>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TurnError {
    #[error("transition matrix is empty — nothing to draw")]
    EmptyMatrix,
}

/// Normalize a transition matrix for chord rendering. Diagonal entries are
/// excluded from ribbon weights and reported as per-speaker self-loop
/// fractions instead.
pub fn chord_data(matrix: &TransitionMatrix) -> Result<ChordData, TurnError> {
    if matrix.total() == 0 {
        return Err(TurnError::EmptyMatrix);
    }
    let off_total = matrix.off_diagonal_total();
    let mut ribbons = Vec::new();
    if off_total > 0 {
        for (i, row) in matrix.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if i != j && c > 0 {
                    ribbons.push(Ribbon {
                        from: matrix.speakers[i].clone(),
                        to: matrix.speakers[j].clone(),
                        weight: c as f64 / off_total as f64,
                    });
                }
            }
        }
    }
    let mut self_loops = Vec::new();
    for (i, row) in matrix.counts.iter().enumerate() {
        let row_total: u64 = row.iter().sum();
        if row_total > 0 {
            self_loops.push(SelfLoop {
                speaker: matrix.speakers[i].clone(),
                fraction: row[i] as f64 / row_total as f64,
            });
        }
    }
    Ok(ChordData { speakers: matrix.speakers.clone(), ribbons, self_loops })
}
