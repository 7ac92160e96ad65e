//! Reference values published for the original deployment of this toolkit.
//!
//! The deployment analyzed a semester of small-group language-practice
//! meetings; its raw recordings and transcripts are private and do not ship
//! with the code, so these aggregates are reproducible in *format* (run the
//! pipeline on your own corpus and compare shapes) but not in value. They
//! are recorded here as documentation and as fixtures for output-format
//! tests — nothing in the analysis pipeline reads them.

/// Students tracked in the reference corpus.
pub const REFERENCE_COHORT_SIZE: usize = 19;

/// Meetings analyzed in the reference corpus.
pub const REFERENCE_MEETING_COUNT: usize = 86;

/// Total recorded meeting time, rendered as it was reported.
pub const REFERENCE_TOTAL_DURATION: &str = "66 h 57 m";

/// Mean meeting length in minutes.
pub const REFERENCE_MEAN_MEETING_MINUTES: f64 = 47.0;

/// Typical meeting size: most meetings had three or four participants.
pub const REFERENCE_MEAN_PARTICIPANTS: f64 = 3.4;

/// Mean participation share of a tracked student in their meetings.
pub const REFERENCE_MEAN_STUDENT_SHARE: f64 = 0.38;

/// Mean whole-meeting conversational volatility across meetings.
pub const REFERENCE_MEAN_MCV: f64 = 7.596;

/// Mean individual conversational volatility across (student, meeting) pairs.
pub const REFERENCE_MEAN_ICV: f64 = 3.967;

/// Mean m-CV at meeting ordinals 1–4 (a student's first, second, third,
/// fourth meeting).
pub const REFERENCE_ORDINAL_MEAN_MCV: [f64; 4] = [7.113, 8.478, 7.905, 5.531];

/// Observation counts behind [`REFERENCE_ORDINAL_MEAN_MCV`]: not every
/// student reached a fourth meeting.
pub const REFERENCE_ORDINAL_COUNTS: [usize; 4] = [19, 19, 19, 16];

/// Mean per-student i-CV trend slope, whole meetings.
pub const REFERENCE_MEAN_SLOPE_WHOLE: f64 = 0.430;

/// Mean per-student i-CV trend slope, first halves only.
pub const REFERENCE_MEAN_SLOPE_FIRST_HALF: f64 = -0.471;

/// Mean per-student i-CV trend slope, second halves only.
pub const REFERENCE_MEAN_SLOPE_SECOND_HALF: f64 = 0.126;

/// Worked example distributed with the method description: a 60-second
/// two-speaker clip whose meeting volatility is 1.42 and whose speaker
/// volatilities are 1.09 and 2.44 (sample mode, 3-decimal reporting).
pub const REFERENCE_EXAMPLE_MCV: f64 = 1.42;
pub const REFERENCE_EXAMPLE_ICVS: [f64; 2] = [1.09, 2.44];
