//! Analysis configuration shared across the pipeline.

use serde::{Deserialize, Serialize};

/// Which standard-deviation denominator volatility metrics use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StddevMode {
    /// n − 1 denominator (the default).
    Sample,
    /// n denominator.
    Population,
}

impl StddevMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StddevMode::Sample => "sample",
            StddevMode::Population => "population",
        }
    }
}

/// How a meeting is cut in two for first-half/second-half metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Use the meeting's explicit split point when present, otherwise the
    /// temporal midpoint.
    Explicit,
    /// Always use the temporal midpoint, ignoring any explicit split point.
    Midpoint,
}

impl SplitRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitRule::Explicit => "explicit",
            SplitRule::Midpoint => "midpoint",
        }
    }
}

/// Knobs that change metric values. Anything that alters analysis output is
/// part of the cache fingerprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Maximum silence between consecutive same-speaker cues that still
    /// merges them into one utterance.
    pub gap_threshold_ms: u64,
    pub stddev_mode: StddevMode,
    pub split_rule: SplitRule,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            gap_threshold_ms: 1000,
            stddev_mode: StddevMode::Sample,
            split_rule: SplitRule::Explicit,
        }
    }
}

impl AnalysisConfig {
    /// Stable identifier for cached metrics. Two configs with the same
    /// fingerprint produce identical analysis output for identical input.
    pub fn fingerprint(&self) -> String {
        format!(
            "gap{}ms-{}-{}",
            self.gap_threshold_ms,
            self.stddev_mode.as_str(),
            self.split_rule.as_str()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_fingerprint_is_stable() {
        assert_eq!(AnalysisConfig::default().fingerprint(), "gap1000ms-sample-explicit");
    }

    #[test]
    fn fingerprint_tracks_every_knob() {
        let base = AnalysisConfig::default();
        let gap = AnalysisConfig { gap_threshold_ms: 500, ..base };
        let mode = AnalysisConfig { stddev_mode: StddevMode::Population, ..base };
        let rule = AnalysisConfig { split_rule: SplitRule::Midpoint, ..base };
        let fps = [base.fingerprint(), gap.fingerprint(), mode.fingerprint(), rule.fingerprint()];
        for i in 0..fps.len() {
            for j in (i + 1)..fps.len() {
                assert_ne!(fps[i], fps[j]);
            }
        }
    }

    #[test]
    fn config_round_trips_through_serde() {
        let cfg = AnalysisConfig {
            gap_threshold_ms: 750,
            stddev_mode: StddevMode::Population,
            split_rule: SplitRule::Midpoint,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: AnalysisConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(text.contains("\"population\""));
        assert!(text.contains("\"midpoint\""));
    }
}
