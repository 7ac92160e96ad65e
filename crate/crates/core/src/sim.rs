//! Synthetic-meeting simulator.
//!
//! Generates meetings from a simple turn-taking model: speakers alternate
//! (with an optional self-transition probability), each turn is either a
//! long contribution or a short backchannel, and turns are separated by
//! small gaps. Its purpose is validation — volatility should respond in
//! known directions when the mixing rate changes — and demo corpora.

use chrono::NaiveDate;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::StddevMode;
use crate::model::{Meeting, Utterance};
use crate::volatility::{individual_cv, meeting_cv};

/// Name of the generator backing the simulator, recorded in outputs so runs
/// are reproducible across toolkit versions.
pub const RNG_NAME: &str = "chacha8";

/// Simulation parameters. All durations are seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub n_speakers: usize,
    /// Generation stops once total elapsed time passes this.
    pub target_duration_s: f64,
    /// Long-turn duration range (uniform), inclusive.
    pub long_turn_s: (f64, f64),
    /// Backchannel duration range (uniform), inclusive.
    pub backchannel_s: (f64, f64),
    /// Probability that a turn is a backchannel rather than a long turn.
    pub backchannel_rate: f64,
    /// Silence between consecutive turns (uniform), inclusive.
    pub gap_s: (f64, f64),
    /// Probability the next turn stays with the same speaker.
    pub self_transition: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_speakers: 3,
            target_duration_s: 300.0,
            long_turn_s: (4.0, 8.0),
            backchannel_s: (0.3, 1.0),
            backchannel_rate: 0.25,
            gap_s: (0.2, 1.5),
            self_transition: 0.15,
            seed: 42,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
}

fn validate(params: &SimParams) -> Result<(), SimError> {
    let err = |m: &str| Err(SimError::InvalidParams(m.to_string()));
    if params.n_speakers < 2 {
        return err("need at least two speakers");
    }
    if !params.target_duration_s.is_finite() || params.target_duration_s <= 0.0 {
        return err("target duration must be positive");
    }
    for (name, (lo, hi)) in [
        ("long turn", params.long_turn_s),
        ("backchannel", params.backchannel_s),
        ("gap", params.gap_s),
    ] {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo {
            return Err(SimError::InvalidParams(format!("{name} range must satisfy 0 <= lo <= hi")));
        }
    }
    if !(0.0..=1.0).contains(&params.backchannel_rate) {
        return err("backchannel rate must be in [0, 1]");
    }
    if !(0.0..=1.0).contains(&params.self_transition) {
        return err("self-transition probability must be in [0, 1]");
    }
    Ok(())
}

fn range_ms(range: (f64, f64)) -> (u64, u64) {
    ((range.0 * 1000.0).round() as u64, (range.1 * 1000.0).round() as u64)
}

/// Generate one synthetic meeting. Deterministic in `params` — same
/// parameters, same meeting, on every platform.
pub fn simulate_meeting(params: &SimParams) -> Result<Meeting, SimError> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let target_ms = (params.target_duration_s * 1000.0).round() as u64;
    let long_ms = range_ms(params.long_turn_s);
    let back_ms = range_ms(params.backchannel_s);
    let gap_ms = range_ms(params.gap_s);

    let mut utterances: Vec<Utterance> = Vec::new();
    let mut t: u64 = 0;
    let mut speaker = rng.random_range(0..params.n_speakers);
    let mut turn_no = 0usize;
    while t < target_ms {
        if turn_no > 0 {
            t += rng.random_range(gap_ms.0..=gap_ms.1);
            speaker = if rng.random_bool(params.self_transition) {
                speaker
            } else {
                // Uniform over the other speakers.
                let other = rng.random_range(0..params.n_speakers - 1);
                if other >= speaker {
                    other + 1
                } else {
                    other
                }
            };
        }
        let backchannel = rng.random_bool(params.backchannel_rate);
        let dur = if backchannel {
            rng.random_range(back_ms.0..=back_ms.1)
        } else {
            rng.random_range(long_ms.0..=long_ms.1)
        };
        turn_no += 1;
        utterances.push(Utterance {
            speaker: format!("S{}", speaker + 1),
            start_ms: t,
            end_ms: t + dur,
            text: if backchannel { "mm-hmm".to_string() } else { format!("turn {turn_no}") },
            source_cues: vec![],
        });
        t += dur;
    }

    let mut meeting = Meeting::from_utterances(
        format!("sim-{:016x}", params.seed),
        NaiveDate::from_ymd_opt(2000, 1, 1).expect("fixed date"),
        utterances,
    );
    // Every configured speaker is a participant even if the dice never gave
    // them a turn.
    let mut participants: Vec<String> =
        (1..=params.n_speakers).map(|i| format!("S{i}")).collect();
    participants.sort();
    meeting.participants = participants;
    Ok(meeting)
}

/// One row of a backchannel-rate sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub backchannel_rate: f64,
    pub n_runs: usize,
    /// Mean whole-meeting volatility over runs (absent values skipped).
    pub mean_mcv: Option<f64>,
    /// Mean speaker volatility over all (run, speaker) pairs with a value.
    pub mean_icv: Option<f64>,
}

/// Sweep the backchannel rate and average volatility over `n_runs` seeds per
/// rate. Run *i* uses seed `base.seed + i` at every rate, so rates are
/// compared on identical random streams.
pub fn sweep(
    base: &SimParams,
    rates: &[f64],
    n_runs: usize,
    mode: StddevMode,
) -> Result<Vec<SweepRow>, SimError> {
    if n_runs == 0 {
        return Err(SimError::InvalidParams("need at least one run per rate".to_string()));
    }
    if rates.is_empty() {
        return Err(SimError::InvalidParams("need at least one backchannel rate".to_string()));
    }
    let mut rows = Vec::with_capacity(rates.len());
    for &rate in rates {
        let mut mcvs = Vec::new();
        let mut icvs = Vec::new();
        for i in 0..n_runs {
            let params = SimParams {
                backchannel_rate: rate,
                seed: base.seed.wrapping_add(i as u64),
                ..base.clone()
            };
            let meeting = simulate_meeting(&params)?;
            if let Some(v) = meeting_cv(&meeting, mode).value {
                mcvs.push(v);
            }
            for p in &meeting.participants {
                if let Some(v) = individual_cv(&meeting, p, mode).expect("participant").value {
                    icvs.push(v);
                }
            }
        }
        let mean = |v: &[f64]| {
            if v.is_empty() {
                None
            } else {
                Some(v.iter().sum::<f64>() / v.len() as f64)
            }
        };
        rows.push(SweepRow {
            backchannel_rate: rate,
            n_runs,
            mean_mcv: mean(&mcvs),
            mean_icv: mean(&icvs),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_meeting() {
        let params = SimParams::default();
        let a = simulate_meeting(&params).unwrap();
        let b = simulate_meeting(&params).unwrap();
        assert_eq!(a, b);
        let c = simulate_meeting(&SimParams { seed: 43, ..params }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simulated_meeting_is_well_formed() {
        let m = simulate_meeting(&SimParams::default()).unwrap();
        assert!(!m.utterances.is_empty());
        // Utterances are chronological and non-overlapping by construction.
        for w in m.utterances.windows(2) {
            assert!(w[0].end_ms <= w[1].start_ms);
            assert!(w[1].start_ms - w[0].end_ms >= 200, "gap below configured minimum");
        }
        for u in &m.utterances {
            assert!(m.participants.contains(&u.speaker));
        }
        // Runs past the target, but not by more than one turn + gap.
        let (_, last_end) = m.span_ms().unwrap();
        assert!(last_end >= 300_000);
        assert!(last_end < 300_000 + 10_000);
    }

    #[test]
    fn turn_durations_stay_in_configured_ranges() {
        let params = SimParams { backchannel_rate: 0.5, ..SimParams::default() };
        let m = simulate_meeting(&params).unwrap();
        for u in &m.utterances {
            let d = u.duration_ms();
            let in_back = (300..=1000).contains(&d);
            let in_long = (4000..=8000).contains(&d);
            assert!(in_back || in_long, "duration {d}ms outside both ranges");
        }
    }

    #[test]
    fn zero_backchannel_rate_yields_only_long_turns() {
        let params = SimParams { backchannel_rate: 0.0, ..SimParams::default() };
        let m = simulate_meeting(&params).unwrap();
        assert!(m.utterances.iter().all(|u| u.duration_ms() >= 4000));
    }

    #[test]
    fn degenerate_constant_turns_have_zero_volatility() {
        // Long == backchannel == 5s exactly: every turn identical, so the
        // meeting is perfectly steady and volatility must be exactly zero.
        let params = SimParams {
            long_turn_s: (5.0, 5.0),
            backchannel_s: (5.0, 5.0),
            gap_s: (1.0, 1.0),
            ..SimParams::default()
        };
        let m = simulate_meeting(&params).unwrap();
        assert_eq!(meeting_cv(&m, StddevMode::Sample).value, Some(0.0));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let base = SimParams::default();
        assert!(simulate_meeting(&SimParams { n_speakers: 1, ..base.clone() }).is_err());
        assert!(simulate_meeting(&SimParams { long_turn_s: (8.0, 4.0), ..base.clone() }).is_err());
        assert!(simulate_meeting(&SimParams { backchannel_rate: 1.5, ..base.clone() }).is_err());
        assert!(simulate_meeting(&SimParams { target_duration_s: -10.0, ..base.clone() }).is_err());
        assert!(simulate_meeting(&SimParams { gap_s: (-0.5, 1.0), ..base }).is_err());
    }

    #[test]
    fn sweep_rejects_empty_plans() {
        let base = SimParams::default();
        assert!(sweep(&base, &[0.0], 0, StddevMode::Sample).is_err());
        assert!(sweep(&base, &[], 5, StddevMode::Sample).is_err());
    }

    #[test]
    fn sweep_rows_line_up_with_rates() {
        let base = SimParams { target_duration_s: 60.0, ..SimParams::default() };
        let rows = sweep(&base, &[0.0, 0.5], 3, StddevMode::Sample).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].backchannel_rate, 0.0);
        assert_eq!(rows[1].backchannel_rate, 0.5);
        assert_eq!(rows[0].n_runs, 3);
        assert!(rows[0].mean_mcv.is_some());
    }

    #[test]
    fn more_backchannel_mixing_raises_volatility() {
        // Direction check on a small sweep; the acceptance suite runs the
        // full-size version.
        let base = SimParams { target_duration_s: 120.0, ..SimParams::default() };
        let rows = sweep(&base, &[0.0, 0.5], 20, StddevMode::Sample).unwrap();
        let low = rows[0].mean_mcv.unwrap();
        let high = rows[1].mean_mcv.unwrap();
        assert!(high > low, "expected volatility to rise with mixing: {low} vs {high}");
    }

    #[test]
    fn common_random_numbers_make_zero_rate_rows_identical() {
        let base = SimParams { target_duration_s: 60.0, ..SimParams::default() };
        let a = sweep(&base, &[0.3, 0.3], 5, StddevMode::Sample).unwrap();
        assert_eq!(a[0].mean_mcv, a[1].mean_mcv);
        assert_eq!(a[0].mean_icv, a[1].mean_icv);
    }
}
