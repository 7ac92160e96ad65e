//! `convo` — command-line front end for the conversation-analytics toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 transcript parse failure,
//! 3 data/corpus error. Diagnostics go to standard error; documents go to
//! standard output or `--out`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use convo_core::config::{AnalysisConfig, SplitRule, StddevMode};
use convo_core::metrics::analyze_meeting;
use convo_core::sim::{simulate_meeting, sweep, SimParams};
use convo_core::trend::student_trend;
use convo_core::volatility::Segment;
use convo_core::vtt::{serialize_transcript, RawCue};
use convo_report::csv::{meetings_csv, speakers_csv};
use convo_report::html::{emit_cohort_html, emit_meeting_html};
use convo_report::{
    emit_cohort_json, emit_sweep_json, emit_trend_json, emit_warnings_json, MeetingReport,
};
use convo_store::{CorpusStore, RegisterOptions, StoreError};

#[derive(Parser)]
#[command(
    name = "convo",
    version,
    about = "Analyze speaker engagement in WebVTT meeting transcripts",
    propagate_version = true
)]
struct Cli {
    /// Corpus root directory (default: the CONVO_CORPUS environment variable)
    #[arg(long, global = true, value_name = "DIR")]
    corpus: Option<PathBuf>,

    /// Merge gap threshold in seconds (overrides the corpus config)
    #[arg(long, global = true, value_name = "SECONDS")]
    gap_threshold: Option<f64>,

    /// Standard-deviation denominator (overrides the corpus config)
    #[arg(long, global = true, value_enum, value_name = "MODE")]
    stddev_mode: Option<StddevModeArg>,

    /// How meetings split into halves (overrides the corpus config)
    #[arg(long, global = true, value_enum, value_name = "RULE")]
    split_rule: Option<SplitRuleArg>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a new corpus directory (bakes in the config flags)
    Init {
        /// Directory to create the corpus in
        root: PathBuf,
    },
    /// Register a meeting and print its fresh meeting code
    Register {
        /// Meeting date, ISO format (e.g. 2026-03-14)
        #[arg(long)]
        date: NaiveDate,
        /// Course tag stored with the meeting
        #[arg(long, default_value = "")]
        course: String,
        /// Explicit boundary between the meeting's halves, in seconds
        #[arg(long, value_name = "SECONDS")]
        split_point: Option<f64>,
        /// Opaque link to the meeting recording
        #[arg(long, value_name = "URL")]
        video_link: Option<String>,
    },
    /// Ingest a WebVTT transcript for a registered meeting
    Attach {
        meeting_id: String,
        /// Path to the .vtt transcript
        file: PathBuf,
    },
    /// Compute one meeting's metrics
    Analyze {
        meeting_id: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Write to a file instead of standard output
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Cohort-level aggregates: characteristics, ordinal averages, slopes
    Cohort {
        #[arg(long, value_enum, default_value_t = SegmentArg::Whole)]
        segment: SegmentArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// One student's volatility trend across their meetings
    Trend {
        student_id: String,
        #[arg(long, value_enum, default_value_t = SegmentArg::Whole)]
        segment: SegmentArg,
    },
    /// Run the meeting simulator across backchannel rates
    Simulate {
        /// Backchannel rates to sweep, comma-separated (e.g. 0.0,0.3,0.6)
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
        /// Simulated meetings per rate
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Base seed; run i uses seed + i
        #[arg(long)]
        seed: Option<u64>,
        /// Also write each simulated meeting as a .vtt file into this directory
        #[arg(long, value_name = "DIR")]
        emit_vtt: Option<PathBuf>,
    },
    /// Render a static HTML report for one meeting or the whole cohort
    Report {
        /// Meeting to render (omit with --cohort)
        meeting_id: Option<String>,
        /// Render the cohort overview instead of a single meeting
        #[arg(long)]
        cohort: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StddevModeArg {
    Sample,
    Population,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SplitRuleArg {
    Explicit,
    Midpoint,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SegmentArg {
    Whole,
    #[value(name = "h1", alias = "first_half")]
    H1,
    #[value(name = "h2", alias = "second_half")]
    H2,
}

impl From<SegmentArg> for Segment {
    fn from(s: SegmentArg) -> Segment {
        match s {
            SegmentArg::Whole => Segment::Whole,
            SegmentArg::H1 => Segment::FirstHalf,
            SegmentArg::H2 => Segment::SecondHalf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Html,
}

/// Failure classes, ordered by exit code.
enum CliError {
    /// Exit 1: bad invocation (flags, missing corpus root, option conflicts).
    Usage(String),
    /// Exit 2: the transcript could not be parsed.
    Parse(String),
    /// Exit 3: corpus/data problems (unknown ids, storage failures).
    Data(String),
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> CliError {
        match e {
            StoreError::Transcript(ref inner) => {
                CliError::Parse(format!("{}: {inner}", inner.kind()))
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

/// The corpus root: `--corpus` flag, else `CONVO_CORPUS`.
fn corpus_root(cli: &Cli) -> Result<PathBuf, CliError> {
    cli.corpus
        .clone()
        .or_else(|| std::env::var_os("CONVO_CORPUS").map(PathBuf::from))
        .ok_or_else(|| {
            CliError::Usage("no corpus root: pass --corpus DIR or set CONVO_CORPUS".to_string())
        })
}

fn open_store(cli: &Cli) -> Result<CorpusStore, CliError> {
    Ok(CorpusStore::open(corpus_root(cli)?)?)
}

/// Apply flag overrides on top of a base config (the corpus file's, or the
/// built-in default when no corpus is involved).
fn apply_overrides(mut config: AnalysisConfig, cli: &Cli) -> Result<AnalysisConfig, CliError> {
    if let Some(gap) = cli.gap_threshold {
        if !gap.is_finite() || gap < 0.0 {
            return Err(CliError::Usage(format!("--gap-threshold must be ≥ 0, got {gap}")));
        }
        config.gap_threshold_ms = (gap * 1000.0).round() as u64;
    }
    if let Some(mode) = cli.stddev_mode {
        config.stddev_mode = match mode {
            StddevModeArg::Sample => StddevMode::Sample,
            StddevModeArg::Population => StddevMode::Population,
        };
    }
    if let Some(rule) = cli.split_rule {
        config.split_rule = match rule {
            SplitRuleArg::Explicit => SplitRule::Explicit,
            SplitRuleArg::Midpoint => SplitRule::Midpoint,
        };
    }
    Ok(config)
}

/// Flag > corpus config file > built-in default.
fn effective_config(store: &CorpusStore, cli: &Cli) -> Result<AnalysisConfig, CliError> {
    apply_overrides(store.config()?, cli)
}

/// Write a document to `--out` or standard output, ensuring exactly one
/// trailing newline.
fn deliver(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    let body = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Init { root } => {
            let config = apply_overrides(AnalysisConfig::default(), cli)?;
            let store = CorpusStore::init_with_config(root, &config)?;
            eprintln!("initialized corpus at {}", store.root().display());
            Ok(())
        }
        Command::Register { date, course, split_point, video_link } => {
            let store = open_store(cli)?;
            let options = RegisterOptions {
                course_tag: course.clone(),
                split_point_seconds: *split_point,
                video_link: video_link.clone(),
                segment_labels: None,
            };
            let id = store.register_meeting(*date, &options)?;
            println!("{id}");
            Ok(())
        }
        Command::Attach { meeting_id, file } => {
            let store = open_store(cli)?;
            let text = fs::read_to_string(file)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", file.display())))?;
            let report = store.attach_transcript(meeting_id, &text)?;
            for w in &report.warnings {
                if w.line == 0 {
                    eprintln!("warning: {}", w.message);
                } else {
                    eprintln!("warning: line {}: {}", w.line, w.message);
                }
            }
            println!("{}", emit_warnings_json(&report));
            Ok(())
        }
        Command::Analyze { meeting_id, format, out } => {
            let store = open_store(cli)?;
            let config = effective_config(&store, cli)?;
            let text = match format {
                FormatArg::Json => store.meeting_report_json(meeting_id, &config)?,
                FormatArg::Csv => {
                    let report = parse_report(&store, meeting_id, &config)?;
                    two_tables(&[report])
                }
                FormatArg::Html => {
                    let meeting = store.load_meeting(meeting_id, &config)?;
                    let metrics = analyze_meeting(&meeting, &config);
                    emit_meeting_html(&meeting, &metrics, &config.fingerprint())
                }
            };
            deliver(out, &text)
        }
        Command::Cohort { segment, format, out } => {
            let store = open_store(cli)?;
            let config = effective_config(&store, cli)?;
            let text = match format {
                FormatArg::Json => {
                    let (snapshot, failures) = store.load_corpus(&config)?;
                    report_failures(&failures);
                    emit_cohort_json(&snapshot, (*segment).into())
                }
                FormatArg::Csv => {
                    let mut reports = Vec::new();
                    for id in store.meeting_ids()? {
                        match parse_report(&store, &id, &config) {
                            Ok(r) => reports.push(r),
                            Err(CliError::Parse(m)) | Err(CliError::Data(m)) => {
                                eprintln!("warning: skipping meeting {id}: {m}")
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    two_tables(&reports)
                }
                FormatArg::Html => {
                    let (snapshot, failures) = store.load_corpus(&config)?;
                    report_failures(&failures);
                    emit_cohort_html(&snapshot)
                }
            };
            deliver(out, &text)
        }
        Command::Trend { student_id, segment } => {
            let store = open_store(cli)?;
            let config = effective_config(&store, cli)?;
            let (snapshot, failures) = store.load_corpus(&config)?;
            report_failures(&failures);
            let trend = student_trend(&snapshot, student_id, (*segment).into())
                .map_err(|e| CliError::Data(e.to_string()))?;
            println!("{}", emit_trend_json(&trend, &config.fingerprint()));
            Ok(())
        }
        Command::Simulate { beta, runs, seed, emit_vtt } => {
            // Simulation needs no corpus; config comes from flags + defaults.
            let config = apply_overrides(AnalysisConfig::default(), cli)?;
            let mut base = SimParams::default();
            if let Some(seed) = seed {
                base.seed = *seed;
            }
            let rows = sweep(&base, beta, *runs, config.stddev_mode)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(dir) = emit_vtt {
                fs::create_dir_all(dir)
                    .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
                for rate in beta {
                    for run in 0..*runs {
                        let params = SimParams {
                            backchannel_rate: *rate,
                            seed: base.seed + run as u64,
                            ..base.clone()
                        };
                        let meeting =
                            simulate_meeting(&params).map_err(|e| CliError::Usage(e.to_string()))?;
                        let cues: Vec<RawCue> = meeting
                            .utterances
                            .iter()
                            .enumerate()
                            .map(|(i, u)| RawCue {
                                index: Some(i as u64 + 1),
                                start_ms: u.start_ms,
                                end_ms: u.end_ms,
                                speaker: Some(u.speaker.clone()),
                                text: u.text.clone(),
                            })
                            .collect();
                        let path = dir.join(format!("sim-b{rate:.2}-r{run:03}.vtt"));
                        fs::write(&path, serialize_transcript(&cues)).map_err(|e| {
                            CliError::Data(format!("cannot write {}: {e}", path.display()))
                        })?;
                    }
                }
            }
            println!("{}", emit_sweep_json(&rows, base.seed, &config.fingerprint()));
            Ok(())
        }
        Command::Report { meeting_id, cohort, out } => match (meeting_id, cohort) {
            (Some(_), true) => {
                Err(CliError::Usage("pass a meeting id or --cohort, not both".to_string()))
            }
            (None, false) => {
                Err(CliError::Usage("pass a meeting id or --cohort".to_string()))
            }
            (Some(id), false) => {
                let store = open_store(cli)?;
                let config = effective_config(&store, cli)?;
                let meeting = store.load_meeting(id, &config)?;
                let metrics = analyze_meeting(&meeting, &config);
                deliver(out, &emit_meeting_html(&meeting, &metrics, &config.fingerprint()))
            }
            (None, true) => {
                let store = open_store(cli)?;
                let config = effective_config(&store, cli)?;
                let (snapshot, failures) = store.load_corpus(&config)?;
                report_failures(&failures);
                deliver(out, &emit_cohort_html(&snapshot))
            }
        },
    }
}

fn parse_report(
    store: &CorpusStore,
    meeting_id: &str,
    config: &AnalysisConfig,
) -> Result<MeetingReport, CliError> {
    let text = store.meeting_report_json(meeting_id, config)?;
    MeetingReport::parse(&text).map_err(|e| CliError::Data(e.to_string()))
}

/// The CSV export: the per-speaker table, a blank line, the per-meeting table.
fn two_tables(reports: &[MeetingReport]) -> String {
    format!("{}\n{}", speakers_csv(reports), meetings_csv(reports))
}

fn report_failures(failures: &[convo_store::MeetingFailure]) {
    for f in failures {
        eprintln!("warning: skipping meeting {}: {}", f.meeting_id, f.error);
    }
}
