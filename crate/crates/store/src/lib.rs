//! File-based corpus persistence: meeting registration, transcript storage,
//! student registry and speaker aliasing, and a per-config metrics cache.
//!
//! A corpus is a plain directory tree —
//!
//! ```text
//! <root>/
//!   config.json              analysis configuration baked into the corpus
//!   students.json            tracked cohort (empty = track everyone seen)
//!   aliases.json             raw display name → student id, plus policy
//!   .lock                    advisory write lock
//!   meetings/<id>/
//!     meta.json              registration record
//!     transcript.vtt         uploaded transcript, stored verbatim
//!     metrics.json           cached canonical reports keyed by fingerprint
//! ```
//!
//! — human-inspectable and trivially backed up. Writes follow a
//! single-writer, multi-reader contract: mutations take an advisory lock on
//! `<root>/.lock` and land via write-to-temp + atomic rename, so readers
//! never observe partial documents.

pub mod alias;
pub mod codes;
pub mod files;

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use fs2::FileExt;
use rand::Rng;
use thiserror::Error;

use convo_core::config::AnalysisConfig;
use convo_core::corpus::CorpusSnapshot;
use convo_core::metrics::analyze_meeting;
use convo_core::model::{merge_cues, Meeting};
use convo_core::vtt::{parse_transcript, ParseWarning, TranscriptParseReport, VttError};
use convo_report::{emit_meeting_json, MeetingReport, ReportError};

pub use alias::{resolve_speakers, AliasPolicy, AliasTable, Resolution};
pub use codes::{is_meeting_code, meeting_code};
pub use files::{StudentRecord, SCHEMA_VERSION};

use alias::slugify;
use files::{AliasesFile, CacheFile, ConfigFile, MetaFile, StudentsFile};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("corpus at {} is not initialized (no config.json)", .0.display())]
    NotInitialized(PathBuf),
    #[error("corpus already initialized at {}", .0.display())]
    AlreadyInitialized(PathBuf),
    #[error("unknown meeting {0}")]
    UnknownMeeting(String),
    #[error("unresolved speaker names: {}", .0.join(", "))]
    UnknownSpeakers(Vec<String>),
    #[error("transcript: {0}")]
    Transcript(#[from] VttError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("malformed {}: {detail}", .path.display())]
    Malformed { path: PathBuf, detail: String },
    #[error("storage failure at {}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl StoreError {
    fn from_report(path: &Path, e: ReportError) -> StoreError {
        StoreError::Malformed { path: path.to_path_buf(), detail: e.to_string() }
    }
}

/// One meeting that could not be analyzed while loading the corpus.
/// Failures are reported, not fatal: the rest of the corpus still loads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetingFailure {
    pub meeting_id: String,
    pub error: String,
}

/// Optional registration metadata beyond the date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegisterOptions {
    pub course_tag: String,
    /// Explicit boundary between the meeting's two halves, in seconds.
    pub split_point_seconds: Option<f64>,
    pub video_link: Option<String>,
    /// Names for the two halves (e.g. the two practiced languages).
    pub segment_labels: Option<(String, String)>,
}

/// Handle on one corpus root.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    root: PathBuf,
}

/// Holds the advisory write lock for the duration of a mutation.
struct LockGuard(fs::File);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = FileExt::unlock(&self.0);
    }
}

fn io_err(path: &Path, source: io::Error) -> StoreError {
    StoreError::Io { path: path.to_path_buf(), source }
}

impl CorpusStore {
    /// Create a new corpus at `root` with the default configuration.
    pub fn init(root: impl Into<PathBuf>) -> Result<CorpusStore, StoreError> {
        Self::init_with_config(root, &AnalysisConfig::default())
    }

    /// Create a new corpus at `root`, baking `config` into `config.json`.
    pub fn init_with_config(
        root: impl Into<PathBuf>,
        config: &AnalysisConfig,
    ) -> Result<CorpusStore, StoreError> {
        let root = root.into();
        let config_path = root.join("config.json");
        if config_path.exists() {
            return Err(StoreError::AlreadyInitialized(root));
        }
        fs::create_dir_all(root.join("meetings")).map_err(|e| io_err(&root, e))?;
        let store = CorpusStore { root };
        files::write_json(&store.config_path(), &ConfigFile::from_config(config))?;
        files::write_json(&store.students_path(), &StudentsFile::default())?;
        files::write_json(&store.aliases_path(), &AliasesFile::default())?;
        Ok(store)
    }

    /// Open an existing corpus.
    pub fn open(root: impl Into<PathBuf>) -> Result<CorpusStore, StoreError> {
        let root = root.into();
        if !root.join("config.json").is_file() {
            return Err(StoreError::NotInitialized(root));
        }
        Ok(CorpusStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn config_path(&self) -> PathBuf {
        self.root.join("config.json")
    }

    fn students_path(&self) -> PathBuf {
        self.root.join("students.json")
    }

    fn aliases_path(&self) -> PathBuf {
        self.root.join("aliases.json")
    }

    fn meetings_dir(&self) -> PathBuf {
        self.root.join("meetings")
    }

    fn meeting_dir(&self, id: &str) -> PathBuf {
        self.meetings_dir().join(id)
    }

    fn meta_path(&self, id: &str) -> PathBuf {
        self.meeting_dir(id).join("meta.json")
    }

    fn transcript_path(&self, id: &str) -> PathBuf {
        self.meeting_dir(id).join("transcript.vtt")
    }

    fn cache_path(&self, id: &str) -> PathBuf {
        self.meeting_dir(id).join("metrics.json")
    }

    /// Take the corpus write lock. Released when the guard drops.
    fn lock(&self) -> Result<LockGuard, StoreError> {
        let path = self.root.join(".lock");
        let file = fs::OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)
            .map_err(|e| io_err(&path, e))?;
        file.lock_exclusive().map_err(|e| io_err(&path, e))?;
        Ok(LockGuard(file))
    }

    /// The configuration baked into this corpus.
    pub fn config(&self) -> Result<AnalysisConfig, StoreError> {
        let path = self.config_path();
        let file: ConfigFile = files::read_json(&path)?;
        file.to_config(&path)
    }

    /// The tracked cohort (may be empty, meaning "everyone observed").
    pub fn students(&self) -> Result<Vec<StudentRecord>, StoreError> {
        Ok(files::read_json::<StudentsFile>(&self.students_path())?.students)
    }

    /// Replace the tracked cohort.
    pub fn set_students(&self, mut students: Vec<StudentRecord>) -> Result<(), StoreError> {
        let _guard = self.lock()?;
        students.sort_by(|a, b| a.id.cmp(&b.id));
        files::write_json(
            &self.students_path(),
            &StudentsFile { schema_version: SCHEMA_VERSION, students },
        )
    }

    /// The current alias table.
    pub fn alias_table(&self) -> Result<AliasTable, StoreError> {
        let file: AliasesFile = files::read_json(&self.aliases_path())?;
        Ok(AliasTable { entries: file.entries, default_policy: file.default_policy })
    }

    /// Change what happens to unknown speaker names.
    pub fn set_alias_policy(&self, policy: AliasPolicy) -> Result<(), StoreError> {
        let _guard = self.lock()?;
        let mut file: AliasesFile = files::read_json(&self.aliases_path())?;
        file.default_policy = policy;
        files::write_json(&self.aliases_path(), &file)
    }

    /// Map a raw display name to a student id.
    pub fn add_alias(&self, raw: impl Into<String>, student_id: impl Into<String>) -> Result<(), StoreError> {
        let _guard = self.lock()?;
        let mut file: AliasesFile = files::read_json(&self.aliases_path())?;
        file.entries.insert(raw.into(), student_id.into());
        files::write_json(&self.aliases_path(), &file)
    }

    /// Register a meeting with a fresh unique code drawn from system entropy.
    pub fn register_meeting(
        &self,
        date: NaiveDate,
        options: &RegisterOptions,
    ) -> Result<String, StoreError> {
        self.register_meeting_with(date, options, &mut rand::rng())
    }

    /// Register a meeting drawing the code from the given source — seeded in
    /// tests, system entropy in production.
    pub fn register_meeting_with<R: Rng + ?Sized>(
        &self,
        date: NaiveDate,
        options: &RegisterOptions,
        rng: &mut R,
    ) -> Result<String, StoreError> {
        if let Some(s) = options.split_point_seconds {
            if !s.is_finite() || s < 0.0 {
                return Err(StoreError::Invalid(format!("split point must be ≥ 0 s, got {s}")));
            }
        }
        if !self.config_path().is_file() {
            return Err(StoreError::NotInitialized(self.root.clone()));
        }
        let _guard = self.lock()?;
        let id = loop {
            let candidate = meeting_code(rng);
            if !self.meeting_dir(&candidate).exists() {
                break candidate;
            }
        };
        let dir = self.meeting_dir(&id);
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let meta = MetaFile {
            course_tag: options.course_tag.clone(),
            date,
            meeting_id: id.clone(),
            participants_resolved: Default::default(),
            schema_version: SCHEMA_VERSION,
            segment_labels: options.segment_labels.clone(),
            split_point_seconds: options.split_point_seconds,
            video_link: options.video_link.clone(),
        };
        files::write_json(&self.meta_path(&id), &meta)?;
        Ok(id)
    }

    /// All registered meeting ids, sorted.
    pub fn meeting_ids(&self) -> Result<Vec<String>, StoreError> {
        let dir = self.meetings_dir();
        let mut ids = Vec::new();
        let entries = fs::read_dir(&dir).map_err(|e| io_err(&dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| io_err(&dir, e))?;
            if entry.path().join("meta.json").is_file() {
                ids.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        ids.sort();
        Ok(ids)
    }

    fn read_meta(&self, id: &str) -> Result<MetaFile, StoreError> {
        let path = self.meta_path(id);
        if !path.is_file() {
            return Err(StoreError::UnknownMeeting(id.to_string()));
        }
        files::read_json(&path)
    }

    /// The effective alias table for one meeting: its attach-time mapping
    /// takes precedence over the corpus-wide table.
    fn effective_table(&self, meta: &MetaFile) -> Result<AliasTable, StoreError> {
        let mut table = self.alias_table()?;
        for (raw, id) in &meta.participants_resolved {
            table.entries.insert(raw.clone(), id.clone());
        }
        Ok(table)
    }

    /// Store a transcript for a registered meeting: parse it, resolve its
    /// speaker names, persist the document verbatim, and invalidate the
    /// metrics cache. Returns the parse report; unresolved names under the
    /// reject policy are appended to it as a document-level warning (the
    /// meeting then fails at analysis time until the alias table covers
    /// them).
    pub fn attach_transcript(
        &self,
        id: &str,
        vtt_document: &str,
    ) -> Result<TranscriptParseReport, StoreError> {
        let mut meta = self.read_meta(id)?;
        let mut report = parse_transcript(vtt_document)?;

        let raw_names: BTreeSet<String> = report
            .cues
            .iter()
            .map(|c| c.speaker.clone().unwrap_or_else(|| convo_core::vtt::UNKNOWN_SPEAKER.to_string()))
            .collect();
        let raw_names: Vec<String> = raw_names.into_iter().collect();

        let _guard = self.lock()?;
        let table = self.effective_table(&meta)?;
        let resolution = resolve_speakers(&raw_names, &table);
        if !resolution.unresolved.is_empty() {
            report.warnings.push(ParseWarning {
                line: 0,
                message: format!(
                    "unresolved speaker names under reject policy: {}",
                    resolution.unresolved.join(", ")
                ),
            });
        }
        if !resolution.created.is_empty() {
            let mut aliases: AliasesFile = files::read_json(&self.aliases_path())?;
            aliases.entries.extend(resolution.created.clone());
            files::write_json(&self.aliases_path(), &aliases)?;
        }
        meta.participants_resolved = resolution.mapping;
        files::write_json(&self.meta_path(id), &meta)?;
        files::atomic_write(&self.transcript_path(id), vtt_document.as_bytes())?;
        // Invalidate: the transcript changed, so every cached report is stale.
        files::write_json(
            &self.cache_path(id),
            &CacheFile { entries: Default::default(), schema_version: SCHEMA_VERSION },
        )?;
        Ok(report)
    }

    /// Reconstruct one meeting under `config`. A registered meeting without
    /// a transcript loads as an empty meeting. Speaker names resolve through
    /// the attach-time mapping first, then the current alias table, then the
    /// policy; unknown names under the reject policy fail the load.
    pub fn load_meeting(&self, id: &str, config: &AnalysisConfig) -> Result<Meeting, StoreError> {
        let meta = self.read_meta(id)?;
        let split_point_ms = meta.split_point_seconds.map(|s| (s * 1000.0).round() as u64);
        let transcript_path = self.transcript_path(id);
        if !transcript_path.is_file() {
            let mut meeting = Meeting::from_utterances(id, meta.date, Vec::new());
            meeting.split_point_ms = split_point_ms;
            meeting.segment_labels = meta.segment_labels.clone();
            return Ok(meeting);
        }
        let text = fs::read_to_string(&transcript_path).map_err(|e| io_err(&transcript_path, e))?;
        let parsed = parse_transcript(&text)?;

        let raw_names: BTreeSet<String> = parsed
            .cues
            .iter()
            .map(|c| c.speaker.clone().unwrap_or_else(|| convo_core::vtt::UNKNOWN_SPEAKER.to_string()))
            .collect();
        let raw_names: Vec<String> = raw_names.into_iter().collect();
        let table = self.effective_table(&meta)?;
        let resolution = resolve_speakers(&raw_names, &table);
        if !resolution.unresolved.is_empty() {
            return Err(StoreError::UnknownSpeakers(resolution.unresolved));
        }

        let mut cues = parsed.cues;
        for cue in &mut cues {
            let raw = cue.speaker.clone().unwrap_or_else(|| convo_core::vtt::UNKNOWN_SPEAKER.to_string());
            cue.speaker = Some(resolution.mapping[&raw].clone());
        }
        let utterances = merge_cues(&cues, config.gap_threshold_ms);
        let mut meeting = Meeting::from_utterances(id, meta.date, utterances);
        meeting.split_point_ms = split_point_ms;
        meeting.segment_labels = meta.segment_labels.clone();
        Ok(meeting)
    }

    /// The canonical report text for one meeting under `config` — served
    /// from the cache when the fingerprint matches, computed and cached
    /// otherwise. This is the single code path behind both the CLI and the
    /// HTTP service, so their bytes agree by construction.
    pub fn meeting_report_json(
        &self,
        id: &str,
        config: &AnalysisConfig,
    ) -> Result<String, StoreError> {
        if !self.meta_path(id).is_file() {
            return Err(StoreError::UnknownMeeting(id.to_string()));
        }
        let fingerprint = config.fingerprint();
        let cache_path = self.cache_path(id);
        if cache_path.is_file() {
            let cache: CacheFile = files::read_json(&cache_path)?;
            if let Some(text) = cache.entries.get(&fingerprint) {
                return Ok(text.clone());
            }
        }
        let meeting = self.load_meeting(id, config)?;
        let metrics = analyze_meeting(&meeting, config);
        let report = MeetingReport::from_metrics(&metrics, &fingerprint);
        let text = emit_meeting_json(&report);

        let _guard = self.lock()?;
        let mut cache: CacheFile = if cache_path.is_file() {
            files::read_json(&cache_path)?
        } else {
            CacheFile::default()
        };
        cache.schema_version = SCHEMA_VERSION;
        cache.entries.insert(fingerprint, text.clone());
        files::write_json(&cache_path, &cache)?;
        Ok(text)
    }

    /// Load the whole corpus as a snapshot of canonical per-meeting values.
    /// Meetings that fail to parse or resolve are excluded and reported —
    /// one bad transcript never hides the rest of the corpus.
    pub fn load_corpus(
        &self,
        config: &AnalysisConfig,
    ) -> Result<(CorpusSnapshot, Vec<MeetingFailure>), StoreError> {
        let mut summaries = Vec::new();
        let mut failures = Vec::new();
        for id in self.meeting_ids()? {
            let outcome = self.meeting_report_json(&id, config).and_then(|text| {
                let report = MeetingReport::parse(&text)
                    .map_err(|e| StoreError::from_report(&self.cache_path(&id), e))?;
                report.to_summary().map_err(|e| StoreError::from_report(&self.cache_path(&id), e))
            });
            match outcome {
                Ok(summary) => summaries.push(summary),
                Err(e) => failures.push(MeetingFailure { meeting_id: id, error: e.to_string() }),
            }
        }
        let students: Vec<String> = self.students()?.into_iter().map(|s| s.id).collect();
        Ok((CorpusSnapshot::new(students, summaries, config.fingerprint()), failures))
    }

    /// A stable student id for a display name, matching what attach would
    /// mint under the auto-create policy.
    pub fn external_id_for(name: &str) -> String {
        format!("ext-{}", slugify(name))
    }
}
