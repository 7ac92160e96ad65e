//! On-disk JSON document schemas and atomic file helpers.
//!
//! Every document carries `schema_version`. Struct fields are declared in
//! lexicographic order so serialization emits sorted keys. Writes go to a
//! temporary file in the same directory followed by an atomic rename, so
//! readers only ever observe complete documents.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use convo_core::config::{AnalysisConfig, SplitRule, StddevMode};

use crate::alias::AliasPolicy;
use crate::StoreError;

pub const SCHEMA_VERSION: u32 = 1;

/// `config.json` — the analysis configuration baked into a corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Merge threshold in seconds (converted to milliseconds internally).
    pub gap_threshold_seconds: f64,
    pub schema_version: u32,
    pub split_rule: SplitRule,
    pub stddev_mode: StddevMode,
}

impl ConfigFile {
    pub fn from_config(config: &AnalysisConfig) -> ConfigFile {
        ConfigFile {
            gap_threshold_seconds: config.gap_threshold_ms as f64 / 1000.0,
            schema_version: SCHEMA_VERSION,
            split_rule: config.split_rule,
            stddev_mode: config.stddev_mode,
        }
    }

    pub fn to_config(&self, path: &Path) -> Result<AnalysisConfig, StoreError> {
        if !self.gap_threshold_seconds.is_finite() || self.gap_threshold_seconds < 0.0 {
            return Err(StoreError::Malformed {
                path: path.to_path_buf(),
                detail: format!("gap_threshold_seconds must be ≥ 0, got {}", self.gap_threshold_seconds),
            });
        }
        Ok(AnalysisConfig {
            gap_threshold_ms: (self.gap_threshold_seconds * 1000.0).round() as u64,
            stddev_mode: self.stddev_mode,
            split_rule: self.split_rule,
        })
    }
}

/// One registered student.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudentRecord {
    pub id: String,
    pub name: String,
}

/// `students.json` — the tracked cohort. An empty list means "track every
/// resolved speaker observed in the corpus".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudentsFile {
    pub schema_version: u32,
    pub students: Vec<StudentRecord>,
}

impl Default for StudentsFile {
    fn default() -> Self {
        StudentsFile { schema_version: SCHEMA_VERSION, students: Vec::new() }
    }
}

/// `aliases.json` — raw display name → student id, plus the policy for
/// names not in the table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AliasesFile {
    pub default_policy: AliasPolicy,
    pub entries: BTreeMap<String, String>,
    pub schema_version: u32,
}

impl Default for AliasesFile {
    fn default() -> Self {
        AliasesFile {
            default_policy: AliasPolicy::AutoCreate,
            entries: BTreeMap::new(),
            schema_version: SCHEMA_VERSION,
        }
    }
}

/// `meetings/<id>/meta.json` — one meeting's registration record.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaFile {
    pub course_tag: String,
    pub date: NaiveDate,
    pub meeting_id: String,
    /// Raw transcript speaker name → resolved student id, filled at attach.
    pub participants_resolved: BTreeMap<String, String>,
    pub schema_version: u32,
    /// Names for the two halves (e.g. the two practiced languages).
    pub segment_labels: Option<(String, String)>,
    pub split_point_seconds: Option<f64>,
    pub video_link: Option<String>,
}

/// `meetings/<id>/metrics.json` — cached canonical report text keyed by the
/// config fingerprint it was computed under. Values are stored as JSON
/// strings so the cached bytes round-trip exactly.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CacheFile {
    pub entries: BTreeMap<String, String>,
    pub schema_version: u32,
}

fn io_err(path: &Path, source: std::io::Error) -> StoreError {
    StoreError::Io { path: path.to_path_buf(), source }
}

/// Write bytes to `path` atomically: temp file in the same directory,
/// flushed to disk, then renamed over the destination.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".to_string());
    let tmp: PathBuf = dir.join(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Serialize a document (pretty, trailing newline — the files are meant to
/// be human-inspectable) and write it atomically.
pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), StoreError> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| StoreError::Malformed {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, StoreError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc: T = serde_json::from_str(&text).map_err(|e| StoreError::Malformed {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    Ok(doc)
}
