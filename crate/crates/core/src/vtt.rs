//! WebVTT transcript ingestion.
//!
//! Parses the subset of WebVTT that meeting platforms export: a `WEBVTT`
//! header (optionally with trailing metadata on the same line), then cue
//! blocks separated by blank lines. A cue block is an optional identifier
//! line, a `start --> end` timestamp line (trailing cue settings ignored),
//! and one or more payload lines which are joined with single spaces.
//! `NOTE` and `STYLE` blocks are skipped. Speaker names are taken from a
//! leading `Name: ` prefix on the payload; prefix-less cues are attributed
//! to the previous cue's speaker.
//!
//! Parsing is lenient where the data is dirty — malformed cue blocks are
//! skipped with a warning instead of failing the document — and strict where
//! it matters: a missing header or a document with zero well-formed cues is
//! an error.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Sentinel speaker for cues with no prefix and no previous cue to inherit
/// from. Flows through the rest of the pipeline like any other name.
pub const UNKNOWN_SPEAKER: &str = "UNKNOWN";

/// One parsed cue, in source units (milliseconds since meeting start).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCue {
    /// Numeric cue identifier, when the block had one.
    pub index: Option<u64>,
    pub start_ms: u64,
    pub end_ms: u64,
    /// Attributed speaker. `None` never survives `parse_transcript` (the
    /// continuation rule or [`UNKNOWN_SPEAKER`] fills it in) but the field
    /// stays optional so cues can be built from other sources.
    pub speaker: Option<String>,
    /// Payload with any speaker prefix removed; never empty after parsing.
    pub text: String,
}

impl RawCue {
    pub fn duration_ms(&self) -> u64 {
        self.end_ms.saturating_sub(self.start_ms)
    }

    pub fn duration_seconds(&self) -> f64 {
        self.duration_ms() as f64 / 1000.0
    }
}

/// A non-fatal problem found while parsing. `line` is 1-based; warnings that
/// describe the document as a whole use line 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

/// Outcome of parsing one transcript document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptParseReport {
    /// Well-formed cues, sorted by start time (stable, so source order is
    /// kept for ties).
    pub cues: Vec<RawCue>,
    pub warnings: Vec<ParseWarning>,
    /// SHA-256 of the raw input bytes, hex-encoded.
    pub source_checksum: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VttError {
    #[error("missing WEBVTT header at line {line}")]
    MissingHeader { line: usize },
    #[error("transcript contains no well-formed cues")]
    EmptyTranscript,
    #[error("malformed timestamp {token:?}")]
    MalformedTimestamp { token: String },
}

impl VttError {
    /// Stable machine-readable name of the failure class, for diagnostics
    /// that must identify the error kind regardless of message wording.
    pub fn kind(&self) -> &'static str {
        match self {
            VttError::MissingHeader { .. } => "MissingHeader",
            VttError::EmptyTranscript => "EmptyTranscript",
            VttError::MalformedTimestamp { .. } => "MalformedTimestamp",
        }
    }
}

/// Parse a `HH:MM:SS.mmm` or `MM:SS.mmm` timestamp into milliseconds.
///
/// Hours may have any number of digits (at least one); minutes and seconds
/// are exactly two digits and must be below 60 when an hours field is
/// present. The fractional part is exactly three digits.
pub fn parse_timestamp(token: &str) -> Result<u64, VttError> {
    let err = || VttError::MalformedTimestamp { token: token.to_string() };
    let (whole, frac) = token.split_once('.').ok_or_else(err)?;
    if frac.len() != 3 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let millis: u64 = frac.parse().map_err(|_| err())?;

    let parts: Vec<&str> = whole.split(':').collect();
    let field = |s: &str| -> Result<u64, VttError> {
        if s.len() != 2 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        s.parse().map_err(|_| err())
    };
    let (h, m, s) = match parts.as_slice() {
        [hh, mm, ss] => {
            if hh.is_empty() || !hh.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let h: u64 = hh.parse().map_err(|_| err())?;
            let m = field(mm)?;
            let s = field(ss)?;
            // Minutes/seconds are clock fields once hours are spelled out.
            if m >= 60 || s >= 60 {
                return Err(err());
            }
            (h, m, s)
        }
        [mm, ss] => (0, field(mm)?, field(ss)?),
        _ => return Err(err()),
    };
    Ok(((h * 60 + m) * 60 + s) * 1000 + millis)
}

/// Format milliseconds as `HH:MM:SS.mmm` (hours pad to two digits but grow
/// as needed).
pub fn format_timestamp(ms: u64) -> String {
    let millis = ms % 1000;
    let total_s = ms / 1000;
    let s = total_s % 60;
    let m = (total_s / 60) % 60;
    let h = total_s / 3600;
    format!("{h:02}:{m:02}:{s:02}.{millis:03}")
}

/// Split a cue payload into speaker and text.
///
/// A payload whose first `": "` has a non-empty prefix names its speaker.
/// Otherwise the cue continues `previous`'s turn; with no previous speaker
/// it falls back to [`UNKNOWN_SPEAKER`]. Returns the attributed speaker and
/// the remaining text.
pub fn attribute_speaker(payload: &str, previous: Option<&str>) -> (Option<String>, String) {
    if let Some((name, rest)) = payload.split_once(": ") {
        if !name.is_empty() {
            return (Some(name.to_string()), rest.trim().to_string());
        }
    }
    let speaker = previous.unwrap_or(UNKNOWN_SPEAKER);
    (Some(speaker.to_string()), payload.trim().to_string())
}

/// Is this line the start of a block we ignore wholesale?
fn is_comment_block(first_line: &str) -> bool {
    first_line == "NOTE"
        || first_line.starts_with("NOTE ")
        || first_line.starts_with("NOTE\t")
        || first_line == "STYLE"
        || first_line == "REGION"
}

struct Block<'a> {
    /// (1-based line number, trimmed content) for each non-blank line.
    lines: Vec<(usize, &'a str)>,
}

/// Parse a WebVTT document into cues plus warnings.
///
/// Fails only when the header is missing or no cue block survives; every
/// per-block problem (bad timestamp line, end before start, empty payload)
/// becomes a [`ParseWarning`] and the block is skipped.
pub fn parse_transcript(document: &str) -> Result<TranscriptParseReport, VttError> {
    let source_checksum = hex::encode(Sha256::digest(document.as_bytes()));
    let body = document.strip_prefix('\u{feff}').unwrap_or(document);

    // Lines keep their 1-based numbers; CRLF is tolerated.
    let lines: Vec<(usize, &str)> = body
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .collect();

    let mut iter = lines.iter().copied().peekable();

    // Header: first non-blank line must be WEBVTT, optionally followed by
    // whitespace-separated metadata on the same line.
    let header = loop {
        match iter.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((n, l)) => break (n, l),
            None => return Err(VttError::MissingHeader { line: 1 }),
        }
    };
    let (header_line, header_text) = header;
    let ok_header = header_text == "WEBVTT"
        || header_text
            .strip_prefix("WEBVTT")
            .is_some_and(|rest| rest.starts_with(' ') || rest.starts_with('\t'));
    if !ok_header {
        return Err(VttError::MissingHeader { line: header_line });
    }

    // Group the remainder into blank-line-separated blocks.
    let mut blocks: Vec<Block> = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (n, l) in iter {
        if l.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(Block { lines: std::mem::take(&mut current) });
            }
        } else {
            current.push((n, l));
        }
    }
    if !current.is_empty() {
        blocks.push(Block { lines: current });
    }

    let mut cues: Vec<RawCue> = Vec::new();
    let mut warnings: Vec<ParseWarning> = Vec::new();
    let mut previous_speaker: Option<String> = None;
    let mut continuations = 0usize;

    for block in &blocks {
        if is_comment_block(block.lines[0].1.trim_start()) {
            continue;
        }
        match parse_cue_block(block, previous_speaker.as_deref()) {
            Ok((cue, continued)) => {
                if continued {
                    continuations += 1;
                }
                previous_speaker = cue.speaker.clone();
                cues.push(cue);
            }
            Err(w) => warnings.push(w),
        }
    }

    if cues.is_empty() {
        return Err(VttError::EmptyTranscript);
    }
    if continuations * 10 > cues.len() {
        warnings.push(ParseWarning {
            line: 0,
            message: format!(
                "speaker attribution fell back to the continuation rule for {continuations} of {} cues",
                cues.len()
            ),
        });
    }

    cues.sort_by_key(|c| c.start_ms);
    Ok(TranscriptParseReport { cues, warnings, source_checksum })
}

/// Parse one cue block. The second tuple element reports whether speaker
/// attribution used the continuation rule (no explicit `Name: ` prefix).
fn parse_cue_block(block: &Block, previous: Option<&str>) -> Result<(RawCue, bool), ParseWarning> {
    let lines = &block.lines;
    let (ts_pos, index) = if lines[0].1.contains("-->") {
        (0, None)
    } else if lines.len() > 1 && lines[1].1.contains("-->") {
        // Identifier line. Non-numeric identifiers are legal WebVTT; we only
        // keep the numeric ones that meeting exports use.
        (1, lines[0].1.trim().parse::<u64>().ok())
    } else {
        return Err(ParseWarning {
            line: lines[0].0,
            message: "cue block has no timestamp line".to_string(),
        });
    };

    let (ts_line_no, ts_line) = lines[ts_pos];
    let (start_tok, rest) = ts_line.split_once("-->").ok_or_else(|| ParseWarning {
        line: ts_line_no,
        message: "cue block has no timestamp line".to_string(),
    })?;
    // Anything after the end timestamp is cue settings; ignore it.
    let end_tok = rest.split_whitespace().next().unwrap_or("");

    let start_ms = parse_timestamp(start_tok.trim()).map_err(|e| ParseWarning {
        line: ts_line_no,
        message: e.to_string(),
    })?;
    let end_ms = parse_timestamp(end_tok).map_err(|e| ParseWarning {
        line: ts_line_no,
        message: e.to_string(),
    })?;
    if end_ms < start_ms {
        return Err(ParseWarning {
            line: ts_line_no,
            message: format!(
                "cue ends before it starts ({} --> {})",
                format_timestamp(start_ms),
                format_timestamp(end_ms)
            ),
        });
    }

    let payload = lines[ts_pos + 1..]
        .iter()
        .map(|(_, l)| l.trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    if payload.is_empty() {
        return Err(ParseWarning {
            line: ts_line_no,
            message: "cue has no payload text".to_string(),
        });
    }

    let explicit = matches!(payload.split_once(": "), Some((name, _)) if !name.is_empty());
    let (speaker, text) = attribute_speaker(&payload, previous);
    if text.is_empty() {
        // e.g. payload was just "Alice: " — nothing was said.
        return Err(ParseWarning {
            line: ts_line_no,
            message: "cue has no payload text".to_string(),
        });
    }
    Ok((RawCue { index, start_ms, end_ms, speaker, text }, !explicit))
}

/// Serialize cues back to WebVTT. Speaker prefixes are re-attached, so
/// `parse_transcript(serialize_transcript(cues))` reproduces the cues
/// (identifiers included, when numeric).
pub fn serialize_transcript(cues: &[RawCue]) -> String {
    let mut out = String::from("WEBVTT\n");
    for cue in cues {
        out.push('\n');
        if let Some(i) = cue.index {
            out.push_str(&i.to_string());
            out.push('\n');
        }
        out.push_str(&format_timestamp(cue.start_ms));
        out.push_str(" --> ");
        out.push_str(&format_timestamp(cue.end_ms));
        out.push('\n');
        match &cue.speaker {
            Some(s) => out.push_str(&format!("{s}: {}\n", cue.text)),
            None => out.push_str(&format!("{}\n", cue.text)),
        }
    }
    out
}
