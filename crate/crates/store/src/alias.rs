//! Speaker-alias resolution: raw transcript display names (which vary by
//! session and platform) map to stable student ids before any analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// What to do with a raw name that has no alias entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliasPolicy {
    /// Mint `ext-<slug>` ids for unknown names (external partners).
    AutoCreate,
    /// Refuse to resolve unknown names.
    RejectUnknown,
}

/// The in-memory alias table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasTable {
    pub entries: BTreeMap<String, String>,
    pub default_policy: AliasPolicy,
}

/// The outcome of resolving a set of raw names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    /// Raw name → student id, for every name that resolved.
    pub mapping: BTreeMap<String, String>,
    /// The subset of `mapping` minted by the auto-create policy this call.
    pub created: BTreeMap<String, String>,
    /// Names the reject policy refused (empty under auto-create).
    pub unresolved: Vec<String>,
}

/// Reduce a display name to an id-safe slug: lowercase alphanumerics with
/// single dashes between runs of anything else.
pub fn slugify(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_dash = false;
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            if pending_dash && !out.is_empty() {
                out.push('-');
            }
            pending_dash = false;
            out.push(c.to_ascii_lowercase());
        } else {
            pending_dash = true;
        }
    }
    if out.is_empty() {
        "speaker".to_string()
    } else {
        out
    }
}

/// Resolve raw names against the table. Known names map through `entries`;
/// unknown names follow the default policy. Never fails outright: rejected
/// names are listed in `unresolved` for the caller to turn into a warning
/// or an error as its contract requires.
pub fn resolve_speakers(raw_names: &[String], table: &AliasTable) -> Resolution {
    let mut mapping = BTreeMap::new();
    let mut created = BTreeMap::new();
    let mut unresolved = Vec::new();
    for raw in raw_names {
        if mapping.contains_key(raw) {
            continue;
        }
        match table.entries.get(raw) {
            Some(id) => {
                mapping.insert(raw.clone(), id.clone());
            }
            None => match table.default_policy {
                AliasPolicy::AutoCreate => {
                    let id = format!("ext-{}", slugify(raw));
                    mapping.insert(raw.clone(), id.clone());
                    created.insert(raw.clone(), id);
                }
                AliasPolicy::RejectUnknown => unresolved.push(raw.clone()),
            },
        }
    }
    unresolved.sort();
    unresolved.dedup();
    Resolution { mapping, created, unresolved }
}
