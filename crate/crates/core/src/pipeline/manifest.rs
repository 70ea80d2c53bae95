use std::collections::HashSet;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One utterance of a JSON-lines manifest: `{"id": .., "audio": .., "text": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    #[serde(rename = "audio")]
    pub audio_path: PathBuf,
    #[serde(default, rename = "text", skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
}

fn check_id(id: &str) -> std::result::Result<(), String> {
    if id.is_empty() {
        return Err("id must not be empty".into());
    }
    if id.chars().any(|c| c.is_whitespace() || c == '/' || c == '\\') {
        return Err(format!("id `{id}` contains whitespace or a path separator"));
    }
    Ok(())
}

/// Reads a manifest. Relative audio paths resolve against the manifest's
/// directory. Blank lines are skipped.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut entries = parse_manifest(std::io::BufReader::new(file), path)?;
    for e in &mut entries {
        if e.audio_path.is_relative() {
            e.audio_path = base.join(&e.audio_path);
        }
    }
    Ok(entries)
}

/// Parses manifest lines without touching audio paths. `origin` only labels errors.
pub fn parse_manifest<R: BufRead>(reader: R, origin: &Path) -> Result<Vec<ManifestEntry>> {
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        };
        let entry: ManifestEntry = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        check_id(&entry.id).map_err(parse_err)?;
        if !seen.insert(entry.id.clone()) {
            return Err(Error::DuplicateId(entry.id));
        }
        entries.push(entry);
    }
    Ok(entries)
}
