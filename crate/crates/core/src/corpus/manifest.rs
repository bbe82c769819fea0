use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("manifest lines {first_line} and {second_line}: duplicate id {id:?}")]
    DuplicateId {
        id: String,
        first_line: usize,
        second_line: usize,
    },
}

/// One program listed in a manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    pub path: PathBuf,
    pub dataset: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    /// File the manifest was read from, if any.
    pub source: Option<PathBuf>,
}

impl CorpusManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dataset labels in order of first appearance.
    pub fn datasets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.dataset.as_str()) {
                out.push(&e.dataset);
            }
        }
        out
    }
}

/// Read a JSON Lines manifest. Relative paths resolve against the
/// manifest's directory.
pub fn load_manifest(path: &Path) -> Result<CorpusManifest, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut manifest = parse_manifest(&text, base)?;
    manifest.source = Some(path.to_path_buf());
    Ok(manifest)
}

/// Parse manifest text; blank lines are skipped.
pub fn parse_manifest(text: &str, base: &Path) -> Result<CorpusManifest, ManifestError> {
    let mut entries = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut entry: ManifestEntry = serde_json::from_str(raw).map_err(|e| ManifestError::Malformed {
            line,
            message: e.to_string(),
        })?;
        for (field, value) in [("id", &entry.id), ("dataset", &entry.dataset)] {
            if value.trim().is_empty() {
                return Err(ManifestError::Malformed {
                    line,
                    message: format!("field `{field}` must be a non-empty string"),
                });
            }
        }
        if entry.path.as_os_str().is_empty() {
            return Err(ManifestError::Malformed {
                line,
                message: "field `path` must be a non-empty string".into(),
            });
        }
        if let Some(&first_line) = seen.get(&entry.id) {
            return Err(ManifestError::DuplicateId {
                id: entry.id,
                first_line,
                second_line: line,
            });
        }
        seen.insert(entry.id.clone(), line);
        if entry.path.is_relative() {
            entry.path = base.join(&entry.path);
        }
        entries.push(entry);
    }
    Ok(CorpusManifest { entries, source: None })
}
