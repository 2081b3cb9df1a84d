use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::pdb::ResidueRange;

/// One protein of a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub pdb: PathBuf,
    pub chain: char,
    /// Author-numbered residue interval, inclusive.
    pub range: Option<ResidueRange>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct Row {
    id: String,
    pdb: String,
    chain: String,
    #[serde(default)]
    range: Option<String>,
    label: String,
}

impl DatasetManifest {
    /// Reads a CSV manifest with header `id,pdb,chain,range,label`. Relative
    /// PDB paths resolve against the manifest's directory; `range` may be
    /// empty.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse(&text, base, &name)
    }

    pub fn parse(text: &str, base: &Path, name: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (k, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            let line = k + 2;
            let bad = |message: String| Error::Parse { line, message };
            if row.id.is_empty() || !row.id.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) {
                return Err(bad(format!("sample id '{}' must be non-empty and use [A-Za-z0-9._-]", row.id)));
            }
            if !seen.insert(row.id.clone()) {
                return Err(bad(format!("duplicate sample id '{}'", row.id)));
            }
            if row.label.is_empty() {
                return Err(bad(format!("sample '{}' has an empty label", row.id)));
            }
            let mut chars = row.chain.chars();
            let chain = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(bad(format!("chain '{}' must be a single character", row.chain))),
            };
            let range = match row.range.as_deref() {
                None | Some("") => None,
                Some(r) => Some(r.parse::<ResidueRange>().map_err(|e| bad(e.to_string()))?),
            };
            let pdb = PathBuf::from(&row.pdb);
            let pdb = if pdb.is_absolute() { pdb } else { base.join(pdb) };
            entries.push(ManifestEntry { id: row.id, pdb, chain, range, label: row.label });
        }
        if entries.is_empty() {
            return Err(Error::Input("manifest has no samples".into()));
        }
        Ok(Self { name: name.to_string(), entries })
    }
}
