//! Manifest ingestion and on-disk corpus writing.
//!
//! A manifest is either CSV with header `path,id,label,expected_size_bytes`
//! or a JSON array of objects with the same fields (optionally wrapped as
//! `{"documents": [...]}`). Relative paths resolve against the manifest's
//! directory. `label` and `expected_size_bytes` may be empty or absent.

use std::collections::HashSet;
use std::io;
use std::path::{Path, PathBuf};

use ncdkit_core::synth::SynthDoc;
use serde::{Deserialize, Serialize};

use crate::document::ByteDocument;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse manifest {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("document `{id}`: file {path} does not exist")]
    MissingFile { id: String, path: PathBuf },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("document `{id}`: expected {expected} bytes, found {actual} on disk")]
    SizeMismatch { id: String, expected: u64, actual: u64 },
    #[error("document with empty id in {0}")]
    EmptyId(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub id: String,
    #[serde(default, deserialize_with = "empty_as_none")]
    pub label: Option<String>,
    #[serde(default, deserialize_with = "empty_as_none_u64")]
    pub expected_size_bytes: Option<u64>,
}

fn empty_as_none<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let v: Option<String> = Option::deserialize(d)?;
    Ok(v.filter(|s| !s.trim().is_empty()))
}

fn empty_as_none_u64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(u64),
        Text(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Num(n)) => Ok(Some(n)),
        Some(Raw::Text(s)) if s.trim().is_empty() => Ok(None),
        Some(Raw::Text(s)) => s.trim().parse().map(Some).map_err(serde::de::Error::custom),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonManifest {
    List(Vec<ManifestEntry>),
    Wrapped { documents: Vec<ManifestEntry> },
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let parse_err = |message: String| CorpusError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    let is_json =
        path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with(['[', '{']);
    if is_json {
        let m: JsonManifest = serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?;
        return Ok(match m {
            JsonManifest::List(v) | JsonManifest::Wrapped { documents: v } => v,
        });
    }
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    rdr.deserialize()
        .map(|r| r.map_err(|e| parse_err(e.to_string())))
        .collect()
}

/// Loads every document named by the manifest, checking ids for
/// uniqueness and sizes against `expected_size_bytes`.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ByteDocument>, CorpusError> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    let entries = read_manifest(path)?;
    let mut seen = HashSet::new();
    let mut docs = Vec::with_capacity(entries.len());
    for e in entries {
        if e.id.trim().is_empty() {
            return Err(CorpusError::EmptyId(path.to_path_buf()));
        }
        if !seen.insert(e.id.clone()) {
            return Err(CorpusError::DuplicateId(e.id));
        }
        let file = base.join(&e.path);
        if !file.is_file() {
            return Err(CorpusError::MissingFile { id: e.id, path: file });
        }
        let doc = ByteDocument::from_file(e.id.clone(), e.label, &file).map_err(|source| CorpusError::Io {
            path: file.clone(),
            source,
        })?;
        if let Some(expected) = e.expected_size_bytes {
            if expected != doc.length_bytes {
                return Err(CorpusError::SizeMismatch {
                    id: e.id,
                    expected,
                    actual: doc.length_bytes,
                });
            }
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub const MANIFEST_FILE: &str = "manifest.csv";

/// Writes `docs` as `<dir>/<id>.bin` plus `<dir>/manifest.csv`, returning
/// the manifest path.
pub fn write_corpus(dir: impl AsRef<Path>, docs: &[SynthDoc]) -> Result<PathBuf, CorpusError> {
    let dir = dir.as_ref();
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(docs.len());
    for d in docs {
        if !seen.insert(d.id.as_str()) {
            return Err(CorpusError::DuplicateId(d.id.clone()));
        }
        let name = format!("{}.bin", d.id);
        let file = dir.join(&name);
        std::fs::write(&file, &d.data).map_err(io_err(&file))?;
        entries.push(ManifestEntry {
            path: name,
            id: d.id.clone(),
            label: d.label.clone(),
            expected_size_bytes: Some(d.data.len() as u64),
        });
    }
    let manifest = dir.join(MANIFEST_FILE);
    write_manifest(&manifest, &entries)?;
    Ok(manifest)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), CorpusError> {
    let to_err = |e: csv::Error| CorpusError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = crate::report::csv_writer(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_record(["path", "id", "label", "expected_size_bytes"])
        .map_err(to_err)?;
    for e in entries {
        let size = e.expected_size_bytes.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([e.path.as_str(), &e.id, e.label.as_deref().unwrap_or(""), &size])
            .map_err(to_err)?;
    }
    w.flush().map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}
