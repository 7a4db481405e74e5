use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ncdkit_core::knn::DocMeta;
use ncdkit_core::synth::SynthDoc;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
enum Source {
    File(PathBuf),
    Memory(Arc<[u8]>),
}

/// An identified, optionally labeled byte sequence.
///
/// Labels are lowercased on construction. The SHA-256 digest is taken
/// when the document is created and keys the length cache.
#[derive(Clone, Debug, Serialize)]
pub struct ByteDocument {
    pub id: String,
    pub label: Option<String>,
    /// Source locator: a filesystem path, or `mem:<id>` for in-memory data.
    pub path: String,
    pub length_bytes: u64,
    pub digest: String,
    #[serde(skip)]
    source: Source,
}

fn normalize_label(label: Option<String>) -> Option<String> {
    label.map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty())
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl ByteDocument {
    /// Streams the file once to record its length and digest.
    pub fn from_file(id: impl Into<String>, label: Option<String>, path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref();
        let mut f = File::open(path)?;
        let mut h = Sha256::new();
        let mut buf = vec![0u8; 1 << 16];
        let mut len = 0u64;
        loop {
            let n = f.read(&mut buf)?;
            if n == 0 {
                break;
            }
            h.update(&buf[..n]);
            len += n as u64;
        }
        Ok(ByteDocument {
            id: id.into(),
            label: normalize_label(label),
            path: path.display().to_string(),
            length_bytes: len,
            digest: hex::encode(h.finalize()),
            source: Source::File(path.to_path_buf()),
        })
    }

    pub fn from_bytes(id: impl Into<String>, label: Option<String>, data: impl Into<Arc<[u8]>>) -> Self {
        let id = id.into();
        let data: Arc<[u8]> = data.into();
        ByteDocument {
            path: format!("mem:{id}"),
            id,
            label: normalize_label(label),
            length_bytes: data.len() as u64,
            digest: sha256_hex(&[&data]),
            source: Source::Memory(data),
        }
    }

    /// The document's bytes; file-backed documents are read on each call.
    pub fn bytes(&self) -> io::Result<Arc<[u8]>> {
        match &self.source {
            Source::Memory(d) => Ok(Arc::clone(d)),
            Source::File(p) => {
                let data = std::fs::read(p)?;
                if data.len() as u64 != self.length_bytes {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("{} changed size since it was loaded", p.display()),
                    ));
                }
                Ok(data.into())
            }
        }
    }

    /// Same document held in memory (no-op for in-memory documents).
    pub fn into_memory(self) -> io::Result<Self> {
        match self.source {
            Source::Memory(_) => Ok(self),
            Source::File(_) => {
                let data = self.bytes()?;
                Ok(ByteDocument {
                    source: Source::Memory(data),
                    ..self
                })
            }
        }
    }

    pub fn meta(&self) -> DocMeta<'_> {
        DocMeta {
            id: &self.id,
            label: self.label.as_deref(),
            size_bytes: self.length_bytes,
        }
    }
}

impl From<SynthDoc> for ByteDocument {
    fn from(d: SynthDoc) -> Self {
        ByteDocument::from_bytes(d.id, d.label, d.data)
    }
}

/// Digest over the ordered `(id, digest)` list; identifies a corpus.
pub fn corpus_digest(docs: &[ByteDocument]) -> String {
    let mut h = Sha256::new();
    for d in docs {
        h.update(d.id.as_bytes());
        h.update([0]);
        h.update(d.digest.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_and_memory_agree() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.bin");
        std::fs::write(&p, b"hello world").unwrap();
        let f = ByteDocument::from_file("a", Some("Greeting".into()), &p).unwrap();
        let m = ByteDocument::from_bytes("a", Some(" GREETING ".into()), b"hello world".to_vec());
        assert_eq!(f.digest, m.digest);
        assert_eq!(f.length_bytes, 11);
        assert_eq!(f.label.as_deref(), Some("greeting"));
        assert_eq!(m.label.as_deref(), Some("greeting"));
        assert_eq!(&*f.bytes().unwrap(), b"hello world");
        std::fs::write(&p, b"changed!").unwrap();
        assert!(f.bytes().is_err());
    }
}
