//! Persistent store of compressed lengths.
//!
//! Keys are `(codec fingerprint, SHA-256 of the compressed bytes)`, so a
//! cached length stays valid for exactly the bytes it was computed on.
//! This covers singleton lengths `|C(X)|` as well as combined strings
//! `|C(J(X, Y))|`, whichever combiner produced them. The backing file is
//! JSON lines, appended as entries arrive.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

/// Default cache path when `--cache` is not given.
pub const CACHE_ENV: &str = "NCDKIT_CACHE";

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    codec: String,
    label: String,
    digest: String,
    len: u64,
}

type Key = (String, String);

pub struct LengthCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<Key, u64>>,
    writer: Option<Mutex<BufWriter<File>>>,
}

impl LengthCache {
    pub fn in_memory() -> Self {
        LengthCache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            writer: None,
        }
    }

    /// Loads `path` if it exists and appends new entries to it. Lines that
    /// fail to parse (a torn final write, say) are skipped with a warning.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref();
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let mut entries = HashMap::new();
        if path.exists() {
            for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheLine>(&line) {
                    Ok(e) => {
                        entries.insert((e.codec, e.digest), e.len);
                    }
                    Err(err) => log::warn!("{}:{}: skipping bad cache line: {err}", path.display(), n + 1),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(LengthCache {
            path: Some(path.to_path_buf()),
            entries: RwLock::new(entries),
            writer: Some(Mutex::new(BufWriter::new(file))),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, fingerprint: &str, digest: &str) -> Option<u64> {
        let map = self.entries.read().unwrap_or_else(|e| e.into_inner());
        map.get(&(fingerprint.to_string(), digest.to_string())).copied()
    }

    pub fn insert(&self, fingerprint: &str, label: &str, digest: &str, len: u64) -> io::Result<()> {
        let key = (fingerprint.to_string(), digest.to_string());
        {
            let mut map = self.entries.write().unwrap_or_else(|e| e.into_inner());
            if map.insert(key, len) == Some(len) {
                return Ok(());
            }
        }
        if let Some(w) = &self.writer {
            let line = serde_json::to_string(&CacheLine {
                codec: fingerprint.to_string(),
                label: label.to_string(),
                digest: digest.to_string(),
                len,
            })?;
            let mut w = w.lock().unwrap_or_else(|e| e.into_inner());
            writeln!(w, "{line}")?;
            w.flush()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
