use std::io;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use ncdkit_core::{CompressionBackend, CompressorSpec};

use crate::cache::LengthCache;
use crate::codec::{CodecError, Codecs};
use crate::document::sha256_hex;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("cache write failed: {0}")]
    Cache(#[source] io::Error),
    #[error("{codec}: cached length {cached} for {digest} disagrees with fresh length {fresh}")]
    CacheMismatch {
        codec: String,
        digest: String,
        cached: u64,
        fresh: u64,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub hits: u64,
    pub misses: u64,
    pub spot_checks: u64,
}

/// Codecs fronted by a length cache.
///
/// A deterministic fraction of cache hits (chosen by digest) is recomputed
/// and compared; a disagreement is an error rather than a silent fix.
pub struct Engine {
    codecs: Codecs,
    cache: Arc<LengthCache>,
    spot_check_rate: f64,
    hits: AtomicU64,
    misses: AtomicU64,
    spot_checks: AtomicU64,
}

impl Engine {
    pub fn new(codecs: Codecs, cache: Arc<LengthCache>) -> Self {
        Engine {
            codecs,
            cache,
            spot_check_rate: 0.01,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            spot_checks: AtomicU64::new(0),
        }
    }

    /// Uncached engine; handy in tests.
    pub fn uncached() -> Self {
        Engine::new(Codecs::new(), Arc::new(LengthCache::in_memory()))
    }

    pub fn with_spot_check_rate(mut self, rate: f64) -> Self {
        self.spot_check_rate = rate.clamp(0.0, 1.0);
        self
    }

    pub fn codecs(&self) -> &Codecs {
        &self.codecs
    }

    pub fn cache(&self) -> &LengthCache {
        &self.cache
    }

    pub fn stats(&self) -> EngineStats {
        EngineStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            spot_checks: self.spot_checks.load(Ordering::Relaxed),
        }
    }

    fn selected_for_check(&self, digest: &str) -> bool {
        if self.spot_check_rate <= 0.0 {
            return false;
        }
        let v = u32::from_str_radix(&digest[..8], 16).unwrap_or(0);
        (v as f64) < self.spot_check_rate * (u32::MAX as f64 + 1.0)
    }

    pub fn length(&self, spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, EngineError> {
        let fp = spec.fingerprint();
        let digest = sha256_hex(parts);
        if let Some(cached) = self.cache.get(&fp, &digest) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            if self.selected_for_check(&digest) {
                self.spot_checks.fetch_add(1, Ordering::Relaxed);
                let fresh = self.codecs.compressed_len(spec, parts)?;
                if fresh != cached {
                    return Err(EngineError::CacheMismatch {
                        codec: spec.label().to_string(),
                        digest,
                        cached,
                        fresh,
                    });
                }
            }
            return Ok(cached);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let len = self.codecs.compressed_len(spec, parts)?;
        self.cache
            .insert(&fp, spec.label(), &digest, len)
            .map_err(EngineError::Cache)?;
        Ok(len)
    }
}

impl CompressionBackend for Engine {
    type Error = EngineError;

    fn compressed_len(&self, spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, EngineError> {
        self.length(spec, parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hits_match_fresh_lengths_and_split_is_irrelevant() {
        let e = Engine::uncached().with_spot_check_rate(1.0);
        let spec = CompressorSpec::deflate();
        let a = e.length(&spec, &[b"abcabcabc", b"xyz"]).unwrap();
        let b = e.length(&spec, &[b"abcabc", b"abcxyz"]).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            e.stats(),
            EngineStats {
                hits: 1,
                misses: 1,
                spot_checks: 1
            }
        );
    }

    #[test]
    fn poisoned_entry_is_reported() {
        let cache = Arc::new(LengthCache::in_memory());
        let spec = CompressorSpec::bzip2();
        let digest = sha256_hex(&[b"payload"]);
        cache.insert(&spec.fingerprint(), spec.label(), &digest, 1).unwrap();
        let e = Engine::new(Codecs::new(), cache).with_spot_check_rate(1.0);
        assert!(matches!(
            e.length(&spec, &[b"payload"]),
            Err(EngineError::CacheMismatch { cached: 1, .. })
        ));
    }
}
