use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::codec::{CompressionBackend, CompressorSpec};

/// Toy compressor: 4 header bytes plus one byte per position whose 4-gram
/// was not seen within the last `window` bytes. Crude, but it rewards the
/// same nearby redundancy real LZ coders do, which is all the core logic
/// needs.
pub struct WindowedToy {
    pub window: usize,
}

impl CompressionBackend for WindowedToy {
    type Error = core::convert::Infallible;

    fn compressed_len(&self, _spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, Self::Error> {
        let data: Vec<u8> = parts.concat();
        let mut last_seen: BTreeMap<[u8; 4], usize> = BTreeMap::new();
        let mut len = 4u64;
        for i in 0..data.len() {
            if i + 4 > data.len() {
                len += 1;
                continue;
            }
            let gram = [data[i], data[i + 1], data[i + 2], data[i + 3]];
            match last_seen.insert(gram, i) {
                Some(prev) if i - prev <= self.window => {}
                _ => len += 1,
            }
        }
        Ok(len)
    }
}

pub struct Failing;

#[derive(Debug, PartialEq)]
pub struct Boom;

impl core::fmt::Display for Boom {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("boom")
    }
}

impl CompressionBackend for Failing {
    type Error = Boom;

    fn compressed_len(&self, _spec: &CompressorSpec, _parts: &[&[u8]]) -> Result<u64, Boom> {
        Err(Boom)
    }
}

pub fn noise(seed: u64, len: usize) -> Vec<u8> {
    use rand::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v = alloc::vec![0u8; len];
    rng.fill_bytes(&mut v);
    v
}
