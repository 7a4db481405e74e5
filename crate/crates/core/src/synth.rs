//! Seeded corpus generators.
//!
//! Every document is a pure function of `(seed, document index)`: each one
//! draws from its own ChaCha stream, so documents can be produced in any
//! order or in parallel and still come out byte-identical.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const MIN_LADDER_BYTES: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContentKind {
    /// Uniform random bytes; incompressible.
    Random,
    /// A short random tile repeated end to end.
    Repetitive,
    /// Order-2 Markov chain over a built-in English passage.
    Text,
}

impl ContentKind {
    pub const ALL: [ContentKind; 3] = [ContentKind::Random, ContentKind::Repetitive, ContentKind::Text];

    pub fn name(self) -> &'static str {
        match self {
            ContentKind::Random => "random",
            ContentKind::Repetitive => "repetitive",
            ContentKind::Text => "text",
        }
    }
}

impl fmt::Display for ContentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for ContentKind {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "random" => Ok(ContentKind::Random),
            "repetitive" => Ok(ContentKind::Repetitive),
            "text" => Ok(ContentKind::Text),
            other => Err(SynthError::UnknownContent(other.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("ladder minimum {0} is below {MIN_LADDER_BYTES} bytes")]
    LadderTooSmall(u64),
    #[error("ladder maximum {max} is below minimum {min}")]
    LadderInverted { min: u64, max: u64 },
    #[error("steps_per_doubling must be at least 1")]
    ZeroSteps,
    #[error("content mix is empty")]
    EmptyMix,
    #[error("unknown content kind `{0}` (valid: random, repetitive, text)")]
    UnknownContent(String),
    #[error("{name} = {value} is outside [0, 1]")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("{0} must be at least 1")]
    Zero(&'static str),
}

/// A generated document, held in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthDoc {
    pub id: String,
    pub label: Option<String>,
    pub data: Vec<u8>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_bytes(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut v = alloc::vec![0u8; len];
    rng.fill_bytes(&mut v);
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub min_bytes: u64,
    pub max_bytes: u64,
    pub steps_per_doubling: u32,
    pub content_mix: Vec<ContentKind>,
    pub seed: u64,
}

impl LadderSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.min_bytes < MIN_LADDER_BYTES {
            return Err(SynthError::LadderTooSmall(self.min_bytes));
        }
        if self.max_bytes < self.min_bytes {
            return Err(SynthError::LadderInverted {
                min: self.min_bytes,
                max: self.max_bytes,
            });
        }
        if self.steps_per_doubling == 0 {
            return Err(SynthError::ZeroSteps);
        }
        if self.content_mix.is_empty() {
            return Err(SynthError::EmptyMix);
        }
        Ok(())
    }

    /// Rung sizes `round(min * 2^(k / steps))` up to `max`, deduplicated.
    pub fn sizes(&self) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        let steps = self.steps_per_doubling.max(1);
        for k in 0u32.. {
            let size = if k % steps == 0 {
                // exact doublings avoid any rounding drift
                self.min_bytes.checked_shl(k / steps).unwrap_or(u64::MAX)
            } else {
                libm::round(self.min_bytes as f64 * libm::exp2(k as f64 / steps as f64)) as u64
            };
            if size > self.max_bytes || k / steps >= 63 {
                break;
            }
            if out.last() != Some(&size) {
                out.push(size);
            }
        }
        out
    }

    /// `(kind, size)` for every document, size-major.
    pub fn entries(&self) -> Vec<(ContentKind, u64)> {
        self.sizes()
            .into_iter()
            .flat_map(|s| self.content_mix.iter().map(move |&k| (k, s)))
            .collect()
    }

    /// The `index`-th document of [`LadderSpec::entries`].
    pub fn document(&self, index: usize) -> SynthDoc {
        let (kind, size) = self.entries()[index];
        ladder_document(self.seed, index, kind, size)
    }
}

fn ladder_document(seed: u64, index: usize, kind: ContentKind, size: u64) -> SynthDoc {
    let mut rng = stream_rng(seed, index as u64);
    let len = size as usize;
    let data = match kind {
        ContentKind::Random => random_bytes(&mut rng, len),
        ContentKind::Repetitive => {
            let tile_len = rng.gen_range(16..=256);
            let tile = random_bytes(&mut rng, tile_len);
            tile.iter().copied().cycle().take(len).collect()
        }
        ContentKind::Text => markov_text(&mut rng, len),
    };
    SynthDoc {
        id: format!("{}-{:010}", kind.name(), size),
        label: Some(String::from(kind.name())),
        data,
    }
}

pub fn generate_ladder(spec: &LadderSpec) -> Result<Vec<SynthDoc>, SynthError> {
    spec.validate()?;
    Ok(spec
        .entries()
        .into_iter()
        .enumerate()
        .map(|(i, (kind, size))| ladder_document(spec.seed, i, kind, size))
        .collect())
}

const SEED_TEXT: &str = "When the river rose in early spring the mill stopped turning, and the \
miller spent his mornings mending nets by the door while his daughter kept the accounts. \
Travellers who came down the valley road would stop to ask the way to the ferry, and she would \
point them along the path beside the orchard, past the old stone wall and the row of poplars, \
until the sound of the water grew loud enough to guide them. In the evenings the family read \
aloud from a worn book of sea stories, taking turns by the lamp, and argued over which captain \
had been the bravest. Nobody in the village could remember a year when the flood came so late, \
and some said it meant a dry summer, while others said it meant nothing at all. ";

fn markov_text(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let text = SEED_TEXT.as_bytes();
    let mut table: BTreeMap<[u8; 2], Vec<u8>> = BTreeMap::new();
    for w in text.windows(3) {
        table.entry([w[0], w[1]]).or_default().push(w[2]);
    }
    let mut out = Vec::with_capacity(len);
    let start = rng.gen_range(0..text.len() - 2);
    let mut ctx = [text[start], text[start + 1]];
    out.extend_from_slice(&ctx[..len.min(2)]);
    while out.len() < len {
        let next = match table.get(&ctx) {
            Some(choices) => choices[rng.gen_range(0..choices.len())],
            None => text[rng.gen_range(0..text.len())],
        };
        out.push(next);
        ctx = [ctx[1], next];
    }
    out
}

/// Families of samples that share a mutated common core.
///
/// Each family owns a random base blob; a sample is a prefix of that blob
/// (its length drawn around `base_size_bytes`), whose leading
/// `shared_fraction` is overwritten with corpus-wide common content, then
/// mutated at `mutation_rate` of positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFamilySpec {
    pub family_count: usize,
    pub samples_per_family: usize,
    pub base_size_bytes: u64,
    /// Sample length is `size * (1 + size_jitter * u)`, `u` uniform in [-1, 1].
    pub size_jitter: f64,
    /// Per-position probability that a byte is rewritten.
    pub mutation_rate: f64,
    /// Leading fraction of every sample taken from the corpus-wide common blob.
    pub shared_fraction: f64,
    /// Fraction of mutation events that become single-byte insertions or
    /// deletions instead of substitutions. 0 disables indel mode.
    #[serde(default)]
    pub indel_fraction: f64,
    /// When non-empty, sample `s` of every family uses
    /// `size_mix[s % size_mix.len()]` instead of `base_size_bytes`.
    #[serde(default)]
    pub size_mix: Vec<u64>,
    pub seed: u64,
}

impl SyntheticFamilySpec {
    pub fn new(family_count: usize, samples_per_family: usize, base_size_bytes: u64, seed: u64) -> Self {
        SyntheticFamilySpec {
            family_count,
            samples_per_family,
            base_size_bytes,
            size_jitter: 0.0,
            mutation_rate: 0.0,
            shared_fraction: 0.0,
            indel_fraction: 0.0,
            size_mix: Vec::new(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, value) in [
            ("size_jitter", self.size_jitter),
            ("mutation_rate", self.mutation_rate),
            ("shared_fraction", self.shared_fraction),
            ("indel_fraction", self.indel_fraction),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SynthError::FractionOutOfRange { name, value });
            }
        }
        if self.family_count == 0 {
            return Err(SynthError::Zero("family_count"));
        }
        if self.samples_per_family == 0 {
            return Err(SynthError::Zero("samples_per_family"));
        }
        if self.base_size_bytes == 0 && self.size_mix.is_empty() {
            return Err(SynthError::Zero("base_size_bytes"));
        }
        if self.size_mix.contains(&0) {
            return Err(SynthError::Zero("size_mix entry"));
        }
        Ok(())
    }

    fn nominal_size(&self, sample: usize) -> u64 {
        if self.size_mix.is_empty() {
            self.base_size_bytes
        } else {
            self.size_mix[sample % self.size_mix.len()]
        }
    }

    fn max_len(&self) -> usize {
        let nominal = if self.size_mix.is_empty() {
            self.base_size_bytes
        } else {
            self.size_mix.iter().copied().max().unwrap_or(0)
        };
        libm::ceil(nominal as f64 * (1.0 + self.size_jitter)) as usize
    }

    pub fn family_label(family: usize) -> String {
        format!("family-{family:02}")
    }

    pub fn sample_id(family: usize, sample: usize) -> String {
        format!("family-{family:02}-{sample:04}")
    }

    fn common_blob(&self) -> Vec<u8> {
        if self.shared_fraction > 0.0 {
            random_bytes(&mut stream_rng(self.seed, 0), self.max_len())
        } else {
            Vec::new()
        }
    }

    fn family_base(&self, family: usize) -> Vec<u8> {
        random_bytes(&mut stream_rng(self.seed, 1 + family as u64), self.max_len())
    }

    fn sample_from(&self, family: usize, sample: usize, base: &[u8], common: &[u8]) -> SynthDoc {
        let stream = 1 + self.family_count as u64 + (family * self.samples_per_family + sample) as u64;
        let mut rng = stream_rng(self.seed, stream);
        let nominal = self.nominal_size(sample) as f64;
        let u: f64 = if self.size_jitter > 0.0 {
            rng.gen_range(-1.0..=1.0)
        } else {
            0.0
        };
        let target = (libm::round(nominal * (1.0 + self.size_jitter * u)) as usize).clamp(1, base.len());
        let mut core = base[..target].to_vec();
        let shared = libm::round(self.shared_fraction * target as f64) as usize;
        core[..shared].copy_from_slice(&common[..shared]);
        let mut data = mutate(&mut rng, &core, self.mutation_rate, self.indel_fraction);
        match data.len().cmp(&target) {
            core::cmp::Ordering::Greater => data.truncate(target),
            core::cmp::Ordering::Less => {
                let pad = random_bytes(&mut rng, target - data.len());
                data.extend_from_slice(&pad);
            }
            core::cmp::Ordering::Equal => {}
        }
        SynthDoc {
            id: Self::sample_id(family, sample),
            label: Some(Self::family_label(family)),
            data,
        }
    }

    /// One family's samples, in sample order.
    pub fn family(&self, family: usize) -> Vec<SynthDoc> {
        let common = self.common_blob();
        let base = self.family_base(family);
        (0..self.samples_per_family)
            .map(|s| self.sample_from(family, s, &base, &common))
            .collect()
    }
}

/// Rewrites each position with probability `rate`. Positions are visited
/// by geometric skips so the cost scales with the number of events.
fn mutate(rng: &mut ChaCha8Rng, src: &[u8], rate: f64, indel_fraction: f64) -> Vec<u8> {
    if rate <= 0.0 {
        return src.to_vec();
    }
    if rate >= 1.0 {
        return random_bytes(rng, src.len());
    }
    let log_keep = libm::log(1.0 - rate);
    let mut out = Vec::with_capacity(src.len() + src.len() / 64);
    let mut pos = 0usize;
    loop {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let skip = libm::floor(libm::log(u) / log_keep);
        let next = if skip >= (src.len() - pos) as f64 {
            src.len()
        } else {
            pos + skip as usize
        };
        out.extend_from_slice(&src[pos..next]);
        if next >= src.len() {
            break;
        }
        if indel_fraction > 0.0 && rng.gen_bool(indel_fraction) {
            if rng.gen_bool(0.5) {
                out.push(rng.gen());
                out.push(src[next]);
            }
            // else: deletion, the source byte is dropped
        } else {
            out.push(rng.gen());
        }
        pos = next + 1;
    }
    out
}

pub fn generate_families(spec: &SyntheticFamilySpec) -> Result<Vec<SynthDoc>, SynthError> {
    spec.validate()?;
    Ok((0..spec.family_count).flat_map(|f| spec.family(f)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap as Map;

    fn ladder(min: u64, max: u64, steps: u32) -> LadderSpec {
        LadderSpec {
            min_bytes: min,
            max_bytes: max,
            steps_per_doubling: steps,
            content_mix: ContentKind::ALL.to_vec(),
            seed: 3,
        }
    }

    #[test]
    fn single_rung_ladder() {
        let docs = generate_ladder(&ladder(1024, 1024, 1)).unwrap();
        assert_eq!(docs.len(), 3);
        assert!(docs.iter().all(|d| d.data.len() == 1024));
    }

    #[test]
    fn ladder_sizes_double_exactly() {
        assert_eq!(ladder(1024, 8192, 1).sizes(), [1024, 2048, 4096, 8192]);
        assert_eq!(ladder(1024, 8000, 1).sizes(), [1024, 2048, 4096]);
        assert_eq!(ladder(1024, 4096, 2).sizes(), [1024, 1448, 2048, 2896, 4096]);
    }

    #[test]
    fn ladder_is_seeded() {
        let a = generate_ladder(&ladder(1024, 4096, 1)).unwrap();
        let b = generate_ladder(&ladder(1024, 4096, 1)).unwrap();
        assert_eq!(a, b);
        let mut other = ladder(1024, 4096, 1);
        other.seed = 4;
        assert_ne!(a, generate_ladder(&other).unwrap());
        let spec = ladder(1024, 4096, 1);
        assert_eq!(spec.document(4), a[4]);
    }

    #[test]
    fn ladder_rejects_bad_specs() {
        assert_eq!(
            generate_ladder(&ladder(512, 4096, 1)),
            Err(SynthError::LadderTooSmall(512))
        );
        assert!(generate_ladder(&ladder(4096, 1024, 1)).is_err());
        assert_eq!(generate_ladder(&ladder(1024, 1024, 0)), Err(SynthError::ZeroSteps));
    }

    #[test]
    fn text_is_printable() {
        let d = ladder_document(1, 0, ContentKind::Text, 5000);
        assert!(d.data.iter().all(|b| b.is_ascii_graphic() || *b == b' ' || *b == b','));
    }

    #[test]
    fn unmutated_families_are_identical_within() {
        let spec = SyntheticFamilySpec::new(3, 4, 2000, 9);
        let docs = generate_families(&spec).unwrap();
        assert_eq!(docs.len(), 12);
        for f in docs.chunks(4) {
            assert!(f.iter().all(|d| d.data == f[0].data && d.label == f[0].label));
        }
        assert_ne!(docs[0].data, docs[4].data);
    }

    #[test]
    fn labels_are_balanced_and_sizes_exact() {
        let mut spec = SyntheticFamilySpec::new(4, 5, 3000, 1);
        spec.size_jitter = 0.2;
        spec.mutation_rate = 0.05;
        spec.indel_fraction = 0.5;
        spec.shared_fraction = 0.3;
        let docs = generate_families(&spec).unwrap();
        let mut counts: Map<String, usize> = Map::new();
        for d in &docs {
            *counts.entry(d.label.clone().unwrap()).or_default() += 1;
            assert!((2400..=3600).contains(&d.data.len()), "{}", d.data.len());
        }
        assert!(counts.values().all(|&c| c == 5));
        assert_eq!(docs, generate_families(&spec).unwrap());
        // shared prefix is common across families, modulo substitutions
        spec.indel_fraction = 0.0;
        let docs = generate_families(&spec).unwrap();
        let a = &docs[0].data[..500];
        let b = &docs[5].data[..500];
        let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
        assert!(same > 200, "{same}");
    }

    #[test]
    fn mutation_rate_is_respected() {
        let mut spec = SyntheticFamilySpec::new(1, 2, 100_000, 5);
        spec.mutation_rate = 0.02;
        let docs = generate_families(&spec).unwrap();
        let base = SyntheticFamilySpec::new(1, 1, 100_000, 5).family(0).remove(0).data;
        let diff = docs[0].data.iter().zip(&base).filter(|(a, b)| a != b).count();
        // expected about 2000 * 255/256
        assert!((1700..2300).contains(&diff), "{diff}");
    }

    #[test]
    fn full_mutation_is_noise() {
        let mut spec = SyntheticFamilySpec::new(1, 2, 5000, 5);
        spec.mutation_rate = 1.0;
        let docs = generate_families(&spec).unwrap();
        let same = docs[0].data.iter().zip(&docs[1].data).filter(|(a, b)| a == b).count();
        assert!(same < 60, "{same}");
    }

    #[test]
    fn size_mix_takes_prefixes_of_one_base() {
        let mut spec = SyntheticFamilySpec::new(2, 4, 0, 8);
        spec.size_mix = alloc::vec![1000, 8000];
        let docs = generate_families(&spec).unwrap();
        assert_eq!(docs[0].data.len(), 1000);
        assert_eq!(docs[1].data.len(), 8000);
        assert_eq!(docs[0].data[..], docs[1].data[..1000]);
    }

    #[test]
    fn bad_fractions_rejected() {
        let mut spec = SyntheticFamilySpec::new(1, 1, 10, 0);
        spec.mutation_rate = 1.5;
        assert!(matches!(
            generate_families(&spec),
            Err(SynthError::FractionOutOfRange {
                name: "mutation_rate",
                ..
            })
        ));
    }
}
