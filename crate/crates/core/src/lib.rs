//! Allocation-only core of `ncdkit`.
//!
//! Everything in this crate is a pure function of its inputs: the
//! Normalized Compression Distance formula and its generalization over a
//! combining function, the interleave and NCD-shuffle combiners, the
//! normal-compressor axiom gaps, the nearest-neighbor evaluation protocol
//! and the seeded corpus generators. Actual compression is delegated to a
//! [`CompressionBackend`], which the std companion crate provides on top of
//! real codecs and a persistent length cache.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod audit;
pub mod codec;
pub mod combiner;
pub mod knn;
pub mod ncd;
pub mod synth;

pub use codec::{CodecId, CompressedLength, CompressionBackend, CompressorSpec, SpecError};
pub use combiner::CombinerSpec;
pub use ncd::{ncd, ncd_from_lengths, DegenerateInput, NcdError};

#[cfg(test)]
pub(crate) mod testing;
