//! Std companion to `ncdkit-core`: real codecs, a persistent length cache,
//! corpus loading, parallel drivers and report writers.

pub mod audit;
pub mod cache;
pub mod codec;
pub mod corpus;
pub mod document;
pub mod engine;
pub mod experiment;
pub mod manifest;
pub mod matrix;
pub mod report;

pub use document::ByteDocument;
pub use engine::{Engine, EngineError};
