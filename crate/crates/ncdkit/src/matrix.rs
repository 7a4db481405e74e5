use std::io;
use std::path::Path;
use std::sync::Arc;

use ncdkit_core::combiner::combine_parts;
use ncdkit_core::ncd::NCD_SANITY_CEILING;
use ncdkit_core::{ncd_from_lengths, CombinerSpec, CompressorSpec, NcdError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::document::ByteDocument;
use crate::engine::{Engine, EngineError};
use crate::report::{csv_writer, fmt_f64, write_json};

#[derive(Debug, thiserror::Error)]
pub enum MatrixError {
    #[error("distance matrix needs at least one document")]
    Empty,
    #[error("cannot read document `{id}`: {source}")]
    Read {
        id: String,
        #[source]
        source: io::Error,
    },
    #[error("NCD({x}, {y}) failed: {source}")]
    Pair {
        x: String,
        y: String,
        #[source]
        source: Box<NcdError<EngineError>>,
    },
    #[error("NCD({x}, {y}) = {value} is outside [0, {NCD_SANITY_CEILING}]")]
    OutOfRange { x: String, y: String, value: f64 },
}

/// `NCD(J(x, y))` given precomputed singleton lengths.
pub fn pair_distance(
    engine: &Engine,
    compressor: &CompressorSpec,
    combiner: &CombinerSpec,
    x: &[u8],
    y: &[u8],
    cx: u64,
    cy: u64,
) -> Result<f64, NcdError<EngineError>> {
    let parts = combine_parts(engine, combiner, x, y)?;
    let joined = engine.length(compressor, &parts).map_err(NcdError::Compressor)?;
    Ok(ncd_from_lengths(joined, cx, cy)?)
}

/// Pairwise distances. Entry `(i, j)` with `i <= j` is `NCD(J(doc_i, doc_j))`;
/// the lower triangle mirrors it. The diagonal is computed, not assumed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub doc_ids: Vec<String>,
    /// Upper triangle including the diagonal, row-major.
    pub values: Vec<f64>,
    pub compressor: CompressorSpec,
    pub combiner: CombinerSpec,
    /// Left unset by the CLI so outputs stay reproducible; run times live
    /// in the run manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * i.saturating_sub(1) / 2 + j - i
}

#[derive(Serialize)]
struct MatrixJson<'a> {
    provenance: Provenance<'a>,
    doc_ids: &'a [String],
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct Provenance<'a> {
    compressor: &'a CompressorSpec,
    combiner: &'a CombinerSpec,
    combiner_label: String,
    single_ordering: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_at: Option<&'a str>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.values[tri_index(self.len(), a, b)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut w = csv_writer(path)?;
        let mut header = vec!["id".to_string()];
        header.extend(self.doc_ids.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.doc_ids.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend((0..self.len()).map(|j| fmt_f64(self.get(i, j))));
            w.write_record(&row)?;
        }
        w.flush()
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        write_json(
            path,
            &MatrixJson {
                provenance: Provenance {
                    compressor: &self.compressor,
                    combiner: &self.combiner,
                    combiner_label: self.combiner.to_string(),
                    single_ordering: true,
                    created_at: self.created_at.as_deref(),
                },
                doc_ids: &self.doc_ids,
                matrix: self.rows(),
            },
        )
    }
}

pub fn load_bytes(docs: &[ByteDocument]) -> Result<Vec<Arc<[u8]>>, MatrixError> {
    docs.par_iter()
        .map(|d| {
            d.bytes().map_err(|source| MatrixError::Read {
                id: d.id.clone(),
                source,
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Singleton lengths `|C(x)|` for every document, in corpus order.
pub fn singleton_lengths(
    engine: &Engine,
    compressor: &CompressorSpec,
    docs: &[ByteDocument],
    data: &[Arc<[u8]>],
) -> Result<Vec<u64>, MatrixError> {
    data.par_iter()
        .zip(docs)
        .map(|(x, d)| {
            engine.length(compressor, &[x]).map_err(|e| MatrixError::Pair {
                x: d.id.clone(),
                y: d.id.clone(),
                source: Box::new(NcdError::Compressor(e)),
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Computes every pair `i <= j` in parallel. The first failure in
/// row-major order is reported, whatever the schedule.
pub fn distance_matrix(
    engine: &Engine,
    docs: &[ByteDocument],
    compressor: &CompressorSpec,
    combiner: &CombinerSpec,
) -> Result<DistanceMatrix, MatrixError> {
    if docs.is_empty() {
        return Err(MatrixError::Empty);
    }
    let n = docs.len();
    let data = load_bytes(docs)?;
    let single = singleton_lengths(engine, compressor, docs, &data)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let results: Vec<Result<f64, MatrixError>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let v = pair_distance(engine, compressor, combiner, &data[i], &data[j], single[i], single[j]).map_err(
                |source| MatrixError::Pair {
                    x: docs[i].id.clone(),
                    y: docs[j].id.clone(),
                    source: Box::new(source),
                },
            )?;
            if !(0.0..=NCD_SANITY_CEILING).contains(&v) {
                return Err(MatrixError::OutOfRange {
                    x: docs[i].id.clone(),
                    y: docs[j].id.clone(),
                    value: v,
                });
            }
            if v > 1.0 {
                log::warn!(
                    "codec anomaly: NCD({}, {}) = {v} exceeds 1 under {} / {combiner}",
                    docs[i].id,
                    docs[j].id,
                    compressor.label()
                );
            }
            Ok(v)
        })
        .collect();
    let values = results.into_iter().collect::<Result<Vec<f64>, _>>()?;
    Ok(DistanceMatrix {
        doc_ids: docs.iter().map(|d| d.id.clone()).collect(),
        values,
        compressor: compressor.clone(),
        combiner: combiner.clone(),
        created_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_indexing_is_dense() {
        for n in 1..7 {
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    assert_eq!(tri_index(n, i, j), k);
                    k += 1;
                }
            }
        }
    }
}
