use std::collections::{BTreeSet, HashMap};
use std::convert::Infallible;
use std::fmt;
use std::io;
use std::num::NonZeroUsize;
use std::path::Path;
use std::sync::Arc;

use ncdkit_core::knn::{
    plan_trials, score_trials, ClassificationResult, ConfigError, DocMeta, EvalError, ExperimentConfig, TrialPlan,
};
use ncdkit_core::{CombinerSpec, CompressorSpec, NcdError};
use rayon::prelude::*;
use serde::Serialize;

use crate::document::ByteDocument;
use crate::engine::{Engine, EngineError};
use crate::matrix::{load_bytes, pair_distance, MatrixError};
use crate::report::{csv_writer, fmt_f64, write_json};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Read(#[from] MatrixError),
    #[error("|C({id})| failed: {source}")]
    Length {
        id: String,
        #[source]
        source: EngineError,
    },
    #[error("distance from reference `{reference}` to `{test}` failed: {source}")]
    Distance {
        reference: String,
        test: String,
        #[source]
        source: Box<NcdError<EngineError>>,
    },
}

pub fn metas(docs: &[ByteDocument]) -> Vec<DocMeta<'_>> {
    docs.iter().map(ByteDocument::meta).collect()
}

/// Runs `config` over the corpus. The distance for a (reference, test)
/// pair is `NCD(J(reference, test))`.
pub fn evaluate(
    engine: &Engine,
    docs: &[ByteDocument],
    config: &ExperimentConfig,
) -> Result<ClassificationResult, ExperimentError> {
    let plans = plan_trials(&metas(docs), config)?;
    let data = load_bytes(docs)?;
    evaluate_planned(engine, docs, &data, config, &plans)
}

/// Like [`evaluate`] with reference draws fixed in advance. Every distinct
/// (reference, test) pair across trials is computed once, in parallel.
pub fn evaluate_planned(
    engine: &Engine,
    docs: &[ByteDocument],
    data: &[Arc<[u8]>],
    config: &ExperimentConfig,
    plans: &[TrialPlan],
) -> Result<ClassificationResult, ExperimentError> {
    let compressor = &config.compressor;
    let combiner = &config.combiner;
    let pairs: Vec<(usize, usize)> = plans
        .iter()
        .flat_map(|p| p.references.iter().flat_map(|&r| p.tests.iter().map(move |&t| (r, t))))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let involved: Vec<usize> = pairs
        .iter()
        .flat_map(|&(r, t)| [r, t])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let lengths: Vec<Result<u64, ExperimentError>> = involved
        .par_iter()
        .map(|&i| {
            engine
                .length(compressor, &[&data[i]])
                .map_err(|source| ExperimentError::Length {
                    id: docs[i].id.clone(),
                    source,
                })
        })
        .collect();
    let mut single = HashMap::with_capacity(involved.len());
    for (&i, l) in involved.iter().zip(lengths) {
        single.insert(i, l?);
    }

    let results: Vec<Result<f64, ExperimentError>> = pairs
        .par_iter()
        .map(|&(r, t)| {
            let d = pair_distance(engine, compressor, combiner, &data[r], &data[t], single[&r], single[&t]).map_err(
                |source| ExperimentError::Distance {
                    reference: docs[r].id.clone(),
                    test: docs[t].id.clone(),
                    source: Box::new(source),
                },
            )?;
            if d > 1.0 {
                log::warn!(
                    "codec anomaly: NCD({}, {}) = {d} exceeds 1 under {} / {combiner}",
                    docs[r].id,
                    docs[t].id,
                    compressor.label()
                );
            }
            Ok(d)
        })
        .collect();
    let mut dist = HashMap::with_capacity(pairs.len());
    for (&p, d) in pairs.iter().zip(results) {
        dist.insert(p, d?);
    }

    score_trials(&metas(docs), config, plans, |r, t| Ok::<f64, Infallible>(dist[&(r, t)])).map_err(|e| match e {
        EvalError::Config(c) => ExperimentError::Config(c),
        EvalError::Distance { source, .. } => match source {},
    })
}

/// A sweep column. `ShuffleRowScorer` scores chunks with the row's own
/// compressor, so one column covers every codec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridCombiner {
    Fixed { combiner: CombinerSpec },
    ShuffleRowScorer { block_size_bytes: NonZeroUsize },
}

impl GridCombiner {
    pub fn resolve(&self, row: &CompressorSpec) -> CombinerSpec {
        match self {
            GridCombiner::Fixed { combiner } => combiner.clone(),
            GridCombiner::ShuffleRowScorer { block_size_bytes } => CombinerSpec::NcdShuffle {
                block_size_bytes: *block_size_bytes,
                scorer: row.clone(),
            },
        }
    }
}

impl From<CombinerSpec> for GridCombiner {
    fn from(combiner: CombinerSpec) -> Self {
        GridCombiner::Fixed { combiner }
    }
}

impl fmt::Display for GridCombiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridCombiner::Fixed { combiner } => write!(f, "{combiner}"),
            GridCombiner::ShuffleRowScorer { block_size_bytes } => write!(f, "NS {block_size_bytes}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub row: String,
    pub column: String,
    pub compressor: CompressorSpec,
    pub combiner: CombinerSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<ClassificationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// Row-major: `cells[r * columns.len() + c]`.
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, row: usize, column: usize) -> &SweepCell {
        &self.cells[row * self.columns.len() + column]
    }

    pub fn mean_accuracy(&self, row: usize, column: usize) -> Option<f64> {
        self.cell(row, column).result.as_ref().map(|r| r.mean_accuracy)
    }
}

/// Evaluates every (compressor, combiner) cell with one shared set of
/// reference draws, taken from `base`'s seed, counts and filters. Cell
/// failures are recorded and the sweep moves on.
pub fn sweep(
    engine: &Engine,
    docs: &[ByteDocument],
    base: &ExperimentConfig,
    compressors: &[CompressorSpec],
    combiners: &[GridCombiner],
) -> Result<SweepTable, ExperimentError> {
    let plans = plan_trials(&metas(docs), base)?;
    let data = load_bytes(docs)?;
    let mut cells = Vec::with_capacity(compressors.len() * combiners.len());
    for compressor in compressors {
        for column in combiners {
            let combiner = column.resolve(compressor);
            let config = ExperimentConfig {
                compressor: compressor.clone(),
                combiner: combiner.clone(),
                ..base.clone()
            };
            let outcome = evaluate_planned(engine, docs, &data, &config, &plans);
            let (result, error) = match outcome {
                Ok(r) => {
                    log::info!(
                        "{} / {column}: mean accuracy {:.4}",
                        compressor.label(),
                        r.mean_accuracy
                    );
                    (Some(r), None)
                }
                Err(e) => {
                    log::error!("{} / {column} failed: {e}", compressor.label());
                    (None, Some(e.to_string()))
                }
            };
            cells.push(SweepCell {
                row: compressor.label().to_string(),
                column: column.to_string(),
                compressor: compressor.clone(),
                combiner,
                result,
                error,
            });
        }
    }
    Ok(SweepTable {
        rows: compressors.iter().map(|c| c.label().to_string()).collect(),
        columns: combiners.iter().map(|c| c.to_string()).collect(),
        cells,
    })
}

/// One row per test document per trial.
pub fn write_predictions_csv(result: &ClassificationResult, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "trial",
        "test_id",
        "true_label",
        "predicted_label",
        "nearest_reference_id",
        "distance",
        "correct",
    ])?;
    for p in &result.predictions {
        w.write_record([
            p.trial.to_string(),
            p.test_id.clone(),
            p.true_label.clone(),
            p.predicted_label.clone(),
            p.nearest_reference_id.clone(),
            fmt_f64(p.distance),
            p.is_correct().to_string(),
        ])?;
    }
    w.flush()
}

/// Per-trial accuracy, the axis of the accuracy bar charts.
pub fn write_accuracy_plotdata(results: &[&ClassificationResult], path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["compressor", "combiner", "trial", "accuracy"])?;
    for r in results {
        for (trial, a) in r.trial_accuracies.iter().enumerate() {
            w.write_record([
                r.config.compressor.label().to_string(),
                r.config.combiner.to_string(),
                trial.to_string(),
                fmt_f64(*a),
            ])?;
        }
    }
    w.flush()
}

pub fn write_classification(result: &ClassificationResult, dir: &Path) -> io::Result<Vec<std::path::PathBuf>> {
    let csv = dir.join("predictions.csv");
    let json = dir.join("classification.json");
    let plot = dir.join("plotdata.csv");
    write_predictions_csv(result, &csv)?;
    write_json(&json, result)?;
    write_accuracy_plotdata(&[result], &plot)?;
    Ok(vec![csv, json, plot])
}

/// Rows are compressors, columns are combiners, cells hold mean accuracy
/// (empty when the cell failed).
pub fn write_pivot_csv(table: &SweepTable, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["compressor".to_string()];
    header.extend(table.columns.iter().cloned());
    w.write_record(&header)?;
    for (r, row) in table.rows.iter().enumerate() {
        let mut rec = vec![row.clone()];
        rec.extend((0..table.columns.len()).map(|c| table.mean_accuracy(r, c).map(fmt_f64).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "compressor",
        "combiner",
        "mean_accuracy",
        "accuracy_std",
        "accuracy",
        "correct",
        "total",
        "error",
    ])?;
    for cell in &table.cells {
        let mut rec = vec![cell.row.clone(), cell.column.clone()];
        match &cell.result {
            Some(r) => rec.extend([
                fmt_f64(r.mean_accuracy),
                fmt_f64(r.accuracy_std),
                fmt_f64(r.accuracy),
                r.correct.to_string(),
                r.total.to_string(),
                String::new(),
            ]),
            None => {
                rec.extend(std::iter::repeat_n(String::new(), 5));
                rec.push(cell.error.clone().unwrap_or_default());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn write_sweep(table: &SweepTable, dir: &Path) -> io::Result<Vec<std::path::PathBuf>> {
    let pivot = dir.join("pivot.csv");
    let flat = dir.join("sweep.csv");
    let json = dir.join("sweep.json");
    let plot = dir.join("plotdata.csv");
    write_pivot_csv(table, &pivot)?;
    write_sweep_csv(table, &flat)?;
    write_json(&json, table)?;
    let results: Vec<&ClassificationResult> = table.cells.iter().filter_map(|c| c.result.as_ref()).collect();
    write_accuracy_plotdata(&results, &plot)?;
    Ok(vec![pivot, flat, json, plot])
}
