use std::io;
use std::path::Path;

use ncdkit_core::audit::{plan_audit, AuditPlanConfig, AxiomReport, Subject};
use ncdkit_core::CompressorSpec;
use rayon::prelude::*;

use crate::document::ByteDocument;
use crate::engine::Engine;
use crate::matrix::{load_bytes, MatrixError};
use crate::report::{csv_writer, fmt_f64, fmt_opt_f64, write_json};

/// Parallel audit of every document under every compressor. Failed tasks
/// are recorded in the report instead of aborting the run.
pub fn audit_corpus(
    engine: &Engine,
    corpus_name: &str,
    docs: &[ByteDocument],
    compressors: &[CompressorSpec],
    plan: AuditPlanConfig,
) -> Result<AxiomReport, MatrixError> {
    let data = load_bytes(docs)?;
    let subjects: Vec<Subject<'_>> = docs
        .iter()
        .zip(&data)
        .map(|(d, x)| Subject { id: &d.id, data: x })
        .collect();
    let tasks = plan_audit(subjects.len(), compressors.len(), &plan);
    let outcomes: Vec<_> = tasks
        .into_par_iter()
        .map(|task| {
            let r = task.run(engine, &compressors[task.codec], &subjects);
            (task, r)
        })
        .collect();
    for (task, r) in &outcomes {
        if let Err(e) = r {
            log::error!("{} task on {:?} failed: {e}", task.axiom.name(), task.subjects);
        }
    }
    Ok(AxiomReport::assemble(
        corpus_name,
        compressors.to_vec(),
        plan,
        &subjects,
        outcomes,
    ))
}

/// `axiom,compressor,subject_ids,n,gap_bytes,log2_n,ratio`; subject ids
/// are joined with `+`.
pub fn write_axioms_csv(report: &AxiomReport, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "axiom",
        "compressor",
        "subject_ids",
        "n",
        "gap_bytes",
        "log2_n",
        "ratio",
    ])?;
    for m in &report.measurements {
        w.write_record([
            m.axiom.name().to_string(),
            m.compressor.clone(),
            m.subject_ids.join("+"),
            m.subject_size_bytes.to_string(),
            m.gap_bytes.to_string(),
            fmt_f64(m.log_reference),
            fmt_opt_f64(m.ratio()),
        ])?;
    }
    w.flush()
}

/// Long format for plotting: one row per measurement, `x = n`,
/// `y = gap_bytes`, `series = compressor`, faceted by axiom.
pub fn write_plotdata_csv(report: &AxiomReport, path: &Path) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["axiom", "series", "x_n_bytes", "y_gap_bytes", "log2_n"])?;
    for m in &report.measurements {
        w.write_record([
            m.axiom.name().to_string(),
            m.compressor.clone(),
            m.subject_size_bytes.to_string(),
            m.gap_bytes.to_string(),
            fmt_f64(m.log_reference),
        ])?;
    }
    w.flush()
}

pub fn write_report(report: &AxiomReport, dir: &Path) -> io::Result<Vec<std::path::PathBuf>> {
    let csv = dir.join("axioms.csv");
    let json = dir.join("axioms.json");
    let plot = dir.join("plotdata.csv");
    write_axioms_csv(report, &csv)?;
    write_json(&json, report)?;
    write_plotdata_csv(report, &plot)?;
    Ok(vec![csv, json, plot])
}
