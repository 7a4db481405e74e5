//! Normal-compressor axiom gaps.
//!
//! Each gap is an exact integer combination of compressed lengths, set
//! against `log2(n)` where `n` is the largest string length involved.
//! Nothing here declares an axiom satisfied or violated; the report only
//! carries the curves and ratios.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{CompressionBackend, CompressorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    Idempotence,
    Monotonicity,
    Symmetry,
    Distributivity,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::Idempotence,
        Axiom::Monotonicity,
        Axiom::Symmetry,
        Axiom::Distributivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Idempotence => "idempotence",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Symmetry => "symmetry",
            Axiom::Distributivity => "distributivity",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Axiom::Idempotence => 1,
            Axiom::Monotonicity | Axiom::Symmetry => 2,
            Axiom::Distributivity => 3,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `log2(n)`, or 0 when `n < 2` (no meaningful allowance).
pub fn log_reference(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::log2(n as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomMeasurement {
    pub axiom: Axiom,
    pub compressor: String,
    pub subject_ids: Vec<String>,
    /// Largest string length involved, in bytes.
    pub subject_size_bytes: u64,
    pub gap_bytes: i64,
    pub log_reference: f64,
}

fn signed(v: u64) -> i64 {
    i64::try_from(v).expect("compressed length exceeds i64")
}

impl AxiomMeasurement {
    fn build(axiom: Axiom, compressor: &str, ids: &[&str], n: u64, gap: i64) -> Self {
        AxiomMeasurement {
            axiom,
            compressor: compressor.to_string(),
            subject_ids: ids.iter().map(|s| s.to_string()).collect(),
            subject_size_bytes: n,
            gap_bytes: gap,
            log_reference: log_reference(n),
        }
    }

    /// `|C(XX)| - |C(X)|` with `n = |XX|`.
    pub fn idempotence(compressor: &str, id: &str, x_len: u64, cx: u64, cxx: u64) -> Self {
        Self::build(
            Axiom::Idempotence,
            compressor,
            &[id],
            2 * x_len,
            signed(cxx) - signed(cx),
        )
    }

    /// `|C(X)| - |C(XY)|` (positive = violation) with `n = |XY|`.
    pub fn monotonicity(compressor: &str, ids: [&str; 2], xy_len: u64, cx: u64, cxy: u64) -> Self {
        Self::build(Axiom::Monotonicity, compressor, &ids, xy_len, signed(cx) - signed(cxy))
    }

    /// `| |C(XY)| - |C(YX)| |` with `n = |XY|`.
    pub fn symmetry(compressor: &str, ids: [&str; 2], xy_len: u64, cxy: u64, cyx: u64) -> Self {
        Self::build(
            Axiom::Symmetry,
            compressor,
            &ids,
            xy_len,
            (signed(cxy) - signed(cyx)).abs(),
        )
    }

    /// `(|C(XY)| + |C(Z)|) - (|C(XZ)| + |C(YZ)|)` (positive = violation),
    /// `n` = longest of `XY`, `XZ`, `YZ`.
    pub fn distributivity(
        compressor: &str,
        ids: [&str; 3],
        lens: [u64; 3],
        cxy: u64,
        cz: u64,
        cxz: u64,
        cyz: u64,
    ) -> Self {
        let [x, y, z] = lens;
        let n = (x + y).max(x + z).max(y + z);
        let gap = signed(cxy) + signed(cz) - signed(cxz) - signed(cyz);
        Self::build(Axiom::Distributivity, compressor, &ids, n, gap)
    }

    /// `gap / log2(n)`; `None` when `n < 2`.
    pub fn ratio(&self) -> Option<f64> {
        (self.log_reference > 0.0).then(|| self.gap_bytes as f64 / self.log_reference)
    }
}

/// A named byte string under audit.
#[derive(Clone, Copy, Debug)]
pub struct Subject<'a> {
    pub id: &'a str,
    pub data: &'a [u8],
}

fn len(s: &Subject<'_>) -> u64 {
    s.data.len() as u64
}

pub fn idempotence_gap<B: CompressionBackend>(
    backend: &B,
    spec: &CompressorSpec,
    x: Subject<'_>,
) -> Result<AxiomMeasurement, B::Error> {
    let cx = backend.compressed_len(spec, &[x.data])?;
    let cxx = backend.compressed_len(spec, &[x.data, x.data])?;
    Ok(AxiomMeasurement::idempotence(spec.label(), x.id, len(&x), cx, cxx))
}

pub fn monotonicity_gap<B: CompressionBackend>(
    backend: &B,
    spec: &CompressorSpec,
    x: Subject<'_>,
    y: Subject<'_>,
) -> Result<AxiomMeasurement, B::Error> {
    let cx = backend.compressed_len(spec, &[x.data])?;
    let cxy = backend.compressed_len(spec, &[x.data, y.data])?;
    Ok(AxiomMeasurement::monotonicity(
        spec.label(),
        [x.id, y.id],
        len(&x) + len(&y),
        cx,
        cxy,
    ))
}

pub fn symmetry_gap<B: CompressionBackend>(
    backend: &B,
    spec: &CompressorSpec,
    x: Subject<'_>,
    y: Subject<'_>,
) -> Result<AxiomMeasurement, B::Error> {
    let cxy = backend.compressed_len(spec, &[x.data, y.data])?;
    let cyx = backend.compressed_len(spec, &[y.data, x.data])?;
    Ok(AxiomMeasurement::symmetry(
        spec.label(),
        [x.id, y.id],
        len(&x) + len(&y),
        cxy,
        cyx,
    ))
}

pub fn distributivity_gap<B: CompressionBackend>(
    backend: &B,
    spec: &CompressorSpec,
    x: Subject<'_>,
    y: Subject<'_>,
    z: Subject<'_>,
) -> Result<AxiomMeasurement, B::Error> {
    let cxy = backend.compressed_len(spec, &[x.data, y.data])?;
    let cz = backend.compressed_len(spec, &[z.data])?;
    let cxz = backend.compressed_len(spec, &[x.data, z.data])?;
    let cyz = backend.compressed_len(spec, &[y.data, z.data])?;
    Ok(AxiomMeasurement::distributivity(
        spec.label(),
        [x.id, y.id, z.id],
        [len(&x), len(&y), len(&z)],
        cxy,
        cz,
        cxz,
        cyz,
    ))
}

/// One unit of audit work: an axiom, a compressor index and subject indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AuditTask {
    pub axiom: Axiom,
    pub codec: usize,
    pub subjects: Vec<usize>,
}

impl AuditTask {
    pub fn run<B: CompressionBackend>(
        &self,
        backend: &B,
        spec: &CompressorSpec,
        corpus: &[Subject<'_>],
    ) -> Result<AxiomMeasurement, B::Error> {
        let s = |k: usize| corpus[self.subjects[k]];
        match self.axiom {
            Axiom::Idempotence => idempotence_gap(backend, spec, s(0)),
            Axiom::Monotonicity => monotonicity_gap(backend, spec, s(0), s(1)),
            Axiom::Symmetry => symmetry_gap(backend, spec, s(0), s(1)),
            Axiom::Distributivity => distributivity_gap(backend, spec, s(0), s(1), s(2)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditPlanConfig {
    /// Sampled pairs (and, separately, triples) per compressor.
    pub pair_budget: usize,
    pub seed: u64,
    /// Use every pair and triple instead of sampling.
    pub exhaustive: bool,
}

/// Ordered pairs `(x, y)` with `x != y`: all of them when exhaustive or
/// when the budget covers the whole space, else a seeded sample without
/// replacement.
pub fn sample_pairs(n: usize, cfg: &AuditPlanConfig) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let total = n * (n - 1);
    if cfg.exhaustive || cfg.pair_budget >= total {
        return (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(cfg.pair_budget);
    while out.len() < cfg.pair_budget {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n - 1);
        let j = if j >= i { j + 1 } else { j };
        if seen.insert((i, j)) {
            out.push((i, j));
        }
    }
    out
}

/// Triples `(x, y, z)` of distinct indices with `x < y` (the gap is
/// symmetric in `x` and `y`).
pub fn sample_triples(n: usize, cfg: &AuditPlanConfig) -> Vec<(usize, usize, usize)> {
    if n < 3 {
        return Vec::new();
    }
    let total = n * (n - 1) / 2 * (n - 2);
    if cfg.exhaustive || cfg.pair_budget >= total {
        let mut out = Vec::with_capacity(total);
        for x in 0..n {
            for y in x + 1..n {
                for z in (0..n).filter(|&z| z != x && z != y) {
                    out.push((x, y, z));
                }
            }
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(cfg.pair_budget);
    while out.len() < cfg.pair_budget {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let z = rng.gen_range(0..n);
        if a == b || z == a || z == b {
            continue;
        }
        let t = (a.min(b), a.max(b), z);
        if seen.insert(t) {
            out.push(t);
        }
    }
    out
}

/// Every task of an audit, in report order. The same sampled pairs and
/// triples are used for every compressor so codecs stay comparable.
pub fn plan_audit(n_docs: usize, n_codecs: usize, cfg: &AuditPlanConfig) -> Vec<AuditTask> {
    let pairs = sample_pairs(n_docs, cfg);
    let sym_pairs: Vec<(usize, usize)> = if cfg.exhaustive {
        pairs.iter().copied().filter(|(i, j)| i < j).collect()
    } else {
        pairs.clone()
    };
    let triples = sample_triples(n_docs, cfg);
    let mut tasks = Vec::new();
    for codec in 0..n_codecs {
        tasks.extend((0..n_docs).map(|d| AuditTask {
            axiom: Axiom::Idempotence,
            codec,
            subjects: alloc::vec![d],
        }));
        tasks.extend(pairs.iter().map(|&(i, j)| AuditTask {
            axiom: Axiom::Monotonicity,
            codec,
            subjects: alloc::vec![i, j],
        }));
        tasks.extend(sym_pairs.iter().map(|&(i, j)| AuditTask {
            axiom: Axiom::Symmetry,
            codec,
            subjects: alloc::vec![i, j],
        }));
        tasks.extend(triples.iter().map(|&(x, y, z)| AuditTask {
            axiom: Axiom::Distributivity,
            codec,
            subjects: alloc::vec![x, y, z],
        }));
    }
    tasks
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditFailure {
    pub axiom: Axiom,
    pub compressor: String,
    pub subject_ids: Vec<String>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomSummary {
    pub axiom: Axiom,
    pub compressor: String,
    pub measurements: usize,
    pub max_gap_bytes: i64,
    /// Max over measurements with `n >= 2` of `gap_bytes / log2(n)`.
    pub worst_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub corpus: String,
    pub compressors: Vec<CompressorSpec>,
    pub plan: AuditPlanConfig,
    pub log_base: u32,
    pub measurements: Vec<AxiomMeasurement>,
    pub summary: Vec<AxiomSummary>,
    pub failures: Vec<AuditFailure>,
}

/// Per (axiom, compressor) summary, in axiom-then-compressor order.
pub fn summarize(compressors: &[CompressorSpec], measurements: &[AxiomMeasurement]) -> Vec<AxiomSummary> {
    let mut out = Vec::new();
    for axiom in Axiom::ALL {
        for spec in compressors {
            let ms = measurements
                .iter()
                .filter(|m| m.axiom == axiom && m.compressor == spec.label());
            let mut count = 0;
            let mut max_gap = i64::MIN;
            let mut worst: Option<f64> = None;
            for m in ms {
                count += 1;
                max_gap = max_gap.max(m.gap_bytes);
                if let Some(r) = m.ratio() {
                    worst = Some(worst.map_or(r, |w| w.max(r)));
                }
            }
            if count > 0 {
                out.push(AxiomSummary {
                    axiom,
                    compressor: spec.label().to_string(),
                    measurements: count,
                    max_gap_bytes: max_gap,
                    worst_ratio: worst,
                });
            }
        }
    }
    out
}

impl AxiomReport {
    /// Builds a report from task outcomes, ordering measurements by
    /// (axiom, compressor position, subject ids).
    pub fn assemble<E: fmt::Display>(
        corpus: &str,
        compressors: Vec<CompressorSpec>,
        plan: AuditPlanConfig,
        subjects: &[Subject<'_>],
        outcomes: Vec<(AuditTask, Result<AxiomMeasurement, E>)>,
    ) -> Self {
        let mut ok: Vec<(usize, AxiomMeasurement)> = Vec::new();
        let mut failures = Vec::new();
        for (task, outcome) in outcomes {
            match outcome {
                Ok(m) => ok.push((task.codec, m)),
                Err(e) => failures.push(AuditFailure {
                    axiom: task.axiom,
                    compressor: compressors[task.codec].label().to_string(),
                    subject_ids: task.subjects.iter().map(|&i| subjects[i].id.to_string()).collect(),
                    error: alloc::format!("{e}"),
                }),
            }
        }
        ok.sort_by(|(ca, a), (cb, b)| {
            a.axiom
                .cmp(&b.axiom)
                .then(ca.cmp(cb))
                .then_with(|| a.subject_ids.cmp(&b.subject_ids))
        });
        let measurements: Vec<AxiomMeasurement> = ok.into_iter().map(|(_, m)| m).collect();
        let summary = summarize(&compressors, &measurements);
        AxiomReport {
            corpus: corpus.to_string(),
            compressors,
            plan,
            log_base: 2,
            measurements,
            summary,
            failures,
        }
    }
}

/// Sequential audit of `subjects` under every compressor.
pub fn audit_corpus<B: CompressionBackend>(
    backend: &B,
    corpus: &str,
    subjects: &[Subject<'_>],
    compressors: &[CompressorSpec],
    plan: AuditPlanConfig,
) -> AxiomReport
where
    B::Error: fmt::Display,
{
    let outcomes = plan_audit(subjects.len(), compressors.len(), &plan)
        .into_iter()
        .map(|task| {
            let r = task.run(backend, &compressors[task.codec], subjects);
            (task, r)
        })
        .collect();
    AxiomReport::assemble(corpus, compressors.to_vec(), plan, subjects, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{noise, Failing, WindowedToy};

    fn subj<'a>(id: &'a str, data: &'a [u8]) -> Subject<'a> {
        Subject { id, data }
    }

    #[test]
    fn empty_subject_gaps_are_zero() {
        let toy = WindowedToy { window: 100 };
        let spec = CompressorSpec::deflate();
        let e = subj("e", b"");
        assert_eq!(idempotence_gap(&toy, &spec, e).unwrap().gap_bytes, 0);
        assert_eq!(distributivity_gap(&toy, &spec, e, e, e).unwrap().gap_bytes, 0);
        let m = idempotence_gap(&toy, &spec, e).unwrap();
        assert_eq!(m.subject_size_bytes, 0);
        assert_eq!(m.ratio(), None);
    }

    #[test]
    fn symmetric_and_monotone_trivia() {
        let toy = WindowedToy { window: 100 };
        let spec = CompressorSpec::deflate();
        let x = noise(1, 300);
        let y = noise(2, 200);
        assert_eq!(
            symmetry_gap(&toy, &spec, subj("x", &x), subj("x", &x))
                .unwrap()
                .gap_bytes,
            0
        );
        let m = monotonicity_gap(&toy, &spec, subj("x", &x), subj("e", b"")).unwrap();
        assert_eq!(m.gap_bytes, 0);
        let s = symmetry_gap(&toy, &spec, subj("x", &x), subj("y", &y)).unwrap();
        assert_eq!(s.subject_size_bytes, 500);
        assert!(s.gap_bytes >= 0);
    }

    #[test]
    fn distributivity_with_equal_inputs_reduces() {
        let toy = WindowedToy { window: 50 };
        let spec = CompressorSpec::deflate();
        let x = noise(5, 400);
        let cx = toy.compressed_len(&spec, &[&x]).unwrap() as i64;
        let cxx = toy.compressed_len(&spec, &[&x, &x]).unwrap() as i64;
        let m = distributivity_gap(&toy, &spec, subj("x", &x), subj("x", &x), subj("x", &x)).unwrap();
        assert_eq!(m.gap_bytes, cx - cxx);
        assert!(m.gap_bytes <= 0);
        assert_eq!(m.subject_size_bytes, 800);
    }

    #[test]
    fn idempotence_tracks_window() {
        let spec = CompressorSpec::deflate();
        let x = noise(6, 2000);
        let small = idempotence_gap(&WindowedToy { window: 500 }, &spec, subj("x", &x)).unwrap();
        let big = idempotence_gap(&WindowedToy { window: 5000 }, &spec, subj("x", &x)).unwrap();
        assert!(small.gap_bytes > 1900);
        assert!(big.gap_bytes < 10);
        assert!((small.log_reference - libm::log2(4000.0)).abs() < 1e-12);
    }

    #[test]
    fn single_doc_zero_budget_plan() {
        let cfg = AuditPlanConfig {
            pair_budget: 0,
            seed: 1,
            exhaustive: false,
        };
        let tasks = plan_audit(1, 1, &cfg);
        assert_eq!(tasks.len(), 1);
        assert_eq!(tasks[0].axiom, Axiom::Idempotence);
    }

    #[test]
    fn sampling_is_seeded_and_distinct() {
        let cfg = AuditPlanConfig {
            pair_budget: 15,
            seed: 42,
            exhaustive: false,
        };
        let a = sample_pairs(10, &cfg);
        assert_eq!(a, sample_pairs(10, &cfg));
        assert_eq!(a.len(), 15);
        assert!(a.iter().all(|(i, j)| i != j));
        let set: BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), 15);
        let other = AuditPlanConfig { seed: 43, ..cfg };
        assert_ne!(a, sample_pairs(10, &other));
        let t = sample_triples(6, &cfg);
        assert_eq!(t.len(), 15);
        assert!(t.iter().all(|&(x, y, z)| x < y && z != x && z != y));
    }

    #[test]
    fn exhaustive_counts() {
        let cfg = AuditPlanConfig {
            pair_budget: 0,
            seed: 0,
            exhaustive: true,
        };
        assert_eq!(sample_pairs(4, &cfg).len(), 12);
        assert_eq!(sample_triples(4, &cfg).len(), 12);
        let tasks = plan_audit(4, 2, &cfg);
        // per codec: 4 idempotence + 12 monotonicity + 6 symmetry + 12 distributivity
        assert_eq!(tasks.len(), 2 * (4 + 12 + 6 + 12));
    }

    #[test]
    fn report_summary_recomputes_and_failures_are_kept() {
        let toy = WindowedToy { window: 64 };
        let docs: Vec<Vec<u8>> = (0..4).map(|k| noise(k, 100 + 50 * k as usize)).collect();
        let ids = ["a", "b", "c", "d"];
        let subjects: Vec<Subject> = ids.iter().zip(&docs).map(|(i, d)| subj(i, d)).collect();
        let cfg = AuditPlanConfig {
            pair_budget: 5,
            seed: 7,
            exhaustive: false,
        };
        let specs = [CompressorSpec::deflate(), CompressorSpec::bzip2()];
        let r1 = audit_corpus(&toy, "toy", &subjects, &specs, cfg);
        let r2 = audit_corpus(&toy, "toy", &subjects, &specs, cfg);
        assert_eq!(r1, r2);
        assert_eq!(r1.summary, summarize(&r1.compressors, &r1.measurements));
        for s in &r1.summary {
            let worst = r1
                .measurements
                .iter()
                .filter(|m| m.axiom == s.axiom && m.compressor == s.compressor)
                .filter_map(|m| m.ratio())
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(s.worst_ratio, Some(worst));
        }
        let failed = audit_corpus(&Failing, "toy", &subjects, &specs, cfg);
        assert!(failed.measurements.is_empty());
        assert_eq!(failed.failures.len(), 2 * (4 + 5 + 5 + 5));
    }
}
