//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ncdkit --test acceptance`; pass criterion
//! numbers after `--` to run a subset. Compressed lengths are cached in
//! the cargo target tmpdir, so reruns of the heavy criteria are quick.

mod common;

use std::collections::BTreeMap;
use std::num::NonZeroUsize;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{ncdkit, noise, oracle_ncd, output_files, run_ok};
use ncdkit::cache::LengthCache;
use ncdkit::codec::Codecs;
use ncdkit::experiment::{evaluate, sweep, GridCombiner, SweepTable};
use ncdkit::{ByteDocument, Engine};
use ncdkit_core::audit::{idempotence_gap, Subject};
use ncdkit_core::combiner::{arrange_pairs, chunk_scores, combine, greedy_pairing, ChunkScores};
use ncdkit_core::knn::ExperimentConfig;
use ncdkit_core::synth::{generate_families, ContentKind, LadderSpec, SyntheticFamilySpec};
use ncdkit_core::{ncd, ncd_from_lengths, CombinerSpec, CompressionBackend, CompressorSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KIB: usize = 1024;
const MIB: usize = 1024 * 1024;

// Criterion 1
const ORACLE_PAIRS: usize = 200;
const ORACLE_REL_TOL: f64 = 1e-12;
// Criterion 2
const COMBINER_TRIPLES: usize = 1000;
// Criterion 3
const LADDER_MIN: u64 = 64 * KIB as u64;
const LADDER_MAX: u64 = 16 * MIB as u64;
const IDEMPOTENCE_LOG_MULTIPLE: f64 = 1000.0;
const IDEMPOTENCE_GROWTH: f64 = 10.0;
const LZMA_ADVANTAGE: f64 = 10.0;
// Criterion 4
const SELF_NCD_SMALL_MAX: f64 = 0.3;
const SELF_NCD_LARGE_MIN: f64 = 0.9;
// Criterion 5
const BZIP2_IL_MARGIN: f64 = 0.10;
const DEFLATE_NOISE_TOL: f64 = 0.02;
// Criterion 6
const SIZE_FILTER_MARGIN: f64 = 0.10;
const REF_FILTER_BYTES: u64 = 200 * KIB as u64;
// Criterion 7
const CHANCE_BAND: (f64, f64) = (0.15, 0.35);
// Criterion 9
const SHUFFLE_INSTANCES: usize = 50;
const SHUFFLE_MIN_MATCHES: usize = 45;
const SHUFFLE_MAX_DEGRADE: f64 = 0.05;

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn cached_engine() -> Engine {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-lengths.jsonl");
    let cache = LengthCache::open(&path).expect("open acceptance cache");
    Engine::new(Codecs::new(), Arc::new(cache))
}

fn builtins() -> [CompressorSpec; 3] {
    [
        CompressorSpec::deflate(),
        CompressorSpec::bzip2(),
        CompressorSpec::lzma(),
    ]
}

fn docs_of(spec: &SyntheticFamilySpec) -> Vec<ByteDocument> {
    generate_families(spec)
        .expect("valid family spec")
        .into_iter()
        .map(ByteDocument::from)
        .collect()
}

/// ncd() with concat against the straight-line formula over direct codec calls.
fn formula_oracle(_: &Engine) -> Outcome {
    let engine = Engine::uncached().with_spot_check_rate(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for k in 0..ORACLE_PAIRS {
        let lx = rng.gen_range(KIB..=100 * KIB);
        let ly = rng.gen_range(KIB..=100 * KIB);
        let (x, y) = if k % 2 == 0 {
            (noise(rng.gen(), lx), noise(rng.gen(), ly))
        } else {
            // related pair: prefixes of one mutated base
            let mut spec = SyntheticFamilySpec::new(1, 2, lx.max(ly) as u64, rng.gen());
            spec.mutation_rate = 0.05;
            spec.size_mix = vec![lx as u64, ly as u64];
            let mut d = generate_families(&spec).unwrap();
            let y = d.pop().unwrap().data;
            (d.pop().unwrap().data, y)
        };
        for spec in builtins() {
            let got = ncd(&engine, &spec, &CombinerSpec::Concat, &x, &y).unwrap();
            let want = oracle_ncd(spec.id().name(), &x, &y);
            let rel = if want == 0.0 {
                got.abs()
            } else {
                ((got - want) / want).abs()
            };
            worst = worst.max(rel);
            checked += 1;
        }
    }
    outcome(
        worst <= ORACLE_REL_TOL,
        format!("{checked} codec/pair checks, worst relative error {worst:e} (tol {ORACLE_REL_TOL:e})"),
    )
}

fn histogram(parts: &[&[u8]]) -> [u64; 256] {
    let mut h = [0u64; 256];
    for p in parts {
        for &b in *p {
            h[b as usize] += 1;
        }
    }
    h
}

/// Length and byte-multiset conservation for every combiner kind, and the
/// interleave-equals-concat degeneration.
fn combiner_conservation(_: &Engine) -> Outcome {
    let engine = Engine::uncached();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut failures = Vec::new();
    let mut combos = 0;
    for t in 0..COMBINER_TRIPLES {
        let lx = rng.gen_range(0..=4000usize);
        let ly = rng.gen_range(0..=4000usize);
        // small alphabets make byte-count mistakes visible
        let alphabet = rng.gen_range(2..=255u8);
        let x: Vec<u8> = (0..lx).map(|_| rng.gen_range(0..alphabet)).collect();
        let y: Vec<u8> = (0..ly).map(|_| rng.gen_range(0..alphabet)).collect();
        let longest = lx.max(ly).max(1);
        let b = rng.gen_range(longest.div_ceil(8)..=longest + longest / 5 + 1);
        let expected = histogram(&[&x, &y]);
        for spec in [
            CombinerSpec::Concat,
            CombinerSpec::interleave(b).unwrap(),
            CombinerSpec::ncd_shuffle(b, CompressorSpec::deflate()).unwrap(),
        ] {
            let j = combine(&engine, &spec, &x, &y).unwrap();
            combos += 1;
            if j.len() != lx + ly || histogram(&[&j]) != expected {
                failures.push(format!("triple {t} ({lx}, {ly}, {b}) {spec}"));
            }
        }
        let wide = longest + rng.gen_range(0..100);
        let il = combine(&engine, &CombinerSpec::interleave(wide).unwrap(), &x, &y).unwrap();
        if il != [x.as_slice(), y.as_slice()].concat() {
            failures.push(format!("triple {t}: IL {wide} differs from concat"));
        }
    }
    let detail = format!(
        "{COMBINER_TRIPLES} triples, {combos} combinations plus wide-block checks; {} violations{}",
        failures.len(),
        failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
    );
    outcome(failures.is_empty(), detail)
}

/// Idempotence gaps over a seeded-random size ladder.
fn idempotence_ladder(engine: &Engine) -> Outcome {
    let ladder = LadderSpec {
        min_bytes: LADDER_MIN,
        max_bytes: LADDER_MAX,
        steps_per_doubling: 1,
        content_mix: vec![ContentKind::Random],
        seed: SEED,
    };
    let sizes = ladder.sizes();
    let mut gaps: BTreeMap<(&str, u64), (i64, f64)> = BTreeMap::new();
    let mut lines = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        let doc = ladder.document(i);
        let subject = Subject {
            id: &doc.id,
            data: &doc.data,
        };
        let mut row = format!("{:>9}", size);
        for spec in builtins() {
            let name = spec.id().name();
            if name == "lzma" && !(size == MIB as u64 || size == 8 * MIB as u64) {
                continue;
            }
            let m = idempotence_gap(engine, &spec, subject).unwrap();
            gaps.insert((name, size), (m.gap_bytes, m.log_reference));
            row.push_str(&format!(" {name}={}", m.gap_bytes));
        }
        lines.push(row);
    }
    for l in &lines {
        println!("    ladder {l}");
    }
    let gap = |c: &str, s: usize| gaps[&(c, s as u64)].0 as f64;
    let log_at_top = gaps[&("deflate", LADDER_MAX)].1;
    let mut pass = true;
    let mut detail = Vec::new();
    for c in ["deflate", "bzip2"] {
        let top = gap(c, 16 * MIB);
        let growth = top / gap(c, MIB);
        pass &= top > IDEMPOTENCE_LOG_MULTIPLE * log_at_top && growth > IDEMPOTENCE_GROWTH;
        detail.push(format!(
            "{c}: gap(16M)={top} vs {}*log2(n)={:.0}, gap(16M)/gap(1M)={growth:.2}",
            IDEMPOTENCE_LOG_MULTIPLE,
            IDEMPOTENCE_LOG_MULTIPLE * log_at_top
        ));
    }
    let lz = gap("lzma", 8 * MIB);
    let df = gap("deflate", 8 * MIB);
    pass &= lz * LZMA_ADVANTAGE <= df;
    detail.push(format!("lzma gap(8M)={lz} vs deflate gap(8M)={df}"));
    outcome(pass, detail.join("; "))
}

/// bzip2 self-distance below and above its block size.
fn self_distance(engine: &Engine) -> Outcome {
    let spec = CompressorSpec::bzip2();
    let small = noise(SEED + 4, 100 * KIB);
    let large = noise(SEED + 5, 2 * MIB);
    let s = ncd(engine, &spec, &CombinerSpec::Concat, &small, &small).unwrap();
    let l = ncd(engine, &spec, &CombinerSpec::Concat, &large, &large).unwrap();
    outcome(
        s < SELF_NCD_SMALL_MAX && l > SELF_NCD_LARGE_MIN,
        format!("NCD(X,X) 100 KiB = {s:.4} (< {SELF_NCD_SMALL_MAX}), 2 MiB = {l:.4} (> {SELF_NCD_LARGE_MIN})"),
    )
}

fn print_table(t: &SweepTable) {
    for (r, row) in t.rows.iter().enumerate() {
        let cells: Vec<String> = t
            .columns
            .iter()
            .enumerate()
            .map(|(c, col)| {
                let cell = t.cell(r, c);
                match &cell.result {
                    Some(res) => format!("{col}={:.4}±{:.4}", res.mean_accuracy, res.accuracy_std),
                    None => format!("{col}=failed({})", cell.error.as_deref().unwrap_or("?")),
                }
            })
            .collect();
        println!("    {row}: {}", cells.join("  "));
    }
}

/// Combiner benefit on 2 MiB synthetic families.
fn combiner_benefit(engine: &Engine) -> Outcome {
    let mut spec = SyntheticFamilySpec::new(4, 20, 2 * MIB as u64, SEED + 5);
    spec.mutation_rate = 0.02;
    spec.indel_fraction = 0.25;
    spec.size_jitter = 0.05;
    let docs = docs_of(&spec);
    let base = ExperimentConfig::new(CompressorSpec::bzip2(), CombinerSpec::Concat, SEED + 50);

    let bz = sweep(
        engine,
        &docs,
        &base,
        &[CompressorSpec::bzip2()],
        &[
            CombinerSpec::Concat.into(),
            CombinerSpec::interleave(100 * KIB).unwrap().into(),
        ],
    )
    .unwrap();
    print_table(&bz);
    let df = sweep(
        engine,
        &docs,
        &base,
        &[CompressorSpec::deflate()],
        &[
            CombinerSpec::Concat.into(),
            CombinerSpec::interleave(16 * KIB).unwrap().into(),
            GridCombiner::ShuffleRowScorer {
                block_size_bytes: NonZeroUsize::new(MIB).unwrap(),
            },
        ],
    )
    .unwrap();
    print_table(&df);

    let acc = |t: &SweepTable, c: usize| t.mean_accuracy(0, c).expect("cell evaluated");
    let (bz_concat, bz_il) = (acc(&bz, 0), acc(&bz, 1));
    let (df_concat, df_best) = (acc(&df, 0), acc(&df, 1).max(acc(&df, 2)));
    outcome(
        bz_il >= bz_concat + BZIP2_IL_MARGIN && df_best >= df_concat - DEFLATE_NOISE_TOL,
        format!(
            "bzip2 IL 100K {bz_il:.4} vs concat {bz_concat:.4} (need +{BZIP2_IL_MARGIN}); \
             deflate best(IL,NS) {df_best:.4} vs concat {df_concat:.4} (tol {DEFLATE_NOISE_TOL})"
        ),
    )
}

/// Reference size filter on a corpus mixing small and large samples.
fn size_filter(engine: &Engine) -> Outcome {
    let mut spec = SyntheticFamilySpec::new(4, 8, 4 * MIB as u64, SEED + 6);
    spec.mutation_rate = 0.02;
    spec.indel_fraction = 0.25;
    spec.size_jitter = 0.05;
    spec.size_mix = vec![100 * KIB as u64, 4 * MIB as u64];
    let docs = docs_of(&spec);
    let unfiltered = ExperimentConfig::new(CompressorSpec::bzip2(), CombinerSpec::Concat, SEED + 60);
    let filtered = ExperimentConfig {
        reference_max_size_bytes: Some(REF_FILTER_BYTES),
        ..unfiltered.clone()
    };
    let u = evaluate(engine, &docs, &unfiltered).unwrap();
    let f = evaluate(engine, &docs, &filtered).unwrap();
    println!("    unfiltered trials {:?}", u.trial_accuracies);
    println!("    filtered   trials {:?}", f.trial_accuracies);
    outcome(
        f.mean_accuracy >= u.mean_accuracy + SIZE_FILTER_MARGIN,
        format!(
            "filtered (refs <= {REF_FILTER_BYTES} B) {:.4} vs unfiltered {:.4} (need +{SIZE_FILTER_MARGIN})",
            f.mean_accuracy, u.mean_accuracy
        ),
    )
}

/// Label-shuffled corpus classifies at chance.
fn chance_level(engine: &Engine) -> Outcome {
    let mut spec = SyntheticFamilySpec::new(4, 10, 16 * KIB as u64, SEED + 7);
    spec.mutation_rate = 0.02;
    let mut labels: Vec<String> = (0..40).map(|i| format!("class-{}", i % 4)).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(SEED + 70));
    let docs: Vec<ByteDocument> = generate_families(&spec)
        .unwrap()
        .into_iter()
        .zip(labels)
        .map(|(d, l)| ByteDocument::from_bytes(d.id, Some(l), d.data))
        .collect();
    let config = ExperimentConfig {
        trials: 10,
        ..ExperimentConfig::new(CompressorSpec::lzma(), CombinerSpec::Concat, SEED + 71)
    };
    let r = evaluate(engine, &docs, &config).unwrap();
    let (lo, hi) = CHANCE_BAND;
    outcome(
        (lo..=hi).contains(&r.mean_accuracy),
        format!(
            "mean accuracy {:.4} over {} trials (band [{lo}, {hi}])",
            r.mean_accuracy,
            r.trial_accuracies.len()
        ),
    )
}

/// Every CLI command twice with the same flags; outputs must match.
fn cli_determinism(_: &Engine) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let fam = [
        "generate",
        "families",
        "--families",
        "3",
        "--samples",
        "4",
        "--base-size",
        "8192",
        "--indel",
        "0.25",
        "--size-mix",
        "4096,8192",
        "--seed",
        "11",
    ];
    let ladder = [
        "generate",
        "ladder",
        "--min-bytes",
        "1024",
        "--max-bytes",
        "65536",
        "--content",
        "random,repetitive,text",
        "--seed",
        "12",
    ];
    let commands: Vec<Vec<&str>> = vec![
        fam.to_vec(),
        ladder.to_vec(),
        vec![
            "audit",
            "--corpus",
            "corpus/manifest.csv",
            "--codecs",
            "deflate,bzip2,lzma",
            "--seed",
            "7",
            "--budget",
            "6",
        ],
        vec![
            "matrix",
            "--corpus",
            "corpus/manifest.csv",
            "--codec",
            "bzip2",
            "--combiner",
            "interleave",
            "--block",
            "1024",
        ],
        vec![
            "matrix",
            "--corpus",
            "corpus/manifest.csv",
            "--codec",
            "lzma",
            "--combiner",
            "ncd-shuffle",
            "--block",
            "2048",
        ],
        vec![
            "classify",
            "--corpus",
            "corpus/manifest.csv",
            "--codec",
            "deflate",
            "--seed",
            "3",
            "--ref-max-size",
            "5000",
        ],
        vec![
            "sweep",
            "--corpus",
            "corpus/manifest.csv",
            "--codecs",
            "deflate,bzip2,lzma",
            "--combiners",
            "concat,il:1024,ns:2048,ns:2048:deflate",
            "--seed",
            "3",
            "--trials",
            "2",
        ],
    ];
    run_ok(&[&fam[..], &["-o", "corpus"]].concat(), root);
    let mut compared = 0;
    let mut diffs = Vec::new();
    for (k, cmd) in commands.iter().enumerate() {
        let a = format!("run{k}a");
        let b = format!("run{k}b");
        run_ok(&[&cmd[..], &["-o", &a]].concat(), root);
        run_ok(&[&cmd[..], &["-o", &b]].concat(), root);
        let (fa, fb) = (output_files(&root.join(&a)), output_files(&root.join(&b)));
        compared += fa.len();
        if fa.is_empty() || fa != fb || !root.join(&a).join("run-manifest.json").is_file() {
            diffs.push(cmd[0].to_string());
        }
    }
    let ncd_args = [
        "ncd",
        "corpus/family-00-0000.bin",
        "corpus/family-01-0001.bin",
        "--codec",
        "bzip2",
        "--combiner",
        "interleave",
        "--block",
        "1048576",
    ];
    let o1 = ncdkit().args(ncd_args).current_dir(root).output().unwrap();
    let o2 = ncdkit().args(ncd_args).current_dir(root).output().unwrap();
    if !o1.status.success() || o1.stdout != o2.stdout {
        diffs.push("ncd".into());
    }
    outcome(
        diffs.is_empty(),
        format!(
            "{} commands run twice, {compared} output files compared; mismatches: {}",
            commands.len() + 1,
            if diffs.is_empty() {
                "none".into()
            } else {
                diffs.join(", ")
            }
        ),
    )
}

fn mutate(rng: &mut ChaCha8Rng, src: &[u8], rate: f64) -> Vec<u8> {
    src.iter()
        .map(|&b| if rng.gen_bool(rate) { rng.gen() } else { b })
        .collect()
}

/// Minimum-total-score matching of size min(nx, ny), by brute force.
/// Ties go to the lexicographically smallest assignment.
fn optimal_pairing(s: &ChunkScores) -> Vec<(usize, usize)> {
    fn search(
        s: &ChunkScores,
        i: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        cost: f64,
        best: &mut Option<(f64, Vec<(usize, usize)>)>,
        transpose: bool,
    ) {
        let (n_rows, n_cols) = if transpose { (s.ny, s.nx) } else { (s.nx, s.ny) };
        if i == n_rows {
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                *best = Some((cost, cur.clone()));
            }
            return;
        }
        for j in 0..n_cols {
            if used[j] {
                continue;
            }
            let v = if transpose { s.get(j, i) } else { s.get(i, j) };
            used[j] = true;
            cur.push(if transpose { (j, i) } else { (i, j) });
            search(s, i + 1, used, cur, cost + v, best, transpose);
            cur.pop();
            used[j] = false;
        }
    }
    let transpose = s.nx > s.ny;
    let cols = if transpose { s.nx } else { s.ny };
    let mut best = None;
    search(s, 0, &mut vec![false; cols], &mut Vec::new(), 0.0, &mut best, transpose);
    let mut pairs = best.map(|(_, p)| p).unwrap_or_default();
    pairs.sort();
    pairs
}

/// Greedy chunk pairing against exhaustive optimal assignment on crossed
/// block instances.
fn shuffle_oracle(engine: &Engine) -> Outcome {
    let scorer = CompressorSpec::bzip2();
    let b = 64 * KIB;
    let nz = NonZeroUsize::new(b).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut matches = 0;
    let mut worst_degrade = f64::NEG_INFINITY;
    for inst in 0..SHUFFLE_INSTANCES {
        let k = 2 + inst % 3;
        let mut blocks: Vec<Vec<u8>> = (0..k).map(|_| noise(rng.gen(), b)).collect();
        // every third instance gets a decoy: one block half-copies its neighbour
        if inst % 3 == 2 {
            let half = blocks[0][..b / 2].to_vec();
            blocks[1][..b / 2].copy_from_slice(&half);
        }
        let rate = rng.gen_range(0.01..0.10);
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut rng);
        let x: Vec<u8> = blocks.concat();
        let mut y: Vec<u8> = order.iter().flat_map(|&i| mutate(&mut rng, &blocks[i], rate)).collect();
        if inst % 5 == 4 {
            y.extend(noise(rng.gen(), b));
        }
        let scores = chunk_scores(engine, &scorer, &x, &y, nz).unwrap();
        let mut greedy = greedy_pairing(&scores);
        greedy.sort();
        let optimal = optimal_pairing(&scores);
        let score_of = |pairs: &[(usize, usize)]| -> f64 {
            let parts = arrange_pairs(&x, &y, nz, pairs);
            let joined = engine.compressed_len(&scorer, &parts).unwrap();
            let cx = engine.compressed_len(&scorer, &[&x]).unwrap();
            let cy = engine.compressed_len(&scorer, &[&y]).unwrap();
            ncd_from_lengths(joined, cx, cy).unwrap()
        };
        if greedy == optimal {
            matches += 1;
        }
        worst_degrade = worst_degrade.max(score_of(&greedy) - score_of(&optimal));
    }
    outcome(
        matches >= SHUFFLE_MIN_MATCHES && worst_degrade <= SHUFFLE_MAX_DEGRADE,
        format!(
            "greedy matched optimal in {matches}/{SHUFFLE_INSTANCES} (need {SHUFFLE_MIN_MATCHES}); \
             worst NCD degradation {worst_degrade:.4} (max {SHUFFLE_MAX_DEGRADE})"
        ),
    )
}

type Criterion = (u32, &'static str, fn(&Engine) -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "formula oracle equivalence", formula_oracle),
        (2, "combiner conservation", combiner_conservation),
        (3, "idempotence failure on a size ladder", idempotence_ladder),
        (4, "self-distance size effect", self_distance),
        (5, "combiner benefit", combiner_benefit),
        (6, "size-filter effect", size_filter),
        (7, "chance-level sanity", chance_level),
        (8, "CLI determinism", cli_determinism),
        (9, "NCD-shuffle small-instance oracle", shuffle_oracle),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let engine = cached_engine();
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| run(&engine))).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {n} ({name}): {} [{secs:.1}s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    let s = engine.stats();
    println!(
        "length cache: {} hits, {} misses, {} spot checks",
        s.hits, s.misses, s.spot_checks
    );
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all selected criteria passed");
        ExitCode::SUCCESS
    }
}
