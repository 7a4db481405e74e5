use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncdkit::cache::{LengthCache, CACHE_ENV};
use ncdkit::codec::{Codecs, TMPDIR_ENV};
use ncdkit::corpus::{load_manifest, write_corpus};
use ncdkit::document::{corpus_digest, ByteDocument};
use ncdkit::experiment::{evaluate, sweep, write_classification, write_sweep, GridCombiner};
use ncdkit::manifest::{CorpusInfo, RunRecorder, RUN_MANIFEST_FILE};
use ncdkit::matrix::distance_matrix;
use ncdkit::{audit, Engine};
use ncdkit_core::audit::AuditPlanConfig;
use ncdkit_core::knn::{ExperimentConfig, DEFAULT_TRIALS};
use ncdkit_core::synth::{generate_families, generate_ladder, ContentKind, LadderSpec, SyntheticFamilySpec};
use ncdkit_core::{CodecId, CombinerSpec, CompressorSpec};
use serde_json::json;

const MIB: usize = 1 << 20;

#[derive(Parser)]
#[command(name = "ncdkit", version, about = "Normalized compression distance toolkit")]
struct Cli {
    /// Worker threads for parallel phases [default: available parallelism]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Persistent compressed-length cache (JSON lines)
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    /// Directory for external-codec temporary files
    #[arg(long, global = true, env = TMPDIR_ENV)]
    tmpdir: Option<PathBuf>,
    /// Command template for the `external` codec, e.g. "xz -9 -c {input}"
    #[arg(long, global = true)]
    external_command: Option<String>,
    /// Label for the `external` codec
    #[arg(long, global = true, default_value = "external")]
    external_label: String,
    /// More log output (repeatable)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure idempotence, monotonicity, symmetry and distributivity gaps
    Audit(AuditArgs),
    /// Print NCD between two files
    Ncd(NcdArgs),
    /// Pairwise distance matrix over a corpus
    Matrix(MatrixArgs),
    /// Nearest-neighbor classification over repeated reference draws
    Classify(ClassifyArgs),
    /// Classification over a compressor x combiner grid
    Sweep(SweepArgs),
    /// Write a synthetic corpus plus manifest
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Args)]
struct CorpusArg {
    /// Corpus manifest (CSV `path,id,label,expected_size_bytes` or JSON)
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Args)]
struct OutArg {
    /// Output directory
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CombinerKind {
    Concat,
    Interleave,
    NcdShuffle,
}

#[derive(Args)]
struct CodecArgs {
    /// deflate, bzip2, lzma or external; optionally `name:level`
    #[arg(long, value_parser = parse_codec_name)]
    codec: CodecName,
    /// LZMA dictionary size in bytes
    #[arg(long)]
    dict_size: Option<u32>,
}

#[derive(Args)]
struct CombinerArgs {
    #[arg(long, value_enum, default_value = "concat")]
    combiner: CombinerKind,
    /// Block size in bytes for interleave and ncd-shuffle
    #[arg(long)]
    block: Option<usize>,
    /// Chunk scorer for ncd-shuffle [default: the distance codec]
    #[arg(long, value_parser = parse_codec_name)]
    scorer: Option<CodecName>,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    /// Comma-separated codecs
    #[arg(long, value_delimiter = ',', value_parser = parse_codec_name, default_value = "deflate,bzip2,lzma")]
    codecs: Vec<CodecName>,
    /// Sampled pairs (and triples) per codec
    #[arg(long, default_value_t = 100)]
    budget: usize,
    /// Use every pair and triple
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct NcdArgs {
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    combiner: CombinerArgs,
    /// Also write a run manifest here
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    combiner: CombinerArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    refs_per_class: usize,
    /// Only documents at most this many bytes may be references
    #[arg(long)]
    ref_max_size: Option<u64>,
    /// Only documents at most this many bytes are classified
    #[arg(long)]
    test_max_size: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    combiner: CombinerArgs,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// deflate, bzip2, lzma x concat, IL 1/10/100/1000 MiB, NS 10/100/1000 MiB
    Table,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    #[arg(long, value_delimiter = ',', value_parser = parse_codec_name)]
    codecs: Vec<CodecName>,
    /// Comma-separated: concat, il:<bytes>, ns:<bytes>[:<scorer>]
    #[arg(long, value_delimiter = ',')]
    combiners: Vec<String>,
    /// Fill empty grids from a preset
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Documents of geometrically increasing size
    Ladder(LadderArgs),
    /// Labeled families of mutated variants
    Families(FamilyArgs),
}

#[derive(Args)]
struct LadderArgs {
    #[arg(long, default_value_t = 1024)]
    min_bytes: u64,
    #[arg(long, default_value_t = 32 << 20)]
    max_bytes: u64,
    #[arg(long, default_value_t = 1)]
    steps_per_doubling: u32,
    /// Comma-separated content kinds: random, repetitive, text
    #[arg(long, value_delimiter = ',', default_value = "random,repetitive")]
    content: Vec<String>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, default_value_t = 4)]
    families: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 2 << 20)]
    base_size: u64,
    /// Relative sample-size spread
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Per-byte mutation probability
    #[arg(long, default_value_t = 0.02)]
    mutation: f64,
    /// Leading fraction shared by all families
    #[arg(long, default_value_t = 0.0)]
    shared: f64,
    /// Fraction of mutations that insert or delete a byte
    #[arg(long, default_value_t = 0.0)]
    indel: f64,
    /// Comma-separated sample sizes cycled within each family
    #[arg(long, value_delimiter = ',')]
    size_mix: Vec<u64>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Debug)]
struct CodecName {
    id: CodecId,
    level: Option<u32>,
}

fn parse_codec_name(s: &str) -> Result<CodecName, String> {
    let (name, level) = match s.split_once(':') {
        Some((n, l)) => (n, Some(l.parse::<u32>().map_err(|e| format!("bad level `{l}`: {e}"))?)),
        None => (s, None),
    };
    let id: CodecId = name.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(CodecName { id, level })
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Input(e) | Failure::Runtime(e) => e,
        }
    }
}

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn input(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

struct Ctx {
    engine: Engine,
    cache_path: Option<String>,
    external_command: Option<String>,
    external_label: String,
}

impl Ctx {
    fn spec(&self, name: &CodecName, dict_size: Option<u32>) -> Result<CompressorSpec, Failure> {
        let mut spec = if name.id == CodecId::External {
            let cmd = self
                .external_command
                .as_deref()
                .ok_or_else(|| Failure::Usage(anyhow!("codec `external` needs --external-command")))?;
            CompressorSpec::external(cmd, self.external_label.clone()).usage()?
        } else {
            CompressorSpec::new(name.id, name.level.unwrap_or(name.id.default_level())).usage()?
        };
        if let Some(d) = dict_size {
            spec = spec.with_dict_size(d).usage()?;
        }
        Ok(spec)
    }

    fn combiner(&self, args: &CombinerArgs, compressor: &CompressorSpec) -> Result<CombinerSpec, Failure> {
        let block = || {
            args.block
                .ok_or_else(|| Failure::Usage(anyhow!("--combiner {} needs --block", kind_flag(args.combiner))))
        };
        Ok(match args.combiner {
            CombinerKind::Concat => CombinerSpec::Concat,
            CombinerKind::Interleave => {
                CombinerSpec::interleave(block()?).ok_or_else(|| Failure::Usage(anyhow!("--block must be positive")))?
            }
            CombinerKind::NcdShuffle => {
                let scorer = match &args.scorer {
                    Some(s) => self.spec(s, None)?,
                    None => compressor.clone(),
                };
                CombinerSpec::ncd_shuffle(block()?, scorer)
                    .ok_or_else(|| Failure::Usage(anyhow!("--block must be positive")))?
            }
        })
    }

    fn grid_combiner(&self, s: &str) -> Result<GridCombiner, Failure> {
        let bad = || {
            Failure::Usage(anyhow!(
                "bad combiner `{s}`; expected concat, il:<bytes> or ns:<bytes>[:<scorer>]"
            ))
        };
        let mut it = s.trim().splitn(3, ':');
        let kind = it.next().unwrap_or_default();
        let block = it.next().map(|b| b.parse::<usize>().map_err(|_| bad())).transpose()?;
        let scorer = it.next();
        match (kind, block, scorer) {
            ("concat", None, None) => Ok(CombinerSpec::Concat.into()),
            ("il", Some(b), None) => Ok(CombinerSpec::interleave(b).ok_or_else(bad)?.into()),
            ("ns", Some(b), None) => Ok(GridCombiner::ShuffleRowScorer {
                block_size_bytes: std::num::NonZeroUsize::new(b).ok_or_else(bad)?,
            }),
            ("ns", Some(b), Some(sc)) => {
                let scorer = self.spec(&parse_codec_name(sc).map_err(|e| Failure::Usage(anyhow!(e)))?, None)?;
                Ok(CombinerSpec::ncd_shuffle(b, scorer).ok_or_else(bad)?.into())
            }
            _ => Err(bad()),
        }
    }
}

fn kind_flag(k: CombinerKind) -> &'static str {
    match k {
        CombinerKind::Concat => "concat",
        CombinerKind::Interleave => "interleave",
        CombinerKind::NcdShuffle => "ncd-shuffle",
    }
}

fn load_corpus(path: &Path) -> Result<(Vec<ByteDocument>, CorpusInfo), Failure> {
    let docs = load_manifest(path)
        .with_context(|| format!("loading corpus {}", path.display()))
        .input()?;
    let docs = docs
        .into_iter()
        .map(ByteDocument::into_memory)
        .collect::<Result<Vec<_>, _>>()
        .context("reading corpus documents")
        .input()?;
    let info = CorpusInfo {
        source: path.display().to_string(),
        documents: docs.len(),
        total_bytes: docs.iter().map(|d| d.length_bytes).sum(),
        digest: corpus_digest(&docs),
    };
    Ok((docs, info))
}

fn create_out(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .input()
}

fn path_strings(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

fn finish(
    rec: RunRecorder,
    ctx: &Ctx,
    command: &str,
    config: serde_json::Value,
    corpus: Option<CorpusInfo>,
    outputs: &[PathBuf],
    manifest_path: &Path,
) -> Result<(), Failure> {
    let manifest = rec.finish(command, config, corpus, ctx.cache_path.clone(), path_strings(outputs));
    manifest
        .write(manifest_path)
        .with_context(|| format!("writing {}", manifest_path.display()))
        .runtime()?;
    let s = ctx.engine.stats();
    log::info!(
        "cache: {} hits, {} misses, {} spot checks",
        s.hits,
        s.misses,
        s.spot_checks
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Failure::Usage(anyhow!("--jobs must be at least 1")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .context("starting worker pool")
        .runtime()?;
    let mut codecs = Codecs::new().with_process_cap(jobs);
    if let Some(t) = &cli.tmpdir {
        codecs = codecs.with_tmpdir(t);
    }
    let cache = match &cli.cache {
        Some(p) => LengthCache::open(p)
            .with_context(|| format!("opening cache {}", p.display()))
            .input()?,
        None => LengthCache::in_memory(),
    };
    let ctx = Ctx {
        engine: Engine::new(codecs, Arc::new(cache)),
        cache_path: cli.cache.as_ref().map(|p| p.display().to_string()),
        external_command: cli.external_command.clone(),
        external_label: cli.external_label.clone(),
    };
    let mut rec = RunRecorder::new();

    match cli.command {
        Command::Audit(a) => {
            let compressors = a
                .codecs
                .iter()
                .map(|c| ctx.spec(c, None))
                .collect::<Result<Vec<_>, _>>()?;
            if compressors.is_empty() {
                return Err(Failure::Usage(anyhow!("--codecs is empty")));
            }
            let (docs, info) = load_corpus(&a.corpus.corpus)?;
            rec.phase("load");
            let plan = AuditPlanConfig {
                pair_budget: a.budget,
                seed: a.seed,
                exhaustive: a.exhaustive,
            };
            let report = audit::audit_corpus(&ctx.engine, &info.source, &docs, &compressors, plan).input()?;
            rec.phase("audit");
            create_out(&a.out.out)?;
            let outputs = audit::write_report(&report, &a.out.out)
                .context("writing audit report")
                .runtime()?;
            for s in &report.summary {
                println!(
                    "{:<15} {:<12} n={:<5} max_gap={:<10} worst_ratio={}",
                    s.axiom.name(),
                    s.compressor,
                    s.measurements,
                    s.max_gap_bytes,
                    s.worst_ratio.map_or("-".into(), |r| format!("{r:.3}"))
                );
            }
            let failed = report.failures.len();
            finish(
                rec,
                &ctx,
                "audit",
                json!({"compressors": compressors, "plan": plan}),
                Some(info),
                &outputs,
                &a.out.out.join(RUN_MANIFEST_FILE),
            )?;
            if failed > 0 {
                return Err(Failure::Runtime(anyhow!(
                    "{failed} audit measurements failed; see axioms.json"
                )));
            }
        }
        Command::Ncd(a) => {
            let compressor = ctx.spec(&a.codec.codec, a.codec.dict_size)?;
            let combiner = ctx.combiner(&a.combiner, &compressor)?;
            let read = |p: &Path| {
                ByteDocument::from_file(p.display().to_string(), None, p)
                    .and_then(ByteDocument::into_memory)
                    .with_context(|| format!("reading {}", p.display()))
                    .input()
            };
            let x = read(&a.a)?;
            let y = read(&a.b)?;
            let (xb, yb) = (x.bytes().input()?, y.bytes().input()?);
            let d = ncdkit_core::ncd(&ctx.engine, &compressor, &combiner, &xb, &yb)
                .map_err(|e| anyhow!("{e}"))
                .runtime()?;
            println!("{d}");
            if let Some(m) = &a.manifest {
                finish(
                    rec,
                    &ctx,
                    "ncd",
                    json!({"compressor": compressor, "combiner": combiner, "x": x, "y": y, "ncd": d}),
                    None,
                    &[],
                    m,
                )?;
            }
        }
        Command::Matrix(a) => {
            let compressor = ctx.spec(&a.codec.codec, a.codec.dict_size)?;
            let combiner = ctx.combiner(&a.combiner, &compressor)?;
            let (docs, info) = load_corpus(&a.corpus.corpus)?;
            rec.phase("load");
            let m = distance_matrix(&ctx.engine, &docs, &compressor, &combiner).runtime()?;
            rec.phase("distances");
            create_out(&a.out.out)?;
            let csv = a.out.out.join("matrix.csv");
            let js = a.out.out.join("matrix.json");
            m.write_csv(&csv).runtime()?;
            m.write_json(&js).runtime()?;
            println!("{} x {} matrix written to {}", m.len(), m.len(), a.out.out.display());
            finish(
                rec,
                &ctx,
                "matrix",
                json!({"compressor": compressor, "combiner": combiner}),
                Some(info),
                &[csv, js],
                &a.out.out.join(RUN_MANIFEST_FILE),
            )?;
        }
        Command::Classify(a) => {
            let compressor = ctx.spec(&a.codec.codec, a.codec.dict_size)?;
            let combiner = ctx.combiner(&a.combiner, &compressor)?;
            let config = protocol_config(&a.protocol, compressor, combiner);
            let (docs, info) = load_corpus(&a.corpus.corpus)?;
            rec.phase("load");
            let result = evaluate(&ctx.engine, &docs, &config).map_err(|e| match e {
                ncdkit::experiment::ExperimentError::Config(_) => Failure::Input(e.into()),
                other => Failure::Runtime(other.into()),
            })?;
            rec.phase("classify");
            create_out(&a.out.out)?;
            let outputs = write_classification(&result, &a.out.out).runtime()?;
            println!(
                "mean accuracy {:.4} (std {:.4}) over {} trials; pooled {}/{}",
                result.mean_accuracy,
                result.accuracy_std,
                result.trial_accuracies.len(),
                result.correct,
                result.total
            );
            finish(
                rec,
                &ctx,
                "classify",
                json!({"experiment": config}),
                Some(info),
                &outputs,
                &a.out.out.join(RUN_MANIFEST_FILE),
            )?;
        }
        Command::Sweep(a) => {
            let mut codec_names = a.codecs.clone();
            let mut combiner_strs = a.combiners.clone();
            if let Some(Preset::Table) = a.preset {
                if codec_names.is_empty() {
                    codec_names = [CodecId::Deflate, CodecId::Bzip2, CodecId::Lzma]
                        .map(|id| CodecName { id, level: None })
                        .to_vec();
                }
                if combiner_strs.is_empty() {
                    combiner_strs.push("concat".into());
                    combiner_strs.extend([1, 10, 100, 1000].map(|m| format!("il:{}", m * MIB)));
                    combiner_strs.extend([10, 100, 1000].map(|m| format!("ns:{}", m * MIB)));
                }
            }
            if codec_names.is_empty() || combiner_strs.is_empty() {
                return Err(Failure::Usage(anyhow!(
                    "sweep needs --codecs and --combiners (or --preset)"
                )));
            }
            let compressors = codec_names
                .iter()
                .map(|c| ctx.spec(c, None))
                .collect::<Result<Vec<_>, _>>()?;
            let grid = combiner_strs
                .iter()
                .map(|s| ctx.grid_combiner(s))
                .collect::<Result<Vec<_>, _>>()?;
            let base = protocol_config(&a.protocol, compressors[0].clone(), CombinerSpec::Concat);
            let (docs, info) = load_corpus(&a.corpus.corpus)?;
            rec.phase("load");
            let table = sweep(&ctx.engine, &docs, &base, &compressors, &grid).input()?;
            rec.phase("sweep");
            create_out(&a.out.out)?;
            let outputs = write_sweep(&table, &a.out.out).runtime()?;
            print!("{:<14}", "compressor");
            for c in &table.columns {
                print!(" {c:>16}");
            }
            println!();
            for (r, row) in table.rows.iter().enumerate() {
                print!("{row:<14}");
                for c in 0..table.columns.len() {
                    let v = table.mean_accuracy(r, c).map_or("failed".into(), |v| format!("{v:.4}"));
                    print!(" {v:>16}");
                }
                println!();
            }
            let failed = table.cells.iter().filter(|c| c.error.is_some()).count();
            finish(
                rec,
                &ctx,
                "sweep",
                json!({
                    "protocol": {
                        "k": base.k,
                        "references_per_class": base.references_per_class,
                        "reference_max_size_bytes": base.reference_max_size_bytes,
                        "test_max_size_bytes": base.test_max_size_bytes,
                        "seed": base.seed,
                        "trials": base.trials,
                    },
                    "compressors": compressors,
                    "combiners": grid,
                }),
                Some(info),
                &outputs,
                &a.out.out.join(RUN_MANIFEST_FILE),
            )?;
            if failed > 0 {
                return Err(Failure::Runtime(anyhow!("{failed} sweep cells failed; see sweep.csv")));
            }
        }
        Command::Generate(GenerateCommand::Ladder(a)) => {
            let content_mix = a
                .content
                .iter()
                .map(|s| s.trim().parse::<ContentKind>())
                .collect::<Result<Vec<_>, _>>()
                .usage()?;
            let spec = LadderSpec {
                min_bytes: a.min_bytes,
                max_bytes: a.max_bytes,
                steps_per_doubling: a.steps_per_doubling,
                content_mix,
                seed: a.seed,
            };
            let docs = generate_ladder(&spec).usage()?;
            rec.phase("generate");
            let manifest = write_corpus(&a.out.out, &docs).input()?;
            println!("{} documents written; manifest {}", docs.len(), manifest.display());
            finish(
                rec,
                &ctx,
                "generate ladder",
                json!({"ladder": spec}),
                None,
                &[manifest],
                &a.out.out.join(RUN_MANIFEST_FILE),
            )?;
        }
        Command::Generate(GenerateCommand::Families(a)) => {
            let mut spec = SyntheticFamilySpec::new(a.families, a.samples, a.base_size, a.seed);
            spec.size_jitter = a.jitter;
            spec.mutation_rate = a.mutation;
            spec.shared_fraction = a.shared;
            spec.indel_fraction = a.indel;
            spec.size_mix = a.size_mix.clone();
            let docs = generate_families(&spec).usage()?;
            rec.phase("generate");
            let manifest = write_corpus(&a.out.out, &docs).input()?;
            println!("{} documents written; manifest {}", docs.len(), manifest.display());
            finish(
                rec,
                &ctx,
                "generate families",
                json!({"families": spec}),
                None,
                &[manifest],
                &a.out.out.join(RUN_MANIFEST_FILE),
            )?;
        }
    }
    Ok(())
}

fn protocol_config(p: &ProtocolArgs, compressor: CompressorSpec, combiner: CombinerSpec) -> ExperimentConfig {
    ExperimentConfig {
        k: p.k,
        references_per_class: p.refs_per_class,
        reference_max_size_bytes: p.ref_max_size,
        test_max_size_bytes: p.test_max_size,
        trials: p.trials,
        ..ExperimentConfig::new(compressor, combiner, p.seed)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
