#![allow(dead_code)]

use ncdkit::ByteDocument;
use ncdkit_core::synth::SyntheticFamilySpec;

/// Seeded uniform random bytes.
pub fn noise(seed: u64, len: usize) -> Vec<u8> {
    if len == 0 {
        return Vec::new();
    }
    let mut spec = SyntheticFamilySpec::new(1, 1, len as u64, seed);
    spec.mutation_rate = 0.0;
    spec.family(0).remove(0).data
}

pub fn doc(id: &str, label: &str, data: Vec<u8>) -> ByteDocument {
    ByteDocument::from_bytes(id, Some(label.to_string()), data)
}

/// `families` classes of `per_class` variants each: a random base with a
/// few bytes rewritten per variant.
pub fn small_families(families: usize, per_class: usize, size: u64, seed: u64) -> Vec<ByteDocument> {
    let mut spec = SyntheticFamilySpec::new(families, per_class, size, seed);
    spec.mutation_rate = 0.01;
    ncdkit_core::synth::generate_families(&spec)
        .unwrap()
        .into_iter()
        .map(ByteDocument::from)
        .collect()
}

/// Compressed length computed directly with each codec crate, writing the
/// full output to memory. Shares nothing with the library's codec path.
pub fn oracle_len(codec: &str, data: &[u8]) -> u64 {
    use std::io::Write;
    match codec {
        "deflate" => {
            let mut e = flate2::write::ZlibEncoder::new(Vec::new(), flate2::Compression::new(9));
            e.write_all(data).unwrap();
            e.finish().unwrap().len() as u64
        }
        "bzip2" => {
            let mut e = bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::new(9));
            e.write_all(data).unwrap();
            e.finish().unwrap().len() as u64
        }
        "lzma" => {
            let mut dict: u64 = 4096;
            while dict < data.len() as u64 && dict < 64 << 20 {
                dict *= 2;
            }
            let mut opts = xz2::stream::LzmaOptions::new_preset(9).unwrap();
            opts.dict_size(dict as u32);
            let mut filters = xz2::stream::Filters::new();
            filters.lzma2(&opts);
            let stream = xz2::stream::Stream::new_stream_encoder(&filters, xz2::stream::Check::Crc64).unwrap();
            let mut e = xz2::write::XzEncoder::new_stream(Vec::new(), stream);
            e.write_all(data).unwrap();
            e.finish().unwrap().len() as u64
        }
        other => panic!("no oracle for {other}"),
    }
}

/// The classic formula on a literal concatenation.
pub fn oracle_ncd(codec: &str, x: &[u8], y: &[u8]) -> f64 {
    let cx = oracle_len(codec, x) as f64;
    let cy = oracle_len(codec, y) as f64;
    let mut xy = x.to_vec();
    xy.extend_from_slice(y);
    let cxy = oracle_len(codec, &xy) as f64;
    (cxy - cx.min(cy)) / cx.max(cy)
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn ncdkit() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ncdkit"));
    c.env_remove("NCDKIT_CACHE")
        .env_remove("NCDKIT_TMPDIR")
        .env_remove("RUST_LOG");
    c
}

pub fn run_ok(args: &[&str], cwd: &Path) -> Output {
    let out = ncdkit().args(args).current_dir(cwd).output().unwrap();
    assert!(
        out.status.success(),
        "ncdkit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Every regular file under `dir` except run manifests, with its bytes,
/// sorted by relative path.
pub fn output_files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else if p.file_name().unwrap() != "run-manifest.json" {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
