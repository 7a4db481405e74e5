//! Real codecs behind [`CompressorSpec`].
//!
//! Output is streamed into a byte counter, never kept, so memory stays
//! bounded by the codec state regardless of input size. External
//! commands read a temporary input file and their output length is taken
//! from a temporary file as well.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Condvar, Mutex};

use ncdkit_core::codec::LZMA_DICT_BYTES;
use ncdkit_core::{CodecId, CompressedLength, CompressionBackend, CompressorSpec};

/// Overrides the directory used for external-codec temporary files.
pub const TMPDIR_ENV: &str = "NCDKIT_TMPDIR";

const MIN_DICT_BYTES: u32 = 4096;

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("{codec}: initialization failed: {message}")]
    Init { codec: String, message: String },
    #[error("{codec}: i/o error: {source}")]
    Io {
        codec: String,
        #[source]
        source: io::Error,
    },
    #[error("{codec}: executable `{program}` not found")]
    MissingExecutable { codec: String, program: String },
    #[error("{codec}: `{command}` exited with {status}: {stderr}")]
    ExternalStatus {
        codec: String,
        command: String,
        status: String,
        stderr: String,
    },
    #[error("concat_compressed_size needs at least one part")]
    NoParts,
}

#[derive(Default)]
struct ByteCounter {
    count: u64,
}

impl Write for ByteCounter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.count += buf.len() as u64;
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Counting semaphore bounding concurrent external processes.
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

struct SlotGuard<'a>(&'a Slots);

impl Slots {
    fn new(n: usize) -> Self {
        Slots {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        SlotGuard(self)
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

/// Stateless codec runner. Every call builds its own encoder, so a single
/// instance can be shared across threads.
pub struct Codecs {
    tmpdir: Option<PathBuf>,
    slots: Slots,
}

impl Default for Codecs {
    fn default() -> Self {
        Self::new()
    }
}

impl Codecs {
    /// Temp files in `$NCDKIT_TMPDIR` (or the system temp dir); at most one
    /// external process per available CPU.
    pub fn new() -> Self {
        let cap = std::thread::available_parallelism().map_or(1, |n| n.get());
        Codecs {
            tmpdir: std::env::var_os(TMPDIR_ENV).map(PathBuf::from),
            slots: Slots::new(cap),
        }
    }

    pub fn with_tmpdir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.tmpdir = Some(dir.into());
        self
    }

    pub fn with_process_cap(mut self, cap: usize) -> Self {
        self.slots = Slots::new(cap);
        self
    }

    pub fn tmpdir(&self) -> PathBuf {
        self.tmpdir.clone().unwrap_or_else(std::env::temp_dir)
    }

    /// `|C(data)|`, headers and trailers included.
    pub fn compressed_size(&self, spec: &CompressorSpec, data: &[u8]) -> Result<CompressedLength, CodecError> {
        self.concat_compressed_size(spec, &[data])
    }

    /// `|C(p_1 p_2 ... p_k)|` without materializing the concatenation.
    pub fn concat_compressed_size(
        &self,
        spec: &CompressorSpec,
        parts: &[&[u8]],
    ) -> Result<CompressedLength, CodecError> {
        if parts.is_empty() {
            return Err(CodecError::NoParts);
        }
        let byte_count = self.length(spec, parts)?;
        Ok(CompressedLength {
            byte_count,
            codec: spec.label().to_string(),
        })
    }

    /// Streams `reader` through the codec. The input size is unknown, so
    /// LZMA runs with its full pinned dictionary.
    pub fn compressed_size_reader(
        &self,
        spec: &CompressorSpec,
        mut reader: impl Read,
    ) -> Result<CompressedLength, CodecError> {
        let byte_count = self.run(spec, None, &mut |w| io::copy(&mut reader, w).map(drop))?;
        Ok(CompressedLength {
            byte_count,
            codec: spec.label().to_string(),
        })
    }

    fn length(&self, spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, CodecError> {
        let total: u64 = parts.iter().map(|p| p.len() as u64).sum();
        self.run(spec, Some(total), &mut |w| {
            parts.iter().try_for_each(|p| w.write_all(p))
        })
    }

    fn run(
        &self,
        spec: &CompressorSpec,
        size_hint: Option<u64>,
        feed: &mut dyn FnMut(&mut dyn Write) -> io::Result<()>,
    ) -> Result<u64, CodecError> {
        let io_err = |source| CodecError::Io {
            codec: spec.label().to_string(),
            source,
        };
        match spec.id() {
            CodecId::Deflate => {
                let level = flate2::Compression::new(spec.level());
                let mut enc = flate2::write::ZlibEncoder::new(ByteCounter::default(), level);
                feed(&mut enc).map_err(io_err)?;
                Ok(enc.finish().map_err(io_err)?.count)
            }
            CodecId::Bzip2 => {
                let level = bzip2::Compression::new(spec.level());
                let mut enc = bzip2::write::BzEncoder::new(ByteCounter::default(), level);
                feed(&mut enc).map_err(io_err)?;
                Ok(enc.finish().map_err(io_err)?.count)
            }
            CodecId::Lzma => {
                let stream = lzma_stream(spec, size_hint)?;
                let mut enc = xz2::write::XzEncoder::new_stream(ByteCounter::default(), stream);
                feed(&mut enc).map_err(io_err)?;
                Ok(enc.finish().map_err(io_err)?.count)
            }
            CodecId::External => self.run_external(spec, feed),
        }
    }

    fn run_external(
        &self,
        spec: &CompressorSpec,
        feed: &mut dyn FnMut(&mut dyn Write) -> io::Result<()>,
    ) -> Result<u64, CodecError> {
        let codec = spec.label().to_string();
        let io_err = |source| CodecError::Io {
            codec: codec.clone(),
            source,
        };
        let dir = self.tmpdir();
        let mut input = tempfile::Builder::new()
            .prefix("ncdkit-in-")
            .tempfile_in(&dir)
            .map_err(io_err)?;
        {
            let mut w = io::BufWriter::new(input.as_file_mut());
            feed(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        let output = tempfile::Builder::new()
            .prefix("ncdkit-out-")
            .tempfile_in(&dir)
            .map_err(io_err)?;
        let argv = spec
            .render_command(&path_str(input.path()), &path_str(output.path()))
            .unwrap_or_default();
        let Some((program, args)) = argv.split_first() else {
            return Err(CodecError::Init {
                codec,
                message: "empty command".into(),
            });
        };
        let mut cmd = Command::new(program);
        cmd.args(args).stdin(Stdio::null()).stderr(Stdio::piped());
        if spec.writes_output_file() {
            cmd.stdout(Stdio::null());
        } else {
            cmd.stdout(output.reopen().map_err(io_err)?);
        }
        let result = {
            let _slot = self.slots.acquire();
            cmd.output()
        };
        let out = match result {
            Ok(out) => out,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(CodecError::MissingExecutable {
                    codec,
                    program: program.clone(),
                })
            }
            Err(e) => return Err(io_err(e)),
        };
        if !out.status.success() {
            return Err(CodecError::ExternalStatus {
                codec,
                command: argv.join(" "),
                status: out.status.to_string(),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        Ok(std::fs::metadata(output.path()).map_err(io_err)?.len())
    }
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Dictionary actually handed to liblzma: the pinned size, shrunk to the
/// next power of two above the input length when that is smaller. A
/// dictionary larger than the input cannot be used by the match finder,
/// so the compressed stream length is unchanged; the shrink only saves
/// encoder memory and setup time.
pub fn effective_dict_size(pinned: u32, size_hint: Option<u64>) -> u32 {
    match size_hint {
        Some(n) => {
            let fit = n.max(MIN_DICT_BYTES as u64).next_power_of_two();
            u32::try_from(fit).map_or(pinned, |fit| fit.min(pinned))
        }
        None => pinned,
    }
}

fn lzma_stream(spec: &CompressorSpec, size_hint: Option<u64>) -> Result<xz2::stream::Stream, CodecError> {
    let init = |e: xz2::stream::Error| CodecError::Init {
        codec: spec.label().to_string(),
        message: e.to_string(),
    };
    let mut opts = xz2::stream::LzmaOptions::new_preset(spec.level()).map_err(init)?;
    let pinned = spec.dict_size_bytes().unwrap_or(LZMA_DICT_BYTES);
    opts.dict_size(effective_dict_size(pinned, size_hint));
    let mut filters = xz2::stream::Filters::new();
    filters.lzma2(&opts);
    xz2::stream::Stream::new_stream_encoder(&filters, xz2::stream::Check::Crc64).map_err(init)
}

impl CompressionBackend for Codecs {
    type Error = CodecError;

    fn compressed_len(&self, spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, CodecError> {
        self.length(spec, parts)
    }
}
