use std::io;
use std::path::Path;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use ncdkit_core::codec::LZMA_DICT_BYTES;
use serde::Serialize;

use crate::report::write_json;

pub const RUN_MANIFEST_FILE: &str = "run-manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct CodecPin {
    pub codec: &'static str,
    pub implementation: &'static str,
    pub parameters: String,
}

pub fn codec_pins() -> Vec<CodecPin> {
    vec![
        CodecPin {
            codec: "deflate",
            implementation: "zlib stream via flate2 1.x (miniz_oxide)",
            parameters: "level from spec (default 9), 32 KiB window".into(),
        },
        CodecPin {
            codec: "bzip2",
            implementation: "libbzip2 via bzip2 0.5",
            parameters: "level from spec (default 9 = 900 kB block), work factor 30".into(),
        },
        CodecPin {
            codec: "lzma",
            implementation: "liblzma via xz2 0.1, .xz container, CRC64",
            parameters: format!(
                "LZMA2 preset from spec (default 9), dictionary {LZMA_DICT_BYTES} bytes unless the spec pins another, \
                 reduced to the smallest power of two >= input size (min 4096)"
            ),
        },
        CodecPin {
            codec: "external",
            implementation: "user command over temporary files",
            parameters: "command template recorded in the spec".into(),
        },
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusInfo {
    pub source: String,
    pub documents: usize,
    pub total_bytes: u64,
    pub digest: String,
}

/// Written beside every command's outputs. Everything except the
/// timestamps and timings is a function of the flags and the corpus.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub codec_pins: Vec<CodecPin>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<CorpusInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<String>,
    pub outputs: Vec<String>,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
    pub phases: Vec<Phase>,
}

fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).unwrap_or(Duration::ZERO).as_secs_f64()
}

/// Collects phase timings while a command runs.
pub struct RunRecorder {
    started: SystemTime,
    clock: Instant,
    phase_start: Instant,
    phases: Vec<Phase>,
}

impl Default for RunRecorder {
    fn default() -> Self {
        Self::new()
    }
}

impl RunRecorder {
    pub fn new() -> Self {
        let now = Instant::now();
        RunRecorder {
            started: SystemTime::now(),
            clock: now,
            phase_start: now,
            phases: Vec::new(),
        }
    }

    /// Closes the current phase under `name`.
    pub fn phase(&mut self, name: &str) {
        let now = Instant::now();
        self.phases.push(Phase {
            name: name.to_string(),
            seconds: (now - self.phase_start).as_secs_f64(),
        });
        self.phase_start = now;
    }

    pub fn finish(
        self,
        command: &str,
        config: serde_json::Value,
        corpus: Option<CorpusInfo>,
        cache: Option<String>,
        outputs: Vec<String>,
    ) -> RunManifest {
        RunManifest {
            tool: "ncdkit",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().collect(),
            config,
            codec_pins: codec_pins(),
            corpus,
            cache,
            outputs,
            started_unix_seconds: unix_seconds(self.started),
            wall_clock_seconds: self.clock.elapsed().as_secs_f64(),
            phases: self.phases,
        }
    }
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> io::Result<()> {
        write_json(path, self)
    }
}
