//! Compressor descriptors and the backend trait that turns them into
//! compressed lengths.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// Dictionary size pinned for LZMA preset 9 (the liblzma preset default).
pub const LZMA_DICT_BYTES: u32 = 64 << 20;

/// Placeholder replaced by the path of the input file in external commands.
pub const INPUT_PLACEHOLDER: &str = "{input}";
/// Optional placeholder for an output file; without it stdout is captured.
pub const OUTPUT_PLACEHOLDER: &str = "{output}";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecId {
    /// zlib container around DEFLATE (32 KB window).
    Deflate,
    /// bzip2; the level is the block size in units of 100 KB.
    Bzip2,
    /// xz container around LZMA2.
    Lzma,
    /// Any command line tool, driven through temporary files.
    External,
}

impl CodecId {
    pub const BUILTIN: [CodecId; 3] = [CodecId::Deflate, CodecId::Bzip2, CodecId::Lzma];

    pub fn name(self) -> &'static str {
        match self {
            CodecId::Deflate => "deflate",
            CodecId::Bzip2 => "bzip2",
            CodecId::Lzma => "lzma",
            CodecId::External => "external",
        }
    }

    /// Valid `level` values for this codec.
    pub fn level_range(self) -> RangeInclusive<u32> {
        match self {
            CodecId::Deflate => 0..=9,
            CodecId::Bzip2 => 1..=9,
            CodecId::Lzma => 0..=9,
            CodecId::External => 0..=0,
        }
    }

    /// Level used when none is given: maximum effort for every built-in.
    pub fn default_level(self) -> u32 {
        match self {
            CodecId::External => 0,
            _ => 9,
        }
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodecId {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deflate" => Ok(CodecId::Deflate),
            "bzip2" => Ok(CodecId::Bzip2),
            "lzma" => Ok(CodecId::Lzma),
            "external" => Ok(CodecId::External),
            other => Err(SpecError::UnknownCodec(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("unknown codec `{0}` (valid codecs: deflate, bzip2, lzma, external)")]
    UnknownCodec(String),
    #[error("level {level} is outside the valid range {min}..={max} for {codec}")]
    LevelOutOfRange {
        codec: CodecId,
        level: u32,
        min: u32,
        max: u32,
    },
    #[error("external codec requires a command template")]
    MissingCommand,
    #[error("command template is only allowed for the external codec, not {0}")]
    UnexpectedCommand(CodecId),
    #[error("command template must contain `{{input}}` exactly once, found {0} occurrences")]
    InputPlaceholder(usize),
    #[error("command template may contain `{{output}}` at most once, found {0} occurrences")]
    OutputPlaceholder(usize),
    #[error("dictionary size is only meaningful for lzma")]
    UnexpectedDictSize,
    #[error("lzma dictionary size {0} is outside 4096..=1610612736")]
    DictSizeOutOfRange(u32),
    #[error("label must not be empty")]
    EmptyLabel,
}

/// A compressor together with its frozen parameters.
///
/// Construction validates the level range and the external command
/// template; deserialization goes through the same checks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCompressorSpec", into = "RawCompressorSpec")]
pub struct CompressorSpec {
    id: CodecId,
    level: u32,
    label: String,
    command: Option<String>,
    dict_size_bytes: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawCompressorSpec {
    id: CodecId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dict_size_bytes: Option<u32>,
}

impl TryFrom<RawCompressorSpec> for CompressorSpec {
    type Error = SpecError;

    fn try_from(raw: RawCompressorSpec) -> Result<Self, SpecError> {
        let level = raw.level.unwrap_or_else(|| raw.id.default_level());
        let dict = match (raw.id, raw.dict_size_bytes) {
            (CodecId::Lzma, None) => Some(LZMA_DICT_BYTES),
            (_, d) => d,
        };
        let label = raw.label.unwrap_or_else(|| default_label(raw.id, level));
        let spec = CompressorSpec {
            id: raw.id,
            level,
            label,
            command: raw.command,
            dict_size_bytes: dict,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<CompressorSpec> for RawCompressorSpec {
    fn from(spec: CompressorSpec) -> Self {
        RawCompressorSpec {
            id: spec.id,
            level: Some(spec.level),
            label: Some(spec.label),
            command: spec.command,
            dict_size_bytes: spec.dict_size_bytes,
        }
    }
}

fn default_label(id: CodecId, level: u32) -> String {
    match id {
        CodecId::External => "external".to_string(),
        _ => format!("{}-{}", id.name(), level),
    }
}

impl CompressorSpec {
    /// Built-in codec at the given level, labelled `<codec>-<level>`.
    pub fn new(id: CodecId, level: u32) -> Result<Self, SpecError> {
        if id == CodecId::External {
            return Err(SpecError::MissingCommand);
        }
        let spec = CompressorSpec {
            id,
            level,
            label: default_label(id, level),
            command: None,
            dict_size_bytes: (id == CodecId::Lzma).then_some(LZMA_DICT_BYTES),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Built-in codec at its pinned experiment level (9 for all three).
    pub fn builtin(id: CodecId) -> Self {
        Self::new(id, id.default_level()).expect("default levels are valid")
    }

    pub fn deflate() -> Self {
        Self::builtin(CodecId::Deflate)
    }

    pub fn bzip2() -> Self {
        Self::builtin(CodecId::Bzip2)
    }

    pub fn lzma() -> Self {
        Self::builtin(CodecId::Lzma)
    }

    /// External command, e.g. `"ppmz c {input} {output}"` or `"mytool -c {input}"`.
    pub fn external(command: impl Into<String>, label: impl Into<String>) -> Result<Self, SpecError> {
        let spec = CompressorSpec {
            id: CodecId::External,
            level: 0,
            label: label.into(),
            command: Some(command.into()),
            dict_size_bytes: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Result<Self, SpecError> {
        self.label = label.into();
        self.validate()?;
        Ok(self)
    }

    pub fn with_dict_size(mut self, bytes: u32) -> Result<Self, SpecError> {
        self.dict_size_bytes = Some(bytes);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let range = self.id.level_range();
        if !range.contains(&self.level) {
            return Err(SpecError::LevelOutOfRange {
                codec: self.id,
                level: self.level,
                min: *range.start(),
                max: *range.end(),
            });
        }
        if self.label.is_empty() {
            return Err(SpecError::EmptyLabel);
        }
        match (self.id, &self.command) {
            (CodecId::External, None) => return Err(SpecError::MissingCommand),
            (CodecId::External, Some(cmd)) => validate_template(cmd)?,
            (id, Some(_)) => return Err(SpecError::UnexpectedCommand(id)),
            (_, None) => {}
        }
        match (self.id, self.dict_size_bytes) {
            (CodecId::Lzma, Some(d)) if !(4096..=(1536 << 20)).contains(&d) => {
                return Err(SpecError::DictSizeOutOfRange(d))
            }
            (CodecId::Lzma, _) | (_, None) => {}
            (_, Some(_)) => return Err(SpecError::UnexpectedDictSize),
        }
        Ok(())
    }

    pub fn id(&self) -> CodecId {
        self.id
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn command(&self) -> Option<&str> {
        self.command.as_deref()
    }

    /// LZMA dictionary size; `None` for other codecs.
    pub fn dict_size_bytes(&self) -> Option<u32> {
        self.dict_size_bytes
    }

    /// Canonical parameter string. Two specs with equal fingerprints
    /// produce identical compressed lengths, whatever their labels.
    pub fn fingerprint(&self) -> String {
        match self.id {
            CodecId::External => format!("external:{}", self.command.as_deref().unwrap_or("")),
            CodecId::Lzma => format!(
                "lzma:{}:d{}",
                self.level,
                self.dict_size_bytes.unwrap_or(LZMA_DICT_BYTES)
            ),
            id => format!("{}:{}", id.name(), self.level),
        }
    }

    /// Expands the external command template into an argument vector.
    /// Returns `None` for built-in codecs.
    pub fn render_command(&self, input: &str, output: &str) -> Option<Vec<String>> {
        let template = self.command.as_deref()?;
        Some(
            template
                .split_whitespace()
                .map(|tok| {
                    tok.replace(INPUT_PLACEHOLDER, input)
                        .replace(OUTPUT_PLACEHOLDER, output)
                })
                .collect(),
        )
    }

    /// True when the external command writes to `{output}` rather than stdout.
    pub fn writes_output_file(&self) -> bool {
        self.command.as_deref().is_some_and(|c| c.contains(OUTPUT_PLACEHOLDER))
    }
}

fn validate_template(cmd: &str) -> Result<(), SpecError> {
    let inputs = cmd.matches(INPUT_PLACEHOLDER).count();
    if inputs != 1 {
        return Err(SpecError::InputPlaceholder(inputs));
    }
    let outputs = cmd.matches(OUTPUT_PLACEHOLDER).count();
    if outputs > 1 {
        return Err(SpecError::OutputPlaceholder(outputs));
    }
    Ok(())
}

/// `|C(X)|` for one codec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedLength {
    pub byte_count: u64,
    pub codec: String,
}

/// Anything that can report the exact compressed length of a byte
/// sequence under a [`CompressorSpec`].
///
/// `parts` are compressed as if they were one concatenated buffer; an
/// implementation must return the same length for any split of the same
/// bytes.
pub trait CompressionBackend {
    type Error;

    fn compressed_len(&self, spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, Self::Error>;
}

impl<B: CompressionBackend + ?Sized> CompressionBackend for &B {
    type Error = B::Error;

    fn compressed_len(&self, spec: &CompressorSpec, parts: &[&[u8]]) -> Result<u64, Self::Error> {
        (**self).compressed_len(spec, parts)
    }
}
