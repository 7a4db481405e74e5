//! Normalized Compression Distance over an arbitrary combining function.
//!
//! ```text
//! NCD_{C,J}(X, Y) = (|C(J(X, Y))| - min(|C(X)|, |C(Y)|)) / max(|C(X)|, |C(Y)|)
//! ```
//!
//! With `J` = concatenation this is the classic NCD. `J(X, Y)` is always
//! built in that order; no averaging with `J(Y, X)` takes place.

use core::fmt;

use crate::codec::{CompressionBackend, CompressorSpec};
use crate::combiner::{combine_parts, CombinerSpec};

/// Values above this are treated as a broken codec rather than a distance.
pub const NCD_SANITY_CEILING: f64 = 1.5;

/// Both singleton lengths were zero, so the normalizer vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("degenerate input: max(|C(X)|, |C(Y)|) = 0")]
pub struct DegenerateInput;

#[derive(Debug, PartialEq, Eq)]
pub enum NcdError<E> {
    Degenerate,
    Compressor(E),
}

impl<E> From<DegenerateInput> for NcdError<E> {
    fn from(_: DegenerateInput) -> Self {
        NcdError::Degenerate
    }
}

impl<E: fmt::Display> fmt::Display for NcdError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NcdError::Degenerate => fmt::Display::fmt(&DegenerateInput, f),
            NcdError::Compressor(e) => write!(f, "compressor failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for NcdError<E> {}

impl<E> NcdError<E> {
    pub fn map<F>(self, f: impl FnOnce(E) -> F) -> NcdError<F> {
        match self {
            NcdError::Degenerate => NcdError::Degenerate,
            NcdError::Compressor(e) => NcdError::Compressor(f(e)),
        }
    }
}

/// The formula itself, from exact integer lengths. The only rounding is
/// the final division.
pub fn ncd_from_lengths(joined: u64, cx: u64, cy: u64) -> Result<f64, DegenerateInput> {
    let (lo, hi) = if cx <= cy { (cx, cy) } else { (cy, cx) };
    if hi == 0 {
        return Err(DegenerateInput);
    }
    let numerator = joined as i128 - lo as i128;
    Ok(numerator as f64 / hi as f64)
}

/// `NCD_{C,J}(x, y)` computed through `backend`.
pub fn ncd<B: CompressionBackend>(
    backend: &B,
    compressor: &CompressorSpec,
    combiner: &CombinerSpec,
    x: &[u8],
    y: &[u8],
) -> Result<f64, NcdError<B::Error>> {
    let cx = backend.compressed_len(compressor, &[x]).map_err(NcdError::Compressor)?;
    let cy = backend.compressed_len(compressor, &[y]).map_err(NcdError::Compressor)?;
    let parts = combine_parts(backend, combiner, x, y)?;
    let joined = backend
        .compressed_len(compressor, &parts)
        .map_err(NcdError::Compressor)?;
    Ok(ncd_from_lengths(joined, cx, cy)?)
}
