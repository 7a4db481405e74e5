//! Combining functions `J(X, Y)` fed to the compressor in place of plain
//! concatenation.
//!
//! Combiners return the combined string as an ordered list of borrowed
//! slices of `x` and `y`, so large inputs are never copied; [`combine`]
//! materializes the bytes when a caller wants them.

use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use crate::codec::{CompressionBackend, CompressorSpec};
use crate::ncd::{ncd_from_lengths, NcdError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CombinerSpec {
    /// `J(X, Y) = XY`, the classic NCD.
    Concat,
    /// Alternate size-`b` blocks of `x` and `y`, then the longer tail.
    Interleave { block_size_bytes: NonZeroUsize },
    /// Pair the most similar size-`b` chunks and place them side by side.
    NcdShuffle {
        block_size_bytes: NonZeroUsize,
        scorer: CompressorSpec,
    },
}

impl CombinerSpec {
    pub fn interleave(block_size_bytes: usize) -> Option<Self> {
        NonZeroUsize::new(block_size_bytes).map(|b| CombinerSpec::Interleave { block_size_bytes: b })
    }

    pub fn ncd_shuffle(block_size_bytes: usize, scorer: CompressorSpec) -> Option<Self> {
        NonZeroUsize::new(block_size_bytes).map(|b| CombinerSpec::NcdShuffle {
            block_size_bytes: b,
            scorer,
        })
    }

    pub fn block_size(&self) -> Option<NonZeroUsize> {
        match self {
            CombinerSpec::Concat => None,
            CombinerSpec::Interleave { block_size_bytes } | CombinerSpec::NcdShuffle { block_size_bytes, .. } => {
                Some(*block_size_bytes)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CombinerSpec::Concat => "concat",
            CombinerSpec::Interleave { .. } => "interleave",
            CombinerSpec::NcdShuffle { .. } => "ncd_shuffle",
        }
    }
}

/// Short label used for table columns: `concat`, `IL 1048576`, `NS 1048576`.
/// Shuffle labels also name the chunk scorer.
impl fmt::Display for CombinerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombinerSpec::Concat => f.write_str("concat"),
            CombinerSpec::Interleave { block_size_bytes } => write!(f, "IL {block_size_bytes}"),
            CombinerSpec::NcdShuffle {
                block_size_bytes,
                scorer,
            } => write!(f, "NS {block_size_bytes} ({})", scorer.label()),
        }
    }
}

/// Size-`b` blocks of `data`; the final block may be short. Empty input
/// yields no blocks.
pub fn blocks(data: &[u8], b: NonZeroUsize) -> core::slice::Chunks<'_, u8> {
    data.chunks(b.get())
}

/// `J_b(x, y)`: `x_1 y_1 x_2 y_2 ...` up to the shorter block count, then
/// the remaining blocks of the longer input. When `y` runs out first the
/// shorter input's final (possibly short) block still precedes the longer
/// input's tail.
pub fn interleave_parts<'a>(x: &'a [u8], y: &'a [u8], b: NonZeroUsize) -> Vec<&'a [u8]> {
    let mut xs = blocks(x, b);
    let mut ys = blocks(y, b);
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    loop {
        match (xs.next(), ys.next()) {
            (Some(a), Some(c)) => {
                out.push(a);
                out.push(c);
            }
            (Some(a), None) => {
                out.push(a);
                out.extend(xs.by_ref());
                break;
            }
            (None, Some(c)) => {
                out.push(c);
                out.extend(ys.by_ref());
                break;
            }
            (None, None) => break,
        }
    }
    out
}

pub fn interleave(x: &[u8], y: &[u8], b: NonZeroUsize) -> Vec<u8> {
    interleave_parts(x, y, b).concat()
}

/// Pairwise chunk distances, row-major: `scores[i * ny + j]` is the
/// concatenation NCD of x-chunk `i` followed by y-chunk `j` under `scorer`.
pub struct ChunkScores {
    pub nx: usize,
    pub ny: usize,
    pub scores: Vec<f64>,
}

impl ChunkScores {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.ny + j]
    }
}

pub fn chunk_scores<B: CompressionBackend>(
    backend: &B,
    scorer: &CompressorSpec,
    x: &[u8],
    y: &[u8],
    b: NonZeroUsize,
) -> Result<ChunkScores, NcdError<B::Error>> {
    let xc: Vec<&[u8]> = blocks(x, b).collect();
    let yc: Vec<&[u8]> = blocks(y, b).collect();
    let single = |c: &[u8]| backend.compressed_len(scorer, &[c]).map_err(NcdError::Compressor);
    let xl = xc.iter().map(|c| single(c)).collect::<Result<Vec<_>, _>>()?;
    let yl = yc.iter().map(|c| single(c)).collect::<Result<Vec<_>, _>>()?;
    let mut scores = Vec::with_capacity(xc.len() * yc.len());
    for (a, &la) in xc.iter().zip(&xl) {
        for (c, &lc) in yc.iter().zip(&yl) {
            let joined = backend.compressed_len(scorer, &[a, c]).map_err(NcdError::Compressor)?;
            scores.push(ncd_from_lengths(joined, la, lc)?);
        }
    }
    Ok(ChunkScores {
        nx: xc.len(),
        ny: yc.len(),
        scores,
    })
}

/// Greedy global-minimum matching: visit all `(i, j)` by ascending score,
/// ties by `(i, j)`, and keep every pair whose chunks are both still free.
/// Returned pairs are ordered by `i`.
pub fn greedy_pairing(scores: &ChunkScores) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = (0..scores.nx)
        .flat_map(|i| (0..scores.ny).map(move |j| (i, j)))
        .collect();
    order.sort_by(|&(i, j), &(k, l)| {
        scores
            .get(i, j)
            .total_cmp(&scores.get(k, l))
            .then(i.cmp(&k))
            .then(j.cmp(&l))
    });
    let mut x_used = alloc::vec![false; scores.nx];
    let mut y_used = alloc::vec![false; scores.ny];
    let mut pairs = Vec::with_capacity(scores.nx.min(scores.ny));
    for (i, j) in order {
        if !x_used[i] && !y_used[j] {
            x_used[i] = true;
            y_used[j] = true;
            pairs.push((i, j));
            if pairs.len() == scores.nx.min(scores.ny) {
                break;
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Lays out chunks according to `pairs` (sorted by x index): each x-chunk
/// immediately followed by its partner, then every unpaired chunk in
/// original order, x side first.
pub fn arrange_pairs<'a>(x: &'a [u8], y: &'a [u8], b: NonZeroUsize, pairs: &[(usize, usize)]) -> Vec<&'a [u8]> {
    let xc: Vec<&[u8]> = blocks(x, b).collect();
    let yc: Vec<&[u8]> = blocks(y, b).collect();
    let mut x_used = alloc::vec![false; xc.len()];
    let mut y_used = alloc::vec![false; yc.len()];
    let mut out = Vec::with_capacity(xc.len() + yc.len());
    for &(i, j) in pairs {
        out.push(xc[i]);
        out.push(yc[j]);
        x_used[i] = true;
        y_used[j] = true;
    }
    out.extend(xc.iter().zip(&x_used).filter(|(_, u)| !**u).map(|(c, _)| *c));
    out.extend(yc.iter().zip(&y_used).filter(|(_, u)| !**u).map(|(c, _)| *c));
    out
}

pub fn ncd_shuffle_parts<'a, B: CompressionBackend>(
    backend: &B,
    x: &'a [u8],
    y: &'a [u8],
    b: NonZeroUsize,
    scorer: &CompressorSpec,
) -> Result<Vec<&'a [u8]>, NcdError<B::Error>> {
    let scores = chunk_scores(backend, scorer, x, y, b)?;
    let pairs = greedy_pairing(&scores);
    Ok(arrange_pairs(x, y, b, &pairs))
}

pub fn ncd_shuffle<B: CompressionBackend>(
    backend: &B,
    x: &[u8],
    y: &[u8],
    b: NonZeroUsize,
    scorer: &CompressorSpec,
) -> Result<Vec<u8>, NcdError<B::Error>> {
    Ok(ncd_shuffle_parts(backend, x, y, b, scorer)?.concat())
}

/// `J(x, y)` as borrowed slices. Only NCD-shuffle touches the backend.
pub fn combine_parts<'a, B: CompressionBackend>(
    backend: &B,
    spec: &CombinerSpec,
    x: &'a [u8],
    y: &'a [u8],
) -> Result<Vec<&'a [u8]>, NcdError<B::Error>> {
    match spec {
        CombinerSpec::Concat => Ok(alloc::vec![x, y]),
        CombinerSpec::Interleave { block_size_bytes } => Ok(interleave_parts(x, y, *block_size_bytes)),
        CombinerSpec::NcdShuffle {
            block_size_bytes,
            scorer,
        } => ncd_shuffle_parts(backend, x, y, *block_size_bytes, scorer),
    }
}

pub fn combine<B: CompressionBackend>(
    backend: &B,
    spec: &CombinerSpec,
    x: &[u8],
    y: &[u8],
) -> Result<Vec<u8>, NcdError<B::Error>> {
    Ok(combine_parts(backend, spec, x, y)?.concat())
}
