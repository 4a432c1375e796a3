//! Run statistics over a last column.

use serde::{Deserialize, Serialize};

/// Longest run representable by one length byte of the run-length encoding.
pub const MAX_RLE_CHUNK: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunStatistics {
    pub end_marker_used: u8,
    /// Size `n` of the input, without the end marker.
    pub original_size: usize,
    /// Number of maximal runs `r` in the last column.
    pub run_count: usize,
    /// Bytes of the run-length encoding: a (byte, length) pair per run,
    /// with runs longer than 255 split.
    pub rle_length: usize,
}

impl RunStatistics {
    pub fn of(last_column: &[u8], end_marker: u8) -> Self {
        Self {
            end_marker_used: end_marker,
            original_size: last_column.len().saturating_sub(1),
            run_count: run_count(last_column),
            rle_length: rle_length(last_column),
        }
    }
}

/// Maximal runs of equal bytes in `bytes`, as `(byte, start, len)`.
pub fn runs(bytes: &[u8]) -> impl Iterator<Item = (u8, usize, usize)> + '_ {
    let mut start = 0;
    std::iter::from_fn(move || {
        let &b = bytes.get(start)?;
        let len = bytes[start..].iter().take_while(|&&x| x == b).count();
        let run = (b, start, len);
        start += len;
        Some(run)
    })
}

/// Number of maximal runs. Zero for an empty sequence.
pub fn run_count(bytes: &[u8]) -> usize {
    if bytes.is_empty() {
        return 0;
    }
    1 + bytes.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Length in bytes of the fixed-width run-length encoding.
pub fn rle_length(bytes: &[u8]) -> usize {
    runs(bytes)
        .map(|(_, _, len)| 2 * len.div_ceil(MAX_RLE_CHUNK))
        .sum()
}

/// The fixed-width run-length encoding itself: `(byte, length)` pairs.
pub fn rle_encode(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(rle_length(bytes));
    for (b, _, mut len) in runs(bytes) {
        while len > 0 {
            let chunk = len.min(MAX_RLE_CHUNK);
            out.push(b);
            out.push(chunk as u8);
            len -= chunk;
        }
    }
    out
}
