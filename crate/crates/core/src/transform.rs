//! Burrows-Wheeler transforms of a text under an alphabet ordering.
//!
//! A transform stores the suffix array of the augmented text (sorted by the
//! ordering's ranks), its inverse, and the last column `L`. The m×m matrix
//! of rotations is never built: since the end marker is unique and least,
//! sorting suffixes sorts rotations, and row `i` of the matrix is the
//! rotation starting at `sa[i]`.

use std::sync::Arc;

use thiserror::Error;

use crate::escape::escape_byte;
use crate::index::SaIndex;
use crate::ordering::{AlphabetOrdering, OrderingError};
use crate::sais;
use crate::stats::RunStatistics;
use crate::text::TextBuffer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error("augmented text of length {len} exceeds the index type limit of {max}")]
    TooLarge { len: usize, max: usize },
    #[error("last column is not valid for this text: {0}")]
    InvalidLastColumn(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("not a valid transform: {0}")]
    NotAValidTransform(String),
}

/// A built transform.
#[derive(Debug, Clone)]
pub struct BwtTransform<I: SaIndex> {
    text: Arc<TextBuffer>,
    ordering: AlphabetOrdering,
    sa: Vec<I>,
    isa: Vec<I>,
    last_column: Vec<u8>,
    stats: RunStatistics,
}

impl<I: SaIndex> BwtTransform<I> {
    /// Construct the transform of `text` under `ordering`.
    pub fn build(
        text: Arc<TextBuffer>,
        ordering: AlphabetOrdering,
    ) -> Result<Self, TransformError> {
        ordering.check_covers(&text)?;
        let m = text.augmented_len();
        if m > I::max_len() {
            return Err(TransformError::TooLarge {
                len: m,
                max: I::max_len(),
            });
        }
        let sa = {
            // Ranks fit in a byte: the end marker takes one of the 256 values.
            let mut ranked: Vec<u8> = Vec::with_capacity(m);
            ranked.extend(text.data().iter().map(|&b| ordering.rank_of(b) as u8));
            ranked.push(0);
            sais::suffix_array::<u8, I>(&ranked, ordering.len() + 1)
        };
        Ok(Self::from_suffix_array(text, ordering, sa))
    }

    /// Assemble a transform from a suffix array already known to be sorted
    /// under `ordering`.
    pub(crate) fn from_suffix_array(
        text: Arc<TextBuffer>,
        ordering: AlphabetOrdering,
        sa: Vec<I>,
    ) -> Self {
        let m = sa.len();
        let mut isa = vec![I::zero(); m];
        for (row, &pos) in sa.iter().enumerate() {
            isa[pos.idx()] = I::from_usize(row);
        }
        let last_column: Vec<u8> = sa
            .iter()
            .map(|&pos| text.augmented_byte((pos.idx() + m - 1) % m))
            .collect();
        let stats = RunStatistics::of(&last_column, text.end_marker());
        Self {
            text,
            ordering,
            sa,
            isa,
            last_column,
            stats,
        }
    }

    /// Rebuild a transform from a previously computed last column without
    /// sorting. The column is checked against the text: it must invert,
    /// under `ordering`, to exactly the text's bytes. The suffix array is
    /// recovered by walking the LF mapping.
    pub fn from_last_column(
        text: Arc<TextBuffer>,
        ordering: AlphabetOrdering,
        last_column: Vec<u8>,
    ) -> Result<Self, TransformError> {
        ordering.check_covers(&text)?;
        let m = text.augmented_len();
        if m > I::max_len() {
            return Err(TransformError::TooLarge {
                len: m,
                max: I::max_len(),
            });
        }
        if last_column.len() != m {
            return Err(TransformError::InvalidLastColumn(format!(
                "length {} but the augmented text has length {m}",
                last_column.len()
            )));
        }
        let lf: Vec<I> = lf_mapping(&last_column, &ordering)
            .map_err(|e| TransformError::InvalidLastColumn(e.to_string()))?;

        let empty = I::max_value();
        let mut sa = vec![empty; m];
        let mut row = 0usize;
        let mut pos = m - 1;
        for _ in 0..m {
            if sa[row] != empty {
                return Err(TransformError::InvalidLastColumn(
                    "LF walk revisits a row".into(),
                ));
            }
            sa[row] = I::from_usize(pos);
            let prev = (pos + m - 1) % m;
            if last_column[row] != text.augmented_byte(prev) {
                return Err(TransformError::InvalidLastColumn(format!(
                    "row {row} holds {} where the text has {}",
                    escape_byte(last_column[row]),
                    escape_byte(text.augmented_byte(prev))
                )));
            }
            row = lf[row].idx();
            pos = prev;
        }
        drop(lf);
        let mut isa = vec![I::zero(); m];
        for (r, &p) in sa.iter().enumerate() {
            isa[p.idx()] = I::from_usize(r);
        }
        let stats = RunStatistics::of(&last_column, text.end_marker());
        Ok(Self {
            text,
            ordering,
            sa,
            isa,
            last_column,
            stats,
        })
    }

    pub fn text(&self) -> &Arc<TextBuffer> {
        &self.text
    }

    pub fn ordering(&self) -> &AlphabetOrdering {
        &self.ordering
    }

    pub fn sa(&self) -> &[I] {
        &self.sa
    }

    pub fn isa(&self) -> &[I] {
        &self.isa
    }

    /// The transform output `L`.
    pub fn last_column(&self) -> &[u8] {
        &self.last_column
    }

    pub fn stats(&self) -> &RunStatistics {
        &self.stats
    }

    /// Number of rows (and columns) `m` of the conceptual matrix.
    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// Text position where the rotation in `row` starts.
    #[inline]
    pub fn rotation_start(&self, row: usize) -> usize {
        self.sa[row].idx()
    }

    /// Row holding the rotation that starts at text position `pos`.
    #[inline]
    pub fn row_of(&self, pos: usize) -> usize {
        self.isa[pos].idx()
    }

    /// First column byte of `row`.
    #[inline]
    pub fn first_byte(&self, row: usize) -> u8 {
        self.text.augmented_byte(self.rotation_start(row))
    }

    pub fn end_marker(&self) -> u8 {
        self.text.end_marker()
    }

    /// Compare two bytes of this transform's alphabet by rank.
    #[inline]
    pub fn cmp_bytes(&self, a: u8, b: u8) -> std::cmp::Ordering {
        self.ordering.rank_of(a).cmp(&self.ordering.rank_of(b))
    }
}

/// LF mapping of `last_column`: the row holding the rotation that starts one
/// position earlier. Occurrences of equal bytes keep their relative order.
pub(crate) fn lf_mapping<I: SaIndex>(
    last_column: &[u8],
    ordering: &AlphabetOrdering,
) -> Result<Vec<I>, InvertError> {
    let em = ordering.end_marker();
    let sigma = ordering.len() + 1;
    let mut counts = vec![0usize; sigma];
    for &b in last_column {
        let r = ordering.rank(b).ok_or_else(|| {
            InvertError::NotAValidTransform(format!(
                "byte {} is not in the ordering",
                escape_byte(b)
            ))
        })?;
        counts[r as usize] += 1;
    }
    if counts[0] != 1 {
        return Err(InvertError::NotAValidTransform(format!(
            "expected exactly one end marker {}, found {}",
            escape_byte(em),
            counts[0]
        )));
    }
    let mut next = vec![0usize; sigma];
    let mut sum = 0;
    for (r, &c) in counts.iter().enumerate() {
        next[r] = sum;
        sum += c;
    }
    Ok(last_column
        .iter()
        .map(|&b| {
            let r = ordering.rank_of(b) as usize;
            let row = next[r];
            next[r] += 1;
            I::from_usize(row)
        })
        .collect())
}

/// Recover the original text (without end marker) from a last column.
pub fn invert(last_column: &[u8], ordering: &AlphabetOrdering) -> Result<Vec<u8>, InvertError> {
    if last_column.len() < u32::MAX as usize {
        invert_with::<u32>(last_column, ordering)
    } else {
        invert_with::<u64>(last_column, ordering)
    }
}

fn invert_with<I: SaIndex>(
    last_column: &[u8],
    ordering: &AlphabetOrdering,
) -> Result<Vec<u8>, InvertError> {
    let lf: Vec<I> = lf_mapping(last_column, ordering)?;
    let em = ordering.end_marker();
    let n = last_column.len() - 1;
    let mut out = vec![0u8; n];
    let mut row = 0usize;
    for k in (0..n).rev() {
        let b = last_column[row];
        if b == em {
            return Err(InvertError::NotAValidTransform(format!(
                "LF walk reached the end marker after {} of {} steps",
                n - 1 - k,
                n + 1
            )));
        }
        out[k] = b;
        row = lf[row].idx();
    }
    if last_column[row] != em || lf[row].idx() != 0 {
        return Err(InvertError::NotAValidTransform(
            "LF walk does not close into a single cycle".into(),
        ));
    }
    Ok(out)
}
