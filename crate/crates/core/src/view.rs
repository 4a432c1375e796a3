//! Windowed access to the conceptual Burrows-Wheeler matrix.
//!
//! Every cell is computed from the suffix array in O(1); a window request
//! allocates exactly the cells it returns.

use std::cmp::Ordering;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::SaIndex;
use crate::transform::BwtTransform;

pub const DEFAULT_WINDOW_ROWS: usize = 64;
pub const DEFAULT_WINDOW_COLS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("position ({row}, {col}) is outside the {size}x{size} matrix")]
    OutOfBounds { row: usize, col: usize, size: usize },
    #[error("window dimensions must be positive")]
    EmptyWindow,
    #[error("transforms were built from different texts")]
    TextMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub top_row: usize,
    pub left_col: usize,
    pub height: usize,
    pub width: usize,
}

impl WindowSpec {
    pub fn new(top_row: usize, left_col: usize, height: usize, width: usize) -> Self {
        Self {
            top_row,
            left_col,
            height,
            width,
        }
    }
}

/// A materialized rectangle of the matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowGrid {
    pub top_row: usize,
    pub left_col: usize,
    /// Rows actually returned after clipping.
    pub height: usize,
    /// Columns actually returned after clipping.
    pub width: usize,
    /// Row-major `height * width` cells.
    pub cells: Vec<u8>,
    /// `L` for each returned row, regardless of `left_col`.
    pub last_column: Vec<u8>,
    /// True when the rows are shown narrower than the full matrix.
    pub truncated: bool,
}

impl WindowGrid {
    pub fn row(&self, i: usize) -> &[u8] {
        &self.cells[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.cells.chunks(self.width.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Byte at (`row`, `col`) of the matrix.
pub fn cell<I: SaIndex>(t: &BwtTransform<I>, row: usize, col: usize) -> Result<u8, ViewError> {
    let m = t.len();
    if row >= m || col >= m {
        return Err(ViewError::OutOfBounds { row, col, size: m });
    }
    Ok(cell_unchecked(t, row, col))
}

#[inline]
pub(crate) fn cell_unchecked<I: SaIndex>(t: &BwtTransform<I>, row: usize, col: usize) -> u8 {
    let m = t.len();
    let mut pos = t.rotation_start(row) + col;
    if pos >= m {
        pos -= m;
    }
    t.text().augmented_byte(pos)
}

/// Materialize a window. Requests reaching past the matrix edge are clipped;
/// only an origin outside the matrix is an error.
pub fn window<I: SaIndex>(t: &BwtTransform<I>, spec: WindowSpec) -> Result<WindowGrid, ViewError> {
    let m = t.len();
    if spec.height == 0 || spec.width == 0 {
        return Err(ViewError::EmptyWindow);
    }
    if spec.top_row >= m || spec.left_col >= m {
        return Err(ViewError::OutOfBounds {
            row: spec.top_row,
            col: spec.left_col,
            size: m,
        });
    }
    let height = spec.height.min(m - spec.top_row);
    let width = spec.width.min(m - spec.left_col);
    let mut cells = Vec::with_capacity(height * width);
    for row in spec.top_row..spec.top_row + height {
        for col in spec.left_col..spec.left_col + width {
            cells.push(cell_unchecked(t, row, col));
        }
    }
    let last_column = t.last_column()[spec.top_row..spec.top_row + height].to_vec();
    Ok(WindowGrid {
        top_row: spec.top_row,
        left_col: spec.left_col,
        height,
        width,
        cells,
        last_column,
        truncated: width < m,
    })
}

/// Order of the rotation in `row` against `pattern`, looking at no more than
/// `pattern.len()` leading bytes. `Equal` means the rotation starts with it.
fn cmp_prefix<I: SaIndex>(t: &BwtTransform<I>, row: usize, ranks: &[u16]) -> Ordering {
    let ordering = t.ordering();
    let m = t.len();
    let start = t.rotation_start(row);
    for (k, &want) in ranks.iter().enumerate() {
        let have = ordering.rank_of(t.text().augmented_byte((start + k) % m));
        match have.cmp(&want) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Rows whose rotation begins with `pattern`, under the transform's own
/// ordering. Returns an empty range when nothing matches.
pub fn prefix_search<I: SaIndex>(t: &BwtTransform<I>, pattern: &[u8]) -> Range<usize> {
    let m = t.len();
    if pattern.is_empty() || pattern.len() > m {
        return 0..0;
    }
    let ordering = t.ordering();
    let Some(ranks) = pattern
        .iter()
        .map(|&b| ordering.rank(b))
        .collect::<Option<Vec<u16>>>()
    else {
        return 0..0;
    };
    let lo = partition_point(m, |row| cmp_prefix(t, row, &ranks) == Ordering::Less);
    let hi = lo
        + partition_point(m - lo, |i| {
            cmp_prefix(t, lo + i, &ranks) != Ordering::Greater
        });
    if lo == hi {
        0..0
    } else {
        lo..hi
    }
}

fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Nearest row matching `pattern` strictly after (or before) `from_row`.
pub fn find_match<I: SaIndex>(
    t: &BwtTransform<I>,
    pattern: &[u8],
    from_row: usize,
    direction: Direction,
) -> Option<usize> {
    let hits = prefix_search(t, pattern);
    if hits.is_empty() {
        return None;
    }
    match direction {
        Direction::Forward => {
            let row = hits.start.max(from_row.saturating_add(1));
            (row < hits.end).then_some(row)
        }
        Direction::Backward => {
            let row = hits.end.min(from_row);
            (row > hits.start).then(|| row - 1)
        }
    }
}

/// Row of `dst` holding the rotation shown in `row` of `src`.
pub fn locate_row<I: SaIndex, J: SaIndex>(
    src: &BwtTransform<I>,
    row: usize,
    dst: &BwtTransform<J>,
) -> Result<usize, ViewError> {
    let m = src.len();
    if !Arc::ptr_eq(src.text(), dst.text()) && src.text() != dst.text() {
        return Err(ViewError::TextMismatch);
    }
    if row >= m {
        return Err(ViewError::OutOfBounds {
            row,
            col: 0,
            size: m,
        });
    }
    Ok(dst.row_of(src.rotation_start(row)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{preset_ordering, Preset};
    use crate::text::TextBuffer;

    fn banana(preset: Preset) -> BwtTransform<u32> {
        let text = Arc::new(TextBuffer::new("banana").unwrap());
        let o = preset_ordering(preset, &text).unwrap();
        BwtTransform::build(text, o).unwrap()
    }

    #[test]
    fn cells() {
        let t = banana(Preset::Ascii);
        assert_eq!(cell(&t, 0, 0), Ok(b'$'));
        assert_eq!(cell(&t, 4, 0), Ok(b'b'));
        assert_eq!(cell(&t, 1, 6), Ok(b'n'));
        assert!(matches!(cell(&t, 7, 0), Err(ViewError::OutOfBounds { .. })));
        assert!(matches!(cell(&t, 0, 7), Err(ViewError::OutOfBounds { .. })));
    }

    #[test]
    fn windows() {
        let t = banana(Preset::Ascii);
        let g = window(&t, WindowSpec::new(0, 0, 1, 1)).unwrap();
        assert_eq!(g.cells, b"$");
        assert!(g.truncated);

        let g = window(&t, WindowSpec::new(5, 3, 10, 10)).unwrap();
        assert_eq!((g.height, g.width), (2, 4));
        assert_eq!(g.last_column, b"aa");
        assert_eq!(g.row(0), b"bana");

        let full = window(&t, WindowSpec::new(0, 0, 7, 7)).unwrap();
        assert!(!full.truncated);
        let rows: Vec<&[u8]> = full.rows().collect();
        assert_eq!(rows[4], b"banana$");
        assert_eq!(rows[1], b"a$banan");

        assert_eq!(
            window(&t, WindowSpec::new(7, 0, 1, 1)).unwrap_err(),
            ViewError::OutOfBounds {
                row: 7,
                col: 0,
                size: 7
            }
        );
        assert_eq!(
            window(&t, WindowSpec::new(0, 0, 0, 1)).unwrap_err(),
            ViewError::EmptyWindow
        );
    }

    #[test]
    fn searches() {
        let t = banana(Preset::Ascii);
        assert_eq!(prefix_search(&t, b"an"), 2..4);
        assert_eq!(prefix_search(&t, b"$"), 0..1);
        assert!(prefix_search(&t, b"zz").is_empty());
        assert!(prefix_search(&t, b"").is_empty());
        assert!(prefix_search(&t, b"nab").is_empty());
        // wraps through the end marker
        assert_eq!(prefix_search(&t, b"a$b"), 1..2);
        assert!(prefix_search(&t, b"banana$ba").is_empty());
    }

    #[test]
    fn navigation() {
        let t = banana(Preset::Ascii);
        assert_eq!(find_match(&t, b"an", 0, Direction::Forward), Some(2));
        assert_eq!(find_match(&t, b"an", 2, Direction::Forward), Some(3));
        assert_eq!(find_match(&t, b"an", 3, Direction::Forward), None);
        assert_eq!(find_match(&t, b"an", 2, Direction::Backward), None);
        assert_eq!(find_match(&t, b"an", 6, Direction::Backward), Some(3));
        assert_eq!(find_match(&t, b"zz", 0, Direction::Forward), None);
    }

    #[test]
    fn locate_across_orderings() {
        let ascii = banana(Preset::Ascii);
        let rev = banana(Preset::ReverseAscii);
        assert_eq!(locate_row(&ascii, 4, &rev), Ok(3));
        for i in 0..7 {
            assert_eq!(locate_row(&ascii, i, &ascii), Ok(i));
            let j = locate_row(&ascii, i, &rev).unwrap();
            assert_eq!(locate_row(&rev, j, &ascii), Ok(i));
        }
        let other = {
            let text = Arc::new(TextBuffer::new("bananb").unwrap());
            let o = preset_ordering(Preset::Ascii, &text).unwrap();
            BwtTransform::<u32>::build(text, o).unwrap()
        };
        assert_eq!(locate_row(&ascii, 0, &other), Err(ViewError::TextMismatch));
    }
}
