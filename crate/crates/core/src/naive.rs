//! Reference transform built by materializing and sorting every rotation.
//!
//! Quadratic in time and space; only meant as a test oracle for small texts.

use std::sync::Arc;

use thiserror::Error;

use crate::index::SaIndex;
use crate::ordering::{AlphabetOrdering, OrderingError};
use crate::text::TextBuffer;
use crate::transform::BwtTransform;

pub const DEFAULT_ORACLE_BOUND: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NaiveError {
    #[error("augmented length {len} exceeds the oracle bound {bound}")]
    OracleBoundExceeded { len: usize, bound: usize },
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}

/// Every rotation of the augmented text, sorted by rank. Element `i` is the
/// start position and the full rotation of matrix row `i`.
pub fn sorted_rotations(
    text: &TextBuffer,
    ordering: &AlphabetOrdering,
    bound: usize,
) -> Result<Vec<(usize, Vec<u8>)>, NaiveError> {
    ordering.check_covers(text)?;
    let m = text.augmented_len();
    if m > bound {
        return Err(NaiveError::OracleBoundExceeded { len: m, bound });
    }
    let augmented: Vec<u8> = (0..m).map(|i| text.augmented_byte(i)).collect();
    let mut rotations: Vec<(usize, Vec<u8>)> = (0..m)
        .map(|start| {
            let mut rot = augmented[start..].to_vec();
            rot.extend_from_slice(&augmented[..start]);
            (start, rot)
        })
        .collect();
    let key = |rot: &[u8]| -> Vec<u16> { rot.iter().map(|&b| ordering.rank(b).unwrap()).collect() };
    rotations.sort_by_cached_key(|(_, rot)| key(rot));
    Ok(rotations)
}

/// Oracle transform with the default bound of 4096 rows.
pub fn naive_bwt<I: SaIndex>(
    text: Arc<TextBuffer>,
    ordering: AlphabetOrdering,
) -> Result<BwtTransform<I>, NaiveError> {
    naive_bwt_bounded(text, ordering, DEFAULT_ORACLE_BOUND)
}

pub fn naive_bwt_bounded<I: SaIndex>(
    text: Arc<TextBuffer>,
    ordering: AlphabetOrdering,
    bound: usize,
) -> Result<BwtTransform<I>, NaiveError> {
    let rotations = sorted_rotations(&text, &ordering, bound)?;
    let sa = rotations.iter().map(|(s, _)| I::from_usize(*s)).collect();
    let transform = BwtTransform::from_suffix_array(text, ordering, sa);
    debug_assert!(rotations
        .iter()
        .zip(transform.last_column())
        .all(|((_, rot), &l)| *rot.last().unwrap() == l));
    Ok(transform)
}
