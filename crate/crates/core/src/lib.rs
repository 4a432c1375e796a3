//! Burrows-Wheeler transforms of byte texts under arbitrary alphabet
//! orderings.
//!
//! A [`TextBuffer`] holds the input and its automatically selected end
//! marker. An [`AlphabetOrdering`] ranks the bytes of the text (the end
//! marker always least). [`build_transform`] sorts the rotations in linear
//! time by induced sorting, and the [`view`] module reads any rectangle of
//! the conceptual matrix without materializing it. [`analysis`] holds the
//! primitives used to search for orderings with fewer runs, and [`session`]
//! persists multi-transform sessions.
//!
//! Transforms are generic over the integer type used for suffix-array
//! entries; [`Transform`] (32-bit) covers texts below 4 GiB and
//! [`WideTransform`] everything else.

pub mod analysis;
pub mod escape;
pub mod index;
pub mod naive;
pub mod ordering;
pub mod sais;
pub mod session;
pub mod stats;
pub mod text;
pub mod transform;
pub mod view;

use std::sync::Arc;

pub use analysis::{
    combine_constraints, distinguishing_pairs, evaluate_ordering, move_char, potential_runs,
    run_breakers, sections, AnalysisError, OrderConstraint, Placement, PotentialRun, RunBreaker,
    Section,
};
pub use index::SaIndex;
pub use ordering::{
    parse_ordering, preset_ordering, preset_ordering_with, AlphabetOrdering, OrderingError, Preset,
    PresetTables,
};
pub use stats::{rle_length, run_count, RunStatistics};
pub use text::{select_end_marker, TextBuffer, TextError};
pub use transform::{invert, BwtTransform, InvertError, TransformError};
pub use view::{
    cell, find_match, locate_row, prefix_search, window, Direction, ViewError, WindowGrid,
    WindowSpec,
};

/// Transform with 32-bit suffix-array entries.
pub type Transform = BwtTransform<u32>;
/// Transform with 64-bit suffix-array entries.
pub type WideTransform = BwtTransform<u64>;

/// Build the transform of `text` under `ordering` with 32-bit entries.
pub fn build_transform(
    text: Arc<TextBuffer>,
    ordering: AlphabetOrdering,
) -> Result<Transform, TransformError> {
    Transform::build(text, ordering)
}

/// Oracle transform from sorted, materialized rotations.
pub fn naive_bwt(
    text: Arc<TextBuffer>,
    ordering: AlphabetOrdering,
) -> Result<Transform, naive::NaiveError> {
    naive::naive_bwt(text, ordering)
}
