//! Integer types usable as suffix-array entries.

use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{AsPrimitive, Bounded, PrimInt, Unsigned};

/// Unsigned integer type that stores row and text positions.
///
/// The transform, its inverse suffix array, and every intermediate array of
/// the induced-sorting construction are stored in this type, so picking `u32`
/// halves memory against `u64` for texts shorter than 4 GiB.
pub trait SaIndex:
    PrimInt + Unsigned + Bounded + Hash + Debug + Default + Send + Sync + AsPrimitive<usize> + 'static
{
    /// Largest augmented text length representable. One value is kept free
    /// as the empty-slot marker used during construction.
    fn max_len() -> usize {
        let max: usize = Self::max_value().as_();
        // usize::MAX for u64/usize on 64-bit targets; u32::MAX otherwise.
        max.saturating_sub(1)
    }

    fn from_usize(value: usize) -> Self;

    #[inline]
    fn idx(self) -> usize {
        self.as_()
    }
}

macro_rules! impl_sa_index {
    ($($t:ty),*) => {$(
        impl SaIndex for $t {
            #[inline]
            fn from_usize(value: usize) -> Self {
                debug_assert!(value <= <$t>::MAX as usize);
                value as $t
            }
        }
    )*};
}

impl_sa_index!(u32, u64, usize);
