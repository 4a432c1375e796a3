//! Suffix array construction by induced sorting (SA-IS).
//!
//! The input must end with a unique, strictly smallest symbol (value 0).
//! Symbols are any unsigned integers below `alphabet_size`. Runs in O(n)
//! time using the output array, one byte per symbol of type flags, and the
//! reduced problem (at most n/2 symbols) as extra working space.

use std::cell::Cell;

use num_traits::AsPrimitive;

use crate::index::SaIndex;

thread_local! {
    static BUILDS: Cell<u64> = const { Cell::new(0) };
}

/// Number of top-level suffix-array constructions run on the current thread.
///
/// Lets callers verify that a code path reused existing data instead of
/// sorting again.
pub fn constructions_on_current_thread() -> u64 {
    BUILDS.with(|c| c.get())
}

/// Suffix array of `text`. `text` must end with the unique minimum symbol 0.
pub fn suffix_array<S, I>(text: &[S], alphabet_size: usize) -> Vec<I>
where
    S: Copy + AsPrimitive<usize>,
    I: SaIndex,
{
    BUILDS.with(|c| c.set(c.get() + 1));
    assert!(
        text.len() <= I::max_len(),
        "text of length {} does not fit the index type",
        text.len()
    );
    debug_assert!(text.last().is_none_or(|s| s.as_() == 0));
    let mut sa = vec![I::zero(); text.len()];
    sais(text, alphabet_size, &mut sa);
    sa
}

fn empty<I: SaIndex>() -> I {
    I::max_value()
}

fn classify<S: Copy + AsPrimitive<usize>>(s: &[S]) -> Vec<bool> {
    let n = s.len();
    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        let (a, b) = (s[i].as_(), s[i + 1].as_());
        stype[i] = a < b || (a == b && stype[i + 1]);
    }
    stype
}

#[inline]
fn is_lms(stype: &[bool], i: usize) -> bool {
    i > 0 && stype[i] && !stype[i - 1]
}

fn bucket_bounds<S: Copy + AsPrimitive<usize>>(s: &[S], k: usize, ends: bool) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &c in s {
        counts[c.as_()] += 1;
    }
    let mut sum = 0;
    for c in counts.iter_mut() {
        sum += *c;
        *c = if ends { sum } else { sum - *c };
    }
    counts
}

fn induce<S, I>(s: &[S], k: usize, stype: &[bool], sa: &mut [I])
where
    S: Copy + AsPrimitive<usize>,
    I: SaIndex,
{
    let n = s.len();
    let mut heads = bucket_bounds(s, k, false);
    for i in 0..n {
        let j = sa[i];
        if j == empty() || j == I::zero() {
            continue;
        }
        let p = j.idx() - 1;
        if !stype[p] {
            let c = s[p].as_();
            sa[heads[c]] = I::from_usize(p);
            heads[c] += 1;
        }
    }
    let mut tails = bucket_bounds(s, k, true);
    for i in (0..n).rev() {
        let j = sa[i];
        if j == empty() || j == I::zero() {
            continue;
        }
        let p = j.idx() - 1;
        if stype[p] {
            let c = s[p].as_();
            tails[c] -= 1;
            sa[tails[c]] = I::from_usize(p);
        }
    }
}

fn lms_substrings_equal<S: Copy + AsPrimitive<usize>>(
    s: &[S],
    stype: &[bool],
    a: usize,
    b: usize,
) -> bool {
    let n = s.len();
    if a == n - 1 || b == n - 1 {
        return a == b;
    }
    let mut d = 0;
    loop {
        if s[a + d].as_() != s[b + d].as_() || stype[a + d] != stype[b + d] {
            return false;
        }
        if d > 0 {
            let (ea, eb) = (is_lms(stype, a + d), is_lms(stype, b + d));
            if ea || eb {
                return ea && eb;
            }
        }
        d += 1;
    }
}

fn sais<S, I>(s: &[S], k: usize, sa: &mut [I])
where
    S: Copy + AsPrimitive<usize>,
    I: SaIndex,
{
    let n = s.len();
    match n {
        0 => return,
        1 => {
            sa[0] = I::zero();
            return;
        }
        _ => {}
    }
    let stype = classify(s);

    // Stage 1: sort LMS substrings.
    sa.fill(empty());
    let mut tails = bucket_bounds(s, k, true);
    for (i, c) in s.iter().enumerate().skip(1) {
        if is_lms(&stype, i) {
            let c = c.as_();
            tails[c] -= 1;
            sa[tails[c]] = I::from_usize(i);
        }
    }
    induce(s, k, &stype, sa);

    // Compact sorted LMS positions into the front of sa.
    let mut n1 = 0;
    for i in 0..n {
        let v = sa[i];
        if v != empty() && is_lms(&stype, v.idx()) {
            sa[n1] = sa[i];
            n1 += 1;
        }
    }

    // Name LMS substrings; names live at sa[n1 + pos / 2] since LMS
    // positions are at least two apart.
    sa[n1..].fill(empty());
    let mut name = 0usize;
    let mut prev: Option<usize> = None;
    for i in 0..n1 {
        let pos = sa[i].idx();
        if let Some(q) = prev {
            if !lms_substrings_equal(s, &stype, q, pos) {
                name += 1;
            }
        }
        prev = Some(pos);
        sa[n1 + pos / 2] = I::from_usize(name);
    }
    let names = name + 1;

    let mut reduced: Vec<I> = Vec::with_capacity(n1);
    reduced.extend(sa[n1..].iter().copied().filter(|&v| v != empty()));
    debug_assert_eq!(reduced.len(), n1);

    // Stage 2: sort the reduced problem.
    let mut reduced_sa = vec![I::zero(); n1];
    if names < n1 {
        sais(&reduced, names, &mut reduced_sa);
    } else {
        for (i, &c) in reduced.iter().enumerate() {
            reduced_sa[c.idx()] = I::from_usize(i);
        }
    }

    // Map reduced ranks back to text positions, reusing `reduced`.
    let mut j = 0;
    for i in 1..n {
        if is_lms(&stype, i) {
            reduced[j] = I::from_usize(i);
            j += 1;
        }
    }
    for r in reduced_sa.iter_mut() {
        *r = reduced[r.idx()];
    }
    drop(reduced);

    // Stage 3: place sorted LMS suffixes and induce the rest.
    sa.fill(empty());
    let mut tails = bucket_bounds(s, k, true);
    for &p in reduced_sa.iter().rev() {
        let c = s[p.idx()].as_();
        tails[c] -= 1;
        sa[tails[c]] = p;
    }
    drop(reduced_sa);
    induce(s, k, &stype, sa);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(s: &[u8]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..s.len()).collect();
        sa.sort_by(|&a, &b| s[a..].cmp(&s[b..]));
        sa
    }

    fn with_sentinel(body: &[u8]) -> Vec<u8> {
        let mut s: Vec<u8> = body.iter().map(|&b| b + 1).collect();
        s.push(0);
        s
    }

    #[test]
    fn small_cases() {
        for body in [
            &b""[..],
            b"a",
            b"aa",
            b"banana",
            b"mississippi",
            b"aaaaaaaa",
            b"abababab",
        ] {
            let s = with_sentinel(body);
            let sa: Vec<usize> = suffix_array(&s, 256);
            assert_eq!(sa, naive(&s), "{:?}", body);
        }
    }

    #[test]
    fn counts_constructions() {
        let before = constructions_on_current_thread();
        let _: Vec<u32> = suffix_array(&[2u8, 1, 0], 3);
        assert_eq!(constructions_on_current_thread(), before + 1);
    }

    proptest! {
        #[test]
        fn matches_naive_sort(body in proptest::collection::vec(0u8..4, 0..300)) {
            let s = with_sentinel(&body);
            let sa32: Vec<u32> = suffix_array(&s, 5);
            let sa: Vec<usize> = sa32.iter().map(|&x| x as usize).collect();
            prop_assert_eq!(sa, naive(&s));
        }

        #[test]
        fn matches_naive_sort_wide_alphabet(body in proptest::collection::vec(0u8..200, 0..300)) {
            let s = with_sentinel(&body);
            let sa: Vec<usize> = suffix_array(&s, 256);
            prop_assert_eq!(sa, naive(&s));
        }
    }
}
