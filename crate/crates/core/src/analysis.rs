//! Primitives for reordering the alphabet to reduce the number of runs.
//!
//! Two manual strategies are supported. The first looks for runs of one byte
//! in `L` split by a few other rows, and moves the splitting rows away by
//! editing the ordering ([`run_breakers`], [`potential_runs`],
//! [`move_char`]). The second works per section (rows sharing a first
//! byte), collecting the byte comparisons that fix the order of adjacent
//! rows ([`sections`], [`distinguishing_pairs`]) and combining desired
//! comparisons into a new ordering ([`combine_constraints`]).
//! [`evaluate_ordering`] scores a candidate.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::escape::escape_byte;
use crate::index::SaIndex;
use crate::ordering::AlphabetOrdering;
use crate::stats::{runs, RunStatistics};
use crate::text::TextBuffer;
use crate::transform::{BwtTransform, TransformError};
use crate::view::cell_unchecked;

/// Largest gap (in rows) allowed between two runs of one potential run.
pub const DEFAULT_MAX_GAP: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("constraints form a cycle: {}", render_cycle(.0))]
    CycleDetected(Vec<u8>),
    #[error("no byte can be ordered below the end marker {}", escape_byte(*.0))]
    EndMarkerConstraint(u8),
    #[error("character {} is not in the ordering", escape_byte(*.0))]
    UnknownCharacter(u8),
    #[error("character {} cannot be moved relative to itself", escape_byte(*.0))]
    SameCharacter(u8),
    #[error("section {lo}..{hi} is not a section of this transform")]
    InvalidSection { lo: usize, hi: usize },
}

fn render_cycle(cycle: &[u8]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|&b| escape_byte(b)).collect();
    if let Some(first) = parts.first().cloned() {
        parts.push(first);
    }
    parts.join(" < ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunBreaker {
    pub row: usize,
    pub breaker: u8,
    pub flanked_by: u8,
}

/// Rows `j` with `L[j-1] == L[j+1] != L[j]`, ascending.
pub fn run_breakers_in(last_column: &[u8]) -> Vec<RunBreaker> {
    last_column
        .windows(3)
        .enumerate()
        .filter(|(_, w)| w[0] == w[2] && w[0] != w[1])
        .map(|(i, w)| RunBreaker {
            row: i + 1,
            breaker: w[1],
            flanked_by: w[0],
        })
        .collect()
}

pub fn run_breakers<I: SaIndex>(t: &BwtTransform<I>) -> Vec<RunBreaker> {
    run_breakers_in(t.last_column())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialRun {
    pub character: u8,
    /// Maximal runs of `character` in `L`, top to bottom.
    pub member_runs: Vec<Range<usize>>,
    /// Rows between consecutive member runs.
    pub gaps: Vec<Range<usize>>,
    pub total_length: usize,
    pub total_gap: usize,
}

impl PotentialRun {
    /// Rows spanned from the first member run to the last.
    pub fn span(&self) -> Range<usize> {
        self.member_runs[0].start..self.member_runs[self.member_runs.len() - 1].end
    }

    fn from_runs(character: u8, member_runs: Vec<Range<usize>>) -> Self {
        let gaps: Vec<Range<usize>> = member_runs
            .windows(2)
            .map(|w| w[0].end..w[1].start)
            .collect();
        Self {
            character,
            total_length: member_runs.iter().map(|r| r.len()).sum(),
            total_gap: gaps.iter().map(|g| g.len()).sum(),
            member_runs,
            gaps,
        }
    }
}

/// Candidate runs for merging, best first.
///
/// Runs of the same byte are chained while every gap between neighbours is
/// at most `max_gap` rows. Every chain of two or more runs is reported, plus
/// for each byte its longest run outside any chain. The end marker is never
/// reported. Ranking: longest total first, then smallest total gap, then
/// byte value, then position.
pub fn potential_runs_in(last_column: &[u8], end_marker: u8, max_gap: usize) -> Vec<PotentialRun> {
    let mut by_byte: BTreeMap<u8, Vec<Range<usize>>> = BTreeMap::new();
    for (b, start, len) in runs(last_column) {
        if b != end_marker {
            by_byte.entry(b).or_default().push(start..start + len);
        }
    }

    let mut out = Vec::new();
    for (byte, byte_runs) in by_byte {
        let mut best_single: Option<Range<usize>> = None;
        let mut chain: Vec<Range<usize>> = Vec::new();
        let mut flush =
            |chain: &mut Vec<Range<usize>>, best: &mut Option<Range<usize>>| match chain.len() {
                0 => {}
                1 => {
                    let r = chain.pop().unwrap();
                    if best.as_ref().is_none_or(|b| r.len() > b.len()) {
                        *best = Some(r);
                    }
                }
                _ => out.push(PotentialRun::from_runs(byte, std::mem::take(chain))),
            };
        for r in byte_runs {
            if let Some(prev) = chain.last() {
                if r.start - prev.end > max_gap {
                    flush(&mut chain, &mut best_single);
                }
            }
            chain.push(r);
        }
        flush(&mut chain, &mut best_single);
        if let Some(r) = best_single {
            out.push(PotentialRun::from_runs(byte, vec![r]));
        }
    }
    out.sort_by_key(|p| {
        (
            Reverse(p.total_length),
            p.total_gap,
            p.character,
            p.member_runs[0].start,
        )
    });
    out
}

pub fn potential_runs<I: SaIndex>(t: &BwtTransform<I>, max_gap: usize) -> Vec<PotentialRun> {
    potential_runs_in(t.last_column(), t.end_marker(), max_gap)
}

/// Maximal block of rows sharing the first byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub first_char: u8,
    pub rows: Range<usize>,
}

/// All sections in row order; the first is always the end-marker row.
pub fn sections<I: SaIndex>(t: &BwtTransform<I>) -> Vec<Section> {
    let text = t.text();
    let mut start = 0;
    std::iter::once(t.end_marker())
        .chain(t.ordering().order().iter().copied())
        .map(|b| {
            let count = if b == t.end_marker() {
                1
            } else {
                text.count(b)
            };
            let rows = start..start + count;
            start += count;
            Section {
                first_char: b,
                rows,
            }
        })
        .collect()
}

/// Where a harvested constraint came from: two adjacent rows and the depth
/// (longest common prefix) at which their rotations first differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintOrigin {
    pub upper_row: usize,
    pub lower_row: usize,
    pub depth: usize,
    /// `L` bytes of the two rows.
    pub upper_last: u8,
    pub lower_last: u8,
}

/// Requirement that `lesser` ranks below `greater`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderConstraint {
    pub lesser: u8,
    pub greater: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<ConstraintOrigin>,
    /// One side is the end marker, whose rank cannot change.
    #[serde(default)]
    pub immovable: bool,
}

impl OrderConstraint {
    pub fn new(lesser: u8, greater: u8) -> Self {
        Self {
            lesser,
            greater,
            origin: None,
            immovable: false,
        }
    }
}

/// The byte comparisons that fix the order of each adjacent row pair inside
/// `section`.
pub fn distinguishing_pairs<I: SaIndex>(
    t: &BwtTransform<I>,
    section: &Section,
) -> Result<Vec<OrderConstraint>, AnalysisError> {
    let m = t.len();
    let Section { first_char, rows } = section;
    let valid = rows.start < rows.end
        && rows.end <= m
        && t.first_byte(rows.start) == *first_char
        && t.first_byte(rows.end - 1) == *first_char
        && (rows.start == 0 || t.first_byte(rows.start - 1) != *first_char)
        && (rows.end == m || t.first_byte(rows.end) != *first_char);
    if !valid {
        return Err(AnalysisError::InvalidSection {
            lo: rows.start,
            hi: rows.end,
        });
    }
    let em = t.end_marker();
    let last = t.last_column();
    Ok((rows.start..rows.end.saturating_sub(1))
        .map(|upper| {
            let lower = upper + 1;
            // The end marker is unique, so the rotations differ before depth m.
            let depth = (1..m)
                .find(|&k| cell_unchecked(t, upper, k) != cell_unchecked(t, lower, k))
                .expect("distinct rotations");
            let lesser = cell_unchecked(t, upper, depth);
            let greater = cell_unchecked(t, lower, depth);
            OrderConstraint {
                lesser,
                greater,
                origin: Some(ConstraintOrigin {
                    upper_row: upper,
                    lower_row: lower,
                    depth,
                    upper_last: last[upper],
                    lower_last: last[lower],
                }),
                immovable: lesser == em || greater == em,
            }
        })
        .collect())
}

/// Merge constraints into a full ordering derived from `base`.
///
/// The result satisfies every constraint. A byte that must precede others is
/// pulled up to sit just ahead of the earliest (in `base`) byte it must
/// precede; bytes untouched by any constraint keep their `base` order.
/// Constraints whose lesser side is the end marker always hold and are
/// skipped.
pub fn combine_constraints(
    desired: &[OrderConstraint],
    base: &AlphabetOrdering,
) -> Result<AlphabetOrdering, AnalysisError> {
    let em = base.end_marker();
    let sigma = base.len();
    let index = |b: u8| -> Result<usize, AnalysisError> {
        if b == em {
            return Err(AnalysisError::EndMarkerConstraint(b));
        }
        base.rank(b)
            .map(|r| r as usize - 1)
            .ok_or(AnalysisError::UnknownCharacter(b))
    };

    // Nodes are base positions 0..sigma.
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sigma];
    for c in desired {
        if c.lesser == em {
            if c.greater == em {
                return Err(AnalysisError::CycleDetected(vec![em]));
            }
            index(c.greater)?;
            continue;
        }
        let lo = index(c.lesser)?;
        let hi = index(c.greater)?;
        if lo == hi {
            return Err(AnalysisError::CycleDetected(vec![c.lesser]));
        }
        succ[lo].insert(hi);
    }

    let topo = topological_order(&succ).map_err(|cycle| {
        AnalysisError::CycleDetected(cycle.into_iter().map(|i| base.order()[i]).collect())
    })?;

    // key(x) = smallest base position reachable from x, x included.
    let mut key: Vec<usize> = (0..sigma).collect();
    for &x in topo.iter().rev() {
        for &y in &succ[x] {
            key[x] = key[x].min(key[y]);
        }
    }

    let mut indegree = vec![0usize; sigma];
    for s in &succ {
        for &y in s {
            indegree[y] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..sigma)
        .filter(|&x| indegree[x] == 0)
        .map(|x| Reverse((key[x], x)))
        .collect();
    let mut order = Vec::with_capacity(sigma);
    while let Some(Reverse((_, x))) = ready.pop() {
        order.push(base.order()[x]);
        for &y in &succ[x] {
            indegree[y] -= 1;
            if indegree[y] == 0 {
                ready.push(Reverse((key[y], y)));
            }
        }
    }
    debug_assert_eq!(order.len(), sigma);
    let name = order
        .iter()
        .map(|&b| escape_byte(b))
        .collect::<Vec<_>>()
        .join("<");
    Ok(AlphabetOrdering::new(name, em, order).expect("permutation of a valid ordering"))
}

/// Kahn's algorithm; on failure returns one cycle of node indices.
fn topological_order(succ: &[BTreeSet<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    for s in succ {
        for &y in s {
            indegree[y] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&x| indegree[x] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &succ[x] {
            indegree[y] -= 1;
            if indegree[y] == 0 {
                stack.push(y);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every node left over still has a left-over predecessor, so walking
    // predecessors must revisit a node.
    let remaining: Vec<bool> = indegree.iter().map(|&d| d > 0).collect();
    let mut pred = vec![usize::MAX; n];
    for (x, s) in succ.iter().enumerate() {
        for &y in s {
            if remaining[x] && remaining[y] {
                pred[y] = x;
            }
        }
    }
    let mut seen_at = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut x = (0..n).find(|&x| remaining[x]).unwrap();
    while seen_at[x] == usize::MAX {
        seen_at[x] = path.len();
        path.push(x);
        x = pred[x];
    }
    let mut cycle = path[seen_at[x]..].to_vec();
    cycle.reverse();
    Err(cycle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Before,
    After,
}

/// Move `ch` to sit immediately before or after `anchor`, keeping every
/// other relative order.
pub fn move_char(
    base: &AlphabetOrdering,
    ch: u8,
    anchor: u8,
    placement: Placement,
) -> Result<AlphabetOrdering, AnalysisError> {
    for b in [ch, anchor] {
        if !base.order().contains(&b) {
            return Err(AnalysisError::UnknownCharacter(b));
        }
    }
    if ch == anchor {
        return Err(AnalysisError::SameCharacter(ch));
    }
    let mut order: Vec<u8> = base.order().iter().copied().filter(|&b| b != ch).collect();
    let at = order.iter().position(|&b| b == anchor).unwrap();
    let at = match placement {
        Placement::Before => at,
        Placement::After => at + 1,
    };
    order.insert(at, ch);
    let name = order
        .iter()
        .map(|&b| escape_byte(b))
        .collect::<Vec<_>>()
        .join("<");
    Ok(AlphabetOrdering::new(name, base.end_marker(), order)
        .expect("permutation of a valid ordering"))
}

/// Statistics of `text` under `ordering`, from a throwaway transform.
pub fn evaluate_ordering(
    text: &Arc<TextBuffer>,
    ordering: &AlphabetOrdering,
) -> Result<RunStatistics, TransformError> {
    if text.augmented_len() <= u32::max_len() {
        Ok(*BwtTransform::<u32>::build(text.clone(), ordering.clone())?.stats())
    } else {
        Ok(*BwtTransform::<u64>::build(text.clone(), ordering.clone())?.stats())
    }
}
