//! Ordinal patterns of order `h`: permutations of `{0, ..., h}` that list the
//! positions of a window of `h + 1` values from largest to smallest.
//!
//! A window `x` has pattern `(p_0, ..., p_h)` when `x[p_0] >= ... >= x[p_h]`.
//! Equal values are ordered by position, larger index first, so every finite
//! window has exactly one pattern.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order a [`Pattern`] can hold. `16!` still fits the `u64` index.
pub const MAX_ORDER: usize = 15;

/// Default cap for routines that materialize all `(h + 1)!` patterns.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

const FACTORIALS: [u64; MAX_ORDER + 2] = {
    let mut table = [1u64; MAX_ORDER + 2];
    let mut i = 1;
    while i < MAX_ORDER + 2 {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
};

/// `(h + 1)!`, the number of patterns of order `h`.
pub fn pattern_count(order: usize) -> u64 {
    FACTORIALS[order + 1]
}

/// A permutation of `{0, ..., h}` together with its lexicographic (Lehmer) index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Pattern {
    perm: [u8; MAX_ORDER + 1],
    order: u8,
    index: u64,
}

impl Pattern {
    /// Builds a pattern from an explicit permutation tuple.
    pub fn new(perm: &[usize]) -> Result<Self> {
        if perm.len() < 2 {
            return Err(Error::WindowTooShort { len: perm.len(), min: 2 });
        }
        let order = perm.len() - 1;
        check_order(order)?;
        let mut seen = [false; MAX_ORDER + 1];
        let mut buf = [0u8; MAX_ORDER + 1];
        for (slot, &v) in buf.iter_mut().zip(perm) {
            if v > order || seen[v] {
                return Err(Error::InvalidPermutation(order));
            }
            seen[v] = true;
            *slot = v as u8;
        }
        Ok(Self::from_raw(buf, order))
    }

    fn from_raw(perm: [u8; MAX_ORDER + 1], order: usize) -> Self {
        let index = lehmer_index(&perm[..=order]);
        Pattern {
            perm,
            order: order as u8,
            index,
        }
    }

    /// Inverse of [`Pattern::index`].
    pub fn from_index(order: usize, index: u64) -> Result<Self> {
        check_order(order)?;
        if index >= pattern_count(order) {
            return Err(Error::IndexOutOfRange { order, index });
        }
        let mut remaining: [u8; MAX_ORDER + 1] = [0; MAX_ORDER + 1];
        for (i, slot) in remaining.iter_mut().enumerate() {
            *slot = i as u8;
        }
        let mut pool = order + 1;
        let mut rest = index;
        let mut perm = [0u8; MAX_ORDER + 1];
        for (i, slot) in perm.iter_mut().take(order + 1).enumerate() {
            let f = FACTORIALS[order - i];
            let digit = (rest / f) as usize;
            rest %= f;
            *slot = remaining[digit];
            remaining.copy_within(digit + 1..pool, digit);
            pool -= 1;
        }
        Ok(Pattern {
            perm,
            order: order as u8,
            index,
        })
    }

    /// Number of increments `h`; the window length is `h + 1`.
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.perm[..=self.order()]
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.as_slice().iter().map(|&v| v as usize).collect()
    }

    /// Lexicographic rank among all patterns of the same order.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Reflection on a horizontal line: `(p_h, ..., p_0)`.
    /// This is the pattern of the negated window.
    pub fn space_reverse(&self) -> Self {
        let h = self.order();
        let mut perm = [0u8; MAX_ORDER + 1];
        for (dst, &src) in perm.iter_mut().zip(self.perm[..=h].iter().rev()) {
            *dst = src;
        }
        Self::from_raw(perm, h)
    }

    /// Reflection on a vertical line: `(h - p_0, ..., h - p_h)`.
    /// This is the pattern of the time-reversed window.
    pub fn time_reverse(&self) -> Self {
        let h = self.order();
        let mut perm = [0u8; MAX_ORDER + 1];
        for (dst, &src) in perm.iter_mut().zip(&self.perm[..=h]) {
            *dst = h as u8 - src;
        }
        Self::from_raw(perm, h)
    }

    pub fn reversal_group(&self) -> ReversalGroup {
        ReversalGroup::of(self)
    }

    /// Strictly increasing window `(h, h - 1, ..., 0)`.
    pub fn increasing(order: usize) -> Result<Self> {
        let perm: Vec<usize> = (0..=order).rev().collect();
        Self::new(&perm)
    }

    /// Strictly decreasing window `(0, 1, ..., h)`.
    pub fn decreasing(order: usize) -> Result<Self> {
        let perm: Vec<usize> = (0..=order).collect();
        Self::new(&perm)
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then(self.index.cmp(&other.index))
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.as_slice().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl TryFrom<Vec<usize>> for Pattern {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Pattern::new(&v)
    }
}

impl From<Pattern> for Vec<usize> {
    fn from(p: Pattern) -> Self {
        p.to_vec()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::OrderOutOfRange {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

fn lehmer_index(perm: &[u8]) -> u64 {
    let n = perm.len();
    let mut index = 0u64;
    for i in 0..n {
        let smaller_after = perm[i + 1..].iter().filter(|&&v| v < perm[i]).count() as u64;
        index += smaller_after * FACTORIALS[n - 1 - i];
    }
    index
}

/// `true` when position `a` is placed before position `b` in the pattern.
#[inline]
fn precedes(window: &[f64], a: usize, b: usize) -> bool {
    window[a] > window[b] || (window[a] == window[b] && a > b)
}

/// Sorts positions of `window` into descending order (ties: larger index first).
fn sort_positions(window: &[f64], out: &mut [u8]) {
    for i in 0..window.len() {
        let mut j = i;
        while j > 0 && precedes(window, i, out[j - 1] as usize) {
            out[j] = out[j - 1];
            j -= 1;
        }
        out[j] = i as u8;
    }
}

fn check_window(window: &[f64]) -> Result<usize> {
    if window.len() < 2 {
        return Err(Error::WindowTooShort {
            len: window.len(),
            min: 2,
        });
    }
    let order = window.len() - 1;
    check_order(order)?;
    if let Some(index) = window.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(order)
}

/// Ordinal pattern of a window of `h + 1` values.
pub fn encode_pattern(window: &[f64]) -> Result<Pattern> {
    let order = check_window(window)?;
    Ok(encode_unchecked(window, order))
}

/// Hot-path encoder for callers that validated length and finiteness up front.
#[inline]
pub(crate) fn encode_unchecked(window: &[f64], order: usize) -> Pattern {
    let mut perm = [0u8; MAX_ORDER + 1];
    sort_positions(window, &mut perm[..=order]);
    Pattern::from_raw(perm, order)
}

/// Writes the descending position order of `window` into `out` without
/// computing a Lehmer index. `out.len()` must equal `window.len()`.
#[inline]
pub(crate) fn encode_perm_into(window: &[f64], out: &mut [u8]) {
    sort_positions(window, out);
}

/// Pattern of the path `(0, x_1, x_1 + x_2, ..., x_1 + ... + x_h)` built from increments.
pub fn pattern_of_increments(increments: &[f64]) -> Result<Pattern> {
    if increments.is_empty() {
        return Err(Error::WindowTooShort { len: 0, min: 1 });
    }
    let order = increments.len();
    check_order(order)?;
    if let Some(index) = increments.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let mut path = [0.0f64; MAX_ORDER + 1];
    cumulate(increments, &mut path[..=order]);
    Ok(encode_unchecked(&path[..=order], order))
}

#[inline]
pub(crate) fn cumulate(increments: &[f64], path: &mut [f64]) {
    path[0] = 0.0;
    let mut acc = 0.0;
    for (slot, x) in path[1..].iter_mut().zip(increments) {
        acc += x;
        *slot = acc;
    }
}

/// Ranks `R_i = #{j : x_i <= x_j}` of a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVector {
    pub ranks: Vec<usize>,
}

impl RankVector {
    pub fn of(window: &[f64]) -> Result<Self> {
        check_window(window)?;
        let ranks = window
            .iter()
            .map(|xi| window.iter().filter(|&xj| xi <= xj).count())
            .collect();
        Ok(RankVector { ranks })
    }

    /// Pattern implied by tie-free ranks: `p_j = i` iff `R_i = j + 1`.
    pub fn to_pattern(&self) -> Result<Pattern> {
        let n = self.ranks.len();
        let mut perm = alloc::vec![usize::MAX; n];
        for (i, &r) in self.ranks.iter().enumerate() {
            if r == 0 || r > n || perm[r - 1] != usize::MAX {
                return Err(Error::InvalidPermutation(n.saturating_sub(1)));
            }
            perm[r - 1] = i;
        }
        Pattern::new(&perm)
    }
}

/// The closure `{p, S(p), T(p), T(S(p))}` of a pattern under space and time reversal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReversalGroup {
    members: Vec<Pattern>,
}

impl ReversalGroup {
    pub fn of(p: &Pattern) -> Self {
        let s = p.space_reverse();
        let t = p.time_reverse();
        let ts = s.time_reverse();
        let mut members = alloc::vec![*p, s, t, ts];
        members.sort();
        members.dedup();
        ReversalGroup { members }
    }

    /// Members in lexicographic order.
    pub fn members(&self) -> &[Pattern] {
        &self.members
    }

    /// Lexicographically smallest member.
    pub fn canonical(&self) -> Pattern {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn order(&self) -> usize {
        self.members[0].order()
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.members.binary_search(p).is_ok()
    }

    /// The group containing the turning-point patterns of order 2:
    /// `{(0,2,1), (1,0,2), (1,2,0), (2,0,1)}`.
    pub fn turning_points() -> Self {
        // (2,0,1) is always a valid order-2 permutation.
        ReversalGroup::of(&Pattern::new(&[2, 0, 1]).expect("valid permutation"))
    }
}

/// All `(h + 1)!` patterns of order `h` in lexicographic order.
pub fn enumerate_patterns(order: usize) -> Result<Vec<Pattern>> {
    enumerate_patterns_capped(order, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_patterns_capped(order: usize, cap: usize) -> Result<Vec<Pattern>> {
    if order == 0 || order > cap.min(MAX_ORDER) {
        return Err(Error::OrderOutOfRange {
            order,
            max: cap.min(MAX_ORDER),
        });
    }
    (0..pattern_count(order))
        .map(|i| Pattern::from_index(order, i))
        .collect()
}

/// Partition of all patterns of order `h` into reversal groups, ordered by canonical member.
pub fn partition_groups(order: usize) -> Result<Vec<ReversalGroup>> {
    partition_groups_capped(order, DEFAULT_ENUMERATION_CAP)
}

pub fn partition_groups_capped(order: usize, cap: usize) -> Result<Vec<ReversalGroup>> {
    let all = enumerate_patterns_capped(order, cap)?;
    let mut assigned = alloc::vec![false; all.len()];
    let mut groups = Vec::new();
    for p in &all {
        if assigned[p.index() as usize] {
            continue;
        }
        let g = p.reversal_group();
        for m in g.members() {
            assigned[m.index() as usize] = true;
        }
        groups.push(g);
    }
    Ok(groups)
}
