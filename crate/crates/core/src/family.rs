//! Subsets of `[n]`, families of them, and the lattice primitives the rest
//! of the crate is built on.
//!
//! A [`SetMask`] packs a subset of `[n]` into one machine word: element `i`
//! (1-based) lives at bit `i - 1`. Families are always kept in canonical
//! order, which is by size first and then by the numeric value of the
//! membership word.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 64;

/// Word with the low `n` bits set.
#[inline]
pub fn full_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// One subset of `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SetMask {
    bits: u64,
    n: u8,
}

impl SetMask {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        check_n(n)?;
        if bits & !full_bits(n) != 0 {
            return invalid(format!("membership word {bits:#x} has elements above n = {n}"));
        }
        Ok(SetMask { bits, n: n as u8 })
    }

    /// Caller guarantees `n <= 64` and that `bits` has no element above `n`.
    #[inline]
    pub(crate) fn from_raw(n: usize, bits: u64) -> Self {
        debug_assert!(n <= MAX_N && bits & !full_bits(n) == 0);
        SetMask { bits, n: n as u8 }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, full_bits(n))
    }

    /// Builds a set from 1-based element labels.
    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return invalid(format!("element {e} outside [1, {n}]"));
            }
            bits |= 1 << (e - 1);
        }
        Ok(SetMask { bits, n: n as u8 })
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    /// Number of elements.
    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= self.n() && self.bits >> (element - 1) & 1 == 1
    }

    #[inline]
    pub fn is_subset(self, other: SetMask) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn is_strict_subset(self, other: SetMask) -> bool {
        self.bits != other.bits && self.is_subset(other)
    }

    #[inline]
    pub fn union(self, other: SetMask) -> SetMask {
        SetMask { bits: self.bits | other.bits, n: self.n.max(other.n) }
    }

    #[inline]
    pub fn intersection(self, other: SetMask) -> SetMask {
        SetMask { bits: self.bits & other.bits, n: self.n.max(other.n) }
    }

    #[inline]
    pub fn difference(self, other: SetMask) -> SetMask {
        SetMask { bits: self.bits & !other.bits, n: self.n }
    }

    /// Complement within `[n]`.
    #[inline]
    pub fn complement(self) -> SetMask {
        SetMask { bits: !self.bits & full_bits(self.n()), n: self.n }
    }

    /// The same subset viewed inside a larger ground set.
    pub fn widen(self, n: usize) -> Result<SetMask> {
        if n < self.n() {
            return invalid(format!("cannot narrow a set on n = {} to n = {n}", self.n));
        }
        SetMask::new(n, self.bits)
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        BitIter(self.bits).map(|b| b + 1)
    }

    /// The `n`-character membership line used by the family file format.
    pub fn to_line(self) -> String {
        (0..self.n())
            .map(|i| if self.bits >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl Ord for SetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then(self.bits.cmp(&other.bits))
            .then(self.n.cmp(&other.n))
    }
}

impl PartialOrd for SetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Iterator over the zero-based positions of set bits.
#[derive(Clone)]
pub(crate) struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// All `l`-subsets of `[n]` as membership words, in increasing numeric
/// order (which is canonical order within a level).
pub fn level_words(n: usize, l: usize) -> LevelWords {
    let next = if l > n || n > MAX_N {
        None
    } else {
        Some(full_bits(l))
    };
    LevelWords { next, n }
}

pub struct LevelWords {
    next: Option<u64>,
    n: usize,
}

impl Iterator for LevelWords {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let x = self.next?;
        self.next = if x == 0 {
            None
        } else {
            // Gosper's hack
            let c = x & x.wrapping_neg();
            match x.checked_add(c) {
                Some(r) if r & !full_bits(self.n) == 0 => Some((((r ^ x) >> 2) / c) | r),
                _ => None,
            }
        };
        Some(x)
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return invalid(format!("ground-set size {n} outside [1, {MAX_N}]"));
    }
    Ok(())
}

/// A duplicate-free family of subsets of `[n]`, held in canonical order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    sets: Vec<SetMask>,
}

impl SetFamily {
    /// Builds a family, rejecting duplicates and members from another ground set.
    pub fn new(n: usize, sets: impl IntoIterator<Item = SetMask>) -> Result<Self> {
        check_n(n)?;
        let mut v: Vec<SetMask> = sets.into_iter().collect();
        for s in &v {
            if s.n() != n {
                return invalid(format!("member {s} lives on n = {}, family on n = {n}", s.n()));
            }
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate member {}", w[0]));
        }
        Ok(SetFamily { n, sets: v })
    }

    /// Builds a family from membership words; duplicates are an error.
    pub fn from_words(n: usize, words: impl IntoIterator<Item = u64>) -> Result<Self> {
        let sets = words
            .into_iter()
            .map(|w| SetMask::new(n, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    /// Like [`SetFamily::from_words`] but merges duplicates.
    pub fn from_words_dedup(n: usize, words: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<SetMask> = words
            .into_iter()
            .map(|w| SetMask::new(n, w))
            .collect::<Result<_>>()?;
        Self::new(n, set)
    }

    /// Convenience constructor from 1-based element lists.
    pub fn from_element_lists(n: usize, lists: &[&[usize]]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| SetMask::from_elements(n, l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    /// The whole lattice `2^[n]`.
    pub fn power_set(n: usize) -> Result<Self> {
        check_n(n)?;
        if n > 28 {
            return Err(Error::Capability(format!("power set of [{n}] is too large")));
        }
        Self::from_words(n, 0..(1u64 << n))
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    #[inline]
    pub fn sets(&self) -> &[SetMask] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = SetMask> + '_ {
        self.sets.iter().copied()
    }

    pub fn words(&self) -> impl Iterator<Item = u64> + '_ {
        self.sets.iter().map(|s| s.bits())
    }

    pub fn contains(&self, s: SetMask) -> bool {
        self.sets.binary_search(&s).is_ok()
    }

    pub fn contains_word(&self, w: u64) -> bool {
        w & !full_bits(self.n) == 0 && self.contains(SetMask::from_raw(self.n, w))
    }

    /// Union of all members.
    pub fn support(&self) -> u64 {
        self.sets.iter().fold(0, |acc, s| acc | s.bits())
    }

    /// A copy with `s` added; adding a member again is an error.
    pub fn with(&self, s: SetMask) -> Result<Self> {
        let mut sets = self.sets.clone();
        sets.push(s);
        Self::new(self.n, sets)
    }

    /// A copy with `s` removed (no-op if absent).
    pub fn without(&self, s: SetMask) -> Self {
        SetFamily { n: self.n, sets: self.sets.iter().copied().filter(|&t| t != s).collect() }
    }

    /// Members of size `l`.
    pub fn level(&self, l: usize) -> LevelSlice {
        LevelSlice {
            n: self.n,
            l,
            sets: self.sets.iter().copied().filter(|s| s.len() == l).collect(),
        }
    }

    /// Same members on a larger ground set.
    pub fn widen(&self, n: usize) -> Result<Self> {
        let sets = self.sets.iter().map(|s| s.widen(n)).collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, ", self.n)?;
        f.debug_list().entries(&self.sets).finish()?;
        f.write_str(")")
    }
}

/// The members of one level `l` of some family on `[n]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LevelSlice {
    n: usize,
    l: usize,
    sets: Vec<SetMask>,
}

impl LevelSlice {
    pub fn new(n: usize, l: usize, sets: impl IntoIterator<Item = SetMask>) -> Result<Self> {
        check_n(n)?;
        if l > n {
            return invalid(format!("level {l} above n = {n}"));
        }
        let mut v: Vec<SetMask> = sets.into_iter().collect();
        for s in &v {
            if s.n() != n || s.len() != l {
                return invalid(format!("{s} does not belong to level {l} of [{n}]"));
            }
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate member {}", w[0]));
        }
        Ok(LevelSlice { n, l, sets: v })
    }

    pub fn from_words(n: usize, l: usize, words: impl IntoIterator<Item = u64>) -> Result<Self> {
        let sets = words
            .into_iter()
            .map(|w| SetMask::new(n, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, l, sets)
    }

    /// Every `l`-subset of `[n]`.
    pub fn full(n: usize, l: usize) -> Result<Self> {
        check_n(n)?;
        if l > n {
            return invalid(format!("level {l} above n = {n}"));
        }
        Ok(LevelSlice {
            n,
            l,
            sets: level_words(n, l).map(|w| SetMask::from_raw(n, w)).collect(),
        })
    }

    /// Internal constructor for already sorted, deduplicated, sized words.
    pub(crate) fn from_sorted_words(n: usize, l: usize, words: Vec<u64>) -> Self {
        LevelSlice { n, l, sets: words.into_iter().map(|w| SetMask::from_raw(n, w)).collect() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[SetMask] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = SetMask> + '_ {
        self.sets.iter().copied()
    }

    pub fn contains(&self, s: SetMask) -> bool {
        self.sets.binary_search(&s).is_ok()
    }

    pub fn contains_word(&self, w: u64) -> bool {
        self.contains(SetMask::from_raw(self.n, w & full_bits(self.n)))
    }

    /// Complements of all members, a slice of level `n - l`.
    pub fn complements(&self) -> LevelSlice {
        let mut words: Vec<u64> = self.sets.iter().map(|s| s.complement().bits()).collect();
        words.sort_unstable();
        LevelSlice::from_sorted_words(self.n, self.n - self.l, words)
    }

    /// Level sets of `[n]` that are not members.
    pub fn missing(&self) -> LevelSlice {
        let words = level_words(self.n, self.l).filter(|&w| !self.contains_word(w)).collect();
        LevelSlice::from_sorted_words(self.n, self.l, words)
    }

    pub fn into_family(self) -> SetFamily {
        SetFamily { n: self.n, sets: self.sets }
    }
}

/// The shadow: every `(l-1)`-set contained in some member.
///
/// Level 0 input has an empty shadow.
pub fn shadow(fam: &LevelSlice) -> LevelSlice {
    if fam.l == 0 {
        return LevelSlice::from_sorted_words(fam.n, 0, Vec::new());
    }
    let mut out = BTreeSet::new();
    for s in fam.iter() {
        let w = s.bits();
        for b in BitIter(w) {
            out.insert(w & !(1 << b));
        }
    }
    LevelSlice::from_sorted_words(fam.n, fam.l - 1, out.into_iter().collect())
}

/// The shade: every `(l+1)`-set of `[n]` containing some member.
pub fn shade(fam: &LevelSlice, n: usize) -> Result<LevelSlice> {
    if n != fam.n {
        return invalid(format!("slice lives on n = {}, shade requested on n = {n}", fam.n));
    }
    if fam.l >= n {
        return invalid(format!("level {} has no shade in [{n}]", fam.l));
    }
    let full = full_bits(n);
    let mut out = BTreeSet::new();
    for s in fam.iter() {
        let w = s.bits();
        for b in BitIter(!w & full) {
            out.insert(w | 1 << b);
        }
    }
    Ok(LevelSlice::from_sorted_words(n, fam.l + 1, out.into_iter().collect()))
}

/// `fam × {∅, block}`: every member, plus every member joined with `block`,
/// on the ground set `[new_n]`.
pub fn product(fam: &SetFamily, block: SetMask, new_n: usize) -> Result<SetFamily> {
    check_n(new_n)?;
    if new_n < fam.n() {
        return invalid(format!("new ground size {new_n} is below the family's n = {}", fam.n()));
    }
    if block.bits() & !full_bits(new_n) != 0 {
        return invalid(format!("block {block} does not fit in [{new_n}]"));
    }
    if let Some(s) = fam.iter().find(|s| s.bits() & block.bits() != 0) {
        return invalid(format!("block {block} overlaps member {s}"));
    }
    let lower = fam.words();
    let upper = fam.words().map(|w| w | block.bits());
    if block.is_empty() {
        return SetFamily::from_words(new_n, lower);
    }
    let out = SetFamily::from_words(new_n, lower.chain(upper))?;
    debug_assert_eq!(out.len(), 2 * fam.len());
    Ok(out)
}
