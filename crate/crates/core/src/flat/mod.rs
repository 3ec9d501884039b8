//! Saturating flat antichains: families living on two consecutive levels
//! `l` and `l + 1`.
//!
//! A two-level family is a saturating antichain exactly when
//!
//! * the shadow of the upper level is the complement of the lower level,
//!   and
//! * the upper level is every `(l+1)`-set none of whose `l`-subsets is in
//!   the lower level.
//!
//! The second condition is "all subsets are non-members", not the
//! existential shade of the non-members; the existential reading would
//! force a triple with one member pair into the upper level, which breaks
//! the antichain property.

mod bounds;
mod graph;

use std::fmt;

use crate::error::{invalid, Result};
use crate::family::{check_n, full_bits, level_words, shadow, BitIter, LevelSlice, SetFamily, SetMask};

pub use bounds::{german_bound, german_bound_raw, lflat_bounds, Density, TuranDensity};
pub use graph::{
    flat_min_bnb, flat_min_exact, pair_index, pair_words, FlatSearchMode, NonEdgeGraph,
    FLAT_BNB_MAX_N, FLAT_EXHAUSTIVE_MAX_N,
};

/// A family `low ∪ high` with `low` on level `l` and `high` on level `l + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatFamily {
    n: usize,
    l: usize,
    low: LevelSlice,
    high: LevelSlice,
}

impl FlatFamily {
    pub fn new(n: usize, l: usize, low: LevelSlice, high: LevelSlice) -> Result<Self> {
        check_n(n)?;
        if l + 1 > n {
            return invalid(format!("levels {l} and {} do not both fit in [{n}]", l + 1));
        }
        if low.n() != n || low.level() != l || high.n() != n || high.level() != l + 1 {
            return invalid(format!("slices must be levels {l} and {} of [{n}]", l + 1));
        }
        Ok(FlatFamily { n, l, low, high })
    }

    /// Splits a family whose members all have size `l` or `l + 1`.
    pub fn from_family(fam: &SetFamily, l: usize) -> Result<Self> {
        if let Some(s) = fam.iter().find(|s| s.len() != l && s.len() != l + 1) {
            return invalid(format!("{s} is on neither level {l} nor {}", l + 1));
        }
        Self::new(fam.n(), l, fam.level(l), fam.level(l + 1))
    }

    /// Picks `l` from the smallest member size (0 for an empty family).
    pub fn infer(fam: &SetFamily) -> Result<Self> {
        let l = fam.iter().map(|s| s.len()).min().unwrap_or(0);
        let l = if fam.iter().all(|s| s.len() == l) && l > 0 && l == fam.n() { l - 1 } else { l };
        Self::from_family(fam, l)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> usize {
        self.l
    }

    pub fn low(&self) -> &LevelSlice {
        &self.low
    }

    pub fn high(&self) -> &LevelSlice {
        &self.high
    }

    pub fn len(&self) -> usize {
        self.low.len() + self.high.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_family(&self) -> SetFamily {
        SetFamily::new(self.n, self.low.iter().chain(self.high.iter()))
            .expect("levels are disjoint")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatCondition {
    /// `Δ(high) = level l \ low`
    Shadow,
    /// `high = { G on level l+1 : no l-subset of G is in low }`
    Shade,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlatDefect {
    /// The set is a member but is comparable with another member.
    Comparable,
    /// The set is not a member but could be added without creating a
    /// comparable pair.
    Addable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatCertificate {
    Valid,
    Violation {
        set: SetMask,
        condition: FlatCondition,
        defect: FlatDefect,
    },
}

impl FlatCertificate {
    pub fn is_valid(&self) -> bool {
        matches!(self, FlatCertificate::Valid)
    }
}

impl fmt::Display for FlatCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatCertificate::Valid => f.write_str("valid"),
            FlatCertificate::Violation { set, condition, defect } => {
                write!(f, "flat_violation\nviolating {set}\ncondition {condition}\ndefect {defect}")
            }
        }
    }
}

impl fmt::Display for FlatCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlatCondition::Shadow => "shadow",
            FlatCondition::Shade => "shade",
        })
    }
}

impl fmt::Display for FlatDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlatDefect::Comparable => "comparable",
            FlatDefect::Addable => "addable",
        })
    }
}

/// Checks both flat-antichain conditions; the first violating set in
/// canonical order is reported, shadow condition first.
pub fn flat_check(fam: &FlatFamily) -> FlatCertificate {
    let (n, l) = (fam.n, fam.l);
    let full = full_bits(n);
    for w in level_words(n, l) {
        let in_low = fam.low.contains_word(w);
        let in_shadow = BitIter(!w & full).any(|b| fam.high.contains_word(w | 1 << b));
        if in_low == in_shadow {
            return FlatCertificate::Violation {
                set: SetMask::from_raw(n, w),
                condition: FlatCondition::Shadow,
                defect: if in_low { FlatDefect::Comparable } else { FlatDefect::Addable },
            };
        }
    }
    for w in level_words(n, l + 1) {
        let in_high = fam.high.contains_word(w);
        let over_low = BitIter(w).any(|b| fam.low.contains_word(w & !(1 << b)));
        if in_high == over_low {
            return FlatCertificate::Violation {
                set: SetMask::from_raw(n, w),
                condition: FlatCondition::Shade,
                defect: if in_high { FlatDefect::Comparable } else { FlatDefect::Addable },
            };
        }
    }
    FlatCertificate::Valid
}

fn with_shadow_complement(n: usize, l: usize, high: Vec<u64>) -> FlatFamily {
    let high = LevelSlice::from_sorted_words(n, l + 1, high);
    let low = shadow(&high).missing();
    FlatFamily { n, l, low, high }
}

/// The extremal `{2,3}` family: `A = {1..a}`, `B = {a+1..2a}` with
/// `a = ⌊n/4⌋`, matching `{i, a+i}`, `C` the rest. Triples meeting `C` and
/// containing a matching edge form the upper level; the lower level is
/// every pair outside their shadow.
pub fn flat_construction_23(n: usize) -> Result<FlatFamily> {
    if n < 4 {
        return invalid(format!("the {{2,3}} construction needs n >= 4, got {n}"));
    }
    flat_construction_23_with(n, n / 4)
}

/// [`flat_construction_23`] with an explicit part size `a = |A| = |B|`.
pub fn flat_construction_23_with(n: usize, a: usize) -> Result<FlatFamily> {
    check_n(n)?;
    if n < 3 || 2 * a > n {
        return invalid(format!("need n >= 3 and 2a <= n, got n = {n}, a = {a}"));
    }
    let c_part = full_bits(n) & !full_bits(2 * a);
    let matching: Vec<u64> = (0..a).map(|i| 1u64 << i | 1u64 << (a + i)).collect();
    let high: Vec<u64> = level_words(n, 3)
        .filter(|&g| g & c_part != 0 && matching.iter().any(|&m| m & !g == 0))
        .collect();
    Ok(with_shadow_complement(n, 2, high))
}

/// General two-level construction: the upper level is every `(l+1)`-set
/// `G` containing a matching edge `M` with `G \ M ⊂ C`; the lower level is
/// everything outside its shadow.
pub fn construction_gen(n: usize, l: usize, a: usize) -> Result<FlatFamily> {
    check_n(n)?;
    if l < 2 || 2 * a > n || l - 1 > n - 2 * a {
        return invalid(format!(
            "construction needs l >= 2, 2a <= n and l-1 <= n-2a; got n = {n}, l = {l}, a = {a}"
        ));
    }
    let c_part = full_bits(n) & !full_bits(2 * a);
    let matching: Vec<u64> = (0..a).map(|i| 1u64 << i | 1u64 << (a + i)).collect();
    let high: Vec<u64> = level_words(n, l + 1)
        .filter(|&g| matching.iter().any(|&m| m & !g == 0 && (g & !m) & !c_part == 0))
        .collect();
    Ok(with_shadow_complement(n, l, high))
}

/// Closed form for the size of [`construction_gen`]:
/// `C(n,l) − a·C(n−2a+1, l−1)`.
pub fn construction_gen_size(n: usize, l: usize, a: usize) -> u128 {
    binomial(n as u64, l as u64) - a as u128 * binomial((n - 2 * a + 1) as u64, (l - 1) as u64)
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
