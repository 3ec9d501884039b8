//! Shadow covers (covering designs) and the symmetric middle layers used by
//! the layered weakly-saturating construction.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::constructions::{check_layer, Layer, LayerSpec};
use crate::error::{invalid, Error, Result};
use crate::family::{full_bits, level_words, BitIter, LevelSlice};

/// Largest `k` for which [`greedy_cover`] keeps a dense coverage table.
pub const COVER_MAX_K: usize = 26;

/// Greedy shadow cover: `l`-subsets of `[k]` whose shadow is all of level
/// `l - 1`.
///
/// Each round takes the set covering the most still-uncovered `(l-1)`-sets,
/// breaking ties by canonical order. Gains only shrink, so a lazy max-heap
/// gives exactly the eager greedy choice.
pub fn greedy_cover(k: usize, l: usize) -> Result<LevelSlice> {
    if l == 0 || l > k {
        return invalid(format!("greedy cover needs 1 <= l <= k, got k = {k}, l = {l}"));
    }
    if k > COVER_MAX_K {
        return Err(Error::Capability(format!("greedy cover supports k <= {COVER_MAX_K}")));
    }
    let mut covered = vec![false; 1usize << k];
    let mut remaining = level_words(k, l - 1).count();

    let gain = |w: u64, covered: &[bool]| -> usize {
        BitIter(w).filter(|&b| !covered[(w & !(1 << b)) as usize]).count()
    };

    let mut heap: BinaryHeap<(usize, Reverse<u64>)> =
        level_words(k, l).map(|w| (l, Reverse(w))).collect();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let (stale, Reverse(w)) = heap.pop().expect("full level always covers");
        let fresh = gain(w, &covered);
        if fresh < stale {
            if fresh > 0 {
                heap.push((fresh, Reverse(w)));
            }
            continue;
        }
        for b in BitIter(w) {
            let sub = (w & !(1 << b)) as usize;
            if !covered[sub] {
                covered[sub] = true;
                remaining -= 1;
            }
        }
        chosen.push(w);
    }
    chosen.sort_unstable();
    Ok(LevelSlice::from_sorted_words(k, l, chosen))
}

/// `cover_low ∪ { complement(F) : F ∈ cover_high }`, verified to have a full
/// shadow at level `l - 1` and a full shade at level `l + 1`.
pub fn symmetric_layer(
    k: usize,
    l: usize,
    cover_low: &LevelSlice,
    cover_high: &LevelSlice,
) -> Result<LevelSlice> {
    if l == 0 || l >= k {
        return invalid(format!("symmetric layer needs 1 <= l <= k-1, got k = {k}, l = {l}"));
    }
    if cover_low.n() != k || cover_low.level() != l {
        return invalid(format!("low cover must be level {l} of [{k}]"));
    }
    if cover_high.n() != k || cover_high.level() != k - l {
        return invalid(format!("high cover must be level {} of [{k}]", k - l));
    }
    let mut words: Vec<u64> = cover_low
        .iter()
        .map(|s| s.bits())
        .chain(cover_high.iter().map(|s| !s.bits() & full_bits(k)))
        .collect();
    words.sort_unstable();
    words.dedup();
    let out = LevelSlice::from_sorted_words(k, l, words);
    check_layer(&out)?;
    Ok(out)
}

/// True when level `l` of `[k]` gets a symmetric cover layer, i.e.
/// `k/4 <= l <= 3k/4`.
pub fn in_cover_band(k: usize, l: usize) -> bool {
    4 * l >= k && 4 * l <= 3 * k
}

/// Layers for the construction: full levels outside the middle band and
/// greedy symmetric layers inside it.
pub fn default_layer_spec(k: usize) -> Result<LayerSpec> {
    let mut layers = Vec::with_capacity(k + 1);
    for l in 0..=k {
        if l == 0 || l == k || !in_cover_band(k, l) {
            layers.push(Layer::Full);
            continue;
        }
        let low = greedy_cover(k, l)?;
        let high = greedy_cover(k, k - l)?;
        layers.push(Layer::Explicit(symmetric_layer(k, l, &low, &high)?));
    }
    LayerSpec::new(k, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{shadow, SetMask};

    fn slice(k: usize, l: usize, lists: &[&[usize]]) -> LevelSlice {
        LevelSlice::new(k, l, lists.iter().map(|e| SetMask::from_elements(k, e).unwrap())).unwrap()
    }

    #[test]
    fn greedy_trivial_levels() {
        assert_eq!(greedy_cover(3, 1).unwrap(), slice(3, 1, &[&[1]]));
        assert_eq!(greedy_cover(4, 2).unwrap(), slice(4, 2, &[&[1, 2], &[3, 4]]));
        assert_eq!(greedy_cover(4, 4).unwrap().len(), 1);
        assert!(greedy_cover(4, 0).is_err());
        assert!(greedy_cover(4, 5).is_err());
    }

    #[test]
    fn greedy_cover_k6_l3_against_exhaustive_optimum() {
        let cover = greedy_cover(6, 3).unwrap();
        assert_eq!(shadow(&cover), LevelSlice::full(6, 2).unwrap());
        // exhaustive optimum over all subfamilies of the 20 triples
        let triples: Vec<u64> = level_words(6, 3).collect();
        let pairs: Vec<u64> = level_words(6, 2).collect();
        let mut best = usize::MAX;
        for pick in 0u32..(1 << 20) {
            let size = pick.count_ones() as usize;
            if size >= best {
                continue;
            }
            let mut hit = 0u64;
            for (i, &t) in triples.iter().enumerate() {
                if pick >> i & 1 == 1 {
                    for (j, &p) in pairs.iter().enumerate() {
                        if p & !t == 0 {
                            hit |= 1 << j;
                        }
                    }
                }
            }
            if hit == (1 << pairs.len()) - 1 {
                best = size;
            }
        }
        assert_eq!(best, 6);
        assert!(cover.len() >= best);
        assert!(cover.len() >= 5);
        let bound = (1.0 + (3f64).ln()) * 15.0 / 3.0;
        assert!(cover.len() as f64 <= bound);
    }

    #[test]
    fn symmetric_layer_examples() {
        let one = slice(2, 1, &[&[1]]);
        let out = symmetric_layer(2, 1, &one, &one).unwrap();
        assert_eq!(out, slice(2, 1, &[&[1], &[2]]));

        let c = slice(4, 2, &[&[1, 2], &[3, 4]]);
        let out = symmetric_layer(4, 2, &c, &c).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn symmetric_layer_reports_uncovered_set() {
        let low = slice(4, 2, &[&[1, 2]]);
        let high = slice(4, 2, &[&[1, 3]]);
        match symmetric_layer(4, 2, &low, &high) {
            Err(Error::LayerPrecondition { level, set, condition }) => {
                assert_eq!((level, condition), (2, "shadow"));
                assert_eq!(set, SetMask::from_elements(4, &[3]).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn band_policy() {
        assert!(!in_cover_band(8, 1));
        assert!(in_cover_band(8, 2));
        assert!(in_cover_band(8, 6));
        assert!(!in_cover_band(8, 7));
    }

    #[test]
    fn default_spec_layers_meet_preconditions() {
        for k in 1..=10 {
            let spec = default_layer_spec(k).unwrap();
            for l in 0..=k {
                check_layer(&spec.slice(l)).unwrap();
            }
        }
    }
}
