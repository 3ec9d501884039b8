//! Saturating k-Sperner constructions: the product family, the explicit
//! 30-set family on `[6]`, doubling, normalization, and the layered
//! weakly-saturating construction.

use crate::error::{invalid, Error, Result};
use crate::family::{full_bits, level_words, product, shadow, shade, LevelSlice, SetFamily, SetMask};

/// `2^[k-2] × {∅, [n] \ [k-2]}`, a strongly saturating k-Sperner family
/// with `2^(k-1)` members.
pub fn product_construction(n: usize, k: usize) -> Result<SetFamily> {
    if k < 2 || k > n {
        return invalid(format!("product construction needs 2 <= k <= n, got n = {n}, k = {k}"));
    }
    let low = k - 2;
    let base = SetFamily::from_words(n, 0..(1u64 << low))?;
    let block = SetMask::new(n, full_bits(n) & !full_bits(low))?;
    product(&base, block, n)
}

/// The explicit strongly saturating 6-Sperner family on `[6]` with 30 members.
pub fn sat66() -> SetFamily {
    const SETS: [&[usize]; 30] = [
        &[],
        &[3],
        &[4],
        &[5],
        &[6],
        &[1, 2],
        &[1, 3],
        &[1, 4],
        &[2, 3],
        &[2, 4],
        &[5, 6],
        &[1, 2, 5],
        &[1, 2, 6],
        &[3, 4, 5],
        &[3, 4, 6],
        &[1, 3, 5],
        &[1, 4, 5],
        &[2, 3, 6],
        &[2, 4, 6],
        &[3, 4, 5, 6],
        &[2, 3, 4, 5],
        &[1, 3, 4, 6],
        &[1, 2, 3, 4],
        &[1, 2, 5, 6],
        &[1, 2, 3, 5],
        &[1, 2, 3, 4, 6],
        &[1, 2, 4, 5, 6],
        &[1, 3, 4, 5, 6],
        &[2, 3, 4, 5, 6],
        &[1, 2, 3, 4, 5, 6],
    ];
    SetFamily::from_element_lists(6, &SETS).expect("static family is well formed")
}

/// `fam × {∅, {n+1}}` on `[n+1]`. Needs `∅` and `[n]` as members.
pub fn double(fam: &SetFamily) -> Result<SetFamily> {
    let n = fam.n();
    if !fam.contains_word(0) || !fam.contains_word(full_bits(n)) {
        return invalid("doubling needs both the empty set and the ground set as members; normalize first");
    }
    if n + 1 > crate::family::MAX_N {
        return Err(Error::Capability(format!("cannot double a family on n = {n}")));
    }
    let wide = fam.widen(n + 1)?;
    product(&wide, SetMask::from_elements(n + 1, &[n + 1])?, n + 1)
}

/// Replaces the minimal members by `∅` (if `∅` is absent), then the maximal
/// members other than `∅` by `[n]` (if `[n]` is absent).
///
/// Intended for saturating families with `k >= 2`; on those the size never
/// grows. A family with fewer than two members always comes out as
/// `{∅, [n]}`.
pub fn normalize(fam: &SetFamily) -> SetFamily {
    let n = fam.n();
    let full = full_bits(n);
    let mut words: Vec<u64> = fam.words().collect();

    if !words.contains(&0) {
        let minimal: Vec<u64> = words
            .iter()
            .copied()
            .filter(|&w| !words.iter().any(|&v| v != w && v & !w == 0))
            .collect();
        words.retain(|w| !minimal.contains(w));
        words.push(0);
    }
    if !words.contains(&full) {
        let maximal: Vec<u64> = words
            .iter()
            .copied()
            .filter(|&w| w != 0 && !words.iter().any(|&v| v != w && w & !v == 0))
            .collect();
        words.retain(|w| !maximal.contains(w));
        words.push(full);
    }
    SetFamily::from_words(n, words).expect("normalization keeps members distinct")
}

/// One level of a [`LayerSpec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    Full,
    Explicit(LevelSlice),
}

/// Levels `0..=k` of the layered construction, each living in `2^[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    k: usize,
    layers: Vec<Layer>,
}

impl LayerSpec {
    pub fn all_full(k: usize) -> Result<Self> {
        Self::new(k, vec![Layer::Full; k + 1])
    }

    pub fn new(k: usize, layers: Vec<Layer>) -> Result<Self> {
        crate::family::check_n(k)?;
        if layers.len() != k + 1 {
            return invalid(format!("expected {} layers for k = {k}, got {}", k + 1, layers.len()));
        }
        for (l, layer) in layers.iter().enumerate() {
            if let Layer::Explicit(s) = layer {
                if s.n() != k || s.level() != l {
                    return invalid(format!(
                        "layer {l} must be a level-{l} slice of [{k}], got level {} of [{}]",
                        s.level(),
                        s.n()
                    ));
                }
            }
        }
        for (l, fixed) in [(0usize, 0u64), (k, full_bits(k))] {
            if let Layer::Explicit(s) = &layers[l] {
                if s.len() != 1 || !s.contains_word(fixed) {
                    return invalid(format!("layer {l} must be the single set of that size"));
                }
            }
        }
        Ok(LayerSpec { k, layers })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// The concrete slice at level `l`.
    pub fn slice(&self, l: usize) -> LevelSlice {
        match &self.layers[l] {
            Layer::Full => LevelSlice::full(self.k, l).expect("level within [k]"),
            Layer::Explicit(s) => s.clone(),
        }
    }
}

/// Checks the shadow and shade conditions a middle layer must meet:
/// `Δ(F_l)` is all of level `l-1` and `∇(F_l)` is all of level `l+1`.
pub(crate) fn check_layer(slice: &LevelSlice) -> Result<()> {
    let (k, l) = (slice.n(), slice.level());
    if l == 0 || l >= k {
        return Ok(());
    }
    let down = shadow(slice);
    if let Some(w) = level_words(k, l - 1).find(|&w| !down.contains_word(w)) {
        return Err(Error::LayerPrecondition {
            level: l,
            set: SetMask::new(k, w)?,
            condition: "shadow",
        });
    }
    let up = shade(slice, k)?;
    if let Some(w) = level_words(k, l + 1).find(|&w| !up.contains_word(w)) {
        return Err(Error::LayerPrecondition {
            level: l,
            set: SetMask::new(k, w)?,
            condition: "shade",
        });
    }
    Ok(())
}

/// `⋃_l F_l × {∅, [n] \ [k]}`: weakly saturating k-Sperner on `[n]`.
///
/// When `n = k` both copies coincide and appear once.
pub fn general_wsat_construction(n: usize, k: usize, layers: &LayerSpec) -> Result<SetFamily> {
    if layers.k() != k {
        return invalid(format!("layer spec is for k = {}, asked for k = {k}", layers.k()));
    }
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    crate::family::check_n(n)?;
    let mut words = Vec::new();
    for l in 0..=k {
        let slice = layers.slice(l);
        check_layer(&slice)?;
        words.extend(slice.iter().map(|s| s.bits()));
    }
    let block = full_bits(n) & !full_bits(k);
    let base = words.clone();
    words.extend(base.into_iter().map(|w| w | block));
    SetFamily::from_words_dedup(n, words)
}
