//! Chains inside a family and the three verification predicates:
//! k-Sperner, weakly saturating, strongly saturating.
//!
//! Saturation needs, for every set `S` outside the family, the longest
//! chain of members strictly below `S` (`down`) and strictly above it
//! (`up`). Both come out of two sweeps over the whole lattice:
//!
//! ```text
//! down_le(S) = [S ∈ F] + max_{i ∈ S} down_le(S \ {i})
//! up_le(S)   = [S ∈ F] + max_{i ∉ S} up_le(S ∪ {i})
//! ```
//!
//! `down_le(S)` is the longest chain of members contained in `S`, so the
//! strict value is the maximum over the immediate lower neighbours.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::family::{full_bits, BitIter, SetFamily, SetMask};

/// Largest ground set for the full-lattice sweeps.
pub const LATTICE_MAX_N: usize = 28;

/// Below this size `longest_chain` uses the lattice sweep.
const LATTICE_PREFERRED_N: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    Valid,
    ChainViolation,
    UncoveredSet,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateKind::Valid => "valid",
            CertificateKind::ChainViolation => "chain_violation",
            CertificateKind::UncoveredSet => "uncovered_set",
        })
    }
}

/// Outcome of a verification, with a witness whenever the answer is no.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Valid,
    /// A chain of `k + 1` members, strictly increasing.
    ChainViolation { chain: Vec<SetMask> },
    /// A non-member `set` together with the longest member chains strictly
    /// below and above it; `below.len() + above.len() < k`.
    UncoveredSet {
        set: SetMask,
        below: Vec<SetMask>,
        above: Vec<SetMask>,
    },
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        matches!(self, Certificate::Valid)
    }

    pub fn kind(&self) -> CertificateKind {
        match self {
            Certificate::Valid => CertificateKind::Valid,
            Certificate::ChainViolation { .. } => CertificateKind::ChainViolation,
            Certificate::UncoveredSet { .. } => CertificateKind::UncoveredSet,
        }
    }

    /// Re-checks the witness against `fam` and `k` without trusting the
    /// code that produced it. `Valid` certificates are trivially consistent.
    pub fn witness_holds(&self, fam: &SetFamily, k: usize) -> bool {
        match self {
            Certificate::Valid => true,
            Certificate::ChainViolation { chain } => {
                chain.len() == k + 1
                    && is_chain(chain)
                    && chain.iter().all(|&s| fam.contains(s))
            }
            Certificate::UncoveredSet { set, below, above } => {
                !fam.contains(*set)
                    && below.len() + above.len() < k
                    && is_chain(below)
                    && is_chain(above)
                    && below.iter().chain(above).all(|&s| fam.contains(s))
                    && below.iter().all(|b| b.is_strict_subset(*set))
                    && above.iter().all(|a| set.is_strict_subset(*a))
                    && down_up(*set, fam) == (below.len(), above.len())
            }
        }
    }
}

/// One line for the verdict, then one line per witness set prefixed by
/// its role (`chain`, `uncovered`, `below`, `above`).
impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        match self {
            Certificate::Valid => Ok(()),
            Certificate::ChainViolation { chain } => {
                chain.iter().try_for_each(|s| write!(f, "\nchain {s}"))
            }
            Certificate::UncoveredSet { set, below, above } => {
                write!(f, "\nuncovered {set}")?;
                below.iter().try_for_each(|s| write!(f, "\nbelow {s}"))?;
                above.iter().try_for_each(|s| write!(f, "\nabove {s}"))
            }
        }
    }
}

/// True if consecutive entries are strictly increasing under inclusion.
pub fn is_chain(sets: &[SetMask]) -> bool {
    sets.windows(2).all(|w| w[0].is_strict_subset(w[1]))
}

/// Chain DP tables over the whole lattice `2^[n]`.
pub struct LatticeProfile {
    n: usize,
    member: Vec<u64>,
    down_le: Vec<u8>,
    up_le: Vec<u8>,
}

impl LatticeProfile {
    pub fn new(fam: &SetFamily) -> Result<Self> {
        let n = fam.n();
        if n > LATTICE_MAX_N {
            return Err(Error::Capability(format!(
                "full-lattice sweep needs n <= {LATTICE_MAX_N}, got n = {n}"
            )));
        }
        let size = 1usize << n;
        let mut member = vec![0u64; size.div_ceil(64)];
        for w in fam.words() {
            member[(w >> 6) as usize] |= 1 << (w & 63);
        }
        let mut down_le = vec![0u8; size];
        let mut up_le = vec![0u8; size];
        let is_member = |w: u64| member[(w >> 6) as usize] >> (w & 63) & 1 == 1;
        fill_lattice(n, is_member, &mut down_le, &mut up_le);
        Ok(LatticeProfile { n, member, down_le, up_le })
    }

    #[inline]
    fn is_member(&self, w: u64) -> bool {
        self.member[(w >> 6) as usize] >> (w & 63) & 1 == 1
    }

    /// Longest chain of members strictly inside `w`.
    #[inline]
    pub fn down(&self, w: u64) -> usize {
        strict_down(&self.down_le, w) as usize
    }

    /// Longest chain of members strictly containing `w`.
    #[inline]
    pub fn up(&self, w: u64) -> usize {
        strict_up(&self.up_le, self.n, w) as usize
    }

    pub fn longest_chain(&self) -> usize {
        self.down_le[full_bits(self.n) as usize] as usize
    }

    /// Members forming a longest chain inside `top` (inclusive), ascending.
    fn chain_within(&self, top: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut cur = top;
        loop {
            if self.down_le[cur as usize] == 0 {
                break;
            }
            if self.is_member(cur) {
                out.push(cur);
            }
            let mut best: Option<(u8, u64)> = None;
            for b in BitIter(cur) {
                let v = self.down_le[(cur & !(1 << b)) as usize];
                if best.map_or(true, |(bv, _)| v > bv) {
                    best = Some((v, cur & !(1 << b)));
                }
            }
            match best {
                Some((_, next)) => cur = next,
                None => break,
            }
        }
        out.reverse();
        out
    }

    /// Members forming a longest chain containing `bottom` (inclusive), ascending.
    fn chain_containing(&self, bottom: u64) -> Vec<u64> {
        let full = full_bits(self.n);
        let mut out = Vec::new();
        let mut cur = bottom;
        loop {
            if self.up_le[cur as usize] == 0 {
                break;
            }
            if self.is_member(cur) {
                out.push(cur);
            }
            let mut best: Option<(u8, u64)> = None;
            for b in BitIter(!cur & full) {
                let v = self.up_le[(cur | 1 << b) as usize];
                if best.map_or(true, |(bv, _)| v > bv) {
                    best = Some((v, cur | 1 << b));
                }
            }
            match best {
                Some((_, next)) => cur = next,
                None => break,
            }
        }
        out
    }

    /// Longest member chain strictly below `w`, ascending.
    pub fn chain_below(&self, w: u64) -> Vec<u64> {
        let best = BitIter(w)
            .map(|b| w & !(1 << b))
            .fold(None, |acc: Option<u64>, c| match acc {
                Some(a) if self.down_le[a as usize] >= self.down_le[c as usize] => Some(a),
                _ => Some(c),
            });
        best.map(|c| self.chain_within(c)).unwrap_or_default()
    }

    /// Longest member chain strictly above `w`, ascending.
    pub fn chain_above(&self, w: u64) -> Vec<u64> {
        let best = BitIter(!w & full_bits(self.n))
            .map(|b| w | 1 << b)
            .fold(None, |acc: Option<u64>, c| match acc {
                Some(a) if self.up_le[a as usize] >= self.up_le[c as usize] => Some(a),
                _ => Some(c),
            });
        best.map(|c| self.chain_containing(c)).unwrap_or_default()
    }
}

/// Fills both chain tables. `down` and `up` must have length `2^n`.
pub(crate) fn fill_lattice(
    n: usize,
    is_member: impl Fn(u64) -> bool,
    down: &mut [u8],
    up: &mut [u8],
) {
    let size = 1u64 << n;
    for w in 0..size {
        down[w as usize] = strict_down(down, w) + is_member(w) as u8;
    }
    for w in (0..size).rev() {
        up[w as usize] = strict_up(up, n, w) + is_member(w) as u8;
    }
}

#[inline]
pub(crate) fn strict_down(down_le: &[u8], w: u64) -> u8 {
    BitIter(w).map(|b| down_le[(w & !(1 << b)) as usize]).max().unwrap_or(0)
}

#[inline]
pub(crate) fn strict_up(up_le: &[u8], n: usize, w: u64) -> u8 {
    BitIter(!w & full_bits(n)).map(|b| up_le[(w | 1 << b) as usize]).max().unwrap_or(0)
}

/// Longest chain among `sets` (any order), with a witness.
fn longest_chain_pairwise(sets: &[SetMask]) -> (usize, Vec<SetMask>) {
    let mut sorted = sets.to_vec();
    sorted.sort_unstable();
    let mut best = vec![1usize; sorted.len()];
    let mut prev = vec![usize::MAX; sorted.len()];
    for i in 0..sorted.len() {
        for j in 0..i {
            if best[j] + 1 > best[i] && sorted[j].is_strict_subset(sorted[i]) {
                best[i] = best[j] + 1;
                prev[i] = j;
            }
        }
    }
    let Some((mut i, &len)) = best.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
    else {
        return (0, Vec::new());
    };
    let mut chain = vec![sorted[i]];
    while prev[i] != usize::MAX {
        i = prev[i];
        chain.push(sorted[i]);
    }
    chain.reverse();
    (len, chain)
}

/// Length of the longest chain of members, and one chain attaining it.
pub fn longest_chain(fam: &SetFamily) -> (usize, Vec<SetMask>) {
    if fam.is_empty() {
        return (0, Vec::new());
    }
    if fam.n() <= LATTICE_PREFERRED_N {
        let profile = LatticeProfile::new(fam).expect("n within lattice range");
        let top = full_bits(fam.n());
        let chain = profile
            .chain_within(top)
            .into_iter()
            .map(|w| SetMask::from_raw(fam.n(), w))
            .collect::<Vec<_>>();
        (profile.longest_chain(), chain)
    } else {
        longest_chain_pairwise(fam.sets())
    }
}

/// `(down, up)`: longest member chains strictly below and strictly above `s`.
pub fn down_up(s: SetMask, fam: &SetFamily) -> (usize, usize) {
    let below: Vec<SetMask> = fam.iter().filter(|m| m.is_strict_subset(s)).collect();
    let above: Vec<SetMask> = fam.iter().filter(|m| s.is_strict_subset(*m)).collect();
    (longest_chain_pairwise(&below).0, longest_chain_pairwise(&above).0)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    Ok(())
}

pub fn is_k_sperner(fam: &SetFamily, k: usize) -> Result<Certificate> {
    check_k(k)?;
    let (len, chain) = longest_chain(fam);
    if len <= k {
        return Ok(Certificate::Valid);
    }
    Ok(Certificate::ChainViolation { chain: chain[..=k].to_vec() })
}

pub fn is_weakly_saturating(fam: &SetFamily, k: usize) -> Result<Certificate> {
    check_k(k)?;
    let profile = LatticeProfile::new(fam)?;
    Ok(weak_certificate(fam, &profile, k))
}

fn weak_certificate(fam: &SetFamily, profile: &LatticeProfile, k: usize) -> Certificate {
    let n = fam.n();
    let mut worst: Option<u64> = None;
    for w in 0..(1u64 << n) {
        if profile.is_member(w) || profile.down(w) + profile.up(w) >= k {
            continue;
        }
        let better = match worst {
            None => true,
            Some(o) => (w.count_ones(), w) < (o.count_ones(), o),
        };
        if better {
            worst = Some(w);
        }
    }
    match worst {
        None => Certificate::Valid,
        Some(w) => {
            let to_masks =
                |v: Vec<u64>| v.into_iter().map(|x| SetMask::from_raw(n, x)).collect::<Vec<_>>();
            Certificate::UncoveredSet {
                set: SetMask::from_raw(n, w),
                below: to_masks(profile.chain_below(w)),
                above: to_masks(profile.chain_above(w)),
            }
        }
    }
}

/// k-Sperner first, then weak saturation; the first failure is reported.
pub fn is_strongly_saturating(fam: &SetFamily, k: usize) -> Result<Certificate> {
    check_k(k)?;
    let profile = LatticeProfile::new(fam)?;
    if profile.longest_chain() > k {
        let chain: Vec<SetMask> = profile
            .chain_within(full_bits(fam.n()))
            .into_iter()
            .take(k + 1)
            .map(|w| SetMask::from_raw(fam.n(), w))
            .collect();
        return Ok(Certificate::ChainViolation { chain });
    }
    Ok(weak_certificate(fam, &profile, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, lists: &[&[usize]]) -> SetFamily {
        SetFamily::from_element_lists(n, lists).unwrap()
    }

    #[test]
    fn longest_chain_small() {
        assert_eq!(longest_chain(&fam(2, &[&[], &[1], &[1, 2]])).0, 3);
        let pairs = SetFamily::from_words(4, crate::family::level_words(4, 2)).unwrap();
        assert_eq!(longest_chain(&pairs).0, 1);
        assert_eq!(longest_chain(&SetFamily::empty(3).unwrap()), (0, vec![]));
    }

    #[test]
    fn pairwise_and_lattice_routes_agree() {
        let f = fam(5, &[&[], &[2], &[1, 2], &[3, 4], &[1, 2, 5], &[1, 3, 4], &[1, 2, 3, 4, 5]]);
        let (a, ca) = longest_chain(&f);
        let (b, cb) = longest_chain_pairwise(f.sets());
        assert_eq!(a, b);
        assert!(is_chain(&ca) && is_chain(&cb));
        assert_eq!(ca.len(), a);
    }

    #[test]
    fn sperner_examples() {
        let c = is_k_sperner(&fam(3, &[&[], &[1, 2, 3]]), 2).unwrap();
        assert!(c.is_valid());
        let p2 = SetFamily::power_set(2).unwrap();
        let c = is_k_sperner(&p2, 2).unwrap();
        match &c {
            Certificate::ChainViolation { chain } => assert_eq!(chain.len(), 3),
            other => panic!("{other:?}"),
        }
        assert!(c.witness_holds(&p2, 2));
        assert!(is_k_sperner(&p2, 0).is_err());
    }

    #[test]
    fn down_up_examples() {
        let s = SetMask::from_elements(3, &[1]).unwrap();
        assert_eq!(down_up(s, &fam(3, &[&[], &[1, 2, 3]])), (1, 1));
        let e = SetMask::empty(1).unwrap();
        assert_eq!(down_up(e, &fam(1, &[&[]])), (0, 0));
    }

    #[test]
    fn weak_examples() {
        assert!(is_weakly_saturating(&fam(3, &[&[]]), 1).unwrap().is_valid());
        for n in 2..6 {
            let f = SetFamily::from_words(n, [0, full_bits(n)]).unwrap();
            assert!(is_weakly_saturating(&f, 2).unwrap().is_valid());
        }
    }

    #[test]
    fn uncovered_certificate_is_recheckable() {
        let f = fam(3, &[&[], &[1, 2, 3]]);
        let c = is_weakly_saturating(&f, 3).unwrap();
        assert_eq!(c.kind(), CertificateKind::UncoveredSet);
        assert!(c.witness_holds(&f, 3));
        // canonical-first non-member is {1}
        if let Certificate::UncoveredSet { set, .. } = c {
            assert_eq!(set, SetMask::from_elements(3, &[1]).unwrap());
        }
    }

    #[test]
    fn k_above_n_is_handled() {
        let p = SetFamily::power_set(3).unwrap();
        assert!(is_strongly_saturating(&p, 4).unwrap().is_valid());
        assert!(is_strongly_saturating(&p, 9).unwrap().is_valid());
        let f = fam(3, &[&[]]);
        assert!(!is_strongly_saturating(&f, 5).unwrap().is_valid());
    }

    #[test]
    fn oversize_n_is_a_capability_error() {
        let f = SetFamily::from_words(30, [0]).unwrap();
        assert!(matches!(is_weakly_saturating(&f, 2), Err(Error::Capability(_))));
    }
}
