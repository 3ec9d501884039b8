//! Element equivalence, reduction to a separating family, duplication and
//! primitivity.
//!
//! Two elements are equivalent when every member contains both or
//! neither. A family is separating when all classes are singletons.

use crate::chains::{is_strongly_saturating, Certificate};
use crate::error::{invalid, Error, Result};
use crate::family::{check_n, SetFamily};

/// Element classes (1-based), each sorted, ordered by smallest element.
pub fn element_classes(fam: &SetFamily) -> Vec<Vec<usize>> {
    let n = fam.n();
    // membership column of element i, one bit per member
    let column = |i: usize| -> Vec<bool> { fam.iter().map(|s| s.bits() >> i & 1 == 1).collect() };
    let columns: Vec<Vec<bool>> = (0..n).map(column).collect();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut class = Vec::new();
        for j in i..n {
            if class_of[j] == usize::MAX && columns[j] == columns[i] {
                class_of[j] = id;
                class.push(j + 1);
            }
        }
        classes.push(class);
    }
    classes
}

pub fn is_separating(fam: &SetFamily) -> bool {
    element_classes(fam).iter().all(|c| c.len() == 1)
}

/// Keeps the smallest element of each class, drops the rest, and
/// relabels the survivors `1..` in order. Member count is unchanged.
pub fn reduce(fam: &SetFamily) -> SetFamily {
    let keep: Vec<usize> = element_classes(fam).iter().map(|c| c[0] - 1).collect();
    let words = fam.iter().map(|s| {
        keep.iter()
            .enumerate()
            .fold(0u64, |acc, (new, &old)| acc | (s.bits() >> old & 1) << new)
    });
    SetFamily::from_words(keep.len(), words)
        .expect("distinct members stay distinct after merging equivalent elements")
}

/// Adds element `n+1` as a copy of `x`: members containing `x` gain `n+1`.
pub fn duplicate(fam: &SetFamily, x: usize) -> Result<SetFamily> {
    let n = fam.n();
    if x == 0 || x > n {
        return invalid(format!("element {x} outside [1, {n}]"));
    }
    check_n(n + 1)?;
    let words = fam.iter().map(|s| {
        let w = s.bits();
        w | (w >> (x - 1) & 1) << n
    });
    SetFamily::from_words(n + 1, words)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Duplicability {
    /// Least `x` whose duplicate stays strongly saturating.
    pub witness: Option<usize>,
    /// Certificates for every `x` tried before the witness (all of them
    /// when there is none).
    pub failures: Vec<(usize, Certificate)>,
}

impl Duplicability {
    pub fn duplicable(&self) -> bool {
        self.witness.is_some()
    }
}

/// Tries `x = 1..=n` in order; the first `x` whose duplicate is a
/// strongly saturating `k`-Sperner family on `[n+1]` wins.
pub fn is_duplicable(fam: &SetFamily, k: usize) -> Result<Duplicability> {
    let mut failures = Vec::new();
    for x in 1..=fam.n() {
        let cert = is_strongly_saturating(&duplicate(fam, x)?, k)?;
        if cert.is_valid() {
            return Ok(Duplicability { witness: Some(x), failures });
        }
        failures.push((x, cert));
    }
    Ok(Duplicability { witness: None, failures })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Primitivity {
    pub separating: bool,
    pub duplicable: Duplicability,
    pub primitive: bool,
}

/// Separating and duplicable. The input must itself be strongly
/// saturating `k`-Sperner; otherwise its certificate is returned as the
/// error message.
pub fn is_primitive(fam: &SetFamily, k: usize) -> Result<Primitivity> {
    let cert = is_strongly_saturating(fam, k)?;
    if !cert.is_valid() {
        return Err(Error::Invalid(format!("family is not strongly saturating {k}-Sperner: {cert}")));
    }
    let separating = is_separating(fam);
    let duplicable = is_duplicable(fam, k)?;
    let primitive = separating && duplicable.duplicable();
    Ok(Primitivity { separating, duplicable, primitive })
}

/// True when no member splits two non-singleton classes "partially":
/// for classes `X`, `Y` of size at least 2, the members meeting `X` and
/// those meeting `Y` are either equal, disjoint, or nested.
pub fn classes_aligned(fam: &SetFamily) -> bool {
    let big: Vec<u64> = element_classes(fam)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| c.iter().fold(0u64, |acc, &e| acc | 1 << (e - 1)))
        .collect();
    let hits = |mask: u64| -> Vec<bool> { fam.iter().map(|s| s.bits() & mask != 0).collect() };
    let rows: Vec<Vec<bool>> = big.iter().map(|&m| hits(m)).collect();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let (x, y) = (&rows[a], &rows[b]);
            let x_in_y = x.iter().zip(y).all(|(p, q)| !p || *q);
            let y_in_x = x.iter().zip(y).all(|(p, q)| !q || *p);
            let disjoint = x.iter().zip(y).all(|(p, q)| !(p & q));
            if !(x_in_y || y_in_x || disjoint) {
                return false;
            }
        }
    }
    true
}
