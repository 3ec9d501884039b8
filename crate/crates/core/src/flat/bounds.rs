use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};

use super::{binomial, construction_gen_size};
use crate::bounds::{
    exact_entry, in_unit_interval, ratio, ratio_to_f64, BoundEntry, BoundValue, BoundsReport,
    Direction, Params, Quantity, Status,
};
use crate::error::{invalid, Result};

/// `C(n,2) − ⌈(n+1)²/8⌉` without clamping.
pub fn german_bound_raw(n: usize) -> i64 {
    let n = n as i64;
    let pairs = n * (n - 1) / 2;
    let sq = (n + 1) * (n + 1);
    pairs - (sq + 7) / 8
}

/// Lower bound on a saturating antichain inside levels 2 and 3 of `[n]`,
/// clamped at 0 (the raw value is negative for `n = 2`).
pub fn german_bound(n: usize) -> Result<u64> {
    if n < 2 {
        return invalid(format!("the {{2,3}} lower bound needs n >= 2, got {n}"));
    }
    Ok(german_bound_raw(n).max(0) as u64)
}

/// A density value: exact rational, or a real known only by its value.
#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    Rational(BigRational),
    Real { value: f64, label: String },
}

impl Density {
    pub fn rational(num: i64, den: i64) -> Self {
        Density::Rational(ratio(num, den))
    }

    pub fn value(&self) -> f64 {
        match self {
            Density::Rational(r) => ratio_to_f64(r).unwrap_or(f64::NAN),
            Density::Real { value, .. } => *value,
        }
    }

    /// Accepts `p/q`, a decimal like `0.5625` (read exactly), or an integer.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || invalid(format!("cannot read `{text}` as a density"));
        if let Some((p, q)) = t.split_once('/') {
            let (Ok(p), Ok(q)) = (p.trim().parse::<BigInt>(), q.trim().parse::<BigInt>()) else {
                return bad();
            };
            if q == BigInt::from(0) {
                return bad();
            }
            return Ok(Density::Rational(BigRational::new(p, q)));
        }
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if frac.chars().any(|c| !c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
            return bad();
        }
        let digits = format!("{int}{frac}");
        let Ok(num) = digits.parse::<BigInt>() else { return bad() };
        let den = BigInt::from(10).pow(frac.len() as u32);
        Ok(Density::Rational(BigRational::new(num, den)))
    }

    fn in_unit(&self) -> bool {
        match self {
            Density::Rational(r) => in_unit_interval(r),
            Density::Real { value, .. } => (0.0..=1.0).contains(value),
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Rational(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Density::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Density::Real { label, .. } => f.write_str(label),
        }
    }
}

/// The Turán density of the complete `l`-graph on `l + 1` vertices, given
/// as an interval `[low, high]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TuranDensity {
    pub low: Density,
    pub high: Density,
}

impl TuranDensity {
    pub fn new(low: Density, high: Density) -> Result<Self> {
        if !low.in_unit() || !high.in_unit() {
            return invalid(format!("densities must lie in [0, 1], got [{low}, {high}]"));
        }
        if low.value() > high.value() {
            return invalid(format!("empty density interval [{low}, {high}]"));
        }
        Ok(TuranDensity { low, high })
    }

    pub fn exact(t: Density) -> Result<Self> {
        Self::new(t.clone(), t)
    }

    /// Built-in values: `t_2 = 1/2` and `t_3 ∈ [5/9, (3+√17)/12]`.
    pub fn known(l: usize) -> Option<Self> {
        match l {
            2 => Some(TuranDensity { low: Density::rational(1, 2), high: Density::rational(1, 2) }),
            3 => Some(TuranDensity {
                low: Density::rational(5, 9),
                high: Density::Real {
                    value: (3.0 + 17f64.sqrt()) / 12.0,
                    label: "(3+sqrt(17))/12".into(),
                },
            }),
            _ => None,
        }
    }
}

/// `1 − (l−1)/l · t`
fn lower_coefficient(l: usize, t: &Density) -> BoundValue {
    let factor = ratio(l as i64 - 1, l as i64);
    match t {
        Density::Rational(r) => BoundValue::Exact(BigRational::one() - factor * r),
        Density::Real { value, .. } => {
            BoundValue::Irrational(1.0 - ratio_to_f64(&factor).unwrap() * value)
        }
    }
}

/// `1 − ½ (1 − 1/l)^(l−1)`
fn upper_coefficient(l: usize) -> BigRational {
    let base = ratio(l as i64 - 1, l as i64);
    BigRational::one() - ratio(1, 2) * Pow::pow(base, (l - 1) as u32)
}

fn scaled(coefficient: &BoundValue, size: u128) -> BoundValue {
    match coefficient {
        BoundValue::Exact(c) => BoundValue::Exact(c * BigRational::from(BigInt::from(size))),
        BoundValue::Irrational(c) => BoundValue::Irrational(c * size as f64),
        BoundValue::Symbolic => BoundValue::Symbolic,
    }
}

fn asymptotic(
    name: &'static str,
    direction: Direction,
    coefficient: BoundValue,
    size: u128,
    formula: String,
    note: &str,
) -> BoundEntry {
    BoundEntry {
        name,
        direction,
        status: Status::Asymptotic,
        quantity: Quantity::FlatSat,
        applicable: true,
        formula,
        value: scaled(&coefficient, size),
        integer: None,
        coefficient: Some(coefficient),
        note: note.into(),
    }
}

/// Bounds on the minimum saturating antichain inside levels `l` and `l+1`
/// of `[n]`. The leading-order entries drop their vanishing corrections
/// and are marked asymptotic; the construction sizes are exact.
///
/// When `t` is `None` the built-in density for `l` is used.
pub fn lflat_bounds(n: usize, l: usize, t: Option<TuranDensity>) -> Result<BoundsReport> {
    if l < 2 || l + 1 > n {
        return invalid(format!("flat bounds need 2 <= l <= n-1, got n = {n}, l = {l}"));
    }
    let t = match t {
        Some(t) => TuranDensity::new(t.low, t.high)?,
        None => TuranDensity::known(l).ok_or_else(|| {
            crate::error::Error::Invalid(format!("no built-in Turán density for l = {l}; pass one"))
        })?,
    };
    let level = binomial(n as u64, l as u64);
    let mut entries = Vec::new();

    if l == 2 {
        entries.push(exact_entry(
            "german",
            Direction::Lower,
            Quantity::FlatSat,
            format!("C({n},2) - ceil(({n}+1)^2/8)"),
            ratio(german_bound(n)? as i64, 1),
            if german_bound_raw(n) < 0 { "clamped at 0" } else { "" },
        ));
    }

    let same = t.low == t.high;
    entries.push(asymptotic(
        "lflat_lower",
        Direction::Lower,
        lower_coefficient(l, &t.high),
        level,
        format!("(1 - ({l}-1)/{l} * {}) C({n},{l})", t.high),
        if same { "" } else { "at the upper end of the density interval" },
    ));
    if !same {
        entries.push(asymptotic(
            "lflat_lower_at_low_t",
            Direction::Lower,
            lower_coefficient(l, &t.low),
            level,
            format!("(1 - ({l}-1)/{l} * {}) C({n},{l})", t.low),
            "conditional on the density equalling the lower end",
        ));
    }
    entries.push(asymptotic(
        "lflat_upper",
        Direction::Upper,
        BoundValue::Exact(upper_coefficient(l)),
        level,
        format!("(1 - 1/2 (1-1/{l})^({l}-1)) C({n},{l})"),
        "",
    ));

    let a = n / (2 * l);
    if l - 1 <= n - 2 * a {
        entries.push(exact_entry(
            "construction",
            Direction::Upper,
            Quantity::FlatSat,
            format!("C({n},{l}) - {a} C({},{})", n - 2 * a + 1, l - 1),
            ratio(BigInt::from(construction_gen_size(n, l, a)), 1),
            format!("part size a = floor(n/(2l)) = {a}"),
        ));
    }
    if let Some((best_a, size)) = (0..=n / 2)
        .filter(|&a| l - 1 <= n - 2 * a)
        .map(|a| (a, construction_gen_size(n, l, a)))
        .min_by_key(|&(a, s)| (s, a))
    {
        entries.push(exact_entry(
            "construction_best",
            Direction::Upper,
            Quantity::FlatSat,
            format!("min over a of C({n},{l}) - a C({n}-2a+1,{})", l - 1),
            ratio(BigInt::from(size), 1),
            format!("attained at a = {best_a}"),
        ));
    }

    Ok(BoundsReport { params: Params::Flat { n, l }, entries })
}
