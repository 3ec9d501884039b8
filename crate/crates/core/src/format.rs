//! Line-based family file format.
//!
//! ```text
//! n 6
//! k 6
//! # comment
//! 000000
//! 001000
//! ```
//!
//! The first non-comment line is `n <int>`, optionally followed by
//! `k <int>`. Every other line is an `n`-character string over `{0,1}`;
//! character `i` is the membership of element `i`. Output is always in
//! canonical order.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::family::{check_n, SetFamily, SetMask};

/// A parsed family file: the family plus the optional `k` header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyFile {
    pub family: SetFamily,
    pub k: Option<usize>,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn header_value(line: usize, text: &str, key: &str) -> Result<Option<usize>> {
    let mut parts = text.split_whitespace();
    if parts.next() != Some(key) {
        return Ok(None);
    }
    let value = match (parts.next(), parts.next()) {
        (Some(v), None) => v,
        _ => return err(line, format!("expected `{key} <int>`")),
    };
    match value.parse::<usize>() {
        Ok(v) => Ok(Some(v)),
        Err(_) => err(line, format!("`{value}` is not a non-negative integer")),
    }
}

pub fn parse_family_file(text: &str) -> Result<FamilyFile> {
    let mut n: Option<usize> = None;
    let mut k: Option<usize> = None;
    let mut seen = HashSet::new();
    let mut sets = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(n) = n else {
            match header_value(line_no, line, "n")? {
                Some(v) => {
                    check_n(v).or_else(|e| err(line_no, e.to_string()))?;
                    n = Some(v);
                    continue;
                }
                None => return err(line_no, "missing `n <int>` header"),
            }
        };
        if k.is_none() && sets.is_empty() {
            if let Some(v) = header_value(line_no, line, "k")? {
                if v == 0 {
                    return err(line_no, "k must be positive");
                }
                k = Some(v);
                continue;
            }
        }
        if line.len() != n {
            return err(line_no, format!("expected {n} characters, found {}", line.len()));
        }
        let mut bits = 0u64;
        for (i, c) in line.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                other => return err(line_no, format!("unexpected character `{other}`")),
            }
        }
        if !seen.insert(bits) {
            return err(line_no, format!("duplicate set `{line}`"));
        }
        sets.push(SetMask::new(n, bits).expect("width checked above"));
    }

    let Some(n) = n else {
        return err(text.lines().count().max(1), "missing `n <int>` header");
    };
    let family = SetFamily::new(n, sets)?;
    Ok(FamilyFile { family, k })
}

pub fn parse_family(text: &str) -> Result<SetFamily> {
    parse_family_file(text).map(|f| f.family)
}

pub fn serialize_family(fam: &SetFamily) -> String {
    serialize_family_with_k(fam, None)
}

pub fn serialize_family_with_k(fam: &SetFamily, k: Option<usize>) -> String {
    let mut out = format!("n {}\n", fam.n());
    if let Some(k) = k {
        out.push_str(&format!("k {k}\n"));
    }
    for s in fam.iter() {
        out.push_str(&s.to_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let fam = parse_family("n 2\n00\n11\n").unwrap();
        assert_eq!(fam, SetFamily::from_words(2, [0, 0b11]).unwrap());
    }

    #[test]
    fn serializes_in_canonical_order() {
        let fam = SetFamily::from_words(1, [1, 0]).unwrap();
        assert_eq!(serialize_family(&fam), "n 1\n0\n1\n");
    }

    #[test]
    fn reads_k_header_and_comments() {
        let f = parse_family_file("# hi\nn 3\nk 2\n# mid\n000\n\n111\n").unwrap();
        assert_eq!(f.k, Some(2));
        assert_eq!(f.family.len(), 2);
    }

    #[test]
    fn errors_name_the_line() {
        let line_of = |t: &str| match parse_family(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("n 2\n00\n1\n"), 3);
        assert_eq!(line_of("n 2\n00\n1x\n"), 3);
        assert_eq!(line_of("n 2\n01\n00\n01\n"), 4);
        assert_eq!(line_of("00\n11\n"), 1);
        assert_eq!(line_of(""), 1);
        assert_eq!(line_of("n 0\n"), 1);
        assert_eq!(line_of("n two\n"), 1);
    }
}
