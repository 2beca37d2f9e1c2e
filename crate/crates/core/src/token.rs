//! Binary token strings with a run-length representation.
//!
//! The constructions in this crate lean on strings like `0^s 1 0^k 1 z`
//! whose lengths reach 10^6 while their descriptions stay tiny. Storing
//! maximal runs of equal bits keeps every operation used by the generation
//! semantics (append, concatenate, suffix, indexed access) proportional to
//! the number of runs, not the length.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One maximal run of equal bits. `bit` is 0 or 1 and `len >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub bit: u8,
    pub len: u64,
}

/// An element of {0,1}^*.
///
/// Invariants: runs are nonempty, adjacent runs carry distinct bits, and
/// `len` equals the sum of run lengths. The representation is canonical, so
/// derived equality and hashing agree with string equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenString {
    runs: Vec<Run>,
    len: u64,
}

impl TokenString {
    /// The empty string.
    pub fn empty() -> Self {
        TokenString::default()
    }

    /// `0^n`.
    pub fn zeros(n: u64) -> Self {
        Self::run(0, n)
    }

    /// `1^n`.
    pub fn ones(n: u64) -> Self {
        Self::run(1, n)
    }

    /// A single run `bit^n`.
    pub fn run(bit: u8, n: u64) -> Self {
        assert!(bit <= 1, "token must be 0 or 1");
        if n == 0 {
            return Self::empty();
        }
        TokenString { runs: vec![Run { bit, len: n }], len: n }
    }

    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        let mut s = Self::empty();
        for b in bits {
            s.push(b);
        }
        s
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The maximal runs, in order. Class parsers walk these directly.
    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Appends one token in place. O(1).
    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1, "token must be 0 or 1");
        self.len += 1;
        match self.runs.last_mut() {
            Some(r) if r.bit == bit => r.len += 1,
            _ => self.runs.push(Run { bit, len: 1 }),
        }
    }

    /// Appends `other` in place. O(runs of other).
    pub fn extend(&mut self, other: &TokenString) {
        let mut rest = other.runs.as_slice();
        if let (Some(last), Some(first)) = (self.runs.last_mut(), rest.first()) {
            if last.bit == first.bit {
                last.len += first.len;
                rest = &rest[1..];
            }
        }
        self.runs.extend_from_slice(rest);
        self.len += other.len;
    }

    /// `self ∘ other`.
    pub fn concat(&self, other: &TokenString) -> TokenString {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// The token at position `i` (0-based), or `None` past the end.
    pub fn get(&self, i: u64) -> Option<u8> {
        if i >= self.len {
            return None;
        }
        let mut seen = 0;
        for r in &self.runs {
            seen += r.len;
            if i < seen {
                return Some(r.bit);
            }
        }
        unreachable!("length invariant violated")
    }

    /// The final token, if any.
    pub fn last(&self) -> Option<u8> {
        self.runs.last().map(|r| r.bit)
    }

    /// The last `n` tokens (all of `self` if `n >= len`).
    pub fn suffix(&self, n: u64) -> TokenString {
        if n >= self.len {
            return self.clone();
        }
        let mut to_drop = self.len - n;
        let mut runs = self.runs.as_slice();
        while let Some(first) = runs.first() {
            if first.len <= to_drop {
                to_drop -= first.len;
                runs = &runs[1..];
            } else {
                break;
            }
        }
        let mut out: Vec<Run> = runs.to_vec();
        if to_drop > 0 {
            out[0].len -= to_drop;
        }
        TokenString { runs: out, len: n }
    }

    /// The first `n` tokens (all of `self` if `n >= len`).
    pub fn prefix(&self, n: u64) -> TokenString {
        if n >= self.len {
            return self.clone();
        }
        let mut remaining = n;
        let mut out = Vec::new();
        for r in &self.runs {
            if remaining == 0 {
                break;
            }
            let take = r.len.min(remaining);
            out.push(Run { bit: r.bit, len: take });
            remaining -= take;
        }
        TokenString { runs: out, len: n }
    }

    pub fn starts_with(&self, prefix: &TokenString) -> bool {
        prefix.len <= self.len && self.prefix(prefix.len) == *prefix
    }

    pub fn ends_with(&self, suffix: &TokenString) -> bool {
        suffix.len <= self.len && self.suffix(suffix.len) == *suffix
    }

    /// Length of the maximal leading run of zeros.
    pub fn leading_zeros(&self) -> u64 {
        match self.runs.first() {
            Some(r) if r.bit == 0 => r.len,
            _ => 0,
        }
    }

    /// Iterates the tokens front to back. O(len) overall.
    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        self.runs.iter().flat_map(|r| std::iter::repeat(r.bit).take(r.len as usize))
    }

    /// Materializes the tokens; intended for short strings.
    pub fn to_vec(&self) -> Vec<u8> {
        self.bits().collect()
    }
}

impl Ord for TokenString {
    /// Lexicographic order with 0 < 1; a proper prefix precedes its
    /// extensions. Matches the order of `to_vec()` under slice comparison.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.runs.as_slice(), other.runs.as_slice());
        let (mut take_a, mut take_b) = (0u64, 0u64);
        loop {
            match (a.first(), b.first()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(ra), Some(rb)) => {
                    if ra.bit != rb.bit {
                        return ra.bit.cmp(&rb.bit);
                    }
                    let rem_a = ra.len - take_a;
                    let rem_b = rb.len - take_b;
                    match rem_a.cmp(&rem_b) {
                        Ordering::Equal => {
                            a = &a[1..];
                            b = &b[1..];
                            take_a = 0;
                            take_b = 0;
                        }
                        Ordering::Less => {
                            // a's run ends first; the next token of `a`
                            // (if any) differs from ra.bit.
                            a = &a[1..];
                            match (a.first(), ra.bit) {
                                (None, _) => return Ordering::Less,
                                (Some(_), 0) => return Ordering::Greater,
                                (Some(_), _) => return Ordering::Less,
                            }
                        }
                        Ordering::Greater => {
                            b = &b[1..];
                            match (b.first(), rb.bit) {
                                (None, _) => return Ordering::Greater,
                                (Some(_), 0) => return Ordering::Less,
                                (Some(_), _) => return Ordering::Greater,
                            }
                        }
                    }
                }
            }
        }
    }
}

impl PartialOrd for TokenString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TokenString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.runs {
            let c = if r.bit == 0 { '0' } else { '1' };
            for _ in 0..r.len {
                f.write_fmt(format_args!("{c}"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TokenString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len > 64 {
            // Compact run form for long strings: 0^12.1^3 style.
            let mut first = true;
            write!(f, "\"")?;
            for r in &self.runs {
                if !first {
                    write!(f, ".")?;
                }
                first = false;
                write!(f, "{}^{}", r.bit, r.len)?;
            }
            write!(f, "\"")
        } else {
            write!(f, "\"{self}\"")
        }
    }
}

/// Parse error for [`TokenString::from_str`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid token {found:?} at position {pos}; expected '0' or '1'")]
pub struct ParseTokenStringError {
    pub pos: usize,
    pub found: char,
}

impl FromStr for TokenString {
    type Err = ParseTokenStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = TokenString::empty();
        for (pos, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(0),
                '1' => out.push(1),
                found => return Err(ParseTokenStringError { pos, found }),
            }
        }
        Ok(out)
    }
}

impl Serialize for TokenString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TokenString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Convenience constructor used heavily in tests: `ts("0100")`.
pub fn ts(s: &str) -> TokenString {
    s.parse().expect("literal token string")
}
