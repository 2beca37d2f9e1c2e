//! The taxonomy class: a shared baseline generator that spells out a bucket
//! value bit by bit, plus one-point modifications that plant the bucket.
//!
//! At scale s the bucket set is K_s = {r(s), ..., r(s) + 2^r(s) - 1}. The
//! baseline maps the special form 0^s 1 0^k 1 0^(s-k-1) z with k in K_s and
//! |z| < r(s) to bit |z|+1 of k - r(s) (bit 1 is the least significant) and
//! everything else to 0. Member f_(s,k) equals the baseline except at the
//! single point 0^s 1 0^k, where it outputs 1. Generating from the probe
//! 0^s 1 0^i therefore rolls forward to the planted point, emits 1, pads,
//! and then spells the bucket value, so late horizons read off its bits.

use serde::{Deserialize, Serialize};

use crate::classes::{ClassError, RateFunction};
use crate::gen::{e2e, Generator};
use crate::token::TokenString;

pub const DEFAULT_M0: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyParams {
    pub rate: RateFunction,
    /// Smallest enumerated scale; inputs parsing to s < m0 fall to 0.
    pub m0: u64,
    /// Largest enumerated scale; inputs parsing to s > s_max fall to 0.
    pub s_max: u64,
}

impl TaxonomyParams {
    /// Constant rate 2 over [256, s_max]: the smallest window whose every
    /// scale satisfies both validity bounds with a handy 4-bucket K_s.
    pub fn standard(s_max: u64) -> Self {
        TaxonomyParams { rate: RateFunction::Constant { value: 2 }, m0: DEFAULT_M0, s_max }
    }

    /// Checks both bounds at every enumerated scale: 2^(4 r(s)) <= s and
    /// (r(s) + 2^r(s))^2 <= s, the latter keeping every bucket's padding
    /// block 0^(s-k-1) well formed.
    pub fn validate(&self) -> Result<(), ClassError> {
        assert!(self.m0 <= self.s_max, "empty scale window");
        for s in self.m0..=self.s_max {
            let r = self.rate.rate(s);
            if !self.rate.sublog_ok(s) {
                return Err(ClassError::RateTooLarge { s, rate: r });
            }
            let reach = r + (1u64 << r);
            let needed = reach * reach;
            if needed > s {
                return Err(ClassError::BucketBound { s, rate: r, needed });
            }
        }
        Ok(())
    }

    pub fn contains_s(&self, s: u64) -> bool {
        (self.m0..=self.s_max).contains(&s)
    }

    /// Inclusive bucket range K_s.
    pub fn k_range(&self, s: u64) -> (u64, u64) {
        let r = self.rate.rate(s);
        (r, r + (1u64 << r) - 1)
    }
}

/// The point 0^s 1 0^k (the planted point of f_(s,k), and for k in [1, r(s)]
/// the probe instances the shattering witness is read from).
pub fn special_point(s: u64, k: u64) -> TokenString {
    let mut x = TokenString::zeros(s);
    x.push(1);
    x.extend(&TokenString::zeros(k));
    x
}

/// Probe instances 0^s 1 0^i for i in [1, r(s)].
pub fn probes(p: &TaxonomyParams, s: u64) -> Vec<TokenString> {
    (1..=p.rate.rate(s)).map(|i| special_point(s, i)).collect()
}

enum Parse {
    /// 0^s 1 0^k 1 0^(s-k-1) z with k in K_s, |z| < r(s); value reads bit
    /// |z|+1 of k - r(s).
    Special { s: u64, k: u64, z_len: u64 },
    /// 0^s 1 0^k with k in K_s: the baseline maps it to 0, members may flip.
    Point { s: u64, k: u64 },
    Other,
}

fn parse(p: &TaxonomyParams, x: &TokenString) -> Parse {
    let s = x.leading_zeros();
    if s == x.len() || !p.contains_s(s) {
        return Parse::Other;
    }
    let (klo, khi) = p.k_range(s);
    let after_first = x.suffix(x.len() - s - 1);
    let k = after_first.leading_zeros();
    if k < klo || k > khi {
        return Parse::Other;
    }
    if k == after_first.len() {
        return Parse::Point { s, k };
    }
    // Fixed-position split after the second 1: a pad of exactly s-k-1
    // zeros, then the value suffix z (content free, only its length counts).
    let w = after_first.suffix(after_first.len() - k - 1);
    let pad = s - k - 1;
    if w.len() < pad || w.leading_zeros() < pad {
        return Parse::Other;
    }
    let z_len = w.len() - pad;
    if z_len >= p.rate.rate(s) {
        return Parse::Other;
    }
    Parse::Special { s, k, z_len }
}

fn baseline_value(p: &TaxonomyParams, x: &TokenString) -> u8 {
    match parse(p, x) {
        Parse::Special { s, k, z_len } => {
            let bucket = k - p.rate.rate(s);
            ((bucket >> z_len) & 1) as u8
        }
        _ => 0,
    }
}

/// The shared baseline generator.
pub fn taxonomy_baseline(p: &TaxonomyParams) -> Result<Generator, ClassError> {
    p.validate()?;
    let p = p.clone();
    Ok(Generator::new(
        format!("tax-base[{}..{}]", p.m0, p.s_max),
        move |x: &TokenString| baseline_value(&p, x),
    ))
}

/// Member f_(s,k): the baseline with a single flip at 0^s 1 0^k.
pub fn taxonomy_member(p: &TaxonomyParams, s: u64, k: u64) -> Result<Generator, ClassError> {
    p.validate()?;
    if !p.contains_s(s) {
        return Err(ClassError::SOutOfWindow { s, lo: p.m0, hi: p.s_max });
    }
    let (lo, hi) = p.k_range(s);
    if k < lo || k > hi {
        return Err(ClassError::KOutOfRange { s, k, lo, hi });
    }
    let p = p.clone();
    Ok(Generator::new(format!("tax[s={s},k={k}]"), move |x: &TokenString| {
        match parse(&p, x) {
            Parse::Point { s: ps, k: pk } if ps == s && pk == k => 1,
            _ => baseline_value(&p, x),
        }
    }))
}

/// Per-probe record of a verified shattering witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub s: u64,
    pub k: u64,
    /// (probe index i, e2e output at horizon s), for i in [1, r(s)].
    pub checks: Vec<(u64, u8)>,
}

/// For a labeling y of the probes A_s = {0^s 1 0^i : i in [1, r(s)]},
/// returns the bucket k = r(s) + b, where b has binary digits y (y[0] least
/// significant), after verifying e2e(f_(s,k), probe_i, s) = y_i for every i.
pub fn taxonomy_shatter_witness(
    p: &TaxonomyParams,
    s: u64,
    y: &[u8],
) -> Result<(u64, WitnessReport), ClassError> {
    p.validate()?;
    if !p.contains_s(s) {
        return Err(ClassError::SOutOfWindow { s, lo: p.m0, hi: p.s_max });
    }
    let r = p.rate.rate(s);
    if y.len() != r as usize {
        return Err(ClassError::LabelingLength { got: y.len(), want: r as usize });
    }
    let bucket: u64 = y.iter().enumerate().map(|(j, &bit)| u64::from(bit) << j).sum();
    let k = r + bucket;
    let member = taxonomy_member(p, s, k)?;
    let mut checks = Vec::with_capacity(y.len());
    for i in 1..=r {
        let got = e2e(&member, &special_point(s, i), s);
        let want = y[(i - 1) as usize];
        if got != want {
            return Err(ClassError::WitnessMismatch { i, want, got });
        }
        checks.push((i, got));
    }
    Ok((k, WitnessReport { s, k, checks }))
}
