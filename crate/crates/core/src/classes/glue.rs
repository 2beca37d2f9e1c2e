//! Gluing classes onto disjoint zero-padded regions. Part i lives behind a
//! prefix 0^shift_i and declares the longest inner instance it supports;
//! the schedule must leave gaps so no string decodes into two regions,
//! which keeps every member of one part identically 0 on every other
//! part's region.

use crate::classes::ClassError;
use crate::gen::Generator;
use crate::token::TokenString;

#[derive(Debug, Clone)]
pub struct GluePart {
    pub members: Vec<Generator>,
    /// Zero-prefix length of this part's region.
    pub shift: u64,
    /// Longest inner instance the part's members are used on; the glued
    /// member answers 0 past it, making the declaration binding.
    pub max_support_len: u64,
}

/// Shifted union of the parts' members, in part order.
///
/// Requires shift_(i+1) > shift_i + max_support_len_i: a region-(i+1)
/// string 0^shift_(i+1) ∘ x would decode in region i to an inner string
/// longer than part i supports, and region-i strings are too short to
/// decode in region i+1 at all.
pub fn glue_classes(parts: &[GluePart]) -> Result<Vec<Generator>, ClassError> {
    for (i, pair) in parts.windows(2).enumerate() {
        let min_exclusive = pair[0].shift + pair[0].max_support_len;
        if pair[1].shift <= min_exclusive {
            return Err(ClassError::ShiftSchedule {
                index: i + 1,
                min_exclusive,
                got: pair[1].shift,
            });
        }
    }
    let mut out = Vec::new();
    for part in parts {
        for g in &part.members {
            out.push(shifted(g.clone(), part.shift, part.max_support_len));
        }
    }
    Ok(out)
}

fn shifted(inner: Generator, shift: u64, max_support_len: u64) -> Generator {
    let id = format!("shift{shift}+{}", inner.id());
    Generator::new(id, move |x: &TokenString| {
        if x.len() < shift || x.leading_zeros() < shift {
            return 0;
        }
        let rest = x.suffix(x.len() - shift);
        if rest.len() > max_support_len {
            return 0;
        }
        inner.next(&rest)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random::{random_pool, random_table_class};
    use crate::dims::{base_table, littlestone_dim};
    use crate::gen::all_bit_strings;
    use crate::token::ts;
    use std::collections::BTreeSet;

    fn support_gen(name: &str, strings: &[&str]) -> Generator {
        let support: BTreeSet<TokenString> = strings.iter().map(|s| ts(s)).collect();
        Generator::from_support(name, support)
    }

    #[test]
    fn schedule_violations_are_rejected() {
        let part = |shift| GluePart {
            members: vec![Generator::constant(0)],
            shift,
            max_support_len: 3,
        };
        assert!(matches!(
            glue_classes(&[part(0), part(3)]),
            Err(ClassError::ShiftSchedule { index: 1, min_exclusive: 3, got: 3 })
        ));
        assert!(glue_classes(&[part(0), part(4)]).is_ok());
    }

    #[test]
    fn single_part_shift_zero_is_identity_within_support() {
        let g = support_gen("s", &["01", "110"]);
        let glued = glue_classes(&[GluePart {
            members: vec![g.clone()],
            shift: 0,
            max_support_len: 3,
        }])
        .unwrap();
        for n in 0..=3u64 {
            for x in all_bit_strings(n) {
                assert_eq!(glued[0].next(&x), g.next(&x));
            }
        }
        // Beyond the declared support the glued member is pinned to 0.
        assert_eq!(glued[0].next(&ts("0110")), 0);
    }

    #[test]
    fn shifting_relocates_the_support() {
        let g = support_gen("s", &["1", "10"]);
        let glued = glue_classes(&[GluePart {
            members: vec![g],
            shift: 4,
            max_support_len: 2,
        }])
        .unwrap();
        assert_eq!(glued[0].next(&ts("00001")), 1);
        assert_eq!(glued[0].next(&ts("000010")), 1);
        assert_eq!(glued[0].next(&ts("00000")), 0); // inner "0" unsupported
        assert_eq!(glued[0].next(&ts("0001")), 0); // too few leading zeros
        assert_eq!(glued[0].next(&ts("1")), 0);
        assert_eq!(glued[0].next(&ts("0000101")), 0); // inner too long
    }

    #[test]
    fn part_supports_are_disjoint() {
        let a = support_gen("a", &["1", "01", ""]);
        let b = support_gen("b", &["1", "11", ""]);
        let glued = glue_classes(&[
            GluePart { members: vec![a], shift: 1, max_support_len: 2 },
            GluePart { members: vec![b], shift: 5, max_support_len: 2 },
        ])
        .unwrap();
        let mut supports: Vec<BTreeSet<TokenString>> = vec![BTreeSet::new(), BTreeSet::new()];
        for n in 0..=9u64 {
            for x in all_bit_strings(n) {
                for (i, g) in glued.iter().enumerate() {
                    if g.next(&x) == 1 {
                        supports[i].insert(x.clone());
                    }
                }
            }
        }
        assert!(!supports[0].is_empty() && !supports[1].is_empty());
        assert!(supports[0].is_disjoint(&supports[1]));
    }

    #[test]
    fn glued_dimension_at_most_max_plus_one() {
        for seed in 0..12u64 {
            let pool_a = random_pool(seed, 3, 2);
            let pool_b = random_pool(seed ^ 1, 3, 2);
            let class_a = random_table_class(seed * 2, 5, &pool_a, 1);
            let class_b = random_table_class(seed * 2 + 1, 5, &pool_b, 1);
            let dim_a =
                littlestone_dim(&base_table(&class_a, &pool_a).unwrap()).unwrap();
            let dim_b =
                littlestone_dim(&base_table(&class_b, &pool_b).unwrap()).unwrap();
            let glued = glue_classes(&[
                GluePart { members: class_a, shift: 0, max_support_len: 2 },
                GluePart { members: class_b, shift: 3, max_support_len: 2 },
            ])
            .unwrap();
            let mut pool: Vec<TokenString> = pool_a.clone();
            for x in &pool_b {
                pool.push(TokenString::zeros(3).concat(x));
            }
            pool.sort();
            pool.dedup();
            let glued_dim = littlestone_dim(&base_table(&glued, &pool).unwrap()).unwrap();
            assert!(
                glued_dim <= dim_a.max(dim_b) + 1,
                "seed {seed}: {glued_dim} > max({dim_a},{dim_b}) + 1"
            );
        }
    }
}
