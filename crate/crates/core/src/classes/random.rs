//! Seeded random pools, table-backed generator classes, and instance trees.
//! These drive the brute-force cross-checks: small enough to exhaust, and
//! reproducible bit-for-bit from the seed.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

use crate::classes::ClassError;
use crate::dims::LittlestoneTree;
use crate::gen::{all_bit_strings, Generator};
use crate::rng::stream_rng;
use crate::token::TokenString;

/// `n` distinct instances with lengths in [0, max_len], in draw order.
pub fn random_pool(seed: u64, n: usize, max_len: u64) -> Vec<TokenString> {
    try_random_pool(seed, n, max_len).expect("pool request exceeds available strings")
}

pub fn try_random_pool(seed: u64, n: usize, max_len: u64) -> Result<Vec<TokenString>, ClassError> {
    // 2^(max_len+1) - 1 strings of length <= max_len exist.
    let have: u128 = (1u128 << (max_len + 1).min(127)) - 1;
    if (n as u128) > have {
        return Err(ClassError::PoolExhausted { need: n, have });
    }
    let mut rng = stream_rng(seed, 0);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = rng.gen_range(0..=max_len);
        let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
        let x = TokenString::from_bits(bits);
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    Ok(out)
}

/// A class of `n_members` table-backed generators, each assigning seeded
/// random bits to every string in the trajectory closure of `pool` up to
/// depth `horizon` (that is, pool instances extended by fewer than `horizon`
/// generated tokens) and 0 elsewhere.
///
/// Trajectories of length up to `horizon` from any pool instance therefore
/// stay inside the randomized region.
pub fn random_table_class(
    seed: u64,
    n_members: usize,
    pool: &[TokenString],
    horizon: u64,
) -> Vec<Generator> {
    (0..n_members)
        .map(|member| {
            let mut rng = stream_rng(seed, 1 + member as u64);
            let mut table = HashMap::new();
            for x in pool {
                for len in 0..horizon {
                    for w in all_bit_strings(len) {
                        // Overlapping closures overwrite deterministically:
                        // iteration order is fixed by (pool order, len, lex).
                        table.insert(x.concat(&w), rng.gen_range(0..=1u8));
                    }
                }
            }
            Generator::from_table(format!("rnd{seed}m{member}"), table)
        })
        .collect()
}

/// Perfect depth-`depth` tree whose node instances are drawn from `pool`.
pub fn random_tree(seed: u64, depth: u64, pool: &[TokenString]) -> LittlestoneTree {
    assert!(!pool.is_empty(), "tree needs a nonempty pool");
    let mut rng = stream_rng(seed, 2);
    LittlestoneTree::perfect(depth, &mut |_| pool[rng.gen_range(0..pool.len())].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::cot;

    #[test]
    fn pools_are_distinct_and_reproducible() {
        let a = random_pool(3, 10, 4);
        let b = random_pool(3, 10, 4);
        assert_eq!(a, b);
        let set: BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), 10);
    }

    #[test]
    fn pool_exhaustion_is_an_error() {
        assert!(try_random_pool(0, 4, 1).is_err()); // only 3 strings of length <= 1
        assert_eq!(try_random_pool(0, 3, 1).unwrap().len(), 3);
    }

    #[test]
    fn classes_are_reproducible() {
        let pool = random_pool(1, 3, 3);
        let a = random_table_class(5, 4, &pool, 3);
        let b = random_table_class(5, 4, &pool, 3);
        for (ga, gb) in a.iter().zip(&b) {
            for x in &pool {
                assert_eq!(cot(ga, x, 3), cot(gb, x, 3));
            }
        }
    }

    #[test]
    fn tree_instances_come_from_pool() {
        let pool = random_pool(4, 5, 3);
        let tree = random_tree(9, 4, &pool);
        assert_eq!(tree.max_depth(), 4);
        for x in tree.instances() {
            assert!(pool.contains(&x));
        }
    }
}
