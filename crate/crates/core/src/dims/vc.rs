//! VC dimension of a finite binary-labeled class by exhaustive shattering
//! search.

use crate::dims::{DimsError, FiniteClassTable};

/// Largest subset of the pool shattered by the class's rows.
///
/// Rows are packed into one u64 bitmask per member (pool size is capped at
/// 63), and a candidate subset is shattered when extracting its columns from
/// the row masks yields all 2^k patterns. Subsets are searched in increasing
/// size with early exit: if no subset of size k is shattered, none larger is.
pub fn vc_dim(table: &FiniteClassTable<u8>) -> Result<usize, DimsError> {
    let n = table.n_pool();
    if n > 63 {
        return Err(DimsError::PoolTooLarge { got: n, max: 63 });
    }
    let masks: Vec<u64> = (0..table.n_members())
        .map(|m| {
            (0..n).fold(0u64, |acc, j| acc | (u64::from(*table.label(m, j)) << j))
        })
        .collect();

    let max_useful = {
        // Distinct rows cap the dimension: 2^d patterns need 2^d rows.
        let mut rows: Vec<u64> = masks.clone();
        rows.sort_unstable();
        rows.dedup();
        rows.len().ilog2() as usize
    };

    let mut best = 0;
    for k in 1..=n.min(max_useful) {
        if !some_subset_shattered(&masks, n, k) {
            break;
        }
        best = k;
    }
    Ok(best)
}

fn some_subset_shattered(masks: &[u64], n: usize, k: usize) -> bool {
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        if is_shattered(masks, &subset) {
            return true;
        }
        // Next k-combination of {0..n} in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if subset[i] != i + n - k {
                break;
            }
            if i == 0 {
                return false;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

fn is_shattered(masks: &[u64], subset: &[usize]) -> bool {
    let k = subset.len();
    let want = 1u64 << k;
    let mut seen = 0u64;
    let mut count = 0u32;
    for &mask in masks {
        let mut pattern = 0u64;
        for (bit, &col) in subset.iter().enumerate() {
            pattern |= ((mask >> col) & 1) << bit;
        }
        if seen & (1 << pattern) == 0 {
            seen |= 1 << pattern;
            count += 1;
            if u64::from(count) == want {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::FiniteClassTable;
    use crate::gen::all_bit_strings;
    use crate::token::TokenString;

    fn table(rows: Vec<Vec<u8>>) -> FiniteClassTable<u8> {
        let n = rows[0].len();
        let pool: Vec<TokenString> = all_bit_strings(6).into_iter().take(n).collect();
        let ids = (0..rows.len()).map(|i| format!("g{i}")).collect();
        FiniteClassTable::new(pool, ids, rows).unwrap()
    }

    #[test]
    fn constants_have_vc_zero_or_one() {
        assert_eq!(vc_dim(&table(vec![vec![0, 0, 0]])).unwrap(), 0);
        assert_eq!(vc_dim(&table(vec![vec![0, 0], vec![1, 1]])).unwrap(), 1);
    }

    #[test]
    fn full_cube_has_vc_n() {
        for n in 1..=4usize {
            let rows: Vec<Vec<u8>> = (0..1u32 << n)
                .map(|v| (0..n).map(|j| ((v >> j) & 1) as u8).collect())
                .collect();
            assert_eq!(vc_dim(&table(rows)).unwrap(), n);
        }
    }

    #[test]
    fn singletons_have_vc_one() {
        // Indicator rows plus the zero row shatter every single point but
        // never a pair (the {1,1} pattern is unrealized).
        let mut rows: Vec<Vec<u8>> = (0..4)
            .map(|i| (0..4).map(|j| u8::from(i == j)).collect())
            .collect();
        rows.push(vec![0; 4]);
        assert_eq!(vc_dim(&table(rows)).unwrap(), 1);
    }

    #[test]
    fn pool_cap_enforced() {
        let pool: Vec<TokenString> = all_bit_strings(6).into_iter().collect();
        let t = FiniteClassTable::new(pool, vec!["g".into()], vec![vec![0; 64]]).unwrap();
        assert!(matches!(vc_dim(&t), Err(DimsError::PoolTooLarge { got: 64, max: 63 })));
    }

    #[test]
    fn vc_at_most_log_members() {
        let t = table(vec![vec![0, 1, 0], vec![1, 0, 1], vec![1, 1, 1]]);
        assert!(vc_dim(&t).unwrap() <= 1); // 3 rows < 4 patterns for k = 2
    }

    proptest::proptest! {
        #[test]
        fn vc_le_littlestone(seed in 0u64..30) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let members = rng.gen_range(1..=12usize);
            let n = rng.gen_range(1..=5usize);
            let rows: Vec<Vec<u8>> = (0..members)
                .map(|_| (0..n).map(|_| rng.gen_range(0..=1u8)).collect())
                .collect();
            let t = table(rows);
            let vc = vc_dim(&t).unwrap();
            let lit = crate::dims::littlestone_dim(&t).unwrap();
            proptest::prop_assert!(vc <= lit);
        }
    }
}
