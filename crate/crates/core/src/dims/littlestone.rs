//! Littlestone dimension, binary and multiclass.
//!
//! The dimension of a class is the largest depth of a perfect
//! instance-labeled tree all of whose branches are realized by members. It
//! obeys the recursion
//!
//! ```text
//! L(H) = max over instances x and unordered pairs {y, y'} of distinct
//!        labels realized on x of  1 + min(L(H|x->y), L(H|x->y')),
//! ```
//!
//! with `L(H) = 0` when no instance realizes two labels (all rows equal)
//! and an error on the empty class. For token labels the only pair is
//! {0, 1}, which is the classical binary recursion; trajectory labels give
//! the multiclass dimension of chain-of-thought classes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::dims::table::{e2e_table, FiniteClassTable, Label, MemberSet};
use crate::dims::trees::LittlestoneTree;
use crate::dims::DimsError;
use crate::gen::Generator;
use crate::token::TokenString;

fn dim_rec<L: Label>(
    table: &FiniteClassTable<L>,
    set: &MemberSet,
    memo: &mut HashMap<MemberSet, usize>,
) -> usize {
    if let Some(&hit) = memo.get(set) {
        return hit;
    }
    let mut best = 0;
    for x_idx in 0..table.n_pool() {
        let groups = table.groups(set, x_idx);
        if groups.len() < 2 {
            continue;
        }
        // Restriction to a realized label keeps a strict nonempty subset,
        // so the recursion terminates.
        let parts: Vec<MemberSet> = groups.into_values().collect();
        let dims: Vec<usize> = parts.iter().map(|p| dim_rec(table, p, memo)).collect();
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                best = best.max(1 + dims[i].min(dims[j]));
            }
        }
    }
    memo.insert(set.clone(), best);
    best
}

/// Littlestone dimension of a token-labeled table.
pub fn littlestone_dim(table: &FiniteClassTable<u8>) -> Result<usize, DimsError> {
    Ok(DimOracle::new(table.clone()).full_dim())
}

/// Multiclass Littlestone dimension of a trajectory-labeled table. With
/// length-1 trajectories this coincides with [`littlestone_dim`] of the
/// corresponding token table.
pub fn littlestone_dim_multiclass(table: &FiniteClassTable<TokenString>) -> Result<usize, DimsError> {
    Ok(DimOracle::new(table.clone()).full_dim())
}

/// Optimal mistake bound of the end-to-end game at generation length `m`:
/// the Littlestone dimension of the deduplicated end-to-end table.
pub fn optimal_e2e_mistake_bound(
    class: &[Generator],
    pool: &[TokenString],
    m: u64,
) -> Result<usize, DimsError> {
    littlestone_dim(&e2e_table(class, pool, m)?.dedup_rows())
}

/// Dimension and an explicit shattered witness tree of that depth for a
/// token-labeled table. Every branch of the returned tree is realized by a
/// member of the class (0-edge means label 0 at the node's instance).
pub fn littlestone_witness_tree(
    table: &FiniteClassTable<u8>,
) -> Result<(usize, LittlestoneTree), DimsError> {
    let oracle = DimOracle::new(table.clone());
    let dim = oracle.full_dim();
    let tree = witness_rec(table, &table.full_set(), dim, &oracle);
    Ok((dim, tree))
}

fn witness_rec(
    table: &FiniteClassTable<u8>,
    set: &MemberSet,
    depth: usize,
    oracle: &DimOracle<u8>,
) -> LittlestoneTree {
    if depth == 0 {
        return LittlestoneTree::Leaf;
    }
    for x_idx in 0..table.n_pool() {
        let zero = table.restrict(set, x_idx, &0);
        let one = table.restrict(set, x_idx, &1);
        if zero.is_empty() || one.is_empty() {
            continue;
        }
        if oracle.dim(&zero).min(oracle.dim(&one)) >= depth - 1 {
            return LittlestoneTree::Node {
                instance: table.pool()[x_idx].clone(),
                zero: Box::new(witness_rec(table, &zero, depth - 1, oracle)),
                one: Box::new(witness_rec(table, &one, depth - 1, oracle)),
            };
        }
    }
    unreachable!("depth {depth} requested but dimension of the subset is smaller")
}

/// A memoized dimension oracle over one fixed table, shareable between
/// learner instances (the cache is internally synchronized) so repeated
/// version-space queries across game branches are answered once.
#[derive(Clone)]
pub struct DimOracle<L> {
    table: Arc<FiniteClassTable<L>>,
    memo: Arc<Mutex<HashMap<MemberSet, usize>>>,
}

impl<L: Label> DimOracle<L> {
    pub fn new(table: FiniteClassTable<L>) -> Self {
        DimOracle { table: Arc::new(table), memo: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn table(&self) -> &FiniteClassTable<L> {
        &self.table
    }

    /// Dimension of the class restricted to `set`. `set` must be nonempty.
    pub fn dim(&self, set: &MemberSet) -> usize {
        assert!(!set.is_empty(), "dimension of the empty class is undefined");
        let mut memo = self.memo.lock().unwrap();
        dim_rec(&self.table, set, &mut memo)
    }

    pub fn full_dim(&self) -> usize {
        self.dim(&self.table.full_set())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::trees::realized_branches_with;
    use crate::gen::all_bit_strings;
    use crate::token::ts;

    /// Independent oracle: the same quantity by brute-force maximization
    /// over explicit label matrices, no subsets, no memo.
    fn naive_dim(rows: &[Vec<u8>]) -> usize {
        assert!(!rows.is_empty());
        let n_pool = rows[0].len();
        let mut best = 0;
        for x in 0..n_pool {
            let zero: Vec<Vec<u8>> =
                rows.iter().filter(|r| r[x] == 0).cloned().collect();
            let one: Vec<Vec<u8>> =
                rows.iter().filter(|r| r[x] == 1).cloned().collect();
            if !zero.is_empty() && !one.is_empty() {
                best = best.max(1 + naive_dim(&zero).min(naive_dim(&one)));
            }
        }
        best
    }

    fn table_from_rows(rows: Vec<Vec<u8>>) -> FiniteClassTable<u8> {
        let n = rows[0].len();
        let pool = all_bit_strings(n.next_power_of_two().trailing_zeros() as u64 + 1)
            .into_iter()
            .take(n)
            .collect::<Vec<_>>();
        let ids = (0..rows.len()).map(|i| format!("m{i}")).collect();
        FiniteClassTable::new(pool, ids, rows).unwrap()
    }

    #[test]
    fn two_members_one_split() {
        // Two members disagreeing on a single instance: dimension 1.
        let t = table_from_rows(vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(littlestone_dim(&t).unwrap(), 1);
    }

    #[test]
    fn full_cube_has_dimension_n() {
        for n in 1..=4usize {
            let rows: Vec<Vec<u8>> = (0..1u32 << n)
                .map(|v| (0..n).map(|i| ((v >> i) & 1) as u8).collect())
                .collect();
            let t = table_from_rows(rows.clone());
            assert_eq!(littlestone_dim(&t).unwrap(), n);
            assert_eq!(naive_dim(&rows), n);
        }
    }

    #[test]
    fn all_rows_equal_gives_zero() {
        let t = table_from_rows(vec![vec![1, 0, 1]; 5]);
        assert_eq!(littlestone_dim(&t).unwrap(), 0);
    }

    #[test]
    fn matches_naive_oracle_on_seeded_tables() {
        use rand::Rng;
        for seed in 0..40u64 {
            let mut rng = crate::rng::stream_rng(0xD1135, seed);
            let members = rng.gen_range(1..=10);
            let pool = rng.gen_range(1..=5);
            let rows: Vec<Vec<u8>> =
                (0..members).map(|_| (0..pool).map(|_| rng.gen_range(0..=1u8)).collect()).collect();
            let t = table_from_rows(rows.clone());
            assert_eq!(littlestone_dim(&t).unwrap(), naive_dim(&rows), "seed {seed}");
        }
    }

    #[test]
    fn multiclass_matches_binary_at_length_one() {
        use rand::Rng;
        for seed in 0..20u64 {
            let mut rng = crate::rng::stream_rng(0xD1136, seed);
            let members = rng.gen_range(1..=8);
            let pool_n = rng.gen_range(1..=4);
            let rows: Vec<Vec<u8>> =
                (0..members).map(|_| (0..pool_n).map(|_| rng.gen_range(0..=1u8)).collect()).collect();
            let bin = table_from_rows(rows.clone());
            let traj = FiniteClassTable::new(
                bin.pool().to_vec(),
                bin.member_ids().to_vec(),
                rows.iter()
                    .map(|r| r.iter().map(|&b| TokenString::from_bits([b])).collect())
                    .collect(),
            )
            .unwrap();
            assert_eq!(
                littlestone_dim_multiclass(&traj).unwrap(),
                littlestone_dim(&bin).unwrap()
            );
        }
    }

    #[test]
    fn multiclass_example_two_constants() {
        // {const0, const1} on the empty prompt with length-2 trajectories:
        // one instance realizing two labels, dimension 1.
        let class = [Generator::constant(0), Generator::constant(1)];
        let pool = [TokenString::empty()];
        let t = crate::dims::cot_table(&class, &pool, 2).unwrap();
        assert_eq!(t.label(0, 0), &ts("00"));
        assert_eq!(t.label(1, 0), &ts("11"));
        assert_eq!(littlestone_dim_multiclass(&t).unwrap(), 1);
    }

    #[test]
    fn witness_tree_is_shattered() {
        use rand::Rng;
        for seed in 0..20u64 {
            let mut rng = crate::rng::stream_rng(0xD1137, seed);
            let members = rng.gen_range(2..=10);
            let pool = rng.gen_range(1..=5);
            let rows: Vec<Vec<u8>> =
                (0..members).map(|_| (0..pool).map(|_| rng.gen_range(0..=1u8)).collect()).collect();
            let t = table_from_rows(rows.clone());
            let (dim, tree) = littlestone_witness_tree(&t).unwrap();
            assert_eq!(tree.max_depth(), dim);
            // Every branch of the witness must be realized by some member.
            let index: std::collections::HashMap<_, _> =
                t.pool().iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
            let realized = realized_branches_with(&tree, t.n_members(), &mut |m, x| {
                *t.label(m, index[x])
            });
            assert_eq!(realized.len(), 1usize << dim, "seed {seed}");
        }
    }

    #[test]
    fn duplicates_do_not_change_dimension() {
        let rows = vec![vec![0, 1], vec![1, 0], vec![0, 1]];
        let t = table_from_rows(rows);
        assert_eq!(littlestone_dim(&t).unwrap(), littlestone_dim(&t.dedup_rows()).unwrap());
    }
}
