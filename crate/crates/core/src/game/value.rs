//! Game value of final-token prediction, computed straight from the
//! min-over-prediction form of the game. This recursion is shaped
//! differently from the dimension recursion (the learner explicitly
//! minimizes over its two possible predictions at every node), so the two
//! act as independent oracles for each other: their values must agree on
//! every finite class.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::dims::{FiniteClassTable, MemberSet};

fn value_rec(
    table: &FiniteClassTable<u8>,
    set: &MemberSet,
    memo: &mut HashMap<MemberSet, usize>,
) -> usize {
    if let Some(&v) = memo.get(set) {
        return v;
    }
    let mut best = 0;
    for j in 0..table.n_pool() {
        let groups = table.groups(set, j);
        if groups.len() < 2 {
            // Feedback is forced, the set cannot shrink, and an optimal
            // learner predicts the forced value: no mistake here.
            continue;
        }
        // Learner picks the prediction minimizing the worst continuation.
        let mut node = usize::MAX;
        for prediction in [0u8, 1u8] {
            let mut worst = 0;
            for (&label, subset) in &groups {
                let miss = usize::from(*label != prediction);
                worst = worst.max(miss + value_rec(table, subset, memo));
            }
            node = node.min(worst);
        }
        best = best.max(node);
    }
    memo.insert(set.clone(), best);
    best
}

/// Value of the final-token game on a finite labeled table: the number of
/// mistakes an optimal adversary forces against an optimal learner.
pub fn e2e_game_value(table: &FiniteClassTable<u8>) -> usize {
    let mut memo = HashMap::new();
    value_rec(table, &table.full_set(), &mut memo)
}

/// Shared-memo handle for evaluating the game value on many subsets of
/// one table, as the minimax learner does round by round.
#[derive(Clone)]
pub struct E2eGameOracle {
    table: Arc<FiniteClassTable<u8>>,
    memo: Arc<Mutex<HashMap<MemberSet, usize>>>,
}

impl E2eGameOracle {
    pub fn new(table: FiniteClassTable<u8>) -> Self {
        E2eGameOracle { table: Arc::new(table), memo: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn table(&self) -> &FiniteClassTable<u8> {
        &self.table
    }

    pub fn value(&self, set: &MemberSet) -> usize {
        assert!(!set.is_empty(), "game value needs at least one member");
        let mut memo = self.memo.lock().expect("oracle memo lock");
        value_rec(&self.table, set, &mut memo)
    }

    pub fn full_value(&self) -> usize {
        self.value(&self.table.full_set())
    }
}

/// Rounds after which an exhaustive game against a class with this many
/// distinct behaviors has realized its full value: one more than the
/// halving bound.
pub fn value_match_horizon(distinct_rows: usize) -> usize {
    assert!(distinct_rows >= 1);
    (usize::BITS - (distinct_rows - 1).leading_zeros()) as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random::{random_pool, random_table_class};
    use crate::dims::{base_table, littlestone_dim, optimal_e2e_mistake_bound};
    use crate::gen::Generator;
    use crate::token::ts;

    #[test]
    fn singleton_and_agreeing_classes_have_value_zero() {
        let class = vec![Generator::constant(1)];
        let table = base_table(&class, &[ts("0"), ts("11")]).unwrap();
        assert_eq!(e2e_game_value(&table), 0);

        let class = vec![Generator::constant(1), Generator::constant(1)];
        let table = base_table(&class, &[ts("0")]).unwrap();
        assert_eq!(e2e_game_value(&table), 0);
    }

    #[test]
    fn two_separated_members_cost_exactly_one() {
        let class = vec![Generator::constant(0), Generator::constant(1)];
        let table = base_table(&class, &[ts("0")]).unwrap();
        assert_eq!(e2e_game_value(&table), 1);
    }

    #[test]
    fn game_value_equals_dimension_on_random_tables() {
        for seed in 0..80 {
            let pool = random_pool(seed, 4, 3);
            let class = random_table_class(seed, 7, &pool, 1);
            let table = base_table(&class, &pool).unwrap();
            assert_eq!(
                e2e_game_value(&table),
                littlestone_dim(&table).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn game_value_agrees_with_generated_mistake_bound() {
        for seed in 100..140 {
            let pool = random_pool(seed, 3, 2);
            let class = random_table_class(seed, 6, &pool, 3);
            for m in 1..=3u64 {
                let direct = {
                    let table = crate::dims::e2e_table(&class, &pool, m).unwrap();
                    e2e_game_value(&table)
                };
                assert_eq!(
                    direct,
                    optimal_e2e_mistake_bound(&class, &pool, m).unwrap(),
                    "seed {seed} m {m}"
                );
            }
        }
    }

    #[test]
    fn oracle_is_monotone_under_subsets() {
        let pool = random_pool(3, 4, 3);
        let class = random_table_class(3, 6, &pool, 1);
        let oracle = E2eGameOracle::new(base_table(&class, &pool).unwrap());
        let full = oracle.full_value();
        for i in 0..class.len() {
            let mut sub = oracle.table().full_set();
            sub.remove(i);
            assert!(oracle.value(&sub) <= full);
        }
    }

    #[test]
    fn horizon_helper_matches_halving_plus_one() {
        assert_eq!(value_match_horizon(1), 1);
        assert_eq!(value_match_horizon(2), 2);
        assert_eq!(value_match_horizon(3), 3);
        assert_eq!(value_match_horizon(4), 3);
        assert_eq!(value_match_horizon(8), 4);
        assert_eq!(value_match_horizon(9), 5);
    }
}
