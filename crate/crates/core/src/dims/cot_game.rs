//! Minimax value of the trajectory-feedback game.
//!
//! Each round the adversary names an instance, the learner predicts the
//! final bit, and the full length-M trajectory of some consistent member is
//! revealed. Loss counts only the final bit. The value is
//!
//! V(H) = max over instances x with >= 2 consistent trajectories of
//!        min over predictions p of
//!        max over consistent trajectories c of 1[last(c) != p] + V(H|c),
//!
//! and 0 when every instance has a single consistent trajectory (the
//! learner simulates it and never errs). Each recursive step restricts to a
//! strict subset of members, so the recursion terminates.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::dims::{cot_table, DimsError, FiniteClassTable, MemberSet};
use crate::gen::Generator;
use crate::token::TokenString;

fn value_rec(
    table: &FiniteClassTable<TokenString>,
    set: &MemberSet,
    memo: &mut HashMap<MemberSet, usize>,
) -> usize {
    if let Some(&v) = memo.get(set) {
        return v;
    }
    let mut best = 0;
    for x in 0..table.n_pool() {
        let groups = table.groups(set, x);
        if groups.len() < 2 {
            continue;
        }
        let mut round = usize::MAX;
        for pred in 0..=1u8 {
            let mut worst = 0;
            for (traj, sub) in &groups {
                let miss = usize::from(traj.last().expect("trajectories are nonempty") != pred);
                worst = worst.max(miss + value_rec(table, sub, memo));
                if worst >= round {
                    break; // cannot beat the other prediction
                }
            }
            round = round.min(worst);
        }
        best = best.max(round);
    }
    memo.insert(set.clone(), best);
    best
}

/// Game value for the full class of a trajectory table.
pub fn cot_game_value(table: &FiniteClassTable<TokenString>) -> usize {
    let mut memo = HashMap::new();
    value_rec(table, &table.full_set(), &mut memo)
}

/// Builds the length-`m` trajectory table of `class` over `pool`, merges
/// members with identical rows, and returns the game value.
pub fn optimal_cot_mistake_bound(
    class: &[Generator],
    pool: &[TokenString],
    m: u64,
) -> Result<usize, DimsError> {
    let table = cot_table(class, pool, m)?;
    Ok(cot_game_value(&table.dedup_rows()))
}

/// Shared-memo handle for repeated value queries on subsets of one table,
/// as arise when replaying the game position by position.
#[derive(Clone)]
pub struct CotGameOracle {
    table: Arc<FiniteClassTable<TokenString>>,
    memo: Arc<Mutex<HashMap<MemberSet, usize>>>,
}

impl CotGameOracle {
    pub fn new(table: FiniteClassTable<TokenString>) -> Self {
        CotGameOracle { table: Arc::new(table), memo: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn table(&self) -> &FiniteClassTable<TokenString> {
        &self.table
    }

    pub fn value(&self, set: &MemberSet) -> usize {
        assert!(!set.is_empty(), "game value of an empty version space");
        let mut memo = self.memo.lock().expect("oracle memo poisoned");
        value_rec(&self.table, set, &mut memo)
    }

    pub fn full_value(&self) -> usize {
        self.value(&self.table.full_set())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random::{random_pool, random_table_class};
    use crate::dims::{base_table, littlestone_dim, optimal_e2e_mistake_bound};
    use crate::token::ts;

    #[test]
    fn singleton_class_has_value_zero() {
        let class = [Generator::constant(1)];
        let pool = [ts("0"), ts("1")];
        assert_eq!(optimal_cot_mistake_bound(&class, &pool, 3).unwrap(), 0);
    }

    #[test]
    fn two_constants_on_empty_prompt() {
        // Trajectories "00" vs "11": one forced mistake, then singleton.
        let class = [Generator::constant(0), Generator::constant(1)];
        let pool = [TokenString::empty()];
        assert_eq!(optimal_cot_mistake_bound(&class, &pool, 2).unwrap(), 1);
    }

    #[test]
    fn identical_trajectories_everywhere_give_zero() {
        // Members differ off the trajectory closure only.
        let a = Generator::new("a", |x: &TokenString| u8::from(x.len() >= 100));
        let b = Generator::constant(0);
        let pool = [ts("0"), ts("00")];
        assert_eq!(optimal_cot_mistake_bound(&[a, b], &pool, 2).unwrap(), 0);
    }

    #[test]
    fn bounded_by_base_dimension_and_e2e_value() {
        for seed in 0..60u64 {
            let pool = random_pool(seed ^ 0x5eed, 4, 4);
            let class = random_table_class(seed, 6, &pool, 3);
            for m in 1..=3u64 {
                let v = optimal_cot_mistake_bound(&class, &pool, m).unwrap();
                // The base dimension is measured on every prompt the
                // trajectory game can reach, not just the pool: generated
                // tokens extend pool instances into new base queries.
                let reachable = crate::gen::trajectory_closure(&class, &pool, m);
                let base = littlestone_dim(&base_table(&class, &reachable).unwrap()).unwrap();
                let e2e = optimal_e2e_mistake_bound(&class, &pool, m).unwrap();
                assert!(v <= base, "seed {seed} m {m}: cot value {v} > base dim {base}");
                assert!(v <= e2e, "seed {seed} m {m}: cot value {v} > e2e value {e2e}");
            }
        }
    }

    #[test]
    fn oracle_matches_direct_recursion() {
        let pool = random_pool(7, 3, 3);
        let class = random_table_class(11, 5, &pool, 2);
        let table = cot_table(&class, &pool, 2).unwrap();
        let oracle = CotGameOracle::new(table.clone());
        assert_eq!(oracle.full_value(), cot_game_value(&table));
        // Dropping a member never raises the value: every adversary option
        // in the sub-game exists in the full game with a larger version
        // space left over.
        let full = table.full_set();
        for m in 0..class.len() {
            let mut sub = full.clone();
            sub.remove(m);
            if !sub.is_empty() {
                assert!(oracle.value(&sub) <= oracle.full_value());
            }
        }
    }
}
