//! Game-optimal play by direct lookahead: predict the token minimizing
//! the worst-case number of future mistakes, as scored by the exact game
//! value of each surviving version space.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dims::{cot_table, e2e_table, CotGameOracle, DimsError, FiniteClassTable, MemberSet};
use crate::game::{E2eGameOracle, Feedback, FeedbackMode, OnlineLearner};
use crate::gen::Generator;
use crate::token::TokenString;

enum Oracle {
    E2e(E2eGameOracle),
    Cot(CotGameOracle),
}

impl Oracle {
    fn value(&self, set: &MemberSet) -> usize {
        match self {
            Oracle::E2e(o) => o.value(set),
            Oracle::Cot(o) => o.value(set),
        }
    }
}

pub struct MinimaxLearner {
    oracle: Arc<Oracle>,
    column: Arc<HashMap<TokenString, usize>>,
    /// Final token of each member's behavior per pool column.
    final_bits: Arc<Vec<Vec<u8>>>,
    /// Full trajectory per member and column, for trajectory feedback.
    trajectories: Option<Arc<Vec<Vec<TokenString>>>>,
    alive: MemberSet,
    name: &'static str,
}

fn column_map(pool: &[TokenString]) -> HashMap<TokenString, usize> {
    pool.iter().enumerate().map(|(j, x)| (x.clone(), j)).collect()
}

fn bits_of(table: &FiniteClassTable<u8>) -> Vec<Vec<u8>> {
    (0..table.n_members()).map(|i| table.row(i).to_vec()).collect()
}

impl MinimaxLearner {
    pub fn new_e2e(class: &[Generator], pool: &[TokenString], m: u64) -> Result<Self, DimsError> {
        let table = e2e_table(class, pool, m)?;
        let alive = table.full_set();
        let final_bits = bits_of(&table);
        Ok(MinimaxLearner {
            oracle: Arc::new(Oracle::E2e(E2eGameOracle::new(table))),
            column: Arc::new(column_map(pool)),
            final_bits: Arc::new(final_bits),
            trajectories: None,
            alive,
            name: "minimax_e2e",
        })
    }

    pub fn new_cot(class: &[Generator], pool: &[TokenString], m: u64) -> Result<Self, DimsError> {
        let table = cot_table(class, pool, m)?;
        let alive = table.full_set();
        let trajectories: Vec<Vec<TokenString>> =
            (0..table.n_members()).map(|i| table.row(i).to_vec()).collect();
        let final_bits = trajectories
            .iter()
            .map(|row| row.iter().map(|t| t.last().expect("nonempty trajectory")).collect())
            .collect();
        Ok(MinimaxLearner {
            oracle: Arc::new(Oracle::Cot(CotGameOracle::new(table))),
            column: Arc::new(column_map(pool)),
            final_bits: Arc::new(final_bits),
            trajectories: Some(Arc::new(trajectories)),
            alive,
            name: "minimax_cot",
        })
    }

    pub fn current_value(&self) -> usize {
        self.oracle.value(&self.alive)
    }

    fn column_of(&self, x: &TokenString) -> usize {
        *self
            .column
            .get(x)
            .expect("instance outside the pool this learner was built for")
    }

    /// Version spaces the adversary can choose between at column `j`,
    /// keyed by the feedback label the game is played in.
    fn splits(&self, j: usize) -> Vec<(u8, MemberSet)> {
        let universe = self.final_bits.len();
        match &self.trajectories {
            None => {
                let mut by_bit: [MemberSet; 2] =
                    [MemberSet::empty(universe), MemberSet::empty(universe)];
                for i in self.alive.iter() {
                    by_bit[self.final_bits[i][j] as usize].insert(i);
                }
                (0..2u8).filter(|&b| !by_bit[b as usize].is_empty())
                    .map(|b| (b, by_bit[b as usize].clone()))
                    .collect()
            }
            Some(trajs) => {
                let mut by_traj: std::collections::BTreeMap<&TokenString, MemberSet> =
                    std::collections::BTreeMap::new();
                for i in self.alive.iter() {
                    by_traj
                        .entry(&trajs[i][j])
                        .or_insert_with(|| MemberSet::empty(universe))
                        .insert(i);
                }
                by_traj
                    .into_iter()
                    .map(|(t, set)| (t.last().expect("nonempty trajectory"), set))
                    .collect()
            }
        }
    }
}

impl OnlineLearner for MinimaxLearner {
    fn name(&self) -> &str {
        self.name
    }

    fn predict(&mut self, x: &TokenString) -> u8 {
        let j = self.column_of(x);
        let splits = self.splits(j);
        assert!(!splits.is_empty(), "no alive member");
        if splits.iter().all(|(b, _)| *b == splits[0].0) {
            return splits[0].0;
        }
        let mut best = (usize::MAX, 0u8);
        for prediction in [0u8, 1u8] {
            let mut worst = 0;
            for (bit, subset) in &splits {
                let miss = usize::from(*bit != prediction);
                worst = worst.max(miss + self.oracle.value(subset));
            }
            if worst < best.0 {
                best = (worst, prediction);
            }
        }
        best.1
    }

    fn observe(&mut self, x: &TokenString, feedback: &Feedback) {
        let j = self.column_of(x);
        let mut next = MemberSet::empty(self.final_bits.len());
        for i in self.alive.iter() {
            let consistent = match (feedback, &self.trajectories) {
                (Feedback::Cot { tokens }, Some(trajs)) => &trajs[i][j] == tokens,
                (Feedback::Cot { tokens }, None) => {
                    self.final_bits[i][j] == tokens.last().expect("nonempty trajectory")
                }
                (Feedback::E2e { bit }, _) => self.final_bits[i][j] == *bit,
            };
            if consistent {
                next.insert(i);
            }
        }
        debug_assert!(!next.is_empty(), "feedback eliminated every member");
        self.alive = next;
    }

    fn clone_box(&self) -> Box<dyn OnlineLearner> {
        Box::new(MinimaxLearner {
            oracle: Arc::clone(&self.oracle),
            column: Arc::clone(&self.column),
            final_bits: Arc::clone(&self.final_bits),
            trajectories: self.trajectories.clone(),
            alive: self.alive.clone(),
            name: self.name,
        })
    }
}

/// The mode a minimax learner plays in.
pub fn minimax_for_mode(
    mode: FeedbackMode,
    class: &[Generator],
    pool: &[TokenString],
    m: u64,
) -> Result<MinimaxLearner, DimsError> {
    match mode {
        FeedbackMode::E2e => MinimaxLearner::new_e2e(class, pool, m),
        FeedbackMode::Cot => MinimaxLearner::new_cot(class, pool, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random::{random_pool, random_table_class};
    use crate::dims::base_table;
    use crate::game::{exhaustive_worst_case, value_match_horizon, Adversary, WorstCaseOptions};

    #[test]
    fn e2e_minimax_realizes_exactly_the_dimension() {
        for seed in 0..25 {
            let pool = random_pool(seed, 4, 3);
            let class = random_table_class(seed, 6, &pool, 1);
            let table = base_table(&class, &pool).unwrap();
            let dim = crate::dims::littlestone_dim(&table).unwrap();
            let learner = MinimaxLearner::new_e2e(&class, &pool, 1).unwrap();
            let horizon = value_match_horizon(table.distinct_rows());
            let opts = WorstCaseOptions::version_space(FeedbackMode::E2e, horizon.max(dim + 1));
            let report = exhaustive_worst_case(&learner, &class, &pool, 1, &opts).unwrap();
            assert_eq!(report.mistakes, dim, "seed {seed}");
        }
    }

    #[test]
    fn cot_minimax_realizes_exactly_the_trajectory_game_value() {
        // The trajectory game can have stall rounds where the adversary
        // shrinks the version space without forcing a mistake, so the
        // horizon must cover a shrink per member on top of the value.
        for seed in 30..55 {
            let pool = random_pool(seed, 3, 2);
            let class = random_table_class(seed, 6, &pool, 2);
            let value = crate::dims::optimal_cot_mistake_bound(&class, &pool, 2).unwrap();
            let learner = MinimaxLearner::new_cot(&class, &pool, 2).unwrap();
            let opts = WorstCaseOptions::version_space(FeedbackMode::Cot, class.len() + 1);
            let report = exhaustive_worst_case(&learner, &class, &pool, 2, &opts).unwrap();
            assert_eq!(report.mistakes, value, "seed {seed}");
        }
    }

    #[test]
    fn value_never_increases_during_play() {
        let pool = random_pool(2, 4, 3);
        let class = random_table_class(2, 7, &pool, 2);
        let mut learner = MinimaxLearner::new_cot(&class, &pool, 2).unwrap();
        let mut adversary = crate::game::RandomConsistentAdversary::new(
            2,
            class.clone(),
            pool,
            2,
            FeedbackMode::Cot,
        );
        let mut previous = learner.current_value();
        for round in 1..=20 {
            let Some(x) = adversary.choose_instance(round) else { break };
            let prediction = learner.predict(&x);
            let feedback = adversary.feedback(&x, prediction);
            learner.observe(&x, &feedback);
            let now = learner.current_value();
            let miss = usize::from(prediction != feedback.final_bit());
            assert!(now + miss <= previous, "optimal play lost ground");
            previous = now;
        }
    }
}
