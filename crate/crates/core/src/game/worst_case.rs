//! Exhaustive search over adversary strategies against a concrete
//! learner: every instance choice and every consistent feedback value is
//! explored to the given horizon, and the maximum mistake total is
//! reported. The learner is forked at each branch point via `clone_box`.

use std::collections::{BTreeMap, HashMap};

use crate::dims::MemberSet;
use crate::game::run::OnlineLearner;
use crate::game::transcript::{Feedback, FeedbackMode};
use crate::game::GameError;
use crate::gen::Generator;
use crate::token::TokenString;

#[derive(Debug, Clone, Copy)]
pub struct WorstCaseOptions {
    pub mode: FeedbackMode,
    /// Maximum number of rounds the adversary may play.
    pub horizon: usize,
    /// Skip instances on which all alive members agree. Sound for
    /// learners that predict the unanimous value and whose state does not
    /// change on such rounds (every version-space learner); unsound for
    /// arbitrary learners, which may err on forced feedback.
    pub splitting_only: bool,
    /// Memoize on (alive set, remaining rounds). Sound only when the
    /// learner's future behavior is a function of the alive set, which
    /// holds for version-space learners; arbitrary stateful learners must
    /// leave this off.
    pub memo_alive: bool,
    /// Abort after visiting this many search nodes.
    pub max_nodes: u64,
}

impl WorstCaseOptions {
    pub fn exact(mode: FeedbackMode, horizon: usize) -> Self {
        WorstCaseOptions { mode, horizon, splitting_only: false, memo_alive: false, max_nodes: 1 << 22 }
    }

    pub fn version_space(mode: FeedbackMode, horizon: usize) -> Self {
        WorstCaseOptions { mode, horizon, splitting_only: true, memo_alive: true, max_nodes: 1 << 22 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorstCaseReport {
    /// Maximum mistakes any adversary strategy forces within the horizon.
    pub mistakes: usize,
    /// Search nodes visited.
    pub nodes: u64,
}

struct Search<'a> {
    /// feedback[i][j]: what member i reveals on pool instance j.
    feedback: Vec<Vec<Feedback>>,
    pool: &'a [TokenString],
    memo: HashMap<(MemberSet, usize), usize>,
    use_memo: bool,
    splitting_only: bool,
    nodes: u64,
    max_nodes: u64,
}

impl Search<'_> {
    fn dfs(
        &mut self,
        learner: &dyn OnlineLearner,
        alive: &MemberSet,
        rounds_left: usize,
    ) -> Result<usize, GameError> {
        if rounds_left == 0 {
            return Ok(0);
        }
        if self.use_memo {
            if let Some(&v) = self.memo.get(&(alive.clone(), rounds_left)) {
                return Ok(v);
            }
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(GameError::BudgetExceeded { limit: self.max_nodes });
        }
        let mut best = 0;
        let universe = self.feedback.len();
        for (j, x) in self.pool.iter().enumerate() {
            let mut groups: BTreeMap<&Feedback, MemberSet> = BTreeMap::new();
            for i in alive.iter() {
                groups
                    .entry(&self.feedback[i][j])
                    .or_insert_with(|| MemberSet::empty(universe))
                    .insert(i);
            }
            if self.splitting_only && groups.len() < 2 {
                continue;
            }
            // Owned copies so the recursion below can borrow self mutably.
            let options: Vec<(Feedback, MemberSet)> =
                groups.into_iter().map(|(fb, set)| (fb.clone(), set)).collect();
            for (fb, subset) in &options {
                let mut fork = learner.clone_box();
                let prediction = fork.predict(x);
                let miss = usize::from(prediction != fb.final_bit());
                fork.observe(x, fb);
                let rest = self.dfs(fork.as_ref(), subset, rounds_left - 1)?;
                best = best.max(miss + rest);
            }
        }
        if self.use_memo {
            self.memo.insert((alive.clone(), rounds_left), best);
        }
        Ok(best)
    }
}

/// Maximum mistakes any adversary playing instances from `pool` with
/// consistent feedback can force out of `learner` within the horizon.
pub fn exhaustive_worst_case(
    learner: &dyn OnlineLearner,
    class: &[Generator],
    pool: &[TokenString],
    m: u64,
    opts: &WorstCaseOptions,
) -> Result<WorstCaseReport, GameError> {
    if class.is_empty() {
        return Err(GameError::EmptyClass);
    }
    if pool.is_empty() {
        return Err(GameError::EmptyPool);
    }
    let feedback = class
        .iter()
        .map(|g| pool.iter().map(|x| Feedback::from_generator(g, x, m, opts.mode)).collect())
        .collect();
    let mut search = Search {
        feedback,
        pool,
        memo: HashMap::new(),
        use_memo: opts.memo_alive,
        splitting_only: opts.splitting_only,
        nodes: 0,
        max_nodes: opts.max_nodes,
    };
    let alive = MemberSet::full(class.len());
    let mistakes = search.dfs(learner, &alive, opts.horizon)?;
    Ok(WorstCaseReport { mistakes, nodes: search.nodes })
}
