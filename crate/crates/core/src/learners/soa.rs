//! Standard optimal algorithm driven by the multiclass dimension of the
//! trajectory table. For each candidate trajectory branch at the queried
//! instance, the learner asks how much dimension the class would retain
//! if that branch were the truth, and predicts the final token of the
//! branch that keeps the most. A wrong final token then certifies that
//! the surviving version space lost a full unit of dimension.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dims::{cot_table, DimOracle, DimsError, MemberSet};
use crate::game::{Feedback, OnlineLearner};
use crate::gen::Generator;
use crate::token::TokenString;

pub struct SoaCotLearner {
    oracle: DimOracle<TokenString>,
    column: Arc<HashMap<TokenString, usize>>,
    alive: MemberSet,
}

impl SoaCotLearner {
    /// Precomputes the trajectory table of `class` on `pool` at horizon
    /// `m`. Queries outside the pool are rejected at predict time.
    pub fn new(class: &[Generator], pool: &[TokenString], m: u64) -> Result<Self, DimsError> {
        let table = cot_table(class, pool, m)?;
        let column = pool.iter().enumerate().map(|(j, x)| (x.clone(), j)).collect();
        let alive = table.full_set();
        Ok(SoaCotLearner { oracle: DimOracle::new(table), column: Arc::new(column), alive })
    }

    pub fn alive(&self) -> &MemberSet {
        &self.alive
    }

    /// Dimension of the current version space.
    pub fn current_dim(&self) -> usize {
        self.oracle.dim(&self.alive)
    }

    fn column_of(&self, x: &TokenString) -> usize {
        *self
            .column
            .get(x)
            .expect("instance outside the pool this learner was built for")
    }
}

impl OnlineLearner for SoaCotLearner {
    fn name(&self) -> &str {
        "soa_cot"
    }

    fn predict(&mut self, x: &TokenString) -> u8 {
        let j = self.column_of(x);
        let table = self.oracle.table();
        let groups = table.groups(&self.alive, j);
        assert!(!groups.is_empty(), "no alive member");
        // Ascending trajectory order plus strict improvement makes the
        // tie-break the lexicographically smallest branch.
        let mut best_branch: Option<&TokenString> = None;
        let mut best_dim = 0;
        for (branch, subset) in &groups {
            let dim = self.oracle.dim(subset);
            if best_branch.is_none() || dim > best_dim {
                best_branch = Some(branch);
                best_dim = dim;
            }
        }
        best_branch.expect("nonempty groups").last().expect("nonempty trajectory")
    }

    fn observe(&mut self, x: &TokenString, feedback: &Feedback) {
        let j = self.column_of(x);
        let table = self.oracle.table();
        let mut next = MemberSet::empty(table.n_members());
        for i in self.alive.iter() {
            let traj = table.label(i, j);
            let consistent = match feedback {
                Feedback::Cot { tokens } => traj == tokens,
                Feedback::E2e { bit } => traj.last() == Some(*bit),
            };
            if consistent {
                next.insert(i);
            }
        }
        debug_assert!(!next.is_empty(), "feedback eliminated every member");
        self.alive = next;
    }

    fn clone_box(&self) -> Box<dyn OnlineLearner> {
        // Forks share the dimension memo through the oracle's inner Arc.
        Box::new(SoaCotLearner {
            oracle: self.oracle.clone(),
            column: Arc::clone(&self.column),
            alive: self.alive.clone(),
        })
    }
}
