//! The online prediction game. An adversary names instances, a learner
//! commits to a final-token prediction, and the adversary reveals feedback
//! that must stay consistent with at least one member of the declared
//! class. Alongside the interactive loop there are exhaustive drivers that
//! search every adversary strategy, and game-value oracles computed by
//! direct recursion for cross-checking the dimension machinery.

pub mod adversaries;
pub mod run;
pub mod transcript;
pub mod value;
pub mod worst_case;

pub use adversaries::{FixedTargetAdversary, LatchAdversary, RandomConsistentAdversary, TreeAdversary};
pub use run::{run_game, Adversary, OnlineLearner};
pub use transcript::{Feedback, FeedbackMode, GameRound, GameTranscript};
pub use value::{e2e_game_value, value_match_horizon, E2eGameOracle};
pub use worst_case::{exhaustive_worst_case, WorstCaseOptions, WorstCaseReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("class has no members")]
    EmptyClass,
    #[error("instance pool is empty")]
    EmptyPool,
    #[error("feedback at round {round} is consistent with no member")]
    UnrealizableFeedback { round: usize },
    #[error("search exceeded the node budget of {limit}")]
    BudgetExceeded { limit: u64 },
}
