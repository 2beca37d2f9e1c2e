//! Combinatorial dimensions of finite generator classes: Littlestone
//! dimension (binary and trajectory-labeled), VC dimension, witness trees,
//! the sequential shattering bound with tree inflation, and the minimax
//! game values the dimensions are checked against.

mod cot_game;
mod littlestone;
mod table;
mod trees;
mod vc;

pub use cot_game::{cot_game_value, optimal_cot_mistake_bound, CotGameOracle};
pub use littlestone::{
    littlestone_dim, littlestone_dim_multiclass, littlestone_witness_tree,
    optimal_e2e_mistake_bound, DimOracle,
};
pub use table::{base_table, cot_table, e2e_table, FiniteClassTable, Label, MemberSet};
pub use trees::{
    inflate_tree, realized_branches, realized_branches_with, ssp_bound, LittlestoneTree,
};
pub use vc::vc_dim;

/// Errors from table construction and dimension computations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimsError {
    #[error("class has no members")]
    EmptyClass,
    #[error("instance pool is empty")]
    EmptyPool,
    #[error("row {member} has {got} labels, expected {want}")]
    RaggedRow { member: usize, got: usize, want: usize },
    #[error("pool instances {first} and {second} are identical")]
    DuplicateInstance { first: usize, second: usize },
    #[error("pool has {got} instances, at most {max} supported")]
    PoolTooLarge { got: usize, max: usize },
    #[error("binomial sum overflows u128 at n={n}, d={d}")]
    BinomialOverflow { n: u64, d: u64 },
}
