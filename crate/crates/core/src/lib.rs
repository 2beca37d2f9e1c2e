//! Desk-scale laboratory for online learning of autoregressive next-token
//! generators.
//!
//! A *generator* maps a binary string to its next token. Iterating the map
//! and appending each output yields a chain-of-thought trajectory; the last
//! token of that trajectory is the end-to-end answer. This crate provides:
//!
//! * exact generation semantics over run-length token strings ([`token`],
//!   [`gen`]),
//! * combinatorial dimensions (Littlestone, multiclass Littlestone, VC),
//!   shattered-tree machinery, branch counting, and tree inflation ([`dims`]),
//! * concrete generator families: the taxonomy class, the sampled hard
//!   class with its rule calculus, exact-rational linear threshold
//!   generators with the latch embedding, the alternating-horizons class,
//!   and support-shifted gluing ([`classes`]),
//! * the online game harness with transcripts, adversaries, and exhaustive
//!   worst-case search ([`game`]),
//! * learners: halving, the trajectory-aware SOA, the taxonomy learner, and
//!   the chain-of-thought-to-base reduction ([`learners`]),
//! * stochastic generators and the regret separation experiments
//!   ([`stochastic`]).
//!
//! Everything is deterministic given declared seeds; randomized sampling
//! uses counter-based streams so parallel and serial runs agree bit for bit.

pub mod classes;
pub mod dims;
pub mod gen;
pub mod game;
pub mod learners;
pub mod rng;
pub mod stochastic;
pub mod token;

pub use gen::{
    apply_and_append, cot, e2e, trajectory_branch, trajectory_closure, GenerationTree, Generator,
};
pub use token::TokenString;
