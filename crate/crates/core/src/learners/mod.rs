//! Learners for the online game, from generic version-space algorithms
//! to the constructions that exploit specific class structure.

pub mod base;
pub mod halving;
pub mod minimax;
pub mod reduction;
pub mod soa;
pub mod taxonomy;

pub use base::{ltf_halving_base, ltf_rules, suffix_projection, BaseHalving, BaseLearner};
pub use halving::HalvingLearner;
pub use minimax::{minimax_for_mode, MinimaxLearner};
pub use reduction::{ChargeRecord, CotReductionLearner, ReductionMode};
pub use soa::SoaCotLearner;
pub use taxonomy::TaxonomyLearner;
