//! Concrete generator-class constructions: the taxonomy class and its
//! shattering witnesses, the seeded hard class with its rule machinery,
//! exact-rational linear threshold generators with the latch embedding, the
//! alternating-horizons class, support-disjoint gluing, and seeded random
//! table classes for oracles.

pub mod alternating;
pub mod config;
pub mod glue;
pub mod hard;
pub mod linear;
pub mod random;
pub mod rate;
pub mod rules;
pub mod taxonomy;

pub use alternating::{alternating_class, alternating_member, u_instance, AlternatingParams};
pub use config::{BuiltClass, ClassConfig, GluePartConfig};
pub use glue::{glue_classes, GluePart};
pub use hard::{green_red_branches, hard_class_sample, hard_instances, HardClassParams, HardClassSample};
pub use linear::{latch_embed, latch_embed_ints, LinearGen};
pub use rate::RateFunction;
pub use rules::{
    conjunction_probability, prefix_path_rule, resolve_for_hard, rule_filter, ResolvedRule, Rule,
};
pub use taxonomy::{
    taxonomy_baseline, taxonomy_member, taxonomy_shatter_witness, TaxonomyParams, WitnessReport,
};

/// Errors from class construction and validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassError {
    #[error("rate r({s}) = {rate} exceeds the sub-logarithmic bound (needs 2^(4r) <= s)")]
    RateTooLarge { s: u64, rate: u64 },
    #[error("bucket bound fails at s = {s}: (r + 2^r)^2 = {needed} > s with r = {rate}")]
    BucketBound { s: u64, rate: u64, needed: u64 },
    #[error("s = {s} outside the enumerated window [{lo}, {hi}]")]
    SOutOfWindow { s: u64, lo: u64, hi: u64 },
    #[error("k = {k} outside K_{s} = [{lo}, {hi}]")]
    KOutOfRange { s: u64, k: u64, lo: u64, hi: u64 },
    #[error("labeling has {got} bits, window needs {want}")]
    LabelingLength { got: usize, want: usize },
    #[error("witness check failed at probe i = {i}: produced {got}, labeling wants {want}")]
    WitnessMismatch { i: u64, want: u8, got: u8 },
    #[error("sample of {need} labels exceeds budget {budget}")]
    BudgetExceeded { need: u128, budget: u128 },
    #[error("generation length m = {m} is below the minimum {min}")]
    MTooSmall { m: u64, min: u64 },
    #[error("instance index {index} falls outside Z = {{0^i : i in [1, {max}]}}")]
    OutOfZ { index: u64, max: u64 },
    #[error("part {index}: shift {got} must exceed previous shift plus support length {min_exclusive}")]
    ShiftSchedule { index: usize, min_exclusive: u64, got: u64 },
    #[error("window table has {got} cells, expected {want}")]
    WindowShape { got: usize, want: usize },
    #[error("rule is not a conjunction of atoms (disjunction present)")]
    NotConjunctive,
    #[error("pool request needs {need} distinct strings, only {have} exist up to the length cap")]
    PoolExhausted { need: usize, have: u128 },
}
