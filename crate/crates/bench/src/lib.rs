//! Shared fixtures for the benchmarks: one mid-sized random class and the
//! standard taxonomy window, built once per bench run.

use argen_core::classes::random::{random_pool, random_table_class};
use argen_core::classes::TaxonomyParams;
use argen_core::gen::Generator;
use argen_core::TokenString;

pub const BENCH_M: u64 = 2;

/// Ten members over five instances, the size the dimension recursions
/// see in the randomized verification lanes.
pub fn random_case() -> (Vec<Generator>, Vec<TokenString>) {
    let pool = random_pool(42, 5, 3);
    let class = random_table_class(42, 10, &pool, BENCH_M);
    (class, pool)
}

pub fn standard_taxonomy() -> TaxonomyParams {
    TaxonomyParams::standard(300)
}
