//! Serializable class descriptions. A config names a construction with its
//! parameters and seed, and builds into members plus a default instance
//! pool and generation length, so an experiment can be replayed from its
//! manifest alone.

use serde::{Deserialize, Serialize};

use crate::classes::{
    alternating_class, glue_classes, hard_class_sample, latch_embed_ints, taxonomy_baseline,
    taxonomy_member, u_instance, ClassError, GluePart, HardClassParams, RateFunction,
    TaxonomyParams,
};
use crate::classes::random::{random_table_class, try_random_pool};
use crate::classes::taxonomy::{probes, special_point};
use crate::gen::{all_bit_strings, Generator};
use crate::token::TokenString;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassConfig {
    /// Seeded random table class over a seeded random pool.
    RandomTable { seed: u64, members: usize, pool_size: usize, max_len: u64, horizon: u64 },
    /// A tiny class given literally: rows of next-token labels over a pool.
    ExplicitTable { pool: Vec<TokenString>, rows: Vec<Vec<u8>> },
    /// All bucket members at one scale, optionally with the baseline.
    Taxonomy { rate: RateFunction, m0: u64, s_max: u64, s: u64, include_baseline: bool },
    /// Latch embeddings of every integer threshold rule on a small grid.
    LatchGrid { dim: usize, coeff_lo: i64, coeff_hi: i64, bias_lo: i64, bias_hi: i64 },
    /// The full alternating window.
    Alternating { m_max: u64, n_max: u64 },
    /// A sampled hard class, materialized as generators.
    Hard { d: u32, m: u64, n_members: u64, seed: u64 },
    /// Shifted union of sub-configs.
    Glue { parts: Vec<GluePartConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluePartConfig {
    pub inner: Box<ClassConfig>,
    pub shift: u64,
    pub max_support_len: u64,
}

/// A materialized config: members, a default pool, and the generation
/// length experiments should use unless overridden.
pub struct BuiltClass {
    pub name: String,
    pub class: Vec<Generator>,
    pub pool: Vec<TokenString>,
    pub default_m: u64,
}

impl ClassConfig {
    pub fn build(&self) -> Result<BuiltClass, ClassError> {
        match self {
            ClassConfig::RandomTable { seed, members, pool_size, max_len, horizon } => {
                let pool = try_random_pool(*seed, *pool_size, *max_len)?;
                let class = random_table_class(*seed, *members, &pool, *horizon);
                Ok(BuiltClass {
                    name: format!("random_table(seed={seed})"),
                    class,
                    pool,
                    default_m: (*horizon).max(1),
                })
            }
            ClassConfig::ExplicitTable { pool, rows } => {
                let class = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        if row.len() != pool.len() {
                            return Err(ClassError::WindowShape {
                                got: row.len(),
                                want: pool.len(),
                            });
                        }
                        let table = pool.iter().cloned().zip(row.iter().copied()).collect();
                        Ok(Generator::from_table(format!("row{i}"), table))
                    })
                    .collect::<Result<_, _>>()?;
                Ok(BuiltClass {
                    name: "explicit_table".into(),
                    class,
                    pool: pool.clone(),
                    default_m: 1,
                })
            }
            ClassConfig::Taxonomy { rate, m0, s_max, s, include_baseline } => {
                let params = TaxonomyParams { rate: *rate, m0: *m0, s_max: *s_max };
                let (lo, hi) = params.k_range(*s);
                let mut class = Vec::new();
                for k in lo..=hi {
                    class.push(taxonomy_member(&params, *s, k)?);
                }
                if *include_baseline {
                    class.push(taxonomy_baseline(&params)?);
                }
                let mut pool = probes(&params, *s);
                for k in lo..=hi {
                    pool.push(special_point(*s, k));
                }
                pool.sort();
                pool.dedup();
                Ok(BuiltClass {
                    name: format!("taxonomy(s={s})"),
                    class,
                    pool,
                    default_m: *s,
                })
            }
            ClassConfig::LatchGrid { dim, coeff_lo, coeff_hi, bias_lo, bias_hi } => {
                assert!(*dim >= 1 && *coeff_lo <= *coeff_hi && *bias_lo <= *bias_hi);
                let span = (*coeff_hi - *coeff_lo + 1) as u128;
                let count = span.pow(*dim as u32) * (*bias_hi - *bias_lo + 1) as u128;
                assert!(count <= 8192, "latch grid of {count} members is too large");
                let mut class = Vec::new();
                let mut v = vec![*coeff_lo; *dim];
                loop {
                    for c in *bias_lo..=*bias_hi {
                        class.push(latch_embed_ints(&v, c).into_generator());
                    }
                    // Odometer step over the coefficient grid.
                    let mut i = 0;
                    while i < *dim && v[i] == *coeff_hi {
                        v[i] = *coeff_lo;
                        i += 1;
                    }
                    if i == *dim {
                        break;
                    }
                    v[i] += 1;
                }
                let pool =
                    all_bit_strings(*dim as u64).iter().map(|z| z.concat(&crate::token::ts("10"))).collect();
                Ok(BuiltClass {
                    name: format!("latch_grid(d={dim})"),
                    class,
                    pool,
                    default_m: 2,
                })
            }
            ClassConfig::Alternating { m_max, n_max } => {
                let class = alternating_class(*m_max, *n_max);
                let mut pool = Vec::new();
                for m in 2..=*m_max {
                    for n in 0..=*n_max {
                        pool.push(u_instance(m, n));
                    }
                }
                Ok(BuiltClass {
                    name: format!("alternating({m_max},{n_max})"),
                    class,
                    pool,
                    default_m: 2 * m_max,
                })
            }
            ClassConfig::Hard { d, m, n_members, seed } => {
                assert!(*n_members <= 4096, "materialize at most 4096 hard members");
                let params = HardClassParams {
                    d: *d,
                    m: *m,
                    n_members: *n_members,
                    minority_num: 1,
                    minority_den: *m,
                    seed: *seed,
                };
                let sample = hard_class_sample(&params, 1 << 24)?;
                let class = sample.generators(*n_members);
                let pool = (1..=*m).map(|j| crate::classes::hard::walk_prompt(j, *m)).collect();
                Ok(BuiltClass {
                    name: format!("hard(m={m},seed={seed})"),
                    class,
                    pool,
                    default_m: *m,
                })
            }
            ClassConfig::Glue { parts } => {
                let mut built_parts = Vec::new();
                let mut pool = Vec::new();
                let mut default_m = 1;
                for part in parts {
                    let built = part.inner.build()?;
                    default_m = default_m.max(built.default_m);
                    for x in &built.pool {
                        pool.push(TokenString::zeros(part.shift).concat(x));
                    }
                    built_parts.push(GluePart {
                        members: built.class,
                        shift: part.shift,
                        max_support_len: part.max_support_len,
                    });
                }
                let class = glue_classes(&built_parts)?;
                pool.sort();
                pool.dedup();
                Ok(BuiltClass { name: format!("glue({} parts)", parts.len()), class, pool, default_m })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ClassConfig::RandomTable {
            seed: 7,
            members: 6,
            pool_size: 4,
            max_len: 3,
            horizon: 2,
        };
        let text = toml_like(&cfg);
        let back: ClassConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    fn toml_like(cfg: &ClassConfig) -> String {
        serde_json::to_string(cfg).unwrap()
    }

    #[test]
    fn builds_produce_consistent_shapes() {
        let built = ClassConfig::RandomTable {
            seed: 1,
            members: 5,
            pool_size: 3,
            max_len: 3,
            horizon: 2,
        }
        .build()
        .unwrap();
        assert_eq!(built.class.len(), 5);
        assert_eq!(built.pool.len(), 3);

        let built = ClassConfig::Alternating { m_max: 2, n_max: 1 }.build().unwrap();
        assert_eq!(built.class.len(), 4);
        assert_eq!(built.pool.len(), 2);
        assert_eq!(built.default_m, 4);

        let built = ClassConfig::LatchGrid {
            dim: 1,
            coeff_lo: -1,
            coeff_hi: 1,
            bias_lo: -1,
            bias_hi: 1,
        }
        .build()
        .unwrap();
        assert_eq!(built.class.len(), 9);
        assert_eq!(built.pool.len(), 2);

        let built = ClassConfig::Hard { d: 1, m: 3, n_members: 20, seed: 5 }.build().unwrap();
        assert_eq!(built.class.len(), 20);
        assert_eq!(built.pool.len(), 3);
    }

    #[test]
    fn explicit_table_errors_on_ragged_rows() {
        let cfg = ClassConfig::ExplicitTable {
            pool: vec![crate::token::ts("0"), crate::token::ts("1")],
            rows: vec![vec![0, 1], vec![1]],
        };
        assert!(matches!(cfg.build(), Err(ClassError::WindowShape { got: 1, want: 2 })));
    }

    #[test]
    fn glue_config_builds_shifted_pools() {
        let inner = ClassConfig::ExplicitTable {
            pool: vec![crate::token::ts("1")],
            rows: vec![vec![1], vec![0]],
        };
        let cfg = ClassConfig::Glue {
            parts: vec![
                GluePartConfig { inner: Box::new(inner.clone()), shift: 0, max_support_len: 1 },
                GluePartConfig { inner: Box::new(inner), shift: 2, max_support_len: 1 },
            ],
        };
        let built = cfg.build().unwrap();
        assert_eq!(built.class.len(), 4);
        assert_eq!(built.pool, vec![crate::token::ts("001"), crate::token::ts("1")]);
    }
}
