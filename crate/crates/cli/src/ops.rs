//! Subcommand implementations. Each takes a parsed manifest plus the
//! command-line overrides and returns result records; the binary decides
//! exit codes from the records' pass flags. Budget violations become
//! failing records on partial output, not panics, so a truncated run is
//! still inspectable.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use num_traits::ToPrimitive;

use argen_core::classes::{ClassConfig, LinearGen, TaxonomyParams};
use argen_core::dims::{
    base_table, cot_table, e2e_table, littlestone_dim, littlestone_dim_multiclass,
    littlestone_witness_tree, vc_dim,
};
use argen_core::game::adversaries::UniformAdversary;
use argen_core::game::{
    e2e_game_value, exhaustive_worst_case, run_game, Adversary, FixedTargetAdversary, GameError,
    LatchAdversary, OnlineLearner, RandomConsistentAdversary, TreeAdversary, WorstCaseOptions,
};
use argen_core::gen::{all_bit_strings, trajectory_closure, Generator};
use argen_core::learners::{
    minimax_for_mode, BaseHalving, BaseLearner, CotReductionLearner, HalvingLearner,
    ReductionMode, SoaCotLearner, TaxonomyLearner,
};
use argen_core::stochastic::{
    aggregate_regret_floor, default_floor_rounds, final_one_prob, final_one_prob_by_recursion,
    final_token_bias, worst_sign_regret, Sigma, SignLearnerKind,
};
use crate::claims::{self, ClaimCtx};
use crate::manifest::{
    config_error, AdversaryChoice, Budgets, ExperimentManifest, LearnerChoice,
};
use crate::records::{ResultRecord, Window};

/// Command-line overrides that sit on top of the manifest.
#[derive(Debug, Clone, Default)]
pub struct RunContext {
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub budget_members: Option<usize>,
    pub budget_pool: Option<usize>,
    pub budget_depth: Option<u64>,
    pub budget_nodes: Option<u64>,
    pub budget_time_secs: Option<u64>,
}

impl RunContext {
    pub fn budgets(&self, manifest: &ExperimentManifest) -> Budgets {
        let mut b = manifest.budgets.clone();
        if let Some(v) = self.budget_members {
            b.max_members = v;
        }
        if let Some(v) = self.budget_pool {
            b.max_pool = v;
        }
        if let Some(v) = self.budget_depth {
            b.max_depth = v;
        }
        if let Some(v) = self.budget_nodes {
            b.max_nodes = v;
        }
        if let Some(v) = self.budget_time_secs {
            b.time_limit_secs = v;
        }
        b
    }

    pub fn seed(&self, manifest: &ExperimentManifest) -> u64 {
        self.seed.or(manifest.seed).unwrap_or(0)
    }

    /// File stem for this experiment's outputs under the out directory.
    pub fn out_stem(manifest: &ExperimentManifest) -> String {
        manifest.out.clone().unwrap_or_else(|| manifest.id.clone())
    }
}

fn log2_floor(n: usize) -> f64 {
    f64::from(n.max(1).ilog2())
}

fn built_class(manifest: &ExperimentManifest) -> Result<argen_core::classes::BuiltClass> {
    let config = manifest
        .class
        .as_ref()
        .ok_or_else(|| config_error(format!("manifest {:?} needs a [class] section", manifest.id)))?;
    config
        .build()
        .map_err(|e| config_error(format!("class config in {:?} is invalid: {e}", manifest.id)))
}

/// If the built class blows a size budget, report the violation as
/// failing records and stop; partial output still lands in the CSV.
fn budget_records(
    manifest: &ExperimentManifest,
    budgets: &Budgets,
    members: usize,
    pool: usize,
) -> Vec<ResultRecord> {
    let id = &manifest.id;
    vec![
        ResultRecord::new(id, "budget", "budget_members", members as f64, Window::AtMost(budgets.max_members as f64)),
        ResultRecord::new(id, "budget", "budget_pool", pool as f64, Window::AtMost(budgets.max_pool as f64)),
    ]
}

fn time_guard(manifest: &ExperimentManifest, budgets: &Budgets, started: Instant, records: &mut Vec<ResultRecord>) {
    // Deterministic output: only the violation produces a record.
    if started.elapsed().as_secs() > budgets.time_limit_secs {
        records.push(ResultRecord::new(
            &manifest.id,
            "budget",
            "budget_time_exceeded",
            1.0,
            Window::Eq(0.0),
        ));
    }
}

/// Measure every dimension of the configured class and cross-check each
/// one against the independent bound it must satisfy: the halving
/// logarithm, the minimax game value, and the trajectory-closure
/// comparison. `[expect]` entries in the manifest tighten the windows.
pub fn cmd_dims(manifest: &ExperimentManifest, ctx: &RunContext) -> Result<Vec<ResultRecord>> {
    let started = Instant::now();
    let built = built_class(manifest)?;
    let m = manifest.m.unwrap_or(built.default_m);
    let budgets = ctx.budgets(manifest);
    let id = manifest.id.clone();

    let mut records = budget_records(manifest, &budgets, built.class.len(), built.pool.len());
    if records.iter().any(|r| !r.pass) {
        return Ok(records);
    }

    let base = base_table(&built.class, &built.pool)?;
    let base_dim = littlestone_dim(&base)?;
    let e2e = e2e_table(&built.class, &built.pool, m)?;
    let e2e_dim = littlestone_dim(&e2e)?;
    let cot = cot_table(&built.class, &built.pool, m)?;
    let cot_dim = littlestone_dim_multiclass(&cot)?;
    let vc = vc_dim(&e2e)?;
    let game_value = e2e_game_value(&e2e);
    let closure = trajectory_closure(&built.class, &built.pool, m);
    let closure_base_dim = littlestone_dim(&base_table(&built.class, &closure)?)?;

    let push = |metric: &str, claim: &str, value: f64, default: Window, records: &mut Vec<ResultRecord>| {
        let window = manifest.window_for(metric, default);
        records.push(ResultRecord::new(&id, claim, metric, value, window));
    };
    push("base_littlestone", "dims", base_dim as f64, Window::AtMost(log2_floor(base.distinct_rows())), &mut records);
    push("e2e_littlestone", "dims", e2e_dim as f64, Window::AtMost(log2_floor(e2e.distinct_rows())), &mut records);
    push("cot_littlestone", "dims", cot_dim as f64, Window::AtMost(log2_floor(cot.distinct_rows())), &mut records);
    push("e2e_vc", "dims", vc as f64, Window::AtMost(e2e_dim as f64), &mut records);
    push("e2e_minimax_value", "online-char", game_value as f64, Window::Eq(e2e_dim as f64), &mut records);
    push(
        "cot_vs_closure_base",
        "cot-upper",
        closure_base_dim as f64 - cot_dim as f64,
        Window::AtLeast(0.0),
        &mut records,
    );

    time_guard(manifest, &budgets, started, &mut records);
    Ok(records)
}

fn build_learner(
    choice: &LearnerChoice,
    manifest: &ExperimentManifest,
    class: &[Generator],
    pool: &[argen_core::TokenString],
    m: u64,
) -> Result<Box<dyn OnlineLearner>> {
    Ok(match choice {
        LearnerChoice::Halving => Box::new(HalvingLearner::new(class, m)),
        LearnerChoice::SoaCot => Box::new(SoaCotLearner::new(class, pool, m)?),
        LearnerChoice::Minimax => {
            let spec = manifest.game.as_ref().expect("checked by caller");
            Box::new(minimax_for_mode(spec.feedback, class, pool, m)?)
        }
        LearnerChoice::Taxonomy => {
            let Some(ClassConfig::Taxonomy { rate, m0, s_max, .. }) = &manifest.class else {
                return Err(config_error(
                    "the taxonomy learner needs a taxonomy class config for its parameters",
                ));
            };
            let params = TaxonomyParams { rate: rate.clone(), m0: *m0, s_max: *s_max };
            Box::new(TaxonomyLearner::new(params, m).map_err(|e| config_error(e.to_string()))?)
        }
        LearnerChoice::ReductionHalving => {
            let rules = class.to_vec();
            Box::new(CotReductionLearner::with_identity_projection(
                move || Box::new(BaseHalving::new("members", rules.clone())) as Box<dyn BaseLearner>,
                m,
                ReductionMode::FromScratch,
            ))
        }
    })
}

/// The latch-grid's inner rules, before embedding: one threshold rule per
/// grid point, evaluated on the plain bit cube.
fn latch_inner_rules(config: &ClassConfig) -> Result<(Vec<Generator>, Vec<argen_core::TokenString>)> {
    let ClassConfig::LatchGrid { dim, coeff_lo, coeff_hi, bias_lo, bias_hi } = config else {
        return Err(config_error("the latch_tree adversary needs a latch_grid class config"));
    };
    let mut rules = Vec::new();
    let mut v = vec![*coeff_lo; *dim];
    loop {
        for c in *bias_lo..=*bias_hi {
            rules.push(LinearGen::from_ints(&v, c).into_generator());
        }
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
    Ok((rules, all_bit_strings(*dim as u64)))
}

enum BuiltAdversary {
    Interactive { adversary: Box<dyn Adversary>, forced_mistakes: Option<usize> },
    Exhaustive,
}

fn build_adversary(
    choice: &AdversaryChoice,
    manifest: &ExperimentManifest,
    class: &[Generator],
    pool: &[argen_core::TokenString],
    m: u64,
    mode: argen_core::game::FeedbackMode,
    seed: u64,
) -> Result<BuiltAdversary> {
    let adversary: Box<dyn Adversary> = match choice {
        AdversaryChoice::Exhaustive => return Ok(BuiltAdversary::Exhaustive),
        AdversaryChoice::RandomConsistent => {
            Box::new(RandomConsistentAdversary::new(seed, class.to_vec(), pool.to_vec(), m, mode))
        }
        AdversaryChoice::Uniform { rounds } => {
            Box::new(UniformAdversary::new(seed, class.to_vec(), pool.to_vec(), m, mode, *rounds))
        }
        AdversaryChoice::FixedTarget { member } => {
            let target = class.get(*member).cloned().ok_or_else(|| {
                config_error(format!("fixed_target member {member} out of range (class has {})", class.len()))
            })?;
            Box::new(FixedTargetAdversary::new(target, pool.to_vec(), mode, m))
        }
        AdversaryChoice::WitnessTree => {
            let (depth, tree) = littlestone_witness_tree(&e2e_table(class, pool, m)?)?;
            return Ok(BuiltAdversary::Interactive {
                adversary: Box::new(TreeAdversary::new(tree)),
                forced_mistakes: Some(depth),
            });
        }
        AdversaryChoice::LatchTree => {
            let (inner, cube) = latch_inner_rules(
                manifest.class.as_ref().ok_or_else(|| config_error("latch_tree needs a [class]"))?,
            )?;
            let (depth, tree) = littlestone_witness_tree(&base_table(&inner, &cube)?)?;
            return Ok(BuiltAdversary::Interactive {
                adversary: Box::new(LatchAdversary::new(Box::new(TreeAdversary::new(tree)), m, mode)),
                forced_mistakes: Some(depth),
            });
        }
    };
    Ok(BuiltAdversary::Interactive { adversary, forced_mistakes: None })
}

/// Play (or exhaustively search) one game from the manifest. Interactive
/// games write a JSONL transcript next to the CSV; a feedback sequence
/// that no member can explain becomes a failing realizability record.
pub fn cmd_game(manifest: &ExperimentManifest, ctx: &RunContext) -> Result<Vec<ResultRecord>> {
    let started = Instant::now();
    let spec = manifest
        .game
        .as_ref()
        .ok_or_else(|| config_error(format!("manifest {:?} needs a [game] section", manifest.id)))?;
    let built = built_class(manifest)?;
    let m = manifest.m.unwrap_or(built.default_m);
    let budgets = ctx.budgets(manifest);
    let seed = ctx.seed(manifest);
    let id = manifest.id.clone();

    let mut records = budget_records(manifest, &budgets, built.class.len(), built.pool.len());
    records.push(ResultRecord::new(
        &id,
        "budget",
        "budget_depth",
        spec.rounds as f64,
        Window::AtMost(budgets.max_depth as f64),
    ));
    if records.iter().any(|r| !r.pass) {
        return Ok(records);
    }

    let mut learner = build_learner(&spec.learner, manifest, &built.class, &built.pool, m)?;
    match build_adversary(&spec.adversary, manifest, &built.class, &built.pool, m, spec.feedback, seed)? {
        BuiltAdversary::Exhaustive => {
            let opts = WorstCaseOptions {
                mode: spec.feedback,
                horizon: spec.rounds,
                splitting_only: spec.splitting_only,
                memo_alive: spec.memo_alive,
                max_nodes: budgets.max_nodes,
            };
            match exhaustive_worst_case(learner.as_ref(), &built.class, &built.pool, m, &opts) {
                Ok(report) => {
                    let window = manifest.window_for("worst_case_mistakes", Window::AtMost(spec.rounds as f64));
                    records.push(ResultRecord::new(&id, "game", "worst_case_mistakes", report.mistakes as f64, window));
                    records.push(ResultRecord::new(
                        &id,
                        "game",
                        "search_nodes",
                        report.nodes as f64,
                        Window::AtMost(budgets.max_nodes as f64),
                    ));
                }
                Err(GameError::BudgetExceeded { .. }) => {
                    records.push(ResultRecord::new(&id, "budget", "node_budget_exceeded", 1.0, Window::Eq(0.0)));
                }
                Err(e) => return Err(e.into()),
            }
        }
        BuiltAdversary::Interactive { mut adversary, forced_mistakes } => {
            match run_game(learner.as_mut(), adversary.as_mut(), &built.class, m, spec.rounds) {
                Ok(transcript) => {
                    let jsonl = ctx.out_dir.join(format!("{}.jsonl", RunContext::out_stem(manifest)));
                    write_transcript_atomic(&jsonl, &transcript)?;
                    records.push(ResultRecord::new(&id, "game", "unrealizable_round", 0.0, Window::Eq(0.0)));
                    let played = transcript.rounds.len();
                    records.push(ResultRecord::new(
                        &id,
                        "game",
                        "rounds_played",
                        played as f64,
                        Window::AtMost(spec.rounds as f64),
                    ));
                    let default = match forced_mistakes {
                        // A shattered tree punishes every prediction on
                        // its path, so the mistake count is forced.
                        Some(depth) => Window::Eq(depth.min(spec.rounds) as f64),
                        None => Window::AtMost(spec.rounds as f64),
                    };
                    let window = manifest.window_for("mistakes", default);
                    records.push(ResultRecord::new(&id, "game", "mistakes", transcript.mistakes as f64, window));
                }
                Err(GameError::UnrealizableFeedback { round }) => {
                    records.push(ResultRecord::new(
                        &id,
                        "game",
                        "unrealizable_round",
                        round as f64,
                        Window::Eq(0.0),
                    ));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    time_guard(manifest, &budgets, started, &mut records);
    Ok(records)
}

fn write_transcript_atomic(path: &PathBuf, transcript: &argen_core::game::GameTranscript) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("jsonl.tmp");
    let mut out = Vec::new();
    transcript.write_jsonl(&mut out)?;
    std::fs::write(&tmp, out).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// The noisy-chain experiment: verify the exact law, play the direct
/// prediction game with the empirical-majority learner, then measure
/// every learner's worst-sign regret against the calibrated floor.
pub fn cmd_stochastic(manifest: &ExperimentManifest, ctx: &RunContext) -> Result<Vec<ResultRecord>> {
    let spec = manifest
        .stochastic
        .as_ref()
        .ok_or_else(|| config_error(format!("manifest {:?} needs a [stochastic] section", manifest.id)))?;
    if spec.m % 2 == 0 {
        return Err(config_error(format!(
            "stochastic generation length must be odd so the final token carries signal; got {}",
            spec.m
        )));
    }
    let seed = ctx.seed(manifest);
    let id = manifest.id.clone();
    let mut records = Vec::new();

    let mut mismatches = 0u64;
    for sigma in Sigma::all() {
        for start in 0..=1u8 {
            for m in 1..=spec.q_check_max {
                if final_one_prob(sigma, start, m) != final_one_prob_by_recursion(sigma, start, m) {
                    mismatches += 1;
                }
            }
        }
    }
    records.push(ResultRecord::new(&id, "stoch-sep", "law_mismatches", mismatches as f64, Window::Eq(0.0)));

    // The direct game is always single-step: the learner observes each
    // chain step, so its regret is O(1) no matter the e2e horizon m.
    let direct_worst = Sigma::all()
        .iter()
        .map(|&sigma| claims::direct_regret_estimate(sigma, 1, spec.direct_rounds, seed, 16))
        .fold(f64::MIN, f64::max);
    let window = manifest.window_for("direct_worst_regret", Window::AtMost(5.0));
    records.push(ResultRecord::new(&id, "stoch-sep", "direct_worst_regret", direct_worst, window));

    let delta = final_token_bias(spec.m).to_f64().expect("bias is dyadic");
    let rounds = spec.rounds.unwrap_or_else(|| default_floor_rounds(delta));
    let floor = aggregate_regret_floor(rounds, delta);
    for kind in SignLearnerKind::all() {
        let report = worst_sign_regret(kind, spec.m, rounds, spec.trials, seed);
        let metric = format!("floor_{}", kind.build().name());
        let default = Window::AtLeast(floor - 3.0 * report.worst_se);
        let window = manifest.window_for(&metric, default);
        records.push(ResultRecord::new(&id, "stoch-sep", &metric, report.worst_mean, window));
    }
    Ok(records)
}

/// Run one claim, or the whole registry for "all". Unknown ids are a
/// config error that lists what exists.
pub fn cmd_verify(claim: &str, ctx: &RunContext) -> Result<Vec<(String, Vec<ResultRecord>)>> {
    let claim_ctx = ClaimCtx { seed: ctx.seed };
    if claim == "all" {
        let mut out = Vec::new();
        for c in claims::registry() {
            out.push((c.id.to_string(), (c.run)(&claim_ctx)?));
        }
        return Ok(out);
    }
    let Some(c) = claims::find(claim) else {
        return Err(config_error(format!(
            "unknown claim {claim:?}; known claims: {}",
            claims::known_ids().join(", ")
        )));
    };
    Ok(vec![(c.id.to_string(), (c.run)(&claim_ctx)?)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifest::ExperimentKind;

    fn dims_manifest() -> ExperimentManifest {
        toml::from_str(
            r#"
            kind = "dims"
            id = "random8"
            seed = 7
            m = 2
            [class]
            kind = "random_table"
            seed = 7
            members = 8
            pool_size = 3
            max_len = 2
            horizon = 2
            "#,
        )
        .unwrap()
    }

    #[test]
    fn dims_cross_checks_pass_on_a_random_class() {
        let manifest = dims_manifest();
        let ctx = RunContext::default();
        let records = cmd_dims(&manifest, &ctx).unwrap();
        assert!(records.iter().all(|r| r.pass), "{records:?}");
        assert!(records.iter().any(|r| r.metric == "e2e_minimax_value"));
    }

    #[test]
    fn dims_budget_violation_yields_partial_failing_records() {
        let mut manifest = dims_manifest();
        manifest.budgets.max_members = 4;
        let records = cmd_dims(&manifest, &RunContext::default()).unwrap();
        assert!(records.iter().any(|r| r.metric == "budget_members" && !r.pass));
        assert!(records.iter().all(|r| r.metric.starts_with("budget")));
    }

    #[test]
    fn stochastic_rejects_even_length() {
        let manifest: ExperimentManifest = toml::from_str(
            r#"
            kind = "stochastic"
            id = "bad"
            [stochastic]
            m = 2
            "#,
        )
        .unwrap();
        assert_eq!(manifest.kind, ExperimentKind::Stochastic);
        let err = cmd_stochastic(&manifest, &RunContext::default()).unwrap_err();
        assert!(err.to_string().contains("odd"));
    }

    #[test]
    fn verify_rejects_unknown_claims_with_the_known_list() {
        let err = cmd_verify("nope", &RunContext::default()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("latch") && text.contains("kl-bound"));
    }
}
