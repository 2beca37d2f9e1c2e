//! Experiment manifests. A manifest is a TOML file that fully determines a
//! run: what to build, what to measure, every seed and budget. Re-running
//! the same manifest reproduces the output tables byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use argen_core::classes::ClassConfig;
use argen_core::game::FeedbackMode;

use crate::records::Window;

/// Errors that make the run unrunnable (as opposed to runs whose checks
/// fail): bad manifest shape, unknown claim ids, invalid parameters. The
/// binary maps these to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Dims,
    Game,
    Verify,
    Stochastic,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Dims => "dims",
            ExperimentKind::Game => "game",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Stochastic => "stochastic",
        }
    }
}

/// Ceilings on the exponential machinery. Every manifest gets safe
/// defaults; command-line --budget-* flags override per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Largest class the dimension recursions will accept.
    pub max_members: usize,
    /// Largest instance pool (the VC search caps at 63 regardless).
    pub max_pool: usize,
    /// Deepest tree the branch machinery will walk.
    pub max_depth: u64,
    /// Node ceiling for exhaustive adversary searches.
    pub max_nodes: u64,
    /// Soft wall-clock limit; checked between phases, not preemptive.
    pub time_limit_secs: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_members: 4096,
            max_pool: 63,
            max_depth: 16,
            max_nodes: 1 << 22,
            time_limit_secs: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerChoice {
    Halving,
    SoaCot,
    Minimax,
    Taxonomy,
    /// Trajectory-to-base reduction over a fresh halving learner whose
    /// rules are the class members read as next-token predictors.
    ReductionHalving,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryChoice {
    /// Seeded consistent adversary that keeps splitting the version space.
    RandomConsistent,
    /// Seeded uniform instance chooser with consistent feedback.
    Uniform { rounds: usize },
    /// Truthful play for one class member over the pool in order.
    FixedTarget { member: usize },
    /// Walks a maximal shattered tree of the class's final-token table.
    WitnessTree,
    /// Final-token tree adversary over the unlatched rules, lifted into
    /// the latched game. Only valid for latch_grid classes.
    LatchTree,
    /// No single opponent: search every adversary strategy exhaustively.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub learner: LearnerChoice,
    pub adversary: AdversaryChoice,
    pub feedback: FeedbackMode,
    /// Round horizon for interactive play and exhaustive search alike.
    pub rounds: usize,
    /// Exhaustive-search soundness switches; leave off unless the learner
    /// is a version-space algorithm (see the worst-case search docs).
    #[serde(default)]
    pub splitting_only: bool,
    #[serde(default)]
    pub memo_alive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticSpec {
    /// Generation length of the e2e regret game; must be odd, since even
    /// horizons carry no information about the hidden sign.
    pub m: u64,
    /// Rounds per trial; defaults to the calibrated floor horizon.
    pub rounds: Option<u64>,
    /// Monte Carlo trials per learner/sign cell.
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Rounds for the direct (single-step) game regret check.
    #[serde(default = "default_direct_rounds")]
    pub direct_rounds: u64,
    /// Horizon up to which the closed-form law is checked against the
    /// step recursion.
    #[serde(default = "default_q_check_max")]
    pub q_check_max: u64,
}

fn default_trials() -> u64 {
    10_000
}

fn default_direct_rounds() -> u64 {
    10_000
}

fn default_q_check_max() -> u64 {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySpec {
    /// Registered claim id, or "all".
    pub claim: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    /// Names the run; output files are derived from it.
    pub id: String,
    /// Master seed; commands fall back to per-command defaults.
    pub seed: Option<u64>,
    /// Generation length; defaults to the built class's natural length.
    pub m: Option<u64>,
    pub class: Option<ClassConfig>,
    pub game: Option<GameSpec>,
    pub verify: Option<VerifySpec>,
    pub stochastic: Option<StochasticSpec>,
    /// Expected windows by metric name; overrides the built-in defaults,
    /// turning a measurement into a checked assertion.
    #[serde(default)]
    pub expect: BTreeMap<String, Window>,
    #[serde(default)]
    pub budgets: Budgets,
    /// Output directory, relative to the working directory unless
    /// absolute; the --out flag overrides it.
    pub out: Option<String>,
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let manifest: ExperimentManifest = toml::from_str(&text)
            .map_err(|e| config_error(format!("manifest {}: {e}", path.display())))?;
        Ok(manifest)
    }

    /// The window for `metric`: the manifest's expectation if declared,
    /// otherwise the command's default.
    pub fn window_for(&self, metric: &str, default: Window) -> Window {
        self.expect.get(metric).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses_with_nested_class_and_expectations() {
        let text = r#"
kind = "dims"
id = "taxonomy-window"
m = 260

[class]
kind = "taxonomy"
m0 = 256
s_max = 300
s = 260
include_baseline = true

[class.rate]
kind = "constant"
value = 2

[expect]
base_littlestone = "==1"
"#;
        let m: ExperimentManifest = toml::from_str(text).unwrap();
        assert_eq!(m.kind, ExperimentKind::Dims);
        assert_eq!(m.m, Some(260));
        assert!(matches!(m.class, Some(ClassConfig::Taxonomy { s: 260, .. })));
        assert_eq!(m.window_for("base_littlestone", Window::AtMost(9.0)), Window::Eq(1.0));
        assert_eq!(m.window_for("other", Window::AtMost(9.0)), Window::AtMost(9.0));
        assert_eq!(m.budgets, Budgets::default());
    }

    #[test]
    fn game_manifest_round_trips() {
        let text = r#"
kind = "game"
id = "soa-vs-tree"
seed = 11
m = 2

[class]
kind = "random_table"
seed = 11
members = 6
pool_size = 4
max_len = 3
horizon = 2

[game]
learner = "soa_cot"
adversary = { kind = "witness_tree" }
feedback = "cot"
rounds = 12
"#;
        let m: ExperimentManifest = toml::from_str(text).unwrap();
        let game = m.game.as_ref().unwrap();
        assert_eq!(game.learner, LearnerChoice::SoaCot);
        assert_eq!(game.adversary, AdversaryChoice::WitnessTree);
        assert!(!game.splitting_only);
        let back = toml::to_string(&m).unwrap();
        let again: ExperimentManifest = toml::from_str(&back).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn bad_window_text_is_a_config_style_error() {
        let text = r#"
kind = "dims"
id = "x"

[expect]
metric = "about 5"
"#;
        assert!(toml::from_str::<ExperimentManifest>(text).is_err());
    }
}
