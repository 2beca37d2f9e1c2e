//! `argen`: run manifest-driven experiments and verify the claim
//! registry. Exit code 0 means every record passed, 1 means at least one
//! failed, 2 means the configuration itself was rejected.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use argen_cli::manifest::{config_error, ConfigError, ExperimentKind, ExperimentManifest};
use argen_cli::ops::{self, RunContext};
use argen_cli::records::{write_csv_atomic, ResultRecord};

#[derive(Parser)]
#[command(name = "argen", version, about = "dimension, game, and noise experiments for token generators")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measure every dimension of a configured class and cross-check them.
    Dims(RunArgs),
    /// Play or exhaustively search one online game.
    Game(RunArgs),
    /// Run the noisy-chain law, direct game, and regret-floor checks.
    Stochastic(RunArgs),
    /// Re-verify claims from the built-in registry.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the experiment manifest (TOML).
    #[arg(long)]
    manifest: PathBuf,
    /// Master seed override; wins over the manifest's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV and JSONL output.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    budget_members: Option<usize>,
    #[arg(long)]
    budget_pool: Option<usize>,
    #[arg(long)]
    budget_depth: Option<u64>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_time_secs: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Claim id to verify, or "all".
    #[arg(default_value = "all")]
    claim: String,
    /// Optional manifest carrying kind = "verify" and a [verify] section.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl RunArgs {
    fn context(&self) -> RunContext {
        RunContext {
            seed: self.seed,
            out_dir: self.out.clone(),
            budget_members: self.budget_members,
            budget_pool: self.budget_pool,
            budget_depth: self.budget_depth,
            budget_nodes: self.budget_nodes,
            budget_time_secs: self.budget_time_secs,
        }
    }
}

fn check_kind(manifest: &ExperimentManifest, want: ExperimentKind) -> Result<()> {
    if manifest.kind != want {
        return Err(config_error(format!(
            "manifest {:?} has kind {:?} but the subcommand expects {:?}",
            manifest.id,
            manifest.kind.as_str(),
            want.as_str()
        )));
    }
    Ok(())
}

fn report(records: &[ResultRecord]) -> bool {
    for r in records {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("{status} {}/{}: {} {}", r.experiment, r.metric, r.value, r.window);
    }
    records.iter().all(|r| r.pass)
}

fn run_manifest_cmd(
    args: &RunArgs,
    want: ExperimentKind,
    run: fn(&ExperimentManifest, &RunContext) -> Result<Vec<ResultRecord>>,
) -> Result<bool> {
    let manifest = ExperimentManifest::load(&args.manifest)?;
    check_kind(&manifest, want)?;
    let ctx = args.context();
    let records = run(&manifest, &ctx)?;
    let stem = RunContext::out_stem(&manifest);
    let path = ctx.out_dir.join(format!("{stem}.csv"));
    write_csv_atomic(&path, &records)?;
    let ok = report(&records);
    println!("{} records -> {}", records.len(), path.display());
    Ok(ok)
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let mut claim = args.claim.clone();
    let mut seed = args.seed;
    if let Some(path) = &args.manifest {
        let manifest = ExperimentManifest::load(path)?;
        check_kind(&manifest, ExperimentKind::Verify)?;
        let spec = manifest
            .verify
            .as_ref()
            .ok_or_else(|| config_error(format!("manifest {:?} needs a [verify] section", manifest.id)))?;
        claim = spec.claim.clone();
        seed = seed.or(manifest.seed);
    }
    let ctx = RunContext { seed, out_dir: args.out.clone(), ..RunContext::default() };
    let results = ops::cmd_verify(&claim, &ctx)?;
    let mut all_ok = true;
    for (id, records) in &results {
        let path = ctx.out_dir.join(format!("claim_{id}.csv"));
        write_csv_atomic(&path, records)?;
        let ok = report(records);
        println!("claim {id}: {} -> {}", if ok { "PASS" } else { "FAIL" }, path.display());
        all_ok &= ok;
    }
    Ok(all_ok)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Dims(args) => run_manifest_cmd(args, ExperimentKind::Dims, ops::cmd_dims),
        Cmd::Game(args) => run_manifest_cmd(args, ExperimentKind::Game, ops::cmd_game),
        Cmd::Stochastic(args) => run_manifest_cmd(args, ExperimentKind::Stochastic, ops::cmd_stochastic),
        Cmd::Verify(args) => run_verify(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
