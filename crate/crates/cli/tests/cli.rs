//! End-to-end tests of the `argen` binary: exit codes, CSV determinism,
//! recomputable pass flags, transcript output, and the config-error
//! paths. Manifests come from the repo's manifests/ directory so the
//! shipped examples stay working.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anyhow::Result;
use argen_cli::records::read_csv;

fn argen() -> Command {
    Command::new(env!("CARGO_BIN_EXE_argen"))
}

fn manifest(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(name)
}

fn run(args: &[&str]) -> Output {
    argen().args(args).output().expect("binary should spawn")
}

fn assert_code(out: &Output, want: i32) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn assert_pass_flags_recompute(path: &Path) -> Result<()> {
    let records = read_csv(path)?;
    assert!(!records.is_empty(), "{} should hold records", path.display());
    for r in &records {
        assert_eq!(r.pass, r.window.pass(r.value), "stored pass flag must recompute: {r:?}");
    }
    Ok(())
}

#[test]
fn verify_claim_exits_zero_and_output_is_byte_deterministic() -> Result<()> {
    let dir_a = tempfile::tempdir()?;
    let dir_b = tempfile::tempdir()?;
    for dir in [&dir_a, &dir_b] {
        let out = run(&["verify", "kl-bound", "--out", dir.path().to_str().unwrap()]);
        assert_code(&out, 0);
    }
    let a = std::fs::read(dir_a.path().join("claim_kl-bound.csv"))?;
    let b = std::fs::read(dir_b.path().join("claim_kl-bound.csv"))?;
    assert_eq!(a, b, "re-running the same claim must reproduce the CSV byte for byte");
    assert_pass_flags_recompute(&dir_a.path().join("claim_kl-bound.csv"))
}

#[test]
fn verify_unknown_claim_exits_two_and_lists_known_ids() {
    let out = run(&["verify", "no-such-claim"]);
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("latch") && stderr.contains("kl-bound"), "stderr: {stderr}");
}

#[test]
fn verify_accepts_a_manifest_file() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("verify.toml");
    std::fs::write(&path, "kind = \"verify\"\nid = \"v\"\n[verify]\nclaim = \"kl-bound\"\n")?;
    let out = run(&[
        "verify",
        "--manifest",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert!(dir.path().join("claim_kl-bound.csv").exists());
    Ok(())
}

#[test]
fn dims_manifest_passes_deterministically_with_recomputable_flags() -> Result<()> {
    let dir_a = tempfile::tempdir()?;
    let dir_b = tempfile::tempdir()?;
    let m = manifest("dims_random.toml");
    for dir in [&dir_a, &dir_b] {
        let out = run(&["dims", "--manifest", m.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_code(&out, 0);
    }
    let a = std::fs::read(dir_a.path().join("random8.csv"))?;
    let b = std::fs::read(dir_b.path().join("random8.csv"))?;
    assert_eq!(a, b);
    let records = read_csv(&dir_a.path().join("random8.csv"))?;
    assert!(records.iter().any(|r| r.metric == "e2e_minimax_value"));
    assert_pass_flags_recompute(&dir_a.path().join("random8.csv"))
}

#[test]
fn dims_budget_override_exits_one_with_partial_failing_records() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let m = manifest("dims_random.toml");
    let out = run(&[
        "dims",
        "--manifest",
        m.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--budget-members",
        "4",
    ]);
    assert_code(&out, 1);
    let records = read_csv(&dir.path().join("random8.csv"))?;
    assert!(records.iter().any(|r| r.metric == "budget_members" && !r.pass));
    assert!(records.iter().all(|r| r.metric.starts_with("budget")), "only partial results expected");
    Ok(())
}

#[test]
fn game_manifest_runs_and_writes_a_transcript() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let m = manifest("game_halving_witness.toml");
    let out = run(&["game", "--manifest", m.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_code(&out, 0);
    let jsonl = std::fs::read_to_string(dir.path().join("halving-vs-witness.jsonl"))?;
    let header: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap())?;
    assert!(header.get("learner").is_some() && header.get("mistakes").is_some());
    let records = read_csv(&dir.path().join("halving-vs-witness.csv"))?;
    assert!(records.iter().any(|r| r.metric == "mistakes" && r.pass));
    assert!(records.iter().any(|r| r.metric == "unrealizable_round" && r.pass));
    Ok(())
}

#[test]
fn latch_tree_game_forces_the_inner_dimension() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let m = manifest("game_latch_forced.toml");
    let out = run(&["game", "--manifest", m.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_code(&out, 0);
    assert_pass_flags_recompute(&dir.path().join("latch-forced.csv"))
}

#[test]
fn stochastic_manifest_passes() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let m = manifest("stoch_direct.toml");
    let out = run(&["stochastic", "--manifest", m.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_code(&out, 0);
    assert_pass_flags_recompute(&dir.path().join("chain-direct.csv"))
}

#[test]
fn stochastic_even_horizon_is_a_config_error() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("even.toml");
    std::fs::write(&path, "kind = \"stochastic\"\nid = \"even\"\n[stochastic]\nm = 2\n")?;
    let out = run(&["stochastic", "--manifest", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("odd"), "stderr: {stderr}");
    Ok(())
}

#[test]
fn subcommand_and_manifest_kind_must_agree() {
    let m = manifest("stoch_direct.toml");
    let out = run(&["dims", "--manifest", m.to_str().unwrap()]);
    assert_code(&out, 2);
}
