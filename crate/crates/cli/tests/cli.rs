use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_persuasion"));
    cmd.args(args).env_remove("PERSUASION_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn invalid_scenario_exits_one() {
    let o = run(&["validate", path(&fixture("bad_partition.json"))], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Assumption 3"));

    let o = run(&["validate", "--format", "json", path(&fixture("bad_partition.json"))], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["valid"], Value::Bool(false));
}

#[test]
fn valid_fixtures_pass_validation() {
    for name in ["example_3_1", "example_4_1", "appendix_a", "silence", "aligned_senders"] {
        let o = run(&["validate", path(&fixture(&format!("{name}.json")))], &[]);
        assert_eq!(o.status.code(), Some(0), "{name}");
    }
}

#[test]
fn missing_or_malformed_input_exits_two() {
    let o = run(&["validate", "/no/such/scenario.json"], &[]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = run(&["validate", path(&bad)], &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["solve", path(&fixture("example_3_1.json"))], &[]);
    assert_eq!(o.status.code(), Some(2), "missing --order is a usage error");
}

#[test]
fn thread_settings() {
    let scenario = fixture("silence.json");
    let o = run(&["validate", path(&scenario)], &[("PERSUASION_THREADS", "abc")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--threads", "2", "validate", path(&scenario)], &[]);
    assert_eq!(o.status.code(), Some(0));
    // The variable wins over the flag.
    let o = run(&["--threads", "0", "validate", path(&scenario)], &[("PERSUASION_THREADS", "1")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn solved_pair_round_trips_through_evaluate() {
    let scenario = fixture("example_3_1.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["solve", "--order", "s1_first", "--step", "12", "--format", "json", "--out", out, path(&scenario)], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let solved = json(&o)["utilities"].clone();

    let g1 = dir.path().join("s1_first.g1.json");
    let g2 = dir.path().join("s1_first.g2.json");
    let o = run(&["evaluate", "--format", "json", "--g1", path(&g1), "--g2", path(&g2), path(&scenario)], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["utilities"], solved);
}

#[test]
fn compare_orders_flags_reference_mismatch() {
    let o = run(&["compare-orders", "--format", "json", "--step", "12", path(&fixture("example_3_1.json"))], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let refs = v["references"].as_array().unwrap();
    let alt = refs.iter().find(|r| r["label"] == "s2_first (alternate)").unwrap();
    assert_eq!(alt["reference"], "3");
    assert_eq!(alt["matches"], false);
    assert!(v["discrepancies"].as_u64().unwrap() >= 1);
}

#[test]
fn necessary_check_prints_triple() {
    let o = run(&["check", "--which", "necessary", path(&fixture("example_4_1.json"))], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for s in ["MC", "ML", "BC"] {
        assert!(text.contains(s), "{text}");
    }
}

#[test]
fn simulate_is_deterministic() {
    let scenario = fixture("example_4_1.json");
    let g1 = fixture("commitments/example_4_1/s2_first.g1.json");
    let g2 = fixture("commitments/example_4_1/s2_first.g2.json");
    let args = ["simulate", "--format", "json", "--samples", "50000", "--seed", "9", "--g1", path(&g1), "--g2", path(&g2), path(&scenario)];
    let a = run(&args, &[("PERSUASION_THREADS", "1")]);
    let b = run(&args, &[("PERSUASION_THREADS", "4")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a), json(&b));
}

#[test]
fn verify_reports_bundled_pair() {
    let scenario = fixture("example_3_1.json");
    let g1 = fixture("commitments/example_3_1/s1_first.g1.json");
    let g2 = fixture("commitments/example_3_1/s1_first.g2.json");
    let o = run(&["verify", "--order", "s1_first", "--step", "12", "--format", "json", "--g1", path(&g1), "--g2", path(&g2), path(&scenario)], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["report"]["passed"], true);
}
