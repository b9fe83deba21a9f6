use std::process::Command;

use serde_json::Value;

fn qpsi(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qpsi")).args(args).env_remove("QPSI_SEED").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out) = qpsi(args);
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn two_party_example() {
    let (code, r) = json(&["run", "--q", "5", "--sets", "[1,2,3]", "[1,2,4]", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["intersection_cardinality"], 2);
    assert_eq!(r["result"]["union_cardinality"], 4);
    assert_eq!(r["oracle"]["agrees"], true);
    assert_eq!(r["counts"]["groups"][0], serde_json::json!({"h1": 2, "h2": 1, "h3": 1, "h4": 1}));
    assert_eq!(r["timing_ms"], Value::Null);
}

#[test]
fn three_party_example() {
    let (code, r) = json(&["run", "--q", "7", "--sets", "[1,2,5]", "[2,3]", "[2,4,5]", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["intersection_cardinality"], 1);
    assert_eq!(r["result"]["union_cardinality"], 5);
    assert_eq!(r["resources"]["qubits_prepared_core"], 224);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["run", "--q", "7", "--sets", "[0,1,6]", "[1,6]", "[2,6]", "[6]", "--seed", "99", "--shots", "3"];
    let (_, a) = qpsi(&args);
    let (_, b) = qpsi(&args);
    assert_eq!(a, b);
    let mut par = args.to_vec();
    par.extend(["--parallel", "3"]);
    assert_eq!(qpsi(&par).1, a);
}

#[test]
fn report_file_and_sets_file() {
    let dir = tempfile::tempdir().unwrap();
    let sets = dir.path().join("sets.json");
    std::fs::write(&sets, "[[1,2,3],[1,2,4]]").unwrap();
    let report = dir.path().join("report.json");
    let (code, stdout) = qpsi(&[
        "run",
        "--q",
        "5",
        "--sets-file",
        sets.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("intersection cardinality: 2"));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(written["result"]["union_cardinality"], 4);
    assert_eq!(written["schema_version"], 1);
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpsi"));
        cmd.args(["run", "--q", "5", "--sets", "[1,2]", "[3]"]).args(extra).env_remove("QPSI_SEED");
        if let Some(v) = env {
            cmd.env("QPSI_SEED", v);
        }
        String::from_utf8(cmd.output().unwrap().stdout).unwrap()
    };
    assert_eq!(run(Some("31"), &[]), run(None, &["--seed", "31"]));
    assert_ne!(run(Some("31"), &[]), run(None, &["--seed", "32"]));
}

#[test]
fn exit_codes() {
    assert_eq!(qpsi(&["run", "--q", "5", "--sets", "[1]"]).0, 2);
    assert_eq!(qpsi(&["run", "--q", "5", "--sets", "[7]", "[1]"]).0, 2);
    assert_eq!(qpsi(&["run", "--q", "5", "--sets", "[1]", "[2]", "--adversary", "bogus"]).0, 2);
    assert_eq!(qpsi(&["run", "--q", "5", "--sets", "[1]", "[2]", "--decoys-per-message", "0"]).0, 2);
    let (code, r) = json(&["run", "--q", "5", "--sets", "[1]", "[2]", "--adversary", "intercept-resend"]);
    assert_eq!(code, 3);
    assert!(r["result"]["aborted"]["reason"]["Eavesdropping"].is_object());
    // a constant U_f leaves no trace on the decoys
    assert_eq!(
        qpsi(&["run", "--q", "5", "--sets", "[1]", "[2]", "--adversary", "entangle-measure", "--f", "1,1"]).0,
        0
    );
}

#[test]
fn experiment_commands() {
    let (code, r) = json(&["keygen-stats", "--shots", "512", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["zz"]["violations"], 0);
    assert_eq!(r["result"]["xx"]["violations"], 0);

    let (code, r) = json(&["mixing-check"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["passed"], true);

    let (code, r) = json(&["attack-sim", "--adversary", "intercept-resend", "--shots", "1024"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["detection_probability_exact"], serde_json::json!([1, 4]));

    let (code, r) = json(&["efficiency", "--q", "7", "--parties", "5"]);
    assert_eq!(code, 0);
    assert_eq!(r["efficiency"]["formula"], serde_json::json!([7, 338]));
    assert_eq!(r["efficiency"]["matches"], true);
}

#[test]
fn timing_is_opt_in() {
    let (_, r) = json(&["mixing-check", "--timing"]);
    assert!(r["timing_ms"].is_u64());
}
