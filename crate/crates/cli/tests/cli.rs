use std::process::{Command, Output};

use serde_json::Value;

fn diagcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagcat"))
        .args(args)
        .env_remove("DIAGCAT_CELL_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = diagcat(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

#[test]
fn odd_temperley_lieb_homology_vanishes() {
    let (code, v) = json(&["verify-theorem", "sroka", "--n", "3", "--ring", "f2", "--delta", "0", "--max-degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    let side = v["result"]["algebra_side"].as_array().unwrap();
    assert_eq!(side.len(), 4);
    assert!(side[1..].iter().all(|h| h["dim"] == 0));
}

#[test]
fn worked_rook_brauer_product() {
    let (code, v) = json(&["multiply", "--n", "5", "L2-L3,L1-R5,L4-R2,R1-R4", "L5-R4,L1-L4,R1-R3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["delta_exp"], 1);
    assert_eq!(v["result"]["eps_exp"], 1);
    assert_eq!(v["result"]["diagram"], serde_json::json!({"n": 5, "edges": [[1, 9], [2, 3], [6, 8]]}));
    let text = String::from_utf8(diagcat(&["multiply", "--n", "5", "L2-L3,L1-R5,L4-R2,R1-R4", "L5-R4,L1-L4,R1-R3"]).stdout).unwrap();
    assert!(text.contains("(δε)·"), "{text}");
}

#[test]
fn temperley_lieb_basis_has_catalan_many_rows() {
    let out = diagcat(&["basis", "--family", "tl", "--n", "5"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 42);
    let (_, v) = json(&["basis", "--family", "tl", "--n", "5"]);
    assert_eq!(v["result"]["dim"], 42);
    let csv = String::from_utf8(diagcat(&["basis", "--family", "tl", "--n", "5", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 43);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["homology", "--family", "br", "--n", "2", "--ring", "f2,f3,z", "--delta", "0,1", "--max-degree", "3", "--format", "json"];
    let one = diagcat(&[&args[..], &["--jobs", "1"]].concat());
    let many = diagcat(&[&args[..], &["--jobs", "4"]].concat());
    assert!(one.status.success());
    // the command echo differs only in the jobs flag
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["command"] = Value::Null;
        v
    };
    assert_eq!(strip(&one), strip(&many));
    let again = diagcat(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(one.stdout, again.stdout);
}

#[test]
fn text_and_json_carry_the_same_assertions() {
    let args = ["verify-lemma", "single-trundle", "--n", "8"];
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    let text = String::from_utf8(diagcat(&args).stdout).unwrap();
    for a in v["assertions"].as_array().unwrap() {
        assert!(text.contains(&format!("PASS {}", a["name"].as_str().unwrap())));
    }
}

#[test]
fn failed_assertions_exit_one_with_a_witness() {
    let (code, v) = json(&["verify-theorem", "rook-brauer-invertible", "--n", "2", "--ring", "f3", "--delta", "0", "--eps", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    assert_eq!(v["witness"]["degree"], 1);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["basis", "--family", "tl", "--bogus"],
        &["verify-lemma", "nope"],
        &["verify-theorem", "sroka", "--n", "2", "--ring", "f2"],
        &["multiply", "--n", "2", "L1-R1,L2-R2", "L1-R2,L2-R1", "--format", "csv"],
        &["basis", "--family", "tl"],
    ] {
        assert_eq!(diagcat(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn resource_guard_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_diagcat"))
        .args(["homology", "--family", "br", "--n", "3", "--ring", "f2", "--delta", "0"])
        .env("DIAGCAT_CELL_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn idempotent_reports_match_the_documented_fields() {
    let (code, v) = json(&["idempotent", "--family", "br", "--n", "3", "1-2,3"]);
    assert_eq!(code, 0);
    for key in ["p", "e", "idempotent", "ls_control", "principal_ideal"] {
        assert!(v["result"].get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["result"]["ls_control"], serde_json::json!([true, true, true]));
    let (code, _) = json(&["idempotent", "--kind", "mirror", "--family", "tl", "--n", "4", "1-2,3-4"]);
    assert_eq!(code, 0);
}

#[test]
fn link_state_commands() {
    let (_, v) = json(&["linkstate", "--n", "5", "--diagram", "L1-L3,L2-R3,L4-R5,R1-R2"]);
    assert_eq!(v["result"]["right"], serde_json::json!({"n": 5, "connections": [[1, 2]], "defects": [3, 5], "missing": [4]}));
    let (_, v) = json(&["linkstate", "--n", "4", "--constraint", "planar", "--defects", "0"]);
    assert_eq!(v["result"]["count"], 2);
}

#[test]
fn selftest_passes() {
    let out = diagcat(&["selftest", "--seed", "11"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.ends_with("result: pass\n"));
}
