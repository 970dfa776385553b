use std::path::PathBuf;
use std::process::Command;

use cstwb::cli::run;
use cstwb::kripke_set::{vrank_model, SetKripkeModel};
use serde_json::Value;

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn json(out: &cstwb::cli::Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", out.stdout))
}

fn stage_file(n: usize) -> PathBuf {
    let m = SetKripkeModel::from_classical(&vrank_model(n).unwrap(), "v").unwrap();
    scratch(
        &format!("v{n}.json"),
        &serde_json::to_string(&m.to_json()).unwrap(),
    )
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("prove"));
    assert_eq!(run(&["prove", "--help"]).code, 0);
}

#[test]
fn prove() {
    let out = run(&["prove", "--logic", "ipc", "p | ~p"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.starts_with("NOT_VALID"));
    let j = json(&run(&["--json", "prove", "--logic", "ipc", "~~(p | ~p)"]));
    assert_eq!(j["verdict"], "VALID");
    let j = json(&run(&[
        "--json",
        "prove",
        "--logic",
        "ipc",
        "((p -> q) -> p) -> p",
    ]));
    assert_eq!(j["verdict"], "NOT_VALID");
    assert!(j["countermodel"]["nodes"].as_array().unwrap().len() >= 2);
    assert_eq!(
        run(&["prove", "--logic", "cpc", "((p -> q) -> p) -> p"]).code,
        0
    );
    let j = json(&run(&["--json", "prove", "--logic", "cpc", "p -> q"]));
    assert_eq!(j["falsifying"], serde_json::json!({"p": true, "q": false}));
}

#[test]
fn admissible_exit_codes() {
    let harrop = scratch(
        "harrop.json",
        r#"{"premises": ["~p -> q | r"], "conclusions": ["(~p -> q) | (~p -> r)"]}"#,
    );
    let out = run(&["admissible", "--logic", "ipc", harrop.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.starts_with("ADMISSIBLE"));
    let bad = scratch("bad.json", r#"{"premises": ["p"], "conclusions": ["q"]}"#);
    let j = json(&run(&[
        "--json",
        "admissible",
        "--logic",
        "cpc",
        bad.to_str().unwrap(),
    ]));
    assert_eq!(j["verdict"], "NOT_ADMISSIBLE");
    assert_eq!(j["witness"]["ground"]["q"], false);
    let fo = scratch(
        "fo.json",
        r#"{"premises": ["exists x. P(x)"], "conclusions": ["forall x. P(x)"]}"#,
    );
    let out = run(&["admissible", "--logic", "cqc-ground", fo.to_str().unwrap()]);
    assert_eq!(out.code, 1, "{}", out.stdout);
}

#[test]
fn unify() {
    let out = run(&["unify", "--logic", "cpc", "p & ~q"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("p := true"));
    assert_eq!(run(&["unify", "--logic", "cpc", "p & ~p"]).code, 1);
}

#[test]
fn sigma() {
    let j = json(&run(&[
        "--json",
        "sigma",
        "exists x. P(x) | q",
        "--b",
        "forall x. P(x)",
    ]));
    assert_eq!(j["claim"]["failures"].as_array().unwrap().len(), 0);
    assert!(j["sigma"]["P"].is_string());
}

#[test]
fn model_check_both_kinds() {
    let prop = scratch(
        "prop.json",
        r#"{"nodes": ["a", "b", "c"], "cover": [["a", "b"], ["a", "c"]], "valuation": {"b": ["p"]}}"#,
    );
    let j = json(&run(&[
        "--json",
        "model",
        "check",
        prop.to_str().unwrap(),
        "~p | ~~p",
    ]));
    assert_eq!(j["forced"]["a"], false);
    assert_eq!(j["forced"]["c"], true);
    let v2 = stage_file(2);
    let out = run(&[
        "model",
        "check",
        v2.to_str().unwrap(),
        "exists x. forall y. ~y in x",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let out = run(&[
        "model",
        "check",
        v2.to_str().unwrap(),
        "forall x. exists y. x in y",
    ]);
    assert_eq!(out.code, 1);
}

#[test]
fn extend_and_axioms() {
    let v2 = stage_file(2);
    let j = json(&run(&[
        "--json",
        "extend",
        v2.to_str().unwrap(),
        "--alpha",
        "2",
    ]));
    assert_eq!(j["root_elements"].as_object().unwrap().len(), 3);
    let lazy = json(&run(&["--json", "extend", v2.to_str().unwrap(), "--lazy"]));
    assert_eq!(lazy["root_elements"].as_object().unwrap().len(), 2);
    let v3 = stage_file(3);
    let out = run(&[
        "axioms",
        v3.to_str().unwrap(),
        "--rank",
        "2",
        "--axiom",
        "pair",
        "--axiom",
        "empty-set",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let out = run(&[
        "axioms",
        v3.to_str().unwrap(),
        "--rank",
        "3",
        "--axiom",
        "pair",
    ]);
    assert_eq!(out.code, 1);
    let out = run(&[
        "--json",
        "axioms",
        v3.to_str().unwrap(),
        "--rank",
        "3",
        "--axiom",
        "separation",
        "--phi",
        "z in z",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
}

#[test]
fn demos() {
    let j = json(&run(&["--json", "dp-demo"]));
    assert_eq!(j["root_forces_disjunction"], false);
    assert_eq!(run(&["visser-demo", "--n", "2"]).code, 0);
    assert_eq!(run(&["dejongh", "--formula", "~p | ~~p"]).code, 0);
    assert_eq!(
        run(&["check-properties", "--seed", "3", "--cases", "40"]).code,
        0
    );
}

#[test]
fn errors_exit_three() {
    let out = run(&["prove", "--logic", "ipc", "p &"]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.starts_with("error["), "{}", out.stderr);
    assert_eq!(
        run(&["model", "check", "/nonexistent/model.json", "p"]).code,
        3
    );
    assert_eq!(run(&["frobnicate"]).code, 3);
    assert_eq!(run(&["dejongh", "--formula", "p -> p"]).code, 3);
    assert_eq!(run(&["visser-demo", "--n", "5"]).code, 3);
}

#[test]
fn binary_matches_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_wb"))
        .args([
            "unify",
            "--logic",
            "cqc",
            "exists x. P(x) & exists x. ~P(x)",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "NOT_UNIFIABLE\n");
}
