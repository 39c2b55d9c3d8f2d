use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn atl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atl"))
        .args(args)
        .env_remove("ATL_BIT_BUDGET")
        .output()
        .expect("binary runs")
}

fn atl_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_atl"))
        .args(args)
        .env_remove("ATL_BIT_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn eval_examples() {
    assert_eq!(
        stdout(&atl(&["eval", "--expr", "2^n - 1", "--bind", "n=5"])),
        "31\n"
    );
    assert_eq!(stdout(&atl(&["eval", "--expr", "3 - 5"])), "0\n");
    assert_eq!(
        stdout(&atl(&["eval", "--expr", "binom(10, 3) + gcd(12, 18)"])),
        "126\n"
    );
    assert_eq!(
        stdout(&atl(&["eval", "--expand", "--expr", "min(7, 4) * 3^2"])),
        "36\n"
    );
}

#[test]
fn errors_exit_with_one() {
    let o = atl(&["eval", "--expr", "5 / (2 - 2)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("division by zero"));
    assert_eq!(atl(&["eval", "--expr", "n + 1"]).status.code(), Some(1));
    assert_eq!(atl(&["eval", "--expr", "2 +"]).status.code(), Some(1));
    let o = atl(&["--bit-budget", "64", "eval", "--expr", "2^2^10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(atl(&[]).status.code(), Some(2));
    assert_eq!(
        atl(&["gen", "lucas", "--n-max", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(atl(&["eval"]).status.code(), Some(2));
}

#[test]
fn parse_prints_ast() {
    let v = json(&atl(&["parse", "--expr", "x - 1"]));
    assert_eq!(v["op"], "monus");
    assert_eq!(v["args"][0]["var"], "x");
    assert_eq!(v["args"][1]["const"], "1");
}

#[test]
fn gen_tables() {
    let out = stdout(&atl(&["gen", "mersenne", "--n-max", "4"]));
    assert_eq!(out, "0\t3\n1\t3\n2\t7\n3\t3\n4\t31\n");
    let term = stdout(&atl(&["gen", "mersenne", "--n-max", "4", "--mode", "term"]));
    assert_eq!(term, out);
    let twin = stdout(&atl(&["gen", "twin", "--n-max", "1"]));
    assert_eq!(twin, "0\t3,5\n1\t3,5\n");
    let fermat = stdout(&atl(&["gen", "fermat", "--n-max", "4", "--variant", "2"]));
    assert_eq!(fermat.lines().last(), Some("4\t65537"));
}

#[test]
fn counts() {
    assert_eq!(stdout(&atl(&["count", "mersenne", "--n", "11"])), "5\n");
    assert_eq!(stdout(&atl(&["count", "twin", "--n", "30"])), "5\n");
    assert_eq!(stdout(&atl(&["count", "sophie", "--n", "30"])), "6\n");
    assert_eq!(
        stdout(&atl(&["count", "demo", "--n", "6", "--mode", "term"])),
        "4\n"
    );
    let rep = json(&atl(&["count", "fermat", "--n", "0", "--mode", "term"]));
    assert_eq!(rep["oracle_count"], 1);
    assert_eq!(rep["t"]["digits"], 4.0);
}

#[test]
fn witnesses() {
    let w = json(&atl(&["witness", "mersenne", "--k", "3"]));
    assert_eq!(w["k"], "3");
    assert_eq!(w["a"], "8");
    assert_eq!(
        json(&atl(&["witness", "mersenne", "--k", "9"])),
        Value::Null
    );
    let f = json(&atl(&["witness", "fermat", "--k", "2"]));
    assert_eq!(f["g"], "2");
    let t = json(&atl(&["witness", "twin", "--k", "1"]));
    assert_eq!(t["values"]["f"], "2");
    assert_eq!(t["pending"], Value::Array(Vec::new()));
}

#[test]
fn systems() {
    let text = stdout(&atl(&["system", "fermat"]));
    assert_eq!(text.lines().filter(|l| l.starts_with('(')).count(), 6);
    let v = json(&atl(&["system", "mersenne", "--emit", "json"]));
    assert_eq!(v["k_vars"], 19);
    assert_eq!(v["offset"], 1);
    let twin = json(&atl(&[
        "system", "twin", "--emit", "json", "--scheme", "minimal",
    ]));
    assert!(twin["chain"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn mazzanti_count_reads_stdin() {
    let inst = r#"{"unknowns":["x","y"],"monomials":[
        {"c":"1","factors":[{"v":"1","r":2},{"v":"1","r":0}]},
        {"c":"1","factors":[{"v":"1","r":0},{"v":"1","r":2}]},
        {"c":"-2","factors":[{"v":"1","r":1},{"v":"1","r":1}]},
        {"c":"4","factors":[{"v":"1","r":1},{"v":"1","r":0}]},
        {"c":"-4","factors":[{"v":"1","r":0},{"v":"1","r":1}]},
        {"c":"4","factors":[{"v":"1","r":0},{"v":"1","r":0}]}],"t":6}"#;
    assert_eq!(stdout(&atl_stdin(&["mazzanti-count"], inst)), "4\n");
    assert_eq!(atl_stdin(&["mazzanti-count"], "{").status.code(), Some(1));
}

#[test]
fn crec_emits_a_term() {
    let spec = r#"{"A":["1","-2"],"B":["1","-4","1"]}"#;
    let v = json(&atl_stdin(&["crec", "--emit", "json"], spec));
    assert_eq!(v["c"], "8");
    let text = stdout(&atl_stdin(&["crec"], spec));
    assert!(text.lines().nth(1).unwrap().starts_with("c = 8"));
}

#[test]
fn verify_reports_json() {
    let v = json(&atl(&["verify", "sequences"]));
    assert_eq!(v["failed"], 0);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "sequences.pell_term"));
    assert_eq!(atl(&["verify", "nothing"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["system", "twin", "--emit", "json"][..],
        &["witness", "mersenne", "--k", "5"],
        &["gen", "sophie", "--n-max", "50"],
    ] {
        assert_eq!(atl(args).stdout, atl(args).stdout);
    }
}

#[test]
fn huge_numbers_are_abbreviated() {
    let short = stdout(&atl(&["eval", "--expr", "2^40000"]));
    assert!(short.contains("...") && short.contains("(12042 digits)"));
    let full = stdout(&atl(&["--full", "eval", "--expr", "2^40000"]));
    assert_eq!(full.trim().len(), 12042);
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_atl"))
        .args(["eval", "--expr", "2^5000"])
        .env("ATL_BIT_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
