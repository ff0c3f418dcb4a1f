use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermsiegel")).args(args).env_remove("HERMSIEGEL_BUDGET").output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn temp_json(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hermsiegel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn rank_one_polynomial() {
    let o = run(&["den", "poly", "--nonsplit", "--inv", "3", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 - X + X^2 - X^3");
}

#[test]
fn polynomial_json_shape() {
    let o = run(&["den", "poly", "--inv", "1,1", "--p", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q"], 5);
    assert_eq!(v["val"], 2);
    assert_eq!(v["coeffs"], serde_json::json!(["1", "4", "1"]));
}

#[test]
fn int_prime_of_rank_one() {
    let o = run(&["kr", "int", "--case", "prime", "--split", "--inv", "4", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2");
}

#[test]
fn functional_equation_suite_passes() {
    let o = run(&["verify", "--suite", "functional-eq", "--p", "3", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS functional-eq"));
}

#[test]
fn output_is_deterministic() {
    let args = ["kr", "table", "--max-rank", "2", "--max-val", "3", "--out", "csv"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("invariants,den,pden,int,level"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["den", "poly"]).status.code(), Some(2));
    assert_eq!(run(&["den", "poly", "--inv", "x"]).status.code(), Some(2));
    assert_eq!(run(&["den", "derived", "--inv", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["--budget", "3", "overlat", "list", "--inv", "2,2"]).status.code(), Some(3));
}

#[test]
fn lattice_files_and_decomposition() {
    let flat = temp_json("flat.json", r#"{"space": {"gram": [[1, 0], [0, 3]]}, "basis": [[1, 0]]}"#);
    let x = temp_json("x.json", "[0, 9]");
    let o = run(&["decomp", "eval", "--flat", flat.to_str().unwrap(), "--x", x.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pden"], "3");
    assert_eq!(v["vertical"], "0");

    let l = temp_json("l.json", r#"{"space": {"kind": "nonsplit", "dim": 3}}"#);
    let o = run(&["invariants", "--lattice", l.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["invariants"], serde_json::json!([0, 0, 1]));
    assert_eq!(v["vol"], "1/3");
}

#[test]
fn oracle_density_is_exact() {
    let o = run(&["oracle", "den", "--M", "0", "--L", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["normalized"], "4/3");
    assert_eq!(v["stabilized"], true);
}

#[test]
fn overlattice_listing_filters_by_type() {
    let o = run(&["overlat", "list", "--inv", "1,1", "--p", "3", "--type", "0"]);
    let v: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.len(), 4);
    assert!(v.iter().all(|r| r["type"] == 0 && r["length"] == 1));
}

#[test]
fn modularity_and_vertical_identity() {
    assert_eq!(stdout(&run(&["schwartz", "modularity", "--p", "3"])), "true");
    let o = run(&["kr", "verify-n3", "--inv", "1,1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["mismatches"], 0);
}
