use std::process::{Command, Output};

fn degproc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degproc")).args(args).output().expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn counterexample_prints_ratios() {
    let out = degproc(&["counterexample"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = &json_lines(&out)[0];
    assert_eq!(v["seed"], 1);
    assert!(v["spec"].as_str().unwrap().contains("3:2"));
}

#[test]
fn counterexample_reads_fixture_files() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let plus = format!("{dir}/fixtures/pair_plus.txt");
    let minus = format!("{dir}/fixtures/pair_minus.txt");
    let from_files = degproc(&["counterexample", "--plus", &plus, "--minus", &minus]);
    assert!(from_files.status.success());
    let builtin = degproc(&["counterexample"]);
    assert_eq!(json_lines(&from_files)[0]["result"], json_lines(&builtin)[0]["result"]);
}

#[test]
fn simulate_is_reproducible_and_writes_graphs() {
    let tmp = tempfile::tempdir().unwrap();
    let graphs = tmp.path().join("g.jsonl");
    let args = ["--seed", "7", "simulate", "--degrees", "1:20 3:20", "--k", "1", "--trials", "20", "--conditioned", "--graphs"];
    let a = degproc(&[&args[..], &[graphs.to_str().unwrap()]].concat());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = degproc(&[&args[..], &[graphs.to_str().unwrap()], &["--workers", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let records = degproc_lab::formats::read_graph_records(&std::fs::read_to_string(&graphs).unwrap()).unwrap();
    assert_eq!(records.len(), 20);

    let dist = degproc(&["distinguish", "--degrees", "1:20 3:20", "--k", "1", "--input", graphs.to_str().unwrap(), "--beta", "5"]);
    assert!(dist.status.success(), "{}", String::from_utf8_lossy(&dist.stderr));
}

#[test]
fn csv_output_has_a_header() {
    let out = degproc(&["--format", "csv", "verify", "--suite", "normalization", "--max-m", "3", "--max-delta", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,"), "{text}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}

#[test]
fn ode_and_tvd_run() {
    let ode = degproc(&["ode", "--profile", "1:1/2 7:1/2", "--k", "1", "--step", "1e-3"]);
    assert!(ode.status.success(), "{}", String::from_utf8_lossy(&ode.stderr));
    let tvd = degproc(&["tvd", "--degrees", "2 2 2 2"]);
    assert!(tvd.status.success());
    assert_eq!(json_lines(&tvd)[0]["result"]["tvd"], "0");
}

#[test]
fn bad_input_exits_with_code_two() {
    let out = degproc(&["simulate", "--degrees", "1 x", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = degproc(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
}
