use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ssac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssac")).args(args).env_remove("SSAC_DEFAULT_SCALE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let out = ssac(&full);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn gen_writes_labelled_csv() {
    let dir = TempDir::new().unwrap();
    let path = gen(dir.path(), "inst.csv", &["--kind", "margin-balls", "--k", "3", "--gamma", "2", "--seed", "7"]);
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("x0,x1,label\n"));
    assert_eq!(text.lines().count(), 1 + 30);
}

#[test]
fn gen_grid_singletons_to_stdout() {
    let out = ssac(&["gen", "--kind", "grid", "--k", "4", "--n-per-cluster", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
    assert_eq!(column(&stdout(&out), "label"), ["0", "1", "2", "3"]);
}

#[test]
fn gen_rejects_gamma_at_most_one() {
    let out = ssac(&["gen", "--kind", "margin-balls", "--k", "2", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gamma > 1"), "{}", stderr(&out));
}

#[test]
fn gen_is_byte_reproducible() {
    let a = ssac(&["gen", "--k", "3", "--seed", "11"]);
    let b = ssac(&["gen", "--k", "3", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seeding_rows_respect_budget() {
    let dir = TempDir::new().unwrap();
    let path =
        gen(dir.path(), "inst.csv", &["--kind", "margin-balls", "--k", "3", "--n-per-cluster", "4", "--seed", "7"]);
    let out = ssac(&["run", "query-kmeans++", "-i", &path, "--k", "3", "--repeats", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows = column(&text, "row");
    assert_eq!(rows, ["0", "1", "2", "3", "4", "best"]);
    // (k − 1)²·⌈log₂ k⌉ = 8 per run.
    for q in &column(&text, "query_count")[..5] {
        assert!(q.parse::<u64>().unwrap() <= 8);
    }
    // n = 12 ≤ 14, so Δ_k and the ratio are filled in.
    for r in column(&text, "ratio") {
        assert!(r.parse::<f64>().unwrap() >= 1.0 - 1e-9);
    }
}

#[test]
fn kmeanspp_uses_no_queries() {
    let dir = TempDir::new().unwrap();
    let path = gen(dir.path(), "inst.csv", &["--k", "2"]);
    let out = ssac(&["run", "kmeans++", "-i", &path, "--k", "2", "--repeats", "3"]);
    assert!(out.status.success());
    assert!(column(&stdout(&out), "query_count").iter().all(|q| q == "0"));
}

#[test]
fn faulty_rejects_large_q() {
    let dir = TempDir::new().unwrap();
    let path = gen(dir.path(), "inst.csv", &["--k", "2"]);
    let out = ssac(&["run", "faulty-query-kmeans", "-i", &path, "--k", "2", "--q", "0.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("q must be < 1/2"));
}

#[test]
fn oracle_algorithms_need_labels() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bare.csv");
    fs::write(&path, "x0,x1\n0,0\n1,1\n5,5\n").unwrap();
    let out = ssac(&["run", "query-kmeans++", "-i", path.to_str().unwrap(), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("label"));
    let out = ssac(&["run", "kmeans++", "-i", path.to_str().unwrap(), "--k", "2", "--repeats", "1"]);
    assert!(out.status.success());
}

#[test]
fn exact_unit_square_and_limits() {
    let dir = TempDir::new().unwrap();
    let square = dir.path().join("square.csv");
    fs::write(&square, "x0,x1\n0,0\n0,1\n1,0\n1,1\n").unwrap();
    let out = ssac(&["exact", "-i", square.to_str().unwrap(), "--k", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["optimal_cost"], 1.0);
    assert_eq!(v["labeling"], serde_json::json!([0, 0, 1, 1]));

    let out = ssac(&["exact", "-i", square.to_str().unwrap(), "--k", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["optimal_cost"], 0.0);

    let big = gen(dir.path(), "big.csv", &["--k", "2", "--n-per-cluster", "10"]);
    let out = ssac(&["exact", "-i", &big, "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_output_is_reproducible_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let path =
        gen(dir.path(), "inst.csv", &["--kind", "margin-balls", "--k", "2", "--n-per-cluster", "5", "--seed", "3"]);
    let args = [
        "run",
        "query-kmeans",
        "-i",
        &path,
        "--k",
        "2",
        "--scale",
        "0.0001",
        "--repeats",
        "3",
        "--algo-seed",
        "5",
        "--parallel",
        "2",
        "--lloyd-refine",
    ];
    let a = ssac(&args);
    let b = ssac(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);

    let csv_path = dir.path().join("rows.csv");
    fs::write(&csv_path, &a.stdout).unwrap();
    let mut json_args = args.to_vec();
    json_args.extend_from_slice(&["--format", "json"]);
    let j = ssac(&json_args);
    let json_path = dir.path().join("rows.jsonl");
    fs::write(&json_path, &j.stdout).unwrap();

    let rows = ssac_core::parse_results(&stdout(&a)).unwrap();
    let json_rows = ssac_core::parse_results(&stdout(&j)).unwrap();
    assert_eq!(rows, json_rows);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.lloyd_cost.is_some() && r.wall_millis.is_none()));

    let report = ssac(&["report", csv_path.to_str().unwrap(), json_path.to_str().unwrap()]);
    assert!(report.status.success(), "{}", stderr(&report));
    let text = stdout(&report);
    assert_eq!(column(&text, "row_kind"), ["best", "run"]);
    assert_eq!(column(&text, "rows"), ["2", "6"]);
}

#[test]
fn scale_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let path = gen(dir.path(), "inst.csv", &["--k", "2", "--n-per-cluster", "4"]);
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_ssac"));
        cmd.args(["run", "query-kmeans", "-i", &path, "--k", "2", "--repeats", "1"]).args(extra);
        match env {
            Some(v) => cmd.env("SSAC_DEFAULT_SCALE", v),
            None => cmd.env_remove("SSAC_DEFAULT_SCALE"),
        };
        cmd.output().unwrap()
    };
    let out = run(Some("0.0001"), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(column(&stdout(&out), "scale")[0], "0.0001");
    let out = run(Some("0.0001"), &["--scale", "0.0002"]);
    assert_eq!(column(&stdout(&out), "scale")[0], "0.0002");
    let out = run(Some("7"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_handles_empty_and_malformed_input() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = ssac(&["report", empty.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);

    let path = gen(dir.path(), "inst.csv", &["--k", "2"]);
    let rows = ssac(&["run", "kmeans++", "-i", &path, "--k", "2", "--repeats", "2"]);
    let mut text = stdout(&rows);
    text.push_str("0,kmeans++,x,,zzz,,2,,,,1,1.0,,,0,0,0,0,,\n");
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, text).unwrap();
    let out = ssac(&["report", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.csv:5"), "{}", stderr(&out));
}

#[test]
fn report_groups_mixed_algorithms() {
    let dir = TempDir::new().unwrap();
    let path = gen(dir.path(), "inst.csv", &["--k", "2", "--n-per-cluster", "5"]);
    let mut files = Vec::new();
    for alg in ["kmeans++", "query-kmeans++"] {
        let out = ssac(&["run", alg, "-i", &path, "--k", "2", "--repeats", "2"]);
        let f = dir.path().join(format!("{alg}.csv"));
        fs::write(&f, &out.stdout).unwrap();
        files.push(f.to_string_lossy().into_owned());
    }
    let mut args = vec!["report"];
    args.extend(files.iter().map(String::as_str));
    let out = ssac(&args);
    let text = stdout(&out);
    assert_eq!(column(&text, "algorithm"), ["kmeans++", "kmeans++", "query-kmeans++", "query-kmeans++"]);
}
