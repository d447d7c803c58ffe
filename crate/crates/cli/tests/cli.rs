use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qimf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qimf"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = qimf(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn wsbm(dir: &Path, blocks: &str, seed: &str, out: &str) {
    ok(
        dir,
        &[
            "generate",
            "wsbm",
            "--blocks",
            blocks,
            "--p-diag",
            "0.4",
            "--p-off",
            "0.1",
            "--w-diag",
            "norm:0,1",
            "--w-off",
            "norm:0,0.3",
            "--returns",
            "norm:0,0.5",
            "--seed",
            seed,
            "-o",
            out,
        ],
    );
}

fn column(csv: &str, k: usize) -> Vec<String> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(k).unwrap().to_string())
        .collect()
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = qimf(
        dir.path(),
        &[
            "generate", "wsbm", "--blocks", "4", "--p-diag", "0.5", "--w-diag", "const:1",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = qimf(dir.path(), &["solve"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qimf(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = qimf(dir.path(), &["solve", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    wsbm(dir.path(), "13x2", "1", "big.json");
    let out = qimf(dir.path(), &["solve", "big.json", "--algo", "brute"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("26"));
}

#[test]
fn generate_reports_shot_heuristics() {
    let dir = TempDir::new().unwrap();
    let out = ok(
        dir.path(),
        &[
            "generate",
            "wsbm",
            "--blocks",
            "10x5",
            "--p-diag",
            "0.2",
            "--p-off",
            "0.05",
            "--w-diag",
            "norm:0,0.2",
            "--w-off",
            "norm:0,0.05",
            "--returns",
            "norm:0,0.2",
            "--seed",
            "7",
            "-o",
            "i.json",
        ],
    );
    assert!(out.contains("num_vars=50"), "{out}");
    assert!(out.contains("blocks=5"), "{out}");
    let n_w: usize = out
        .split_whitespace()
        .find_map(|t| t.strip_prefix("n_w="))
        .unwrap()
        .parse()
        .unwrap();
    let simple: usize = out
        .split_whitespace()
        .find_map(|t| t.strip_prefix("ns_simple="))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(simple, n_w.div_ceil(5));
}

#[test]
fn one_block_literal_qimf_matches_quamf() {
    let dir = TempDir::new().unwrap();
    wsbm(dir.path(), "12", "4", "one.json");
    let common = [
        "--ne",
        "200",
        "--seed",
        "3",
        "--mode",
        "paper-literal",
        "--ns",
        "auto-simple",
    ];
    let mut a = vec!["solve", "one.json", "--algo", "qimf", "--trace", "a.csv"];
    a.extend_from_slice(&common);
    let mut b = vec!["solve", "one.json", "--algo", "quamf", "--trace", "b.csv"];
    b.extend_from_slice(&common);
    ok(dir.path(), &a);
    ok(dir.path(), &b);
    assert_eq!(
        column(&read(dir.path(), "a.csv"), 2),
        column(&read(dir.path(), "b.csv"), 2)
    );
}

#[test]
fn maxcut_reports_cut_value() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("k4.txt"),
        "0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "maxcut",
            "--from-edges",
            "k4.txt",
            "-o",
            "k4.json",
        ],
    );
    let out = ok(dir.path(), &["solve", "k4.json", "--algo", "brute"]);
    assert!(out.contains("cut=4"), "{out}");
    let table = ok(
        dir.path(),
        &[
            "bench", "k4.json", "--algos", "sa", "--seeds", "1", "--ne", "20",
        ],
    );
    assert!(table.contains("mean cut"), "{table}");
}

#[test]
fn ingest_names_offending_ticker() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("p.csv"),
        "date,ticker,close\n2024-01-02,AAA,1\n2024-01-03,AAA,2\n2024-01-04,AAA,3\n2024-01-02,ZZZ,1\n2024-01-03,ZZZ,1\n2024-01-04,ZZZ,1\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("s.csv"), "ticker,sector\nAAA,Tech\n").unwrap();
    let out = qimf(
        dir.path(),
        &[
            "ingest",
            "--prices",
            "p.csv",
            "--sectors",
            "s.csv",
            "-o",
            "o.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ZZZ"));
}

#[test]
fn constant_prices_give_zero_instance() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("p.csv"),
        "date,ticker,close\n2024-01-02,AAA,5\n2024-01-03,AAA,5\n2024-01-04,AAA,5\n2024-01-02,BBB,7\n2024-01-03,BBB,7\n2024-01-04,BBB,7\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("s.csv"),
        "ticker,sector\nAAA,Tech\nBBB,Energy\n",
    )
    .unwrap();
    let out = ok(
        dir.path(),
        &[
            "ingest",
            "--prices",
            "p.csv",
            "--sectors",
            "s.csv",
            "-o",
            "o.json",
        ],
    );
    assert!(
        out.contains("num_vars=2") && out.contains("sectors=2"),
        "{out}"
    );
    let solved = ok(dir.path(), &["solve", "o.json", "--algo", "brute"]);
    assert!(solved.contains("best_cost=0"), "{solved}");
}

#[test]
fn preprocess_without_fixings_copies_input() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("tri.txt"), "0 1 1\n1 2 1\n0 2 1\n").unwrap();
    ok(
        dir.path(),
        &[
            "generate",
            "maxcut",
            "--from-edges",
            "tri.txt",
            "-o",
            "tri.json",
        ],
    );
    let out = ok(
        dir.path(),
        &[
            "preprocess",
            "tri.json",
            "-o",
            "r.json",
            "--fixed",
            "f.json",
        ],
    );
    assert!(out.starts_with("fixed 0 of 3"), "{out}");
    assert_eq!(read(dir.path(), "r.json"), read(dir.path(), "tri.json"));
}

#[test]
fn preprocess_fixes_dominant_fields_and_is_idempotent() {
    let dir = TempDir::new().unwrap();
    // Strong fields on 0 and 3; weak couplings.
    std::fs::write(
        dir.path().join("c.txt"),
        "0 1 0.25\n1 2 -0.5\n2 3 0.25\n0 0 2\n3 3 -2\n1 1 0.125\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &["generate", "ising", "--from-edges", "c.txt", "-o", "c.json"],
    );
    let out = ok(
        dir.path(),
        &["preprocess", "c.json", "-o", "r.json", "--fixed", "f.json"],
    );
    assert!(out.starts_with("fixed 2 of 4"), "{out}");
    let fixed: serde_json::Value = serde_json::from_str(&read(dir.path(), "f.json")).unwrap();
    assert_eq!(fixed["remaining"], serde_json::json!([1, 2]));
    let again = ok(
        dir.path(),
        &[
            "preprocess",
            "r.json",
            "-o",
            "r2.json",
            "--fixed",
            "f2.json",
        ],
    );
    assert!(again.starts_with("fixed 0 of 2"), "{again}");

    let full = ok(dir.path(), &["solve", "c.json", "--algo", "brute"]);
    let reduced = ok(dir.path(), &["solve", "r.json", "--algo", "brute"]);
    let best = |s: &str| -> f64 {
        s.split_whitespace()
            .find_map(|t| t.strip_prefix("best_cost="))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(
        (best(&full) - best(&reduced)).abs() < 1e-12,
        "{full} vs {reduced}"
    );
}

#[test]
fn bench_json_lists_runs_and_externals() {
    let dir = TempDir::new().unwrap();
    wsbm(dir.path(), "5x2", "2", "i.json");
    ok(
        dir.path(),
        &[
            "bench",
            "i.json",
            "--algos",
            "qimf,greedy",
            "--seeds",
            "4",
            "--ne",
            "30",
            "--extern",
            "ref=-1.5",
            "--json",
            "b.json",
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "b.json")).unwrap();
    assert_eq!(v["runs"].as_array().unwrap().len(), 2);
    let aggs = v["aggregates"].as_array().unwrap();
    assert_eq!(aggs.len(), 3);
    assert!(aggs.iter().all(|a| a["n"] == 1));
    assert_eq!(aggs[0]["std"], 0.0);
    assert_eq!(aggs[2]["external"], true);
    assert_eq!(aggs[2]["mean"], -1.5);
    for run in v["runs"].as_array().unwrap() {
        assert!(run["queries"].as_u64().unwrap() <= v["budget_queries"].as_u64().unwrap());
    }
}

#[test]
fn result_json_carries_assignments() {
    let dir = TempDir::new().unwrap();
    wsbm(dir.path(), "3x2", "9", "i.json");
    ok(
        dir.path(),
        &[
            "solve", "i.json", "--algo", "qimf", "--ne", "50", "--result", "r.json",
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&read(dir.path(), "r.json")).unwrap();
    assert_eq!(v["best_assignment"].as_str().unwrap().len(), 6);
    assert_eq!(v["algo"], "qimf");
    assert!(v["best_cost"].as_f64().unwrap() <= v["final_cost"].as_f64().unwrap() + 1e-12);
}
