//! End-to-end tests of the `spir` binary: golden outputs, exit codes, and
//! network-vs-in-process equivalence, all through real process invocations.

use std::io::{BufRead, BufReader};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

use serde_json::Value;

const EX1: &str = r#"{
    "n_databases": 2,
    "messages": [
        {"id": "w1", "length_bits": 1024, "prior": {"num": 1, "den": 2}},
        {"id": "w2", "length_bits": 256, "prior": {"num": 1, "den": 2}}
    ],
    "scheme": "det"
}"#;

const EX2: &str = r#"{
    "n_databases": 4,
    "messages": [
        {"id": "w1", "length_bits": 8192, "prior": {"num": 1, "den": 3}},
        {"id": "w2", "length_bits": 2048, "prior": {"num": 1, "den": 3}},
        {"id": "w3", "length_bits": 512, "prior": {"num": 1, "den": 3}}
    ],
    "scheme": "det"
}"#;

const EX3: &str = r#"{
    "n_databases": 4,
    "messages": [
        {"id": "long", "length_bits": 3000, "prior": {"num": 1, "den": 2}},
        {"id": "short", "length_bits": 1800, "prior": {"num": 1, "den": 2}}
    ],
    "scheme": "stoch"
}"#;

const EX4: &str = r#"{
    "n_databases": 3,
    "messages": [
        {"id": "a", "length_bits": 400, "prior": {"num": 1, "den": 3}},
        {"id": "b", "length_bits": 300, "prior": {"num": 1, "den": 3}},
        {"id": "c", "length_bits": 100, "prior": {"num": 1, "den": 3}}
    ],
    "scheme": "stoch"
}"#;

const SKEWED: &str = r#"{
    "n_databases": 2,
    "messages": [
        {"id": "w1", "length_bits": 1024, "prior": {"num": 4, "den": 5}},
        {"id": "w2", "length_bits": 256, "prior": {"num": 1, "den": 5}}
    ]
}"#;

const SINGLE: &str = r#"{
    "n_databases": 2,
    "messages": [
        {"id": "only", "length_bits": 64, "prior": {"num": 1, "den": 1}}
    ],
    "scheme": "det"
}"#;

const INDIVISIBLE: &str = r#"{
    "n_databases": 2,
    "messages": [
        {"id": "w1", "length_bits": 999, "prior": {"num": 1, "den": 2}},
        {"id": "w2", "length_bits": 256, "prior": {"num": 1, "den": 2}}
    ],
    "scheme": "det"
}"#;

fn spir() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spir"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout_text(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_str(&stdout_text(output)).unwrap()
}

fn gen_store(config: &Path, store: &Path, seed: u64) {
    let out = spir()
        .args(["gen", "--config"])
        .arg(config)
        .arg("--store")
        .arg(store)
        .args(["--seed", &seed.to_string()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

struct KillOnDrop(Child);

impl Drop for KillOnDrop {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn spawn_replicas(store: &Path, count: usize) -> (Vec<KillOnDrop>, String) {
    let mut children = Vec::new();
    let mut endpoints = Vec::new();
    for db in 1..=count {
        let mut child = spir()
            .args(["serve", "--store"])
            .arg(store)
            .args(["--db-index", &db.to_string(), "--port", "0"])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let mut line = String::new();
        BufReader::new(child.stdout.as_mut().unwrap()).read_line(&mut line).unwrap();
        let addr = line.trim().strip_prefix("listening on ").unwrap().to_string();
        endpoints.push(addr);
        children.push(KillOnDrop(child));
    }
    (children, endpoints.join(","))
}

#[test]
fn capacity_prints_exact_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex2.json", EX2);
    let out = spir().args(["capacity", "--json", "--config"]).arg(&config).output().unwrap();
    let text = stdout_text(&out);
    assert!(text.contains("\"16/21\""), "{text}");
    assert!(text.contains("\"256/273\""), "{text}");

    let config = write_config(dir.path(), "skewed.json", SKEWED);
    let out = spir().args(["capacity", "--json", "--config"]).arg(&config).output().unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["semantic_capacity"]["text"], "34/45");
    assert_eq!(report["classical_capacity"]["text"], "2/3");
    assert_eq!(report["zero_pad_rate"]["text"], "17/30");
    assert_eq!(report["gain_over_classical"], true);

    let config = write_config(dir.path(), "single.json", SINGLE);
    let out = spir().args(["capacity", "--json", "--config"]).arg(&config).output().unwrap();
    assert_eq!(stdout_json(&out)["semantic_capacity"]["text"], "1");
}

#[test]
fn plan_prints_parameters_and_flags_indivisible_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex1.json", EX1);
    let out = spir().args(["plan", "--json", "--config"]).arg(&config).output().unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["upsilon"], serde_json::json!([7, 1]));
    assert_eq!(report["alpha"], 64);
    assert_eq!(report["subpacketizations"], serde_json::json!([16, 4]));
    assert_eq!(report["d_sub"], 18);
    assert_eq!(report["download_bits"], 1152);
    assert_eq!(report["rates"][0]["text"], "8/9");

    let config = write_config(dir.path(), "bad.json", INDIVISIBLE);
    let out = spir().args(["plan", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("w1") && stderr.contains("multiple of N^K = 4"), "{stderr}");
}

#[test]
fn gen_is_deterministic_and_reports_io_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex3.json", EX3);
    let store_a = dir.path().join("a.store");
    let store_b = dir.path().join("b.store");
    gen_store(&config, &store_a, 7);
    gen_store(&config, &store_b, 7);
    let bytes_a = std::fs::read(&store_a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&store_b).unwrap());
    assert_eq!(bytes_a.len(), 624);

    let out = spir()
        .args(["gen", "--config"])
        .arg(&config)
        .args(["--store", "/nonexistent-root/x.store"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn retrieve_reports_exact_rates() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex1.json", EX1);
    let store = dir.path().join("ex1.store");
    gen_store(&config, &store, 5);
    let out = spir()
        .args(["retrieve", "--json", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "w1", "--seed", "3"])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["downloaded_bits"], 1152);
    assert_eq!(report["useful_bits"], 1024);
    assert_eq!(report["realized_rate"]["text"], "8/9");
    assert_eq!(report["analytic_rate"]["text"], "8/9");
    assert_eq!(report["desired_index"], 1);
    assert_eq!(report["option_index"], Value::Null);
    assert_eq!(report["transcript_sha256"].as_str().unwrap().len(), 64);

    let config = write_config(dir.path(), "single.json", SINGLE);
    let store = dir.path().join("single.store");
    gen_store(&config, &store, 5);
    let out = spir()
        .args(["retrieve", "--json", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "only"])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["realized_rate"]["text"], "1");
}

#[test]
fn retrieve_exhaustive_reports_the_mean_download() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex3.json", EX3);
    let store = dir.path().join("ex3.store");
    gen_store(&config, &store, 11);
    let out = spir()
        .args(["retrieve", "--json", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "short", "--exhaustive"])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["options"], 16);
    assert_eq!(report["mean_download_bits"]["text"], "3450");
    assert_eq!(report["verified_all_options"], true);
}

#[test]
fn config_and_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = spir().args(["capacity", "--config", "/no/such/config.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let config = write_config(
        dir.path(),
        "unbalanced.json",
        r#"{"n_databases": 2, "messages": [
            {"id": "a", "length_bits": 8, "prior": {"num": 1, "den": 2}},
            {"id": "b", "length_bits": 8, "prior": {"num": 1, "den": 3}}]}"#,
    );
    let out = spir().args(["capacity", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum"));

    let config = write_config(dir.path(), "ex1.json", EX1);
    let store = dir.path().join("ex1.store");
    gen_store(&config, &store, 5);
    let out = spir()
        .args(["retrieve", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    let ex3 = write_config(dir.path(), "ex3.json", EX3);
    let out = spir()
        .args(["retrieve", "--config"])
        .arg(&ex3)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "long"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = spir()
        .args(["retrieve", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "w1", "--endpoints", "127.0.0.1:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 databases"));
}

#[test]
fn bench_lists_trials_and_approaches_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex1.json", EX1);
    let store = dir.path().join("ex1.store");
    gen_store(&config, &store, 5);
    let out = spir()
        .args(["bench", "--json", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--trials", "1"])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["trials"], 1);
    assert_eq!(report["trial_records"].as_array().unwrap().len(), 1);
    assert_eq!(report["trial_records"][0]["downloaded_bits"], 1152);
    assert_eq!(report["analytic_capacity"]["text"], "5/9");

    let config = write_config(dir.path(), "ex4.json", EX4);
    let store = dir.path().join("ex4.store");
    gen_store(&config, &store, 5);
    let out = spir()
        .args(["bench", "--json", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--trials", "100000", "--seed", "2"])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    let rate = report["total_useful_bits"].as_f64().unwrap()
        / report["total_downloaded_bits"].as_f64().unwrap();
    let capacity = 24.0 / 46.0;
    assert!((rate - capacity).abs() <= 0.01 * capacity, "rate {rate} vs capacity {capacity}");
    assert_eq!(report["trial_records_truncated"], true);
}

#[test]
fn audits_pass_for_both_schemes_and_reject_thin_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = write_config(dir.path(), "ex1.json", EX1);
    let out = spir().args(["audit", "--json", "--config"]).arg(&ex1).output().unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["mode"], "structural");

    let ex3 = write_config(dir.path(), "ex3.json", EX3);
    let out = spir().args(["audit", "--json", "--config"]).arg(&ex3).output().unwrap();
    assert_eq!(stdout_json(&out)["pass"], true);

    let out = spir()
        .args(["audit", "--json", "--config"])
        .arg(&ex3)
        .args(["--mode", "empirical", "--samples", "2000", "--seed", "4"])
        .output()
        .unwrap();
    let report = stdout_json(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["mode"], "empirical");

    let out = spir()
        .args(["audit", "--config"])
        .arg(&ex3)
        .args(["--mode", "empirical", "--samples", "500"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn networked_retrieval_matches_in_process_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex4.json", EX4);
    let store = dir.path().join("ex4.store");
    gen_store(&config, &store, 9);
    let (_children, endpoints) = spawn_replicas(&store, 3);

    for desired in ["a", "b", "c"] {
        let remote = spir()
            .args(["retrieve", "--json", "--config"])
            .arg(&config)
            .arg("--store")
            .arg(&store)
            .args(["--desired", desired, "--seed", "21", "--endpoints", &endpoints])
            .output()
            .unwrap();
        let remote = stdout_json(&remote);
        let local = spir()
            .args(["retrieve", "--json", "--config"])
            .arg(&config)
            .arg("--store")
            .arg(&store)
            .args(["--desired", desired, "--seed", "21"])
            .output()
            .unwrap();
        let local = stdout_json(&local);
        assert_eq!(remote["transport"], "network");
        assert_eq!(local["transport"], "inprocess");
        assert_eq!(remote["transcript_sha256"], local["transcript_sha256"]);
        assert_eq!(remote["option_index"], local["option_index"]);
    }
}

#[test]
fn dead_endpoints_exit_6_and_taken_ports_exit_7() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "ex1.json", EX1);
    let store = dir.path().join("ex1.store");
    gen_store(&config, &store, 5);

    let unused = TcpListener::bind("127.0.0.1:0").unwrap();
    let dead = unused.local_addr().unwrap();
    drop(unused);
    let out = spir()
        .args(["retrieve", "--config"])
        .arg(&config)
        .arg("--store")
        .arg(&store)
        .args(["--desired", "w1", "--timeout-secs", "2"])
        .args(["--endpoints", &format!("{dead},{dead}")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(6));

    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port();
    let out = spir()
        .args(["serve", "--store"])
        .arg(&store)
        .args(["--port", &port.to_string()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(7));
}
