use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn ringscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringscan"))
        .args(args)
        .env_remove("RINGSCAN_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small generated dataset with two planted rings and its ground truth.
fn generated(dir: &TempDir) -> (PathBuf, PathBuf) {
    let csv = path(dir.path(), "collisions.csv");
    let truth = path(dir.path(), "truth.json");
    let out = ringscan(&[
        "gen",
        "--drivers",
        "300",
        "--collisions",
        "200",
        "--rings",
        "5,9",
        "--seed",
        "11",
        "--dates",
        "-o",
        s(&csv),
        "--truth",
        s(&truth),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    (csv, truth)
}

#[test]
fn gen_is_deterministic_and_writes_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, truth) = generated(&dir);
    let again = ringscan(&["gen", "--drivers", "300", "--collisions", "200", "--rings", "5,9", "--seed", "11", "--dates"]);
    assert_eq!(code(&again), 0);
    assert_eq!(fs::read(&csv).unwrap(), again.stdout);
    let truth: serde_json::Value = serde_json::from_str(&fs::read_to_string(truth).unwrap()).unwrap();
    let rings = truth["rings"].as_array().unwrap();
    assert_eq!(rings.len(), 2);
    assert_eq!(rings[1]["drivers"].as_array().unwrap().len(), 9);
}

#[test]
fn run_writes_every_export() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = generated(&dir);
    let out_dir = path(dir.path(), "out");
    let out = ringscan(&["run", "-i", s(&csv), "-o", s(&out_dir), "--top-k", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let listed = String::from_utf8(out.stdout).unwrap();
    for name in ["ranked.csv", "comparison.csv", "report.json", "metadata.json"] {
        assert!(out_dir.join(name).is_file(), "{name} missing");
    }
    assert!(listed.lines().any(|l| l.ends_with(".graphml")));
    assert!(listed.lines().any(|l| l.ends_with(".dot")));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["scoring"]["top"].as_array().unwrap().len(), 5);
}

#[test]
fn staged_subcommands_agree_with_run() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, truth) = generated(&dir);
    let cycles = path(dir.path(), "cycles.csv");
    let ranked = path(dir.path(), "ranked.csv");
    let common = ["-i", s(&csv), "--root-mode", "single"];

    let out = ringscan(&[&["detect"], &common[..], &["-o", s(&cycles)]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = ringscan(&[&["score"], &common[..], &["--cycles", s(&cycles), "-o", s(&ranked)]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let run_dir = path(dir.path(), "run");
    let out = ringscan(&[&["run"], &common[..], &["-o", s(&run_dir), "--formats", "csv"]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read(&ranked).unwrap(), fs::read(run_dir.join("ranked.csv")).unwrap());

    // every planted ring appears among the detected cycles
    let detected = fs::read_to_string(&cycles).unwrap();
    let truth: serde_json::Value = serde_json::from_str(&fs::read_to_string(truth).unwrap()).unwrap();
    for ring in truth["rings"].as_array().unwrap() {
        let mut drivers: Vec<&str> = ring["drivers"].as_array().unwrap().iter().map(|d| d.as_str().unwrap()).collect();
        drivers.sort_unstable();
        let found = detected.lines().skip(1).any(|line| {
            let mut keys: Vec<&str> = line.rsplit(',').next().unwrap().split('|').collect();
            keys.sort_unstable();
            keys == drivers
        });
        assert!(found, "ring {} not detected", ring["key"]);
    }

    let cmp = ringscan(&[&["compare"], &common[..], &["--cycles", s(&cycles), "--baselines", "fast_greedy"]].concat());
    assert_eq!(code(&cmp), 0, "{}", stderr(&cmp));
    let table = String::from_utf8(cmp.stdout).unwrap();
    assert!(table.starts_with("algorithm,community_id,community_size,community_score"));
    assert!(table.lines().skip(1).all(|l| l.starts_with("fast_greedy,")));

    let export_dir = path(dir.path(), "export");
    let out = ringscan(&[&["export"], &common[..], &["--cycles", s(&cycles), "-o", s(&export_dir), "--formats", "json,dot"]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(export_dir.join("assessments.json").is_file());
    assert!(export_dir.join("graphs/component-001.dot").is_file());
    assert!(!export_dir.join("ranked.csv").exists());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = generated(&dir);
    let cfg = path(dir.path(), "ringscan.toml");
    fs::write(
        &cfg,
        format!(
            "input = \"{}\"\nroot_mode = \"single\"\nmax_exclusive = 7\nformats = [\"json\"]\nbaselines = [\"multilevel\"]\n",
            s(&csv)
        ),
    )
    .unwrap();
    let out_dir = path(dir.path(), "out");
    let out = ringscan(&["run", "--config", s(&cfg), "--max-exclusive", "12", "-o", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["cycles"]["bounds"]["max_exclusive"], 12);
    assert_eq!(report["baselines"].as_array().unwrap().len(), 1);
    assert!(!out_dir.join("ranked.csv").exists());
}

#[test]
fn empty_input_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "empty.csv");
    fs::write(&csv, "collision_id,driver_id,vehicle_id,date\n").unwrap();
    let out_dir = path(dir.path(), "out");
    let out = ringscan(&["run", "-i", s(&csv), "-o", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(fs::read_to_string(out_dir.join("ranked.csv")).unwrap().lines().count(), 1);
}

#[test]
fn failures_exit_with_their_stage_code() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = generated(&dir);
    let missing = path(dir.path(), "missing.csv");

    let out = ringscan(&["run", "-i", s(&missing), "-o", s(dir.path())]);
    assert_eq!(code(&out), 11);
    assert!(stderr(&out).contains("ingest") && stderr(&out).contains("missing.csv"));

    let out = ringscan(&["run", "-i", s(&csv), "--min-exclusive", "9", "--max-exclusive", "5"]);
    assert_eq!(code(&out), 10);
    assert!(stderr(&out).starts_with("ringscan: config:"));

    let out = ringscan(&["run", "--config", s(&missing)]);
    assert_eq!(code(&out), 10);

    let out = ringscan(&["--threads", "0", "run", "-i", s(&csv)]);
    assert_eq!(code(&out), 10);

    let bad_cycles = path(dir.path(), "bad_cycles.csv");
    fs::write(&bad_cycles, "cycle_id,n,node_external_keys\n0,3,nobody|none|nil\n").unwrap();
    let out = ringscan(&["score", "-i", s(&csv), "--cycles", s(&bad_cycles)]);
    assert_eq!(code(&out), 12, "{}", stderr(&out));

    let bad_partition = path(dir.path(), "partition.csv");
    fs::write(&bad_partition, "node_external_key,community_id\nghost,1\n").unwrap();
    let partition_arg = format!("given={}", s(&bad_partition));
    let out = ringscan(&["compare", "-i", s(&csv), "--partition", &partition_arg]);
    assert_eq!(code(&out), 14, "{}", stderr(&out));

    let blocker = path(dir.path(), "blocker");
    fs::write(&blocker, "").unwrap();
    let out = ringscan(&["run", "-i", s(&csv), "-o", s(&blocker.join("out"))]);
    assert_eq!(code(&out), 15, "{}", stderr(&out));
}

#[test]
fn thread_hint_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = generated(&dir);
    let out = Command::new(env!("CARGO_BIN_EXE_ringscan"))
        .args(["detect", "-i", s(&csv)])
        .env("RINGSCAN_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let bad = Command::new(env!("CARGO_BIN_EXE_ringscan"))
        .args(["detect", "-i", s(&csv)])
        .env("RINGSCAN_THREADS", "lots")
        .output()
        .unwrap();
    assert_ne!(code(&bad), 0);
}
