use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn boundex(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boundex"))
        .args(args)
        .current_dir(dir)
        .env_remove("AUTOBVA_SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn detect(dir: &Path, out: &str, strategy: &str, seed: &str, iters: &str) {
    let o = boundex(
        &[
            "detect", "--sut", "bytecount", "--strategy", strategy, "--iterations", iters,
            "--seed", seed, "--out", out,
        ],
        dir,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

fn csv_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect()
}

#[test]
fn zero_iterations_gives_empty_archive() {
    let tmp = tempfile::tempdir().unwrap();
    detect(tmp.path(), "run", "bcs", "1", "0");
    let rows = csv_rows(&tmp.path().join("run/archive.csv"));
    assert!(rows.is_empty());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["candidates"], 0);
    assert_eq!(m["strategy"], "bcs");
}

#[test]
fn usage_and_config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = boundex(&["detect", "--sut", "nope", "--iterations", "5"], tmp.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown SUT"));
    assert_eq!(code(&boundex(&["frobnicate"], tmp.path())), 1);
    assert_eq!(code(&boundex(&["--help"], tmp.path())), 0);
    assert_eq!(code(&boundex(&["--version"], tmp.path())), 0);
}

#[test]
fn malformed_archive_exits_two_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("bad.csv"),
        "input1,input2,output1,output2,validity,score_num,score_den\n\
         1,2,1B,2B,VV,0,1\n\
         1,oops,1B,2B,VV,0,1\n",
    )
    .unwrap();
    let o = boundex(&["summarize", "bad.csv"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn same_seed_same_archive() {
    let tmp = tempfile::tempdir().unwrap();
    detect(tmp.path(), "a", "bcs", "5", "400");
    detect(tmp.path(), "b", "bcs", "5", "400");
    detect(tmp.path(), "c", "bcs", "6", "400");
    let a = fs::read(tmp.path().join("a/archive.csv")).unwrap();
    assert_eq!(a, fs::read(tmp.path().join("b/archive.csv")).unwrap());
    assert_ne!(a, fs::read(tmp.path().join("c/archive.csv")).unwrap());
}

#[test]
fn seed_variable_overrides_flag() {
    let tmp = tempfile::tempdir().unwrap();
    detect(tmp.path(), "plain", "bcs", "9", "300");
    let o = Command::new(env!("CARGO_BIN_EXE_boundex"))
        .args([
            "detect", "--sut", "bytecount", "--iterations", "300", "--seed", "1", "--out", "env",
        ])
        .current_dir(tmp.path())
        .env("AUTOBVA_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(tmp.path().join("plain/archive.csv")).unwrap(),
        fs::read(tmp.path().join("env/archive.csv")).unwrap()
    );
}

#[test]
fn oracle_lists_decade_boundaries() {
    let tmp = tempfile::tempdir().unwrap();
    let o = boundex(
        &["oracle", "--sut", "bytecount", "--from", "0", "--to", "2000"],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(str::to_string).collect();
    assert_eq!(
        rows,
        [
            "9,10,9B,10B,VV,1,1",
            "99,100,99B,100B,VV,1,1",
            "999,1000,999B,1.0 kB,VV,2,1"
        ]
    );
    let big = boundex(
        &["oracle", "--sut", "bytecount", "--from", "0", "--to", "1000000000000"],
        tmp.path(),
    );
    assert_eq!(code(&big), 1);
}

#[test]
fn summarize_merges_overlapping_archives() {
    let tmp = tempfile::tempdir().unwrap();
    detect(tmp.path(), "a", "bcs", "2", "500");
    detect(tmp.path(), "b", "lns", "3", "2000");
    let mut union: Vec<String> = csv_rows(&tmp.path().join("a/archive.csv"))
        .into_iter()
        .chain(csv_rows(&tmp.path().join("b/archive.csv")))
        .map(|r| r.splitn(3, ',').take(2).collect::<Vec<_>>().join(";"))
        .collect();
    union.sort();
    union.dedup();
    let o = boundex(&["summarize", "a", "b", "--restarts", "10", "--out", "rep"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("rep/report.json")).unwrap())
            .unwrap();
    assert_eq!(rep["total"].as_u64().unwrap() as usize, union.len());
    let md = fs::read_to_string(tmp.path().join("rep/report.md")).unwrap();
    assert!(md.contains("LNS found") && md.contains("BCS found"));
}

#[test]
fn rank_top_one() {
    let tmp = tempfile::tempdir().unwrap();
    detect(tmp.path(), "a", "bcs", "4", "500");
    let o = boundex(&["rank", "a/archive.csv", "--top", "1"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("rank,cluster,input1"));
    assert!(lines[1].starts_with("1,"));
}

#[test]
fn experiment_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let o = boundex(
        &[
            "experiment", "--sut", "bytecount", "--iterations", "300", "--repetitions", "2",
            "--restarts", "10", "--out", "exp",
        ],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let md = fs::read_to_string(tmp.path().join("exp/experiment.md")).unwrap();
    assert!(md.contains("| bytecount | LNS |"));
    assert!(md.contains("| bytecount | BCS |"));
    let j: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("exp/experiment.json")).unwrap())
            .unwrap();
    assert_eq!(j["runs"].as_array().unwrap().len(), 4);
}
