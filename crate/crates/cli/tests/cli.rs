use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_partdist");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_clear().output().expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn compare_iris_json() {
    let out = run(&["--format", "json", "compare", "--matrix", &data("iris.csv")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let criteria = &v["data"]["criteria"];
    assert_eq!(criteria["MED"]["exact"], "1/50");
    assert_eq!(criteria["RD"]["exact"], "97/3725");
    assert_eq!(v["provenance"]["command"], "compare");
}

#[test]
fn compare_steinley_csv() {
    let out = run(&["compare", "--matrix", &data("steinley.csv")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# partdist "));
    assert!(text.contains("MED,0.615385,8/13,"));
    assert!(text.contains("ARD,1.16418,78/67,"));
}

#[test]
fn identical_labels_have_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.tsv");
    std::fs::write(&path, "a\tx\na\tx\nb\ty\nb\ty\nc\tz\nc\tz\nc\tz\n").unwrap();
    let out = run(&["compare", "--labels", path.to_str().unwrap(), "--delimiter", "\t"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for name in ["MED", "RD", "ARD", "NMED", "NRD"] {
        assert!(text.contains(&format!("\n{name},0,0,")), "{name} in {text}");
    }
}

#[test]
fn matrix_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(&path, "# comment\n16, 2\n2, 0\n").unwrap();
    let out = run(&["--format", "json", "compare", "--matrix", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["data"]["matrix"], serde_json::json!([[16, 2], [2, 0]]));
    assert_eq!(v["data"]["criteria"]["ARD"]["exact"], "760/693");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["extremes", "--r", "2"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3\n").unwrap();
    let out = run(&["compare", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    assert_eq!(run(&["extremes", "--r", "4", "--s", "2", "--n", "3"]).status.code(), Some(2));
    let out = run(&["enumerate", "--r", "3", "--s", "3", "--n", "20", "--max-enum", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn undefined_ard_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    std::fs::write(&path, "5\n").unwrap();
    let out = run(&["compare", "--matrix", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn env_overrides_flags() {
    let out = Command::new(BIN)
        .args(["extremes"])
        .env_clear()
        .env("PARTDIST_R", "2")
        .env("PARTDIST_S", "2")
        .env("PARTDIST_N", "21")
        .env("PARTDIST_FORMAT", "json")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.to_string().contains("11/21"));
}

#[test]
fn seeded_runs_repeat_and_ignore_worker_count() {
    let args = ["null-sim", "--r", "3", "--s", "3", "--n", "30", "--reps", "600", "--seed", "9"];
    let first = run(&args);
    assert!(first.status.success());
    let mut with_workers = vec!["--workers", "3"];
    with_workers.extend(args);
    assert_eq!(stdout(&first), stdout(&run(&args)));
    assert_eq!(stdout(&first), stdout(&run(&with_workers)));
    let other_seed = run(&["null-sim", "--r", "3", "--s", "3", "--n", "30", "--reps", "600", "--seed", "10"]);
    assert_ne!(stdout(&first), stdout(&other_seed));
}

#[test]
fn reproduce_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--out", dir.path().to_str().unwrap(), "reproduce", "figure1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("figure1_profile.csv")).unwrap();
    assert!(text.contains("# command: reproduce"));
    assert!(text.lines().count() > 21);
}
