use std::path::Path;
use std::process::{Command, Output};

fn singdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singdist")).args(args).env_remove("SINGDIST_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).count() - 1
}

#[test]
fn bezout_of_listed_groupings() {
    let o = singdist(&["bezout", "--rep", "pbr", "--grouping", "x1a;x2a,m;y1a,l;y2a"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "8448");
    let o = singdist(&["bezout", "--rep", "qbr", "--grouping", "h:e0,e3,f0,f3,t1,t2;l;m"]);
    assert_eq!(stdout(&o).trim(), "82320");
    let o = singdist(&["bezout", "--rep", "bgr", "--grouping", "h:e0,e3,t1,t2;l"]);
    assert_eq!(stdout(&o).trim(), "300");
}

#[test]
fn malformed_grouping_is_a_usage_error() {
    let o = singdist(&["bezout", "--rep", "pbr", "--grouping", "x1a;l"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grouping grammar"));
    let o = singdist(&["bezout", "--rep", "xyz", "--grouping", "a"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_writes_every_grouping() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("perr.csv");
    let o = singdist(&["search", "--rep", "perr", "--mode", "s2", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(data_rows(&csv), 52);
    assert!(stdout(&o).contains("B_min 828, B_max 14025"));
}

#[test]
fn large_runs_need_force() {
    let o = singdist(&["solve", "--rep", "dhr"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("icr.json");
    let o = singdist(&["--seed", "3", "solve", "--rep", "icr", "--mode", "s2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("19 finite"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["manifest"]["seed"], 3);
    assert_eq!(json["manifest"]["representation"], "icr s2");
    let o = singdist(&["verify", "--solutions", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("genuine 19"));
}

#[test]
fn verify_rejects_another_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pbr.json");
    assert!(singdist(&["solve", "--rep", "pbr", "--mode", "s2", "--out", out.to_str().unwrap()]).status.success());
    let inst = dir.path().join("other.json");
    std::fs::write(
        &inst,
        r#"{"base": [["0","0"],["5","0"],["1","4"]], "platform_local": [["0","0"],["1","0"],["0","1"]],
            "pose": {"cos": "1", "sin": "0", "translation": ["1","1"]}}"#,
    )
    .unwrap();
    let o = singdist(&["verify", "--instance", inst.to_str().unwrap(), "--solutions", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn distance_is_deterministic_and_tabulated() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let table = dir.path().join("t.csv");
    let args = |p: &Path| vec!["distance".to_string(), "--rep".into(), "pbr".into(), "--out".into(), p.display().to_string()];
    let mut first = args(&a);
    first.extend(["--table".to_string(), table.display().to_string()]);
    let o = Command::new(env!("CARGO_BIN_EXE_singdist")).args(&first).env("SINGDIST_SEED", "5").output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("s3 = 1.30655344858"));
    let o = Command::new(env!("CARGO_BIN_EXE_singdist")).args(args(&b)).env("SINGDIST_SEED", "5").output().unwrap();
    assert!(o.status.success());
    let strip = |p: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["manifest"]["timings"] = serde_json::Value::Null;
        v["result"]["timings"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(strip(&a)["manifest"]["seed"], 5);
    assert_eq!(data_rows(&table), 1);
}

#[test]
fn mode_is_ignored_for_homogeneous_reps() {
    let o = singdist(&["bezout", "--rep", "dckr", "--mode", "s2", "--grouping", "h:th,tht,si,sit;l"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "300");
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignored"));
}

#[test]
fn reproduce_tables_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let o = singdist(&["reproduce-tables", "--out-dir", dir.path().to_str().unwrap(), "--skip-counts"]);
    let code = o.status.code();
    assert!(code == Some(0) || code == Some(4), "{code:?}");
    assert_eq!(data_rows(&dir.path().join("table1.csv")), 5);
    assert_eq!(data_rows(&dir.path().join("table2.csv")), 5);
    let diff = std::fs::read_to_string(dir.path().join("diff.txt")).unwrap();
    assert_eq!(code == Some(4), !diff.starts_with("all values match"));
}
