use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-ldp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn rate_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let o = run(&["rate", "--law", "gaussian", "--out", path_arg(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,i_hat,clique,i,regime");
    assert_eq!(lines.len(), 101);
    assert!(lines[1].starts_with("2.1,"));
    assert!(lines[100].starts_with("6,"));
    assert!(stderr(&o).contains("t_star"), "{}", stderr(&o));
}

#[test]
fn rademacher_rate_is_vertex_everywhere() {
    let o = run(&["rate", "--law", "rademacher", "--points", "30"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    assert!(rows.iter().all(|r| r.ends_with(",vertex")), "{out}");
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("inf")));
}

#[test]
fn rate_json_report_has_schema_version() {
    let o = run(&["rate", "--law", "gaussian", "--points", "5", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["trials"].as_array().unwrap().len(), 5);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["rate"]).status.code(), Some(2));
    assert_eq!(run(&["plant", "--clique", "--vertex"]).status.code(), Some(2));
    assert_eq!(run(&["plant"]).status.code(), Some(2));
    assert_eq!(run(&["rate", "--law", "cauchy"]).status.code(), Some(2));
    assert_eq!(run(&["rate", "--law", "gaussian", "--law-param", "sigma"]).status.code(), Some(2));
    assert_eq!(run(&["rate", "--law", "gaussian", "--from", "1.5"]).status.code(), Some(2));
    assert_eq!(
        run(&["typicality", "--model", "adjacency", "--law", "gaussian"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn oversized_clique_is_rejected() {
    let o = run(&["plant", "--clique", "--k", "200", "--n", "300", "--p", "0.1", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("guard"), "{}", stderr(&o));
}

#[test]
fn vertex_plant_echoes_solved_degree() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("v.json");
    let o = run(&[
        "plant", "--vertex", "--r", "0", "--t", "3", "--n", "300", "--p", "0.1", "--trials", "2", "--out",
        path_arg(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("s = 7.854102"), "{out}");
    assert!(out.starts_with("predicted 3.000 measured "), "{out}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["name"], "vertex_plant");
    assert_eq!(v["config"]["n"], 300);
}

#[test]
fn tail_prints_cgf_table() {
    let o = run(&["tail", "--n", "2000", "--p", "0.01", "--trials", "2", "--draws", "500"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("theta"), "{out}");
    for row in ["\n0 ", "\n0.5 ", "\n1 ", "\n1.5 "] {
        assert!(out.contains(row), "missing {row:?} in {out}");
    }
}

#[test]
fn empty_sweep_succeeds_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("runs.json");
    std::fs::write(&list, "[]").unwrap();
    let o = run(&["sweep", "--config", path_arg(&list)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn sweep_continues_past_failures() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let list = dir.path().join("runs.json");
    let runs = serde_json::json!([
        {"experiment": "typicality", "config": {"p": 2.0}, "out": dir.path().join("bad.json")},
        {"experiment": "nonsense"},
        {"experiment": "typicality", "config": {"n": 200, "p": 0.2, "trials": 2}, "out": good},
    ]);
    std::fs::write(&list, runs.to_string()).unwrap();
    let o = run(&["sweep", "--config", path_arg(&list)]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("2 of 3 runs failed"), "{}", stderr(&o));
    assert!(good.exists());
    assert!(!dir.path().join("bad.json").exists());
}

#[test]
fn rerun_reproduces_saved_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("t.json");
    let o = run(&[
        "typicality", "--n", "200", "--p", "0.2", "--trials", "3", "--seed", "7", "--out",
        path_arg(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["rerun", path_arg(&report), "--threads", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("identical"), "{}", stdout(&o));
}

#[test]
fn missing_output_directory_is_reported() {
    let o = run(&[
        "typicality", "--n", "100", "--p", "0.3", "--trials", "1", "--out", "/nonexistent-dir/r.json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nonexistent-dir"), "{}", stderr(&o));
}

#[test]
fn list_shows_every_experiment() {
    let o = run(&["list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["clique_plant", "degree_tail", "local_law", "rate_curve", "typicality", "vertex_plant"] {
        assert!(out.contains(name), "{out}");
    }
}
