mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::data_path;
use serde_json::Value;

fn wkmodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wkmodes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn voting() -> String {
    data_path("house-votes-84.data").display().to_string()
}

fn without_timing(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.retain(|k, _| !k.ends_with("_secs"));
    }
    v
}

#[test]
fn k_one_gives_one_cluster_of_global_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = wkmodes(&[
        "cluster", "--data", &voting(), "--class-col", "0", "--k", "1", "--schema", "kmodes",
        "--output", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let membership = fs::read_to_string(out.join("membership.txt")).unwrap();
    assert_eq!(membership.lines().count(), 435);
    assert!(membership.lines().all(|l| l == "0"));

    // Per-attribute global mode, counted straight from the file.
    let text = fs::read_to_string(data_path("house-votes-84.data")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').skip(1).collect()).collect();
    let mut expected = vec!["0".to_owned()];
    for j in 0..16 {
        let mut values: Vec<&str> = Vec::new();
        for r in &rows {
            if !values.contains(&r[j]) {
                values.push(r[j]);
            }
        }
        let count = |v: &str| rows.iter().filter(|r| r[j] == v).count();
        let best = values.iter().copied().fold(values[0], |b, v| if count(v) > count(b) { v } else { b });
        expected.push(best.to_owned());
    }
    let centers = fs::read_to_string(out.join("centers.csv")).unwrap();
    let lines: Vec<&str> = centers.lines().collect();
    assert!(lines[0].starts_with("cluster,a0,a1"));
    assert_eq!(lines[1], expected.join(","));

    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["k"], 1);
    assert_eq!(summary["accuracy"].as_f64().unwrap(), 267.0 / 435.0);
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,objective\n1,"));
}

#[test]
fn repeated_runs_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = wkmodes(&[
                "cluster", "--data", &voting(), "--class-col", "0", "--k", "3", "--schema", "hsf",
                "--seed", "12", "--output", out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", stderr(&o));
            out
        })
        .collect();
    for file in ["membership.txt", "centers.csv", "trace.csv"] {
        assert_eq!(
            fs::read(outputs[0].join(file)).unwrap(),
            fs::read(outputs[1].join(file)).unwrap(),
            "{file}"
        );
    }
    let read = |p: &Path| without_timing(serde_json::from_str(&fs::read_to_string(p.join("summary.json")).unwrap()).unwrap());
    assert_eq!(read(&outputs[0]), read(&outputs[1]));
}

#[test]
fn membership_goes_to_stdout_without_output_dir() {
    let o = wkmodes(&["cluster", "--data", &voting(), "--class-col", "0", "--k", "2", "--schema", "sf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 435);
    assert!(text.lines().all(|l| l == "0" || l == "1"));
}

#[test]
fn accuracy_of_the_classes_themselves_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data_path("house-votes-84.data")).unwrap();
    let classes: Vec<&str> = text.lines().map(|l| l.split(',').next().unwrap()).collect();
    let membership: String = classes
        .iter()
        .map(|&c| if c == "democrat" { "0\n" } else { "1\n" })
        .collect();
    let labels: String = classes.iter().map(|c| format!("{c}\n")).collect();
    let m = dir.path().join("membership.txt");
    let l = dir.path().join("labels.txt");
    fs::write(&m, membership).unwrap();
    fs::write(&l, labels).unwrap();

    let o = wkmodes(&["accuracy", "--membership", m.to_str().unwrap(), "--labels", l.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["accuracy"], 1.0);
    assert_eq!(v["matched"], 435);

    let o = wkmodes(&[
        "accuracy", "--membership", m.to_str().unwrap(), "--data", &voting(), "--class-col", "0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["accuracy"], 1.0);
}

#[test]
fn table2_writes_a_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("t2.json");
    let breast = format!("{}#class=last,skip=0", data_path("breast-cancer-wisconsin.data").display());
    let o = wkmodes(&[
        "table2", "--data", &voting(), "--class-col", "0", "--data", &breast, "--runs", "4", "--seed", "7",
        "--summary", summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("dataset,n,k,schema,mean_accuracy"));
    assert_eq!(lines.len(), 1 + 2 * 5);
    assert!(lines[1].starts_with("house-votes-84,435,2,kmodes,"));
    assert!(lines[6].starts_with("breast-cancer-wisconsin,699,2,kmodes,"));
    let v: Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(v[0]["report"]["seeds"], serde_json::json!([7, 8, 9, 10]));
}

#[test]
fn scale_on_generated_data() {
    let o = wkmodes(&[
        "scale", "--generate", "nursery", "--objects", "500,1000", "--k", "3", "--repeats", "1", "--schemas",
        "kmodes,sf",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("kmodes,500,3,"));
    assert!(lines[4].starts_with("sf,1000,3,"));

    let o = wkmodes(&["scale", "--generate", "nursery", "--clusters", "2,3", "--repeats", "1", "--schemas", "hsf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().nth(2).unwrap().starts_with("hsf,12960,3,"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["cluster", "--data", "x.csv"],
        vec!["cluster", "--data", "x.csv", "--k", "2", "--schema", "fuzzy"],
        vec!["cluster", "--data", "x.csv", "--k", "2", "--class-col", "first"],
        vec!["frobnicate"],
        vec!["scale", "--generate", "nursery"],
    ] {
        let o = wkmodes(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn data_errors_exit_with_one_and_name_the_file_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("ragged.csv");
    fs::write(&bad, "a,b\nc,d\ne\n").unwrap();
    let o = wkmodes(&["cluster", "--data", bad.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("ragged.csv"), "{err}");
    assert!(err.contains("line 3") && err.contains("row 2"), "{err}");

    let o = wkmodes(&["cluster", "--data", dir.path().join("absent.csv").to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("absent.csv"));
}

#[test]
fn failed_runs_leave_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tiny.csv");
    fs::write(&data, "a,b\na,b\nc,d\n").unwrap();
    let out = dir.path().join("out");
    let o = wkmodes(&["cluster", "--data", data.to_str().unwrap(), "--k", "3", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join("membership.txt").exists());
    assert!(stdout(&o).is_empty());
}
