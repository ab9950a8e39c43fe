use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossvar"))
        .args(args)
        .env_remove("CROSSVAR_THREADS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn result<'a>(report: &'a Value, method: &str) -> &'a Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["method"] == method)
        .unwrap()
}

fn p(r: &Value) -> f64 {
    r["p_value"].as_f64().unwrap()
}

#[test]
fn test_dataset_one() {
    let r = json(&["test", "--dataset", "ds1", "--alpha", "0.01", "--format", "json"]);
    for m in ["CROSSVAR", "POOLED_T"] {
        assert!((p(result(&r, m)) - 0.411).abs() <= 5e-4);
        assert_eq!(result(&r, m)["decision"], "ACCEPT");
    }
    assert_eq!(result(&r, "F_VARIANCE")["decision"], "ACCEPT");
    assert!(r["warnings"].as_array().unwrap().is_empty());
    assert_eq!(r["manifest"]["command"], "test");
}

#[test]
fn test_dataset_thirteen_warns() {
    let r = json(&["test", "--dataset", "ds13", "--format", "json"]);
    assert_eq!(result(&r, "F_VARIANCE")["decision"], "REJECT");
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
    let text = ok(&["test", "--dataset", "ds13"]);
    assert!(text.contains("warning: F-test rejects equal variances"));
}

#[test]
fn test_dataset_four_policies() {
    let r = json(&["test", "--dataset", "ds4", "--n-policy", "avg", "--format", "json"]);
    let c = result(&r, "CROSSVAR");
    assert!((p(c) - 0.009).abs() <= 5e-4);
    assert_eq!(c["decision"], "REJECT");
    assert_eq!(c["n_policy_used"], "avg");
    assert_eq!(code(&["test", "--dataset", "ds4"]), 2);
    let err = String::from_utf8(run(&["test", "--dataset", "ds4"]).stderr).unwrap();
    assert!(err.contains("--n-policy"));
}

#[test]
fn test_csv_input_and_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    let rows: String = [5, 7, 5, 3, 5, 3, 3, 9]
        .iter()
        .map(|v| format!("x,{v}\n"))
        .chain([8, 1, 4, 6, 6, 4, 1, 2].iter().map(|v| format!("y,{v}\n")))
        .collect();
    std::fs::write(&good, format!("group,value\n{rows}")).unwrap();
    let from_file = json(&["test", "--input", good.to_str().unwrap(), "--format", "json"]);
    let from_catalog = json(&["test", "--dataset", "ds1", "--format", "json"]);
    assert_eq!(from_file["results"], from_catalog["results"]);
    assert_eq!(
        from_file["manifest"]["input_digests"]["input"].as_str().unwrap().len(),
        64
    );

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,1\nx,2\ny,abc\ny,4\n").unwrap();
    let out = run(&["test", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let three = dir.path().join("three.csv");
    std::fs::write(&three, "a,1\na,2\nb,3\nb,4\nc,5\n").unwrap();
    assert_eq!(code(&["test", "--input", three.to_str().unwrap()]), 2);

    assert_eq!(code(&["test", "--input", dir.path().join("missing.csv").to_str().unwrap()]), 2);
}

#[test]
fn test_column_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    std::fs::write(&x, "value\n5\n7\n5\n3\n\n5\n3\n3\n9\n").unwrap();
    std::fs::write(&y, "8\n1\n4\n6\n6\n4\n1\n2\n").unwrap();
    let r = json(&["test", "--x", x.to_str().unwrap(), "--y", y.to_str().unwrap(), "--format", "json"]);
    assert!((p(result(&r, "CROSSVAR")) - 0.411).abs() <= 5e-4);
}

#[test]
fn test_degenerate_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.txt");
    std::fs::write(&c, "2\n2\n2\n").unwrap();
    assert_eq!(code(&["test", "--x", c.to_str().unwrap(), "--y", c.to_str().unwrap()]), 3);
    let one = dir.path().join("one.txt");
    std::fs::write(&one, "2\n").unwrap();
    assert_eq!(code(&["test", "--x", one.to_str().unwrap(), "--y", c.to_str().unwrap()]), 3);
}

#[test]
fn test_bad_alpha_and_unknown_dataset() {
    assert_eq!(code(&["test", "--dataset", "ds1", "--alpha", "1.5"]), 2);
    assert_eq!(code(&["test", "--dataset", "ds42"]), 2);
    assert_eq!(code(&["test"]), 2);
}

#[test]
fn test_csv_format() {
    let out = ok(&["test", "--dataset", "ds1", "--format", "csv"]);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("method,statistic,df,p_value"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn dist_examples() {
    let out = ok(&["dist", "--which", "tstar-cdf", "--n", "8", "--t", "0.8298"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert!((row[1].parse::<f64>().unwrap() - 0.411).abs() <= 5e-4);

    assert_eq!(code(&["dist", "--which", "tstar-quantile", "--n", "5", "--p", "1.0"]), 2);

    let out = ok(&[
        "dist", "--which", "general-cdf", "--n", "5", "--sigma-x2", "1", "--sigma-y2", "1", "--t", "1",
    ]);
    assert_eq!(out.lines().nth(1).unwrap().split(',').nth(1).unwrap(), "1.000000");

    let out = ok(&["dist", "--which", "tstar-pdf", "--n", "3", "--grid", "9"]);
    assert_eq!(out.lines().count(), 10);

    assert_eq!(code(&["dist", "--which", "general-cdf", "--n", "5", "--t", "0.5"]), 2);
    assert_eq!(code(&["dist", "--which", "tstar-cdf", "--n", "5", "--t", "1.5"]), 2);
}

#[test]
fn dist_series_flags_nonconvergence() {
    let out = ok(&[
        "dist", "--which", "general-cdf-series", "--n", "3", "--sigma-x2", "1", "--sigma-y2", "1", "--t", "0.05,0.8",
    ]);
    let methods: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(methods, ["series", "series-unconverged"]);
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn type1_preset_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1");
    let report = json(&[
        "type1", "--preset", "paper-table1", "--seed", "42", "--format", "json", "--out",
        out.to_str().unwrap(),
    ]);
    let rows = report["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for row in rows {
        assert_eq!(row["identical_decisions"], true);
        for cell in row["rates"].as_array().unwrap() {
            assert_eq!(cell["proposed"], cell["t"]);
        }
    }
    let names: Vec<String> = read_all(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["pvalues.csv", "report.json", "table.csv"]);
    let on_disk: Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(on_disk, report);
    assert_eq!(report["manifest"]["seed"], 42);
    assert!(report["manifest"]["flags"].get("out").is_none());
}

#[test]
fn power_single_null_point() {
    let r = json(&[
        "power", "--n", "10", "--sigma", "2", "--mu-grid", "9.2", "--reps", "4000", "--alpha", "0.05", "--format",
        "json",
    ]);
    let pt = &r["curves"][0]["points"][0];
    let se = (0.05f64 * 0.95 / 4000.0).sqrt();
    assert!((pt["proposed_power"].as_f64().unwrap() - 0.05).abs() <= 3.0 * se);
    assert!((pt["t_power"].as_f64().unwrap() - 0.05).abs() <= 3.0 * se);
}

#[test]
fn power_outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut snapshots = Vec::new();
    for (i, threads) in [None, Some("1"), Some("16")].into_iter().enumerate() {
        let out = dir.path().join(format!("p{i}"));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_crossvar"));
        cmd.args([
            "power", "--preset", "paper-fig1", "--reps", "300", "--seed", "5", "--format", "csv", "--out",
            out.to_str().unwrap(),
        ]);
        match threads {
            Some(t) => cmd.env("CROSSVAR_THREADS", t),
            None => cmd.env_remove("CROSSVAR_THREADS"),
        };
        let o = cmd.output().unwrap();
        assert!(o.status.success());
        snapshots.push((o.stdout, read_all(&out)));
    }
    assert!(snapshots.windows(2).all(|w| w[0] == w[1]));
    let names: Vec<&str> = snapshots[0].1.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["plot.csv", "report.json", "table.csv"]);
}

#[test]
fn power_rejects_bad_config() {
    assert_eq!(code(&["power", "--n", "1", "--sigma", "1"]), 2);
    assert_eq!(code(&["power", "--n", "5", "--sigma", "0"]), 2);
    assert_eq!(code(&["power", "--sigma", "1"]), 2);
    assert_eq!(code(&["power", "--n", "5", "--sigma", "1", "--reps", "0"]), 2);
    let bad = Command::new(env!("CARGO_BIN_EXE_crossvar"))
        .args(["power", "--preset", "paper-fig1", "--reps", "10"])
        .env("CROSSVAR_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn seed_changes_output() {
    let a = ok(&["type1", "--n", "5", "--sigma", "1", "--reps", "200", "--seed", "1", "--format", "csv"]);
    let b = ok(&["type1", "--n", "5", "--sigma", "1", "--reps", "200", "--seed", "2", "--format", "csv"]);
    let c = ok(&["type1", "--n", "5", "--sigma", "1", "--reps", "200", "--seed", "1", "--format", "csv"]);
    assert_eq!(a, c);
    assert_ne!(a, b);
}

#[test]
fn datasets_listing() {
    let rows: Value = json(&["datasets", "--format", "json"]);
    assert_eq!(rows.as_array().unwrap().len(), 28);
    let text = ok(&["datasets"]);
    assert!(text.contains("ds14"));
}
