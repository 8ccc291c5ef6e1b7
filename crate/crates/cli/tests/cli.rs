use std::process::{Command, Output};

fn clusterfuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clusterfuse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = clusterfuse(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn scenario_row_has_both_engines() {
    let text = stdout(&["scenario", "--name", "method1-all-success", "--p1", "0", "--p2", "0.1"]);
    let (header, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let sim = num(&rows[0][col("fidelity_sim")]);
    let formula = num(&rows[0][col("fidelity_formula")]);
    assert!((sim - formula).abs() < 1e-9);
    assert_eq!(rows[0][col("scenario")], "method1-all-success");
    assert_eq!(rows[0][col("p3")], "");
}

#[test]
fn sweep_row_count() {
    let text = stdout(&[
        "sweep",
        "--p-min",
        "0",
        "--p-max",
        "1",
        "--steps",
        "11",
        "--quantities",
        "eq2:q=5",
    ]);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, vec!["p", "eq2:q=5"]);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][1], "1");
}

#[test]
fn sweep_mixes_quantities() {
    let text = stdout(&[
        "sweep",
        "--steps",
        "3",
        "--quantities",
        "chain:q=3,rho3:fidelity,neg:q=3:pt=2,rho3:negativity-middle",
    ]);
    let (_, rows) = csv_rows(&text);
    for r in rows {
        assert!((num(&r[1]) - num(&r[2])).abs() < 1e-9);
        assert!((num(&r[3]) - num(&r[4])).abs() < 1e-9);
    }
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        stdout(&[
            "mc",
            "--method",
            "1",
            "--recycle",
            "--samples",
            "2000",
            "--seed",
            "42",
            "--storage",
            "0.05",
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let doc: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(doc["metadata"]["seed"], 42);
    assert_eq!(doc["metadata"]["command"], "mc");
    let row = &doc["rows"][0];
    assert_eq!(row["samples"], 2000);
    let hist: u64 = (0..20)
        .map(|b| row[format!("fidelity_bin_{b:02}")].as_u64().unwrap())
        .sum();
    assert_eq!(hist, row["successes"].as_u64().unwrap());
}

#[test]
fn figures_have_the_expected_curves() {
    let (header, rows) = csv_rows(&stdout(&["figure", "fig1", "--steps", "3"]));
    assert_eq!(header.len(), 1 + 12);
    assert_eq!(rows.len(), 3);
    let (header, _) = csv_rows(&stdout(&["figure", "fig2", "--steps", "2"]));
    assert_eq!(header.iter().filter(|h| h.starts_with("sim_")).count(), 7);
    let (_, rows) = csv_rows(&stdout(&["figure", "fig4-left", "--p-max", "0", "--steps", "1"]));
    assert!(rows[0][1..].iter().all(|v| (num(v) - 1.0).abs() < 1e-10));
}

#[test]
fn compare_methods_at_zero() {
    let (header, rows) = csv_rows(&stdout(&["compare-methods", "--binding", "fresh", "--steps", "3"]));
    assert_eq!(header, vec!["p", "three_three", "four_two", "difference"]);
    assert_eq!(rows[0][1..], ["1", "1", "0"]);
}

#[test]
fn json_output_mirrors_rows() {
    let text = stdout(&["compare-methods", "--steps", "2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["metadata"]["tool"], "clusterfuse");
    assert_eq!(doc["rows"][1]["p"], 1.0);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["scenario", "--name", "method9"],
        &["figure", "fig9"],
        &["sweep", "--quantities", "eq2:q=x"],
        &["mc", "--method", "3"],
        &["scenario", "--name", "method1-wait", "--p1", "zero"],
    ] {
        assert_eq!(clusterfuse(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_with_one() {
    for args in [
        &[
            "scenario",
            "--name",
            "method1-wait",
            "--p1",
            "0",
            "--p2",
            "1.5",
            "--p-wait",
            "0",
        ][..],
        &["scenario", "--name", "method1-wait", "--p1", "0"],
        &["sweep", "--quantities", "eq2:q=12"],
        &["sweep", "--p-min", "0.8", "--p-max", "0.2", "--quantities", "eq2:q=3"],
        &["mc", "--method", "1", "--samples", "0"],
        &["figure", "fig1", "--out", "/nonexistent/dir/out.csv"],
    ] {
        let out = clusterfuse(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}
