use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use vicar_cli::{header, read_csv, SCHEMA};

fn vicar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vicar"))
        .args(args)
        .env("VICAR_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"
name = "small"
runs = 40
seed = 7
[[grid]]
mode = ["none", "observational", "belief_sharing", "hybrid"]
m = [5]
T = [12]
tau = ["greedy", 0.1]
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn unknown_preset_exits_3() {
    let o = vicar(&["--preset", "nope"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("fig2"));
}

#[test]
fn preset_and_config_conflict_exits_5() {
    let o = vicar(&["--preset", "fig2", "--config", "x.toml"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn missing_source_is_usage_error() {
    assert_eq!(vicar(&[]).status.code(), Some(2));
    assert_eq!(vicar(&["--preset", "fig2", "--runs", "0"]).status.code(), Some(2));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "runs = 5\n[[grid]]\nmodes = [\"none\"]\n");
    let o = vicar(&["--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("modes"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "[[grid]]\nalpha = [1.5]\n");
    let o = vicar(&["--config", &cfg]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("alpha"), "{}", stderr(&o));
}

#[test]
fn small_run_round_trips_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = vicar(&["--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert_eq!(text, fs::read_to_string(b.join("metrics.csv")).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SCHEMA));
    assert_eq!(lines.next(), Some(header().join(",").as_str()));
    assert!(!text.contains('\r'));

    let rows = read_csv(&a.join("metrics.csv")).unwrap();
    assert_eq!(rows.len(), 8 * 12 * 5);
    assert!(rows.iter().all(|r| r.value.is_finite() && r.std_err.is_finite() && r.n_runs == 40));

    // parse(write(x)) = x
    let again = dir.path().join("again.csv");
    vicar_cli::write_csv(&again, &rows).unwrap();
    assert_eq!(fs::read_to_string(&again).unwrap(), text);
    assert_eq!(read_csv(&again).unwrap(), rows);

    let keys: Vec<_> = rows.iter().map(|r| (r.mode.clone(), r.tau.clone(), r.period, r.metric_name.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn manifest_alone_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let first = dir.path().join("first");
    let o = vicar(&["--config", &cfg, "--out", first.to_str().unwrap(), "--seed", "99", "--runs", "17", "--crn"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let manifest = first.join("manifest.json");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["master_seed"], 99);
    assert_eq!(m["spec"]["runs"], 17);
    assert_eq!(m["spec"]["crn"], true);
    assert!(m["wall_time_secs"].as_f64().unwrap() >= 0.0);
    assert!(m["version"].is_string());

    let second = dir.path().join("second");
    let o = vicar(&["--config", manifest.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(first.join("metrics.csv")).unwrap(),
        fs::read(second.join("metrics.csv")).unwrap()
    );
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut tables = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(w);
        let o = vicar(&["--config", &cfg, "--out", out.to_str().unwrap(), "--workers", w]);
        assert!(o.status.success());
        tables.push(fs::read(out.join("metrics.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn empty_table_is_header_only() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("metrics.csv");
    vicar_cli::write_csv(&path, &[]).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, format!("{SCHEMA}\n{}\n", header().join(",")));
    assert!(read_csv(&path).unwrap().is_empty());
}

#[test]
fn json_mirrors_csv_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (c, j) = (dir.path().join("c"), dir.path().join("j"));
    assert!(vicar(&["--config", &cfg, "--out", c.to_str().unwrap()]).status.success());
    assert!(vicar(&["--config", &cfg, "--out", j.to_str().unwrap(), "--format", "json"]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(j.join("metrics.json")).unwrap()).unwrap();
    let from_json: Vec<vicar_cli::OutputRow> = serde_json::from_value(v["rows"].clone()).unwrap();
    assert_eq!(from_json, read_csv(&c.join("metrics.csv")).unwrap());
}

#[test]
fn fig2_emits_one_row_per_cell_period_metric() {
    let dir = TempDir::new().unwrap();
    let o = vicar(&["--preset", "fig2", "--runs", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("metrics.csv")).unwrap();
    assert_eq!(rows.len(), 4 * 1000 * 5);
    let mut modes: Vec<_> = rows.iter().map(|r| r.mode.as_str()).collect();
    modes.dedup();
    assert_eq!(modes, ["belief_sharing", "hybrid", "none", "observational"]);
}

#[test]
fn search_scope_rows_sit_at_the_horizon() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &format!("search_scope = true\n{SMALL}"));
    assert!(vicar(&["--config", &cfg, "--out", dir.path().to_str().unwrap()]).status.success());
    let rows = read_csv(&dir.path().join("metrics.csv")).unwrap();
    let scope: Vec<_> = rows.iter().filter(|r| r.metric_name.ends_with("_scope")).collect();
    assert_eq!(scope.len(), 16);
    assert!(scope.iter().all(|r| r.period == 12 && (1.0..=5.0).contains(&r.value)));
}

#[test]
fn failed_cells_exit_7_and_are_listed() {
    let dir = TempDir::new().unwrap();
    // Passes static checks but overflows the metric accumulator at run time.
    let cfg = write_config(dir.path(), "runs = 3\n[[grid]]\nmode = [\"none\"]\npi_max = [1.0, 5000.0]\nm = [3]\nT = [4]\n");
    let o = vicar(&["--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(7), "{}", stderr(&o));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["failed"].as_array().unwrap().len(), 1);
    assert_eq!(read_csv(&dir.path().join("metrics.csv")).unwrap().len(), 4 * 5);
}

#[test]
fn help_exits_zero() {
    let o = vicar(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("--full-scale"));
}
