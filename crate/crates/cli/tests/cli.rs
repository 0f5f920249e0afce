use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cubature(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubature"))
        .args(args)
        .env_remove("CUBATURE_THREADS")
        .output()
        .expect("binary runs")
}

fn with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubature"))
        .args(args)
        .env("CUBATURE_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("# cubature v1 config={"));
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn poly_example_has_at_most_ten_nodes() {
    let v = json(&cubature(&["poly", "--dist", "uniform01", "--d", "2", "--m", "3", "--N", "90", "--seed", "7"]));
    assert_eq!(v["D"], 9);
    assert_eq!(v["config"]["seed"], 7);
    let run = &v["runs"][0];
    if run["success"].as_bool().unwrap() {
        assert!(run["weights"].as_array().unwrap().len() <= 10);
        assert_eq!(run["nodes"].as_array().unwrap().len(), run["weights"].as_array().unwrap().len());
        assert!(run["residual"].as_f64().unwrap() <= 1e-9);
        let total: f64 = run["weights"].as_array().unwrap().iter().map(|w| w.as_f64().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    } else {
        assert_eq!(run["separating_direction"].as_array().unwrap().len(), 9);
    }
}

#[test]
fn log_concave_example() {
    let v = json(&cubature(&["bounds", "--name", "log_concave", "--D", "10"]));
    assert_eq!(v["value"], 82);
}

#[test]
fn estimate_p_example_matches_wendel() {
    let rows = csv_rows(&cubature(&[
        "estimate-p", "--sampler", "gaussian", "--D", "2", "--N", "4", "--trials", "10000", "--seed", "1",
    ]));
    assert_eq!(rows[0][..4], ["repeat", "seed", "N", "D"]);
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    let row = &rows[1];
    let lo: f64 = row[col("ci_low")].parse().unwrap();
    let hi: f64 = row[col("ci_high")].parse().unwrap();
    let wendel: f64 = row[col("wendel")].parse().unwrap();
    assert_eq!(wendel, 0.5);
    assert!(lo <= 0.5 && 0.5 <= hi, "[{lo}, {hi}]");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = ["wiener", "--d", "2", "--m", "2", "--N", "40", "--partitions", "16", "--repeats", "3", "--seed", "5"];
    let a = with_threads("1", &args);
    let b = with_threads("4", &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let e = ["estimate-p", "--sampler", "rademacher", "--D", "3", "--N", "4-6", "--trials", "300"];
    assert_eq!(with_threads("1", &e).stdout, with_threads("3", &e).stdout);
}

fn roundtrip(dir: &Path, args: &[&str], name: &str) {
    let first = dir.join(name);
    let second = dir.join(format!("replay-{name}"));
    let mut a: Vec<&str> = args.to_vec();
    a.extend(["--output", first.to_str().unwrap()]);
    assert!(cubature(&a).status.success());
    let out = cubature(&["--config", first.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn output_files_replay_to_the_same_result() {
    let dir = tempfile::tempdir().unwrap();
    roundtrip(dir.path(), &["poly", "--d", "2", "--m", "2", "--N", "30", "--seed", "9", "--repeats", "2"], "p.json");
    roundtrip(
        dir.path(),
        &["kernel", "--d", "1", "--delta", "0.5", "--threshold", "0.1", "--N", "20", "--format", "csv"],
        "k.csv",
    );
    roundtrip(dir.path(), &["sweep", "--pipeline", "poly", "--m", "2", "--ratios", "2,4", "--repeats", "3"], "s.csv");
    roundtrip(dir.path(), &["hc-check", "--kind", "grp", "--lambdas", "0.3,0.1", "--s", "0.1", "--t", "0.9"], "h.json");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("run.ini");
    std::fs::write(&ini, "seed = 3\n[bounds]\nname = moment\nD = 4\nK = 1\n[poly]\nm = 9\n").unwrap();
    let v = json(&cubature(&["bounds", "--config", ini.to_str().unwrap()]));
    assert_eq!(v["value"], 221.0);
    assert_eq!(v["config"]["seed"], 3);
    let v = json(&cubature(&["bounds", "--config", ini.to_str().unwrap(), "--D", "1", "--K", "1.4142135623730951"]));
    assert!((v["value"].as_f64().unwrap() - 323.0).abs() < 1e-9);
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ini");
    std::fs::write(&bad, "[poly]\nthis line has no equals sign\n").unwrap();
    assert_eq!(cubature(&["--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cubature(&["--config", "/nonexistent/x.ini", "poly"]).status.code(), Some(2));
    assert_eq!(cubature(&["poly", "--N", "5"]).status.code(), Some(2));
    assert_eq!(cubature(&["bounds", "--name", "tukey", "--D", "3"]).status.code(), Some(2));
    assert_eq!(cubature(&["bounds", "--name", "tukey", "--D", "3", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(cubature(&["kernel", "--N", "50"]).status.code(), Some(2));
    let out = cubature(&["estimate-p", "--N", "4", "--confidence", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("confidence"));
}

#[test]
fn empty_sweep_axis_is_an_error() {
    let out = cubature(&["sweep", "--pipeline", "poly", "--ratios="]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ratios"));
}

#[test]
fn single_point_sweep_equals_a_run() {
    let run = json(&cubature(&["poly", "--m", "2", "--N", "15", "--repeats", "6", "--seed", "4"]));
    let sweep = csv_rows(&cubature(&["sweep", "--pipeline", "poly", "--m", "2", "--ratios", "3", "--repeats", "6", "--seed", "4"]));
    assert_eq!(sweep[1][1], "15");
    assert_eq!(sweep[1][4], run["successes"].to_string());
}

#[test]
fn require_success_exits_with_four_on_failure() {
    // Too few samples for the hull to contain the moments.
    let args = ["poly", "--m", "3", "--N", "10", "--repeats", "4", "--require-success"];
    let out = cubature(&args);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    if v["successes"].as_u64().unwrap() < 4 {
        assert_eq!(out.status.code(), Some(4));
    } else {
        assert!(out.status.success());
    }
    assert_eq!(
        cubature(&["hc-check", "--kind", "grp", "--lambdas", "0.9", "--s", "0.1", "--t", "0.2", "--require-success"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn timing_is_opt_in() {
    let args = ["bounds", "--name", "wiener_N", "--D", "1", "--m", "1"];
    let v = json(&cubature(&args));
    assert_eq!(v["value"], 323);
    assert!(v.get("wall_time_s").is_none());
    let mut t = args.to_vec();
    t.push("--timing");
    assert!(json(&cubature(&t))["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sobolev_worked_example() {
    let v = json(&cubature(&["hc-check", "--kind", "sobolev", "--r", "1", "--delta", "0.3333333333333333"]));
    assert_eq!(v["s"], 0.1);
    assert_eq!(v["t"], 1.1);
    assert_eq!(v["report"]["satisfied"], true);
}
