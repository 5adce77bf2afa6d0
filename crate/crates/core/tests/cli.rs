use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_social-cache")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let file = dir.join("config.json");
    std::fs::write(&file, body).unwrap();
    file.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = bin(&["run", "--out", path(&out), "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("beta,requests,seed,sat_ma,sat_ra,time_ma,time_ra"));
    // 3 storage ratios × 8 request counts × 1 seed
    assert_eq!(lines.count(), 24);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("beta=")).count(), 24);
}

#[test]
fn row_count_multiplies_config_lists() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"beta_list": [0.1, 0.5], "request_sweep": [10, 20, 30], "seeds": [4, 5], "users": 60, "base_stations": 12, "servers": 4, "videos": 20}"#,
    );
    let out = dir.path().join("out.csv");
    assert!(bin(&["run", "--config", &config, "--out", path(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2);
}

#[test]
fn full_storage_satisfies_everyone() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"beta_list": [1.0], "seeds": [1, 2]}"#);
    let out = dir.path().join("out.csv");
    assert!(bin(&["run", "--config", &config, "--out", path(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!((cols[3], cols[4]), ("1", "1"), "{line}");
        assert_eq!(cols[5], cols[6], "{line}");
    }
}

#[test]
fn missing_config_fails_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    let o = bin(&["run", "--config", path(&missing), "--out", path(&dir.path().join("x.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.json"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"betas": [0.5]}"#);
    let o = bin(&["run", "--config", &config, "--out", path(&dir.path().join("x.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("betas"));
}

#[test]
fn figures_from_run_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"beta_list": [0.25, 1.0], "request_sweep": [50, 100], "seeds": [1, 2]}"#);
    let csv = dir.path().join("results.csv");
    assert!(bin(&["run", "--config", &config, "--out", path(&csv)]).status.success());
    let figs = dir.path().join("figs");
    let o = bin(&["figures", path(&csv), "--out", path(&figs)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["satisfaction.csv", "download_time.csv"] {
        let text = std::fs::read_to_string(figs.join(name)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "requests,ma_beta0.25,ra_beta0.25,ma_beta1,ra_beta1");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("50,") && lines[2].starts_with("100,"));
    }
}

#[test]
fn figures_rejects_missing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["figures", path(&dir.path().join("none.csv")), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_exit_codes() {
    let ok = bin(&["verify", "--trials", "200", "--seed", "9"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("trials=200 stable=200"));

    let too_big = bin(&["verify", "--max-size", "11"]);
    assert_eq!(too_big.status.code(), Some(1));

    let faulty = bin(&["verify", "--trials", "200", "--inject-fault"]);
    assert_eq!(faulty.status.code(), Some(2));
    let stdout = String::from_utf8(faulty.stdout).unwrap();
    let json = stdout.lines().find(|l| l.starts_with('{')).expect("counterexample printed");
    let parsed: serde_json::Value = serde_json::from_str(json).unwrap();
    assert!(parsed["proposers"].is_array() && parsed["receivers"].is_array());
}

#[test]
fn argument_errors_and_help() {
    assert_eq!(bin(&["run"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
