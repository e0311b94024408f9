use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wheel-lab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn wheel_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wheel-lab"))
        .args(args)
        .env("WHEEL_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

#[test]
fn run_writes_report_and_figure() {
    let out = scratch("run");
    let o = wheel_lab(&["run", "--n", "12", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "timings.json", "tree.json", "curve.json", "figure.svg", "figure.png"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("pass ")).count(), 9);
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"n\": 12"));
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn config_file_with_flag_overrides() {
    let out = scratch("config");
    std::fs::create_dir_all(&out).unwrap();
    let cfg = out.join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 10, "seed": 9, "root_mode": "wired"}"#).unwrap();
    let o = wheel_lab(&[
        "check", "--config", cfg.to_str().unwrap(), "--root", "point:5,5",
        "--only", "order_theorem", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("pass order_theorem"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("skip ")).count(), 8);
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"point\": 60"));
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn render_selected_layers() {
    let out = scratch("render");
    let o = wheel_lab(&["render", "--n", "8", "--layers", "tree,wheel-path", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(out.join("figure.svg")).unwrap();
    assert!(svg.contains("tree-edge"));
    assert!(!svg.contains("dual-edge"));
    std::fs::remove_dir_all(&out).unwrap();
}

#[test]
fn bad_input_exits_with_code_two() {
    assert_eq!(wheel_lab(&["run", "--n", "1", "--out", scratch("n1").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(wheel_lab(&["run", "--gamma", "2.5"]).status.code(), Some(2));
    assert_eq!(wheel_lab(&["render", "--layers", "clouds"]).status.code(), Some(2));
    assert_eq!(wheel_lab(&["run", "--root", "point:99,0", "--n", "8"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_wheel-lab"))
        .args(["check", "--only", "field_covariance", "--n", "4"])
        .env("WHEEL_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    // unknown block names are rejected by the argument parser
    assert!(!wheel_lab(&["check", "--only", "nope"]).status.success());
}
