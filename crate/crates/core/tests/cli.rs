use std::io::Write;
use std::process::{Command, Output, Stdio};

fn diode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diode"))
        .args(args)
        .env("DIODE_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn diode_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_diode"))
        .args(args)
        .env("DIODE_WORKERS", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object")
}

#[test]
fn simulate_prints_json_metrics() {
    let out = diode(&["simulate", "--n", "1", "--delta-ratio", "0.5", "--theta", "0.3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let t_fwd = v["t_fwd"].as_f64().unwrap();
    let t_bwd = v["t_bwd"].as_f64().unwrap();
    assert!((v["r1"].as_f64().unwrap() - (t_fwd - t_bwd)).abs() < 1e-12);
}

#[test]
fn invalid_parameters_exit_with_one() {
    let out = diode(&["simulate", "--n", "1", "--theta", "0.3", "--omega-ratio=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("bandwidth"));

    let out = diode(&["simulate", "--nbar=-2", "--theta", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(diode(&["simulate"]).status.code(), Some(1));
    assert_eq!(diode(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(diode(&["preset", "fig9"]).status.code(), Some(1));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(diode(&["--help"]).status.code(), Some(0));
    assert_eq!(diode(&["--version"]).status.code(), Some(0));
}

#[test]
fn sweep_reads_config_from_stdin_and_writes_csv() {
    let config = r#"
schema_version = 1
input = "fock"
n = [1]
omega_over_gamma = [0.01]
delta_over_gamma = [0.5, 1.0]
theta_over_2pi = [0.3]
"#;
    let out = diode_stdin(&["sweep", "-"], config);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,nbar,omega_over_gamma"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn sweep_rejects_unknown_schema() {
    let config = "schema_version = 7\ninput = \"fock\"\nn = [1]\n";
    let out = diode_stdin(&["sweep", "-"], config);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"].as_str().unwrap(), "validation");
}

#[test]
fn sweep_reports_missing_file_as_config_error() {
    let out = diode(&["sweep", "/nonexistent/grid.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn preset_round_trips_through_sweep_parser() {
    for name in ["fig2", "fig3", "fig4", "fig5", "plateau"] {
        let out = diode(&["preset", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let text = String::from_utf8(out.stdout).unwrap();
        waveguide_diode::sweep::SweepGrid::from_toml(&text).unwrap();
    }
}

#[test]
fn oracle_writes_theta_table() {
    let out = diode(&["oracle", "--delta-ratio", "0.5", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
}
