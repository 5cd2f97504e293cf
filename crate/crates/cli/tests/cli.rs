use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const MASS_SPRING: &str = "\
# mass-spring system with a rigid link
model = mass_spring
initial.q0 = [0, 1.1, 0]
initial.v0 = [1, 1, 0]
solver.h = 0.1
solver.T = 2
";

fn livens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_livens")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_outputs_and_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), MASS_SPRING);
    let out = dir.path().join("out");
    let output = livens(&["simulate", &cfg, "--out", out.to_str().unwrap(), "--T", "1"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));

    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("steps:                  10"), "{stdout}");
    let trajectory = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(trajectory.lines().count(), 12);
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn step_size_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), MASS_SPRING);
    let out = dir.path().join("out");
    let output = livens(&["simulate", &cfg, "--out", out.to_str().unwrap(), "--h", "0.05"]);
    assert!(output.status.success());
    assert_eq!(
        fs::read_to_string(out.join("trajectory.csv")).unwrap().lines().count(),
        42
    );
}

#[test]
fn inconsistent_initial_state_fails_with_constraint_name() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &MASS_SPRING.replace("[0, 1.1, 0]", "[0, 1.3, 0]"));
    for command in ["check", "simulate"] {
        let output = livens(&[command, &cfg]);
        assert_eq!(output.status.code(), Some(3));
        assert!(String::from_utf8_lossy(&output.stderr).contains("g_1"));
    }
}

#[test]
fn check_accepts_valid_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), MASS_SPRING);
    let output = livens(&["check", &cfg]);
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("ok"));
}

#[test]
fn malformed_config_exits_with_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "model = mass_spring\nsolver.h = fast\nsolver.T = 1\n");
    let output = livens(&["check", &cfg]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 2"));

    let output = livens(&["check", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn newton_failure_exits_nonzero_with_step() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &format!("{MASS_SPRING}solver.max_iter = 1\n"));
    let output = livens(&["simulate", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&output.stderr).contains("step 1"));
}

#[test]
fn converge_prints_orders() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "model = harmonic_oscillator\nsolver.h = 0.1\nsolver.T = 1\n",
    );
    let out = dir.path().join("conv");
    let output = livens(&[
        "converge",
        &cfg,
        "--h",
        "0.1,0.05,0.025",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("1.99"), "{stdout}");
    assert_eq!(
        fs::read_to_string(out.join("convergence.csv")).unwrap().lines().count(),
        4
    );

    let output = livens(&["converge", &cfg, "--h", "0.05,0.1"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn shipped_configs_are_valid() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["mass_spring.cfg", "spring_pendulum.cfg", "harmonic_oscillator.cfg"] {
        let output = livens(&["check", configs.join(name).to_str().unwrap()]);
        assert!(output.status.success(), "{name}: {}", String::from_utf8_lossy(&output.stderr));
    }
}
