//! Black-box checks of the command-line binary: exit codes, file outputs,
//! and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn satcon() -> Command {
    Command::new(env!("CARGO_BIN_EXE_satcon"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("satcon-cli-{tag}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(out: &Output) -> bool {
    out.status.success()
}

#[test]
fn list_builtins_prints_all_names() {
    let out = satcon().arg("list-builtins").output().unwrap();
    assert!(run_ok(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig2a", "fig2b", "fig3a", "fig3b", "fig5", "fig6", "fig8a", "fig8b", "fig9a", "fig9b",
        "fig11a", "fig11b",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn run_builtin_writes_outputs_and_exits_zero() {
    let dir = temp_dir("run");
    let out = satcon()
        .args(["run", "fig11a", "fig11b", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        run_ok(&out),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for file in [
        "fig11a.csv",
        "fig11a.summary.json",
        "fig11b.csv",
        "fig11b.summary.json",
    ] {
        assert!(dir.join(file).exists(), "missing {file}");
    }
    let summary = std::fs::read_to_string(dir.join("fig11a.summary.json")).unwrap();
    assert!(summary.contains("\"agreement_with_prediction\": true"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = temp_dir("repro-a");
    let dir_b = temp_dir("repro-b");
    for dir in [&dir_a, &dir_b] {
        let out = satcon()
            .args(["run", "fig8a", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert!(run_ok(&out));
    }
    let read = |dir: &Path, file: &str| std::fs::read(dir.join(file)).unwrap();
    assert_eq!(read(&dir_a, "fig8a.csv"), read(&dir_b, "fig8a.csv"));
    assert_eq!(
        read(&dir_a, "fig8a.summary.json"),
        read(&dir_b, "fig8a.summary.json")
    );
}

#[test]
fn scenario_file_runs_through_the_cli() {
    let dir = temp_dir("file");
    let scn = dir.join("pair.scn");
    std::fs::write(
        &scn,
        "\
name = pair
[network.graph]
n = 2
edge = 1 2 1.0

[saturation]
homogeneous = 1.0

[initial]
values = 0.9 -0.3

[sim]
dt = 0.001
t_end = 30
",
    )
    .unwrap();
    let out = satcon()
        .arg("run")
        .arg(&scn)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        run_ok(&out),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("pair.csv").exists());
}

#[test]
fn bad_scenario_exits_nonzero_with_line_error() {
    let dir = temp_dir("bad");
    let scn = dir.join("bad.scn");
    std::fs::write(
        &scn,
        "\
[network.graph]
n = 2
edge = 1 2 1.0

[saturation]
levels = 1 0
",
    )
    .unwrap();
    let out = satcon().arg("run").arg(&scn).output().unwrap();
    assert!(!run_ok(&out));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 6"), "stderr: {err}");
    assert!(err.contains("positive"), "stderr: {err}");
}

#[test]
fn disconnected_scenario_fails_with_connectivity_diagnosis() {
    let dir = temp_dir("disconnected");
    let scn = dir.join("split.scn");
    std::fs::write(
        &scn,
        "\
[network.graph]
n = 4
edge = 1 2 1.0
edge = 3 4 1.0

[saturation]
homogeneous = 1.0

[initial]
values = 1 2 3 4

[sim]
dt = 0.01
t_end = 1
",
    )
    .unwrap();
    let out = satcon().arg("run").arg(&scn).output().unwrap();
    assert!(!run_ok(&out));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not connected"), "stderr: {err}");
}

#[test]
fn unknown_scenario_name_fails() {
    let out = satcon().args(["run", "fig99z"]).output().unwrap();
    assert!(!run_ok(&out));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("list-builtins"), "stderr: {err}");
}

#[test]
fn identities_command_passes() {
    let out = satcon()
        .args(["identities", "--samples", "500"])
        .output()
        .unwrap();
    assert!(
        run_ok(&out),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn sweep_command_single_regime() {
    let out = satcon()
        .args([
            "sweep",
            "--count",
            "2",
            "--seed",
            "11",
            "--regime",
            "fixed-homogeneous",
        ])
        .output()
        .unwrap();
    assert!(
        run_ok(&out),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fixed-homogeneous"), "{text}");
    assert!(text.contains("2/2"), "{text}");
}
