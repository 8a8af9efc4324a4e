use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn closedloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_closedloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn list_presets_prints_every_case() {
    let out = closedloop(&["list-presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 20);
    for name in ["Δ-D-1", "DΛ-D-4", "Δ-0Φ-2", "fig2c", "fig5"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn run_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "fig5.toml",
        "preset = \"fig5\"\ntasks = [\"evolve\", \"phase_check\"]\n[output]\ndir = \"out\"\n",
    );
    let first = closedloop(&["run", &scenario, "--assert"]);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let out = dir.path().join("out");
    let report = fs::read_to_string(out.join("phase_check.toml")).unwrap();
    let table: toml::Table = toml::from_str(&report).unwrap();
    assert_eq!(table["symmetric"].as_bool(), Some(true));
    assert!(table["deviation"].as_float().unwrap() < 1e-9);
    let csv = fs::read(out.join("phase_check.csv")).unwrap();
    let header = String::from_utf8_lossy(&csv)
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header, "t,1+,1-,2+,2-,3+,3-,4+,4-");

    let other = dir.path().join("again");
    let second = closedloop(&["run", &scenario, "--out", other.to_str().unwrap()]);
    assert!(second.status.success());
    for name in ["evolve.csv", "phase_check.csv", "phase_check.toml"] {
        assert_eq!(
            fs::read(out.join(name)).unwrap(),
            fs::read(other.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn dark_report_for_delta_d1() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "d1.toml",
        "preset = \"Δ-D-1\"\ntasks = [\"dark_report\"]\n",
    );
    let out = closedloop(&["run", &scenario]);
    assert!(out.status.success());
    let report = fs::read_to_string(dir.path().join("d1_out/dark_report.toml")).unwrap();
    let table: toml::Table = toml::from_str(&report).unwrap();
    assert_eq!(table["exists"].as_bool(), Some(true));
    assert_eq!(table["degeneracy"].as_integer(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_grid = write(
        dir.path(),
        "grid.toml",
        "preset = \"fig5\"\ntasks = [\"evolve\"]\n[grid]\nt_start = 0.0\nt_end = 0.0\nn_points = 2\n",
    );
    let out = closedloop(&["run", &bad_grid]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));

    let unknown = write(
        dir.path(),
        "unknown.toml",
        "preset = \"fig7\"\ntasks = [\"evolve\"]\n",
    );
    let out = closedloop(&["run", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig5"));

    let precondition = write(
        dir.path(),
        "pre.toml",
        "preset = \"Δ-0Φ-2\"\ntasks = [\"evolve\"]\nmeasurement_basis = \"table1\"\n",
    );
    assert_eq!(closedloop(&["run", &precondition]).status.code(), Some(2));

    let no_cpt = write(
        dir.path(),
        "nocpt.toml",
        "tasks = [\"evolve\"]\nmeasurement_basis = \"cpt\"\n[drive]\ntopology = \"double_lambda_alt\"\nomega_p = 1.0\nomega_s = 1.0\n",
    );
    assert_eq!(closedloop(&["run", &no_cpt]).status.code(), Some(3));

    let out = closedloop(&["check", "fig2a", "--task", "phase_check", "--assert"]);
    assert_eq!(out.status.code(), Some(4));
    let out = closedloop(&["check", "fig2a", "--task", "phase_check"]);
    assert_eq!(out.status.code(), Some(0));
    let out = closedloop(&["check", "fig2a", "--task", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_with_overrides() {
    let out = closedloop(&[
        "check",
        "fig3b",
        "--task",
        "phase_check",
        "--points",
        "51",
        "--tolerance",
        "1e-12",
        "--assert",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("symmetric=true"));
}

#[test]
fn bundled_scenarios_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        let out = dir.path().join(path.file_stem().unwrap());
        let run = closedloop(&[
            "run",
            path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            run.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&run.stderr)
        );
        assert!(out.join("evolve.csv").exists());
    }
}
