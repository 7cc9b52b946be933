use heat_control::cli::{self, RunConfig, SweepArgs};
use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heat-control"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    let out = dir.to_str().unwrap();
    bin().args(args).args(["--out", out]).output().unwrap()
}

#[test]
fn solve_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = run_in(dir, &["solve", "--N", "5", "--d", "0.1"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["controller.csv", "summary.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn verify_reads_a_saved_controller() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["solve", "--N", "6", "--d", "0.15"]);
    assert!(o.status.success());
    let ctrl = dir.path().join("controller.csv");
    let text = fs::read_to_string(&ctrl).unwrap();
    assert_eq!(text.lines().next(), Some("n,alpha"));
    assert_eq!(text.lines().count(), 8);

    let o = run_in(
        dir.path(),
        &["verify", "--N", "6", "--d", "0.15", "--controller", ctrl.to_str().unwrap(), "--x-count", "3", "--t-count", "2"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let surface = fs::read_to_string(dir.path().join("surface.csv")).unwrap();
    assert_eq!(surface.lines().count(), 1 + 3 * 2);
    let terminal = fs::read_to_string(dir.path().join("terminal.csv")).unwrap();
    assert_eq!(terminal.lines().count(), 1 + 101);
    let worst = terminal
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");

    // wrong basis size for the saved file
    let o = run_in(dir.path(), &["verify", "--N", "5", "--controller", ctrl.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn zero_cosine_datum_gives_zero_controller() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["solve", "--N", "4", "--datum", "cos:2=0"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("trivial datum"));
    let text = fs::read_to_string(dir.path().join("controller.csv")).unwrap();
    for line in text.lines().skip(1) {
        let a: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(a, 0.0);
    }
}

#[test]
fn exit_codes_follow_the_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["solve", "--d", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[config]"));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[problem]\nlength = \"one\"\n").unwrap();
    let o = run_in(dir.path(), &["config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run_in(dir.path(), &["verify", "--controller", "/nonexistent/controller.csv"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run_in(dir.path(), &["solve", "--L", "2"]);
    assert_eq!(o.status.code(), Some(2), "step datum requires L = 1");
}

#[test]
fn config_round_trips_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["config", "--N", "7", "--scheme", "graded", "--datum", "cos:1=1,3=0.5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cfg = RunConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.basis.n, 7);
    let path = dir.path().join("run.toml");
    fs::write(&path, &text).unwrap();
    let o = bin().args(["config", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), text);
}

#[test]
fn sweep_cell_matches_reference_corner_and_standalone_solve() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig { output_dir: dir.path().to_path_buf(), ..RunConfig::default() };
    let args = SweepArgs { n_list: vec![10], d_list: vec![0.35], all_schemes: false };
    let (results, files) = cli::cmd_sweep(&cfg, &args).unwrap();
    let row = results[0].cell(10, 0.35).unwrap();
    let err = row.terminal_error.to_f64();
    let norm = row.controller_norm.to_f64();
    assert!(err > 1.9e-13 && err < 1.9e-11, "{err:e}");
    assert!(((norm - 3.160198) / 3.160198).abs() < 1e-3, "{norm}");
    assert_eq!(files.len(), 4);

    cfg.basis.n = 10;
    cfg.basis.delay = 0.35;
    let solo = cli::cmd_solve(&cfg).unwrap();
    assert_eq!(solo.l2_norm, row.controller_norm);
    let table = fs::read_to_string(dir.path().join("table2.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("N,d=0.35"));
}
