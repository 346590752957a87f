use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn nlsprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsprop"))
        .args(args)
        .env_remove("NLSPROP_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const FREE: &str = "[grid]
points = 64
lengths = 10

[initial.0]
profile = gaussian
sigma = 0.8
k0 = 1.5

[run]
scheme = strang
dt = 0.01
steps = 50
observe_every = 5

[output]
csv = free.csv
snapshot = free.nlsp
";

fn write_config(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn inspect_norm(out: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix("norm"))
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn free_particle_keeps_norm_column_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "free.conf", FREE);
    let o = nlsprop(&["run", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let header = std::fs::read_to_string(dir.path().join("free.csv")).unwrap();
    assert!(header.starts_with("time,norm_total,norm_c0,energy\n"));
    let rows = csv_rows(&dir.path().join("free.csv"));
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!((r[1] - rows[0][1]).abs() < 1e-13);
        assert!((r[3] - rows[0][3]).abs() < 1e-12 * rows[0][3].abs());
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "free.conf", FREE);
    assert_eq!(code(&nlsprop(&["run", &cfg])), 0);
    let first = std::fs::read(dir.path().join("free.csv")).unwrap();
    assert_eq!(code(&nlsprop(&["run", &cfg])), 0);
    assert_eq!(first, std::fs::read(dir.path().join("free.csv")).unwrap());
}

#[test]
fn soliton_demo_snapshot_matches_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = nlsprop(&["demo", "soliton", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("sech"));
    let o = nlsprop(&["inspect", dir.path().join("soliton.nlsp").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("soliton.csv"));
    let last = rows.last().unwrap();
    assert!((inspect_norm(&stdout(&o)) - last[1]).abs() < 1e-12);
    // the demo leaves a config that reproduces the run
    let o = nlsprop(&["run", dir.path().join("soliton.conf").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn fwm_snapshot_has_four_component_norms() {
    let dir = TempDir::new().unwrap();
    let o = nlsprop(&["demo", "fwm", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = nlsprop(&["inspect", dir.path().join("fwm.nlsp").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("components 4"));
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with('c') && l.contains("norm")).count(), 4);
}

#[test]
fn invalid_scheme_lists_valid_names() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.conf", &FREE.replace("strang", "leapfrog"));
    let o = nlsprop(&["run", &cfg]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    for name in ["strang", "forest-ruth", "order6", "order8", "chin"] {
        assert!(err.contains(name), "{err}");
    }
    assert!(err.contains("line 11"), "{err}");
}

#[test]
fn truncated_snapshot_is_a_clean_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "free.conf", FREE);
    assert_eq!(code(&nlsprop(&["run", &cfg])), 0);
    let snap = dir.path().join("free.nlsp");
    let bytes = std::fs::read(&snap).unwrap();
    std::fs::write(&snap, &bytes[..bytes.len() / 2]).unwrap();
    let o = nlsprop(&["inspect", snap.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("snapshot"), "{}", stderr(&o));
}

#[test]
fn overflow_is_a_numerical_failure_with_step() {
    let dir = TempDir::new().unwrap();
    let text = FREE
        .replace("profile = gaussian\nsigma = 0.8\nk0 = 1.5", "profile = uniform\namplitude = 1e200")
        .replace("[initial.0]", "[potential]\nfamily = cubic\ng = 1\n\n[initial.0]");
    let cfg = write_config(&dir, "nan.conf", &text);
    let o = nlsprop(&["run", &cfg]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("step 1"), "{}", stderr(&o));
}

#[test]
fn single_precision_run() {
    let dir = TempDir::new().unwrap();
    let text = FREE.replace("observe_every = 5", "observe_every = 5\nprecision = f32");
    let cfg = write_config(&dir, "f32.conf", &text);
    let o = nlsprop(&["run", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("free.csv"));
    assert!((rows.last().unwrap()[1] - rows[0][1]).abs() < 1e-5);
}

#[test]
fn dry_run_output_reparses_to_itself() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "free.conf", FREE);
    let once = stdout(&nlsprop(&["run", &cfg, "--dry-run"]));
    let again_path = write_config(&dir, "again.conf", &once);
    let twice = stdout(&nlsprop(&["run", &again_path, "--dry-run"]));
    assert_eq!(once, twice);
}

#[test]
fn periodic_snapshots_and_saturable_potential() {
    let dir = TempDir::new().unwrap();
    let text = FREE.replace("[initial.0]", "[potential]\nfamily = saturable\ng = 2\ns = 0.5\n\n[initial.0]")
        + "snapshot_every = 25\nsnapshot_prefix = snap_\n";
    let cfg = write_config(&dir, "sat.conf", &text);
    let o = nlsprop(&["run", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for step in [0, 25, 50] {
        assert!(dir.path().join(format!("snap_{step:08}.nlsp")).exists());
    }
    let rows = csv_rows(&dir.path().join("free.csv"));
    assert!(rows[0][3].is_nan());
}

const TRAP: &str = "[grid]
points = 128
lengths = 20

[hamiltonian]
external = harmonic
omega = 1

[potential]
family = cubic
g = 1

[initial.0]
profile = gaussian
x0 = 1
sigma = 1.5

[run]
scheme = forest-ruth
dt = 0.01
steps = 10

[converge]
t_final = 0.5
dts = 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125
";

#[test]
fn converge_reports_scheme_orders() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "trap.conf", TRAP);
    let csv = dir.path().join("conv.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_nlsprop"))
        .args(["converge", &cfg, "--expect-order", "4", "--csv", csv.to_str().unwrap()])
        .env("NLSPROP_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 7);

    let strang = write_config(&dir, "strang.conf", &TRAP.replace("forest-ruth", "strang"));
    assert_eq!(code(&nlsprop(&["converge", &strang, "--expect-order", "2"])), 0);
    assert_eq!(code(&nlsprop(&["converge", &strang, "--expect-order", "4"])), 3);
    assert_eq!(code(&nlsprop(&["converge", &strang, "--dts", "0.1,0.05,0.025"])), 1);
    assert_eq!(code(&nlsprop(&["converge", &strang, "--dts", "0.1,0.05,0.025,0.0125"])), 1);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_nlsprop"))
        .args(["oracle-verify", "--only", "power-1"])
        .env("NLSPROP_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_verify_filters_and_fails_on_tight_tolerance() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("oracle.csv");
    let o = nlsprop(&["oracle-verify", "--only", "appeq12", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 2);
    assert!(table.lines().nth(1).unwrap().starts_with("appeq12,PASS"));

    let o = nlsprop(&["oracle-verify", "--only", "appeq", "--tol", "1e-12"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("FAIL"));
    assert_eq!(code(&nlsprop(&["oracle-verify", "--only", "nothing-matches"])), 1);
}

#[test]
fn oracle_verify_default_suite_passes() {
    let o = nlsprop(&["oracle-verify"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("all pass"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&nlsprop(&["frobnicate"])), 1);
    assert_eq!(code(&nlsprop(&["demo", "nonsense"])), 1);
    assert_eq!(code(&nlsprop(&["--help"])), 0);
    let o = nlsprop(&["demo", "chin", "--print-config"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("scheme = chin"));
}
