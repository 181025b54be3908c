use std::path::Path;
use std::process::{Command, Output};

fn gasket(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasket")).args(args).current_dir(dir).output().expect("spawn gasket")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn lattice_counts_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = gasket(dir.path(), &["lattice", "--level", "3", "--out", "out"]);
    assert_eq!(code(&o), 0);
    let stats = std::fs::read_to_string(dir.path().join("out/lattice.stats.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert_eq!(v["vertex_count"], 42);
    assert!(dir.path().join("out/lattice.run.json").exists());
    assert!(dir.path().join("out/lattice.edges.txt").exists());

    let o = gasket(dir.path(), &["lattice", "--level", "1", "--ball", "--out", "out"]);
    assert_eq!(code(&o), 0);
    let stats = std::fs::read_to_string(dir.path().join("out/lattice.stats.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert_eq!(v["vertex_count"], 11);
}

#[test]
fn capacity_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = gasket(dir.path(), &["lattice", "--level", "13"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&gasket(dir.path(), &["ids", "--level", "4"])), 2);
    assert_eq!(code(&gasket(dir.path(), &["decimate", "--neumann", "--level", "0"])), 2);
    assert_eq!(code(&gasket(dir.path(), &["ids", "--level", "3", "--dist", "bernoulli:0,10,2"])), 2);
    assert_eq!(code(&gasket(dir.path(), &["nonsense"])), 2);
}

#[test]
fn insufficient_fit_data_is_a_verification_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = gasket(
        dir.path(),
        &["ids", "--level", "4", "--dist", "bernoulli:0,10,0.5", "--trials", "2", "--fit", "lifshitz", "--out", "o"],
    );
    assert_eq!(code(&o), 1);
    assert!(dir.path().join("o/ids.csv").exists());
}

#[test]
fn decimation_matches_dense() {
    let dir = tempfile::tempdir().unwrap();
    let o = gasket(dir.path(), &["decimate", "--neumann", "--level", "3", "--compare-dense", "--out", "o"]);
    assert_eq!(code(&o), 0);
    let json = std::fs::read_to_string(dir.path().join("o/decimate.comparison.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["set_distance"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn spectrum_counts_below_energy() {
    let dir = tempfile::tempdir().unwrap();
    let o = gasket(
        dir.path(),
        &["spectrum", "--level", "1", "--dist", "const:0", "--inertia", "--grid", "list:-0.5,2.5,5.5", "--out", "o"],
    );
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("o/spectrum.counts.csv")).unwrap();
    assert!(csv.lines().count() >= 4);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "level=2\nout=cfgout\n").unwrap();
    let o = gasket(dir.path(), &["lattice", "--config", "run.cfg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats = std::fs::read_to_string(dir.path().join("cfgout/lattice.stats.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert_eq!(v["vertex_count"], 15);
}
