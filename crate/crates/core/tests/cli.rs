use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use metastates::cli::RunConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metastates"))
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    for entry in std::fs::read_dir(config_dir()).unwrap() {
        let path = entry.unwrap().path();
        let config = RunConfig::load(&path).unwrap();
        let out = run(&["solve", path.to_str().unwrap(), "--dump-config"]);
        assert!(out.status.success());
        let dumped = RunConfig::from_toml(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        assert_eq!(dumped, config, "{}", path.display());
    }
}

#[test]
fn seed_override_reaches_every_stage() {
    let path = config_dir().join("potts_coexistence.toml");
    let out = run(&["metastate", path.to_str().unwrap(), "--seed", "99", "--dump-config"]);
    let config = RunConfig::from_toml(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!((config.solver.seed, config.weights.seed, config.simulate.seed), (99, 99, 99));
}

#[test]
fn solve_writes_a_minimizer_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_dir().join("ising_two_phase.toml");
    let out = run(&["solve", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("minimizers.csv")).unwrap();
    assert!(csv.starts_with("minimizer,global,quantity,b,a,value\n"));
    let globals = csv.lines().filter(|l| l.contains(",true,phi,")).count();
    assert_eq!(globals, 2);
}

#[test]
fn metastate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_dir().join("ising_three_states.toml");
    let out = run(&[
        "metastate",
        path.to_str().unwrap(),
        "--samples",
        "20000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["minimizers.csv", "report.json", "weights.csv", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], "1");
    let weights: Vec<f64> = report["states"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["weight"].as_f64().unwrap())
        .collect();
    assert_eq!(weights.len(), 3);
    assert_eq!(weights.iter().filter(|&&w| w == 0.0).count(), 1);
}

#[test]
fn positional_and_flag_configs_are_equivalent() {
    let path = config_dir().join("ising_high_temperature.toml");
    let a = run(&["solve", path.to_str().unwrap(), "--dump-config"]);
    let b = run(&["solve", "--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "/nonexistent/config.toml"]).status.code(), Some(2));
    let bad = write_config(dir.path(), "bad.toml", "[model]\nfamily = \"quadratic-potts\"\nbeta = 2.0\n");
    assert_eq!(run(&["solve", &bad]).status.code(), Some(2));
    let general = write_config(
        dir.path(),
        "general.toml",
        "[model]\nfamily = \"general-ising\"\ng_coeffs = [0.0, 0.0, -1.0]\n\n[scan]\naxis = \"field\"\n",
    );
    assert_eq!(run(&["scan", &general]).status.code(), Some(2));
    let no_bracket = write_config(
        dir.path(),
        "nb.toml",
        "[model]\nfamily = \"quadratic-potts\"\nq = 3\nbeta = 2.0\n\n[scan]\nlo = 0.5\nhi = 1.0\n",
    );
    assert_eq!(run(&["scan", &no_bracket, "--out", dir.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn degenerate_stability_vectors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // a single disorder symbol makes every stability vector zero
    let path = write_config(dir.path(), "one.toml", "[model]\nfamily = \"quadratic-ising\"\nbeta = 2.0\n");
    let out = run(&["metastate", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn enumeration_budget_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "big.toml",
        "[model]\nfamily = \"quadratic-potts\"\nq = 3\nbeta = 2.8\nfield = 0.3\n\n[simulate]\nn = [200]\nsamples = 2\nbudget = 1000\n",
    );
    let out = run(&["simulate", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn solver_failure_exits_with_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "nc.toml",
        "[model]\nfamily = \"quadratic-ising\"\nbeta = 2.0\nfields = [0.5, -0.5]\n\n\
         [solver]\nmax_iterations = 1\nnewton_steps = 0\nrandom_starts = 2\n",
    );
    let out = run(&["solve", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_dir().join("ising_two_phase.toml");
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(workers);
        let o = run(&[
            "simulate",
            path.to_str().unwrap(),
            "--draws",
            "12",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push(std::fs::read(out.join("draws.csv")).unwrap());
        let o = run(&[
            "metastate",
            path.to_str().unwrap(),
            "--samples",
            "200000",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push(std::fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
}

#[test]
fn plotdata_marks_the_double_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = config_dir().join("potts_coexistence.toml");
    let out = run(&["plotdata", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("phi_curve.csv")).unwrap();
    let minima: Vec<(f64, f64)> = csv
        .lines()
        .filter(|l| l.starts_with("minimum,"))
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect();
    assert_eq!(minima.len(), 2, "{minima:?}");
    assert_eq!(minima[0].0, 0.0);
    assert!(minima[1].0 > 0.3 && minima[1].1.abs() < 1e-4);
}
