use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_photon-focus"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn photon-focus")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn sweep_csv_peaks_at_zero() {
    let out = run(&["sweep", "--n", "10", "--m", "10", "--kd", "pi"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta2,g_value,g_normalized"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2001);
    let centre = &rows[1000];
    assert_eq!(centre[0], 0.0);
    assert_eq!(centre[2], 1.0);
    assert!(rows.iter().all(|r| r[2] <= 1.0));
    assert!(!text.contains('\r'));

    let meta: Value = serde_json::from_slice(&out.stderr).expect("meta on stderr");
    assert_eq!(meta["n"], 10);
    assert_eq!(meta["route"], "closed_form");
    assert_eq!(meta["points"], 2001);
    assert_eq!(meta["seed"], 42);
    assert!(meta["tool_version"].is_string());
}

#[test]
fn sweep_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "sweep",
            "--n",
            "5",
            "--route",
            "paths",
            "--points",
            "301",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    let meta: Value = serde_json::from_slice(&std::fs::read(dir.path().join("a.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["route"], "paths");
    assert_eq!(meta["m"], 5);
    assert!((meta["kd"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn sweep_json_format() {
    let v = stdout_json(&run(&[
        "sweep", "--n", "3", "--m", "2", "--points", "11", "--format", "json",
    ]));
    assert_eq!(v["theta2"].as_array().unwrap().len(), 11);
    assert_eq!(v["g_normalized"][5], 1.0);
    assert_eq!(v["meta"]["m"], 2);
}

#[test]
fn fwhm_reports_prediction_and_measurement() {
    let v = stdout_json(&run(&["fwhm", "--n", "10", "--kd", "pi"]));
    assert!((v["predicted"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    assert!(v["relative_error"].as_f64().unwrap() < 0.15);
}

#[test]
fn visibility_reports_prediction_and_measurement() {
    let v = stdout_json(&run(&["visibility", "--n", "10", "--m", "2"]));
    assert!((v["predicted"].as_f64().unwrap() - 1.0 / 2.6).abs() < 1e-12);
    assert!((v["measured"].as_f64().unwrap() - 1.0 / 2.6).abs() < 1e-3);
}

#[test]
fn evolve_projects_onto_w_state() {
    let v = stdout_json(&run(&["evolve", "--n", "4", "--detections", "0,0,0"]));
    assert_eq!(v["target"], "w_state");
    assert!((v["overlap_sq"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let amps = v["state"]["amplitudes"].as_object().unwrap();
    assert_eq!(amps.len(), 4);
    assert!(amps.contains_key("{1,2,3}"));

    let v = stdout_json(&run(&[
        "evolve",
        "--n",
        "3",
        "--kd",
        "2.2",
        "--detections",
        "-0.4,-0.4",
    ]));
    assert_eq!(v["target"], "heralded_w_state");
    assert!((v["overlap_sq"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn verify_passes_and_echoes_seed() {
    let out = run(&["verify", "--n", "8", "--trials", "100", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 42);
    assert!(v["worst"].is_object());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["sweep", "--n", "10", "--m", "11"][..],
        &["sweep", "--n", "3", "--kd", "abc"],
        &["sweep", "--n", "3", "--kd", "-1"],
        &["evolve", "--n", "2", "--detections", "0,0"],
        &["verify", "--n", "12"],
        &["bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}
