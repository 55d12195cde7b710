//! End-to-end tests of the binary: artifact shapes, exit codes and
//! output determinism.

use cyclone_track::fitting::balanced_initial_velocity;
use cyclone_track::geo::unproject;
use cyclone_track::trajectory::closed_form_coefficients;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclone-track"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must run")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_reference_state(dir: &Path) -> String {
    let path = dir.join("state.json");
    fs::write(
        &path,
        r#"{
  "div": 1e-5,
  "rot": 5e-5,
  "curvature": 1e-9,
  "grad": [2e-3, 1e-3],
  "core": 1.0,
  "vel": [-1.0, 1.0],
  "pos": [0.0, 0.0]
}"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

/// Track whose first window satisfies the matching conditions exactly.
fn write_consistent_track(dir: &Path, n_points: usize) -> String {
    let lat = 18.0;
    let l = cyclone_track::coriolis_parameter(lat).unwrap();
    let b0 = -8e-6;
    let mn = [3e-5, -2e-5];
    let leg = 3.0 * 3600.0;
    let v0 = balanced_initial_velocity(mn, b0, l, leg).unwrap();
    let c = closed_form_coefficients([0.0, 0.0], v0, mn, l, b0).unwrap();
    let mut text = String::from("t_hours,lat_deg,lon_deg\n");
    for k in 0..n_points {
        let t = k as f64 * leg;
        let (plat, plon) = unproject(c.position(t), (lat, 135.0)).unwrap();
        text.push_str(&format!("{:.6},{plat:.9},{plon:.9}\n", t / 3600.0));
    }
    let path = dir.join("track.csv");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_reference_run_row_count_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_reference_state(dir.path());
    let out = dir.path().join("run.csv");
    // The latitude-equivalent Coriolis value that balances the state.
    let output = run(&[
        "simulate",
        "--model",
        "barotropic",
        "--state",
        &state,
        "--coriolis",
        "4.6e-5",
        "--days",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = fs::read_to_string(&out).unwrap();
    let rows = text.lines().count() - 1; // header
    assert_eq!(rows, 4321);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("phase-curve"), "summary: {stdout}");
}

#[test]
fn simulate_zero_duration_yields_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_reference_state(dir.path());
    let out = dir.path().join("run.csv");
    let output = run(&[
        "simulate",
        "--model",
        "barotropic",
        "--state",
        &state,
        "--coriolis",
        "4.6e-5",
        "--hours",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn simulate_friction_reports_invariant_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    fs::write(
        &path,
        r#"{"div":0.0,"rot":-2e-6,"curvature":1e-9,"grad":[0.0,0.0],"core":1.0,"vel":[0.0,0.0],"pos":[0.0,0.0]}"#,
    )
    .unwrap();
    let out = dir.path().join("run.csv");
    let output = run(&[
        "simulate",
        "--model",
        "friction",
        "--state",
        path.to_str().unwrap(),
        "--coriolis",
        "1e-4",
        "--k",
        "3e-5",
        "--days",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    let drift: f64 = stdout
        .split("phase-curve drift ")
        .nth(1)
        .and_then(|s| s.split(',').next())
        .and_then(|s| s.trim().parse().ok())
        .expect("summary carries the drift");
    assert!(drift > 1e-2, "drift {drift} should exceed 1e-2");
}

#[test]
fn simulate_blowup_exits_with_numerical_failure_code() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_reference_state(dir.path());
    let out = dir.path().join("run.csv");
    // At this Coriolis value the rotation sits exactly at l/2, the
    // coupling constant vanishes and the reduced system has no
    // equilibrium: the run must abort within the first day.
    let output = run(&[
        "simulate",
        "--model",
        "barotropic",
        "--state",
        &state,
        "--coriolis",
        "1e-4",
        "--days",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("last valid time"), "stderr: {stderr}");
    assert!(!out.exists(), "no artifact may be written on failure");
}

#[test]
fn trajectory_emits_track_and_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("track.csv");
    let json = dir.path().join("decomp.json");
    let output = run(&[
        "trajectory",
        "--lat",
        "22",
        "--b0",
        "1e-6",
        "--v0",
        "5,0",
        "--mn",
        "1e-9,1e-9",
        "--hours",
        "72",
        "--step",
        "0.5",
        "--out",
        out.to_str().unwrap(),
        "--decomposition",
        json.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let track = fs::read_to_string(&out).unwrap();
    assert_eq!(track.lines().count(), 146); // header + 145 points
    assert!(track.starts_with("t_hours,lat_deg,lon_deg\n"));
    let decomp: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(decomp["inertial_circle"]["radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn trajectory_zero_forcing_has_degenerate_vorticity_circle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("track.csv");
    let output = run(&[
        "trajectory",
        "--lat",
        "22",
        "--b0",
        "1e-6",
        "--v0",
        "5,0",
        "--mn",
        "0,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let decomp: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(decomp["vorticity_circle"]["radius"].as_f64().unwrap(), 0.0);
}

#[test]
fn trajectory_resonant_b0_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("track.csv");
    let l = cyclone_track::coriolis_parameter(22.0).unwrap();
    let output = run(&[
        "trajectory",
        "--lat",
        "22",
        "--b0",
        &format!("{l}"),
        "--v0",
        "5,0",
        "--mn",
        "1e-9,1e-9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 1);
    assert!(!out.exists(), "no artifact may be written on failure");
}

#[test]
fn fit_accepts_consistent_window_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let track = write_consistent_track(dir.path(), 3);
    let out = dir.path().join("fit.json");
    let output = run(&["fit", "--track", &track, "--out", out.to_str().unwrap()]);
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["accepted"], serde_json::Value::Bool(true));
    let b0 = report["b0"].as_f64().unwrap();
    assert!((b0 - (-8e-6)).abs() < 1e-8, "b0 {b0}");
    assert_eq!(report["window"].as_array().unwrap().len(), 3);
}

#[test]
fn fit_rejection_is_a_verdict_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    // A generic constant-velocity track: no window satisfies the
    // matching conditions.
    let path = dir.path().join("track.csv");
    fs::write(
        &path,
        "t_hours,lat_deg,lon_deg\n0.000000,18.000000,135.000000\n3.000000,18.200000,134.800000\n6.000000,18.400000,134.600000\n",
    )
    .unwrap();
    let output = run(&["fit", "--track", path.to_str().unwrap()]);
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["accepted"], serde_json::Value::Bool(false));
    assert_eq!(report["b0"], serde_json::Value::Null);
}

#[test]
fn fit_window_past_the_end_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let track = write_consistent_track(dir.path(), 3);
    let output = run(&["fit", "--track", &track, "--window", "1"]);
    assert_exit(&output, 1);
}

#[test]
fn fixed_b0_override_fits_any_window() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("track.csv");
    fs::write(
        &path,
        "t_hours,lat_deg,lon_deg\n0.000000,18.000000,135.000000\n3.000000,18.200000,134.800000\n6.000000,18.400000,134.600000\n",
    )
    .unwrap();
    let output = run(&["fit", "--track", path.to_str().unwrap(), "--b0", "-1.8e-5"]);
    assert_exit(&output, 0);
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&output.stdout)).unwrap();
    assert_eq!(report["accepted"], serde_json::Value::Bool(true));
    assert_eq!(report["b0"].as_f64().unwrap(), -1.8e-5);
}

#[test]
fn sweep_reports_every_window_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let track = write_consistent_track(dir.path(), 20);
    let out1 = dir.path().join("sweep1.json");
    let out2 = dir.path().join("sweep2.json");
    for out in [&out1, &out2] {
        let output = run(&["sweep", "--track", &track, "--out", out.to_str().unwrap()]);
        assert_exit(&output, 0);
    }
    let text1 = fs::read_to_string(&out1).unwrap();
    let text2 = fs::read_to_string(&out2).unwrap();
    assert_eq!(text1, text2, "sweep output must be byte-identical");
    let reports: serde_json::Value = serde_json::from_str(&text1).unwrap();
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), 18);
    assert_eq!(arr[0]["accepted"], serde_json::Value::Bool(true));
}

#[test]
fn forecast_reproduces_the_window_and_extends_it() {
    let dir = tempfile::tempdir().unwrap();
    let track = write_consistent_track(dir.path(), 3);
    let out = dir.path().join("forecast.csv");
    let output = run(&[
        "forecast",
        "--track",
        &track,
        "--hours",
        "72",
        "--step",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 26); // header + 25 points
                                          // The first forecast rows coincide with the track anchors.
    let track_text = fs::read_to_string(&track).unwrap();
    for (have, want) in text.lines().skip(1).zip(track_text.lines().skip(1)) {
        let h: Vec<f64> = have.split(',').map(|v| v.parse().unwrap()).collect();
        let w: Vec<f64> = want.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((h[0] - w[0]).abs() < 1e-9);
        assert!((h[1] - w[1]).abs() < 1e-5, "lat {} vs {}", h[1], w[1]);
        assert!((h[2] - w[2]).abs() < 1e-5, "lon {} vs {}", h[2], w[2]);
    }
}

#[test]
fn forecast_of_rejected_window_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("track.csv");
    fs::write(
        &path,
        "t_hours,lat_deg,lon_deg\n0.000000,18.000000,135.000000\n3.000000,18.200000,134.800000\n6.000000,18.400000,134.600000\n",
    )
    .unwrap();
    let out = dir.path().join("forecast.csv");
    let output = run(&[
        "forecast",
        "--track",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 1);
    assert!(!out.exists());
}

#[test]
fn evaluate_identical_tracks_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let track = write_consistent_track(dir.path(), 5);
    let output = run(&["evaluate", "--forecast", &track, "--actual", &track]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.starts_with("lead_hours,error_km\n"));
    for line in stdout.lines().skip(1) {
        let err: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(err, 0.0);
    }
}

#[test]
fn evaluate_disjoint_tracks_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(
        &a,
        "t_hours,lat_deg,lon_deg\n0.000000,18.000000,135.000000\n3.000000,18.100000,135.100000\n",
    )
    .unwrap();
    fs::write(
        &b,
        "t_hours,lat_deg,lon_deg\n30.000000,18.000000,135.000000\n33.000000,18.100000,135.100000\n",
    )
    .unwrap();
    let output = run(&[
        "evaluate",
        "--forecast",
        a.to_str().unwrap(),
        "--actual",
        b.to_str().unwrap(),
    ]);
    assert_exit(&output, 1);
}

#[test]
fn phase_portrait_orbits_close_without_friction() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_reference_state(dir.path());
    let out = dir.path().join("phase.csv");
    let output = run(&[
        "phase",
        "--state",
        &state,
        "--coriolis",
        "4.6e-5",
        // Scale 1.0 would sit exactly on the center, so the family
        // brackets it instead.
        "--scales",
        "0.5,0.7,1.3,1.6,2.0",
        "--days",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut orbits: Vec<Vec<(f64, f64)>> = vec![Vec::new(); 5];
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let orbit: usize = f[0].parse().unwrap();
        orbits[orbit].push((f[2].parse().unwrap(), f[3].parse().unwrap()));
    }
    for orbit in &orbits {
        assert!(orbit.len() > 1000);
        // Each orbit starts on the div = 0 section; closure means a later
        // crossing of that section at the same curvature. Interpolating
        // the crossing removes the sampling granularity.
        let (a0, _) = orbit[0];
        let a_scale = orbit
            .iter()
            .map(|p| (p.0 - a0).abs())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut closure = f64::INFINITY;
        for pair in orbit[orbit.len() / 3..].windows(2) {
            let (d1, d2) = (pair[0].1, pair[1].1);
            if d1 == 0.0 || d1.signum() != d2.signum() {
                let w = d1 / (d1 - d2);
                let a_cross = pair[0].0 + w * (pair[1].0 - pair[0].0);
                closure = closure.min((a_cross - a0).abs() / a_scale);
            }
        }
        assert!(closure < 1e-3, "orbit failed to close: {closure}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("t1.csv");
    let out2 = dir.path().join("t2.csv");
    for out in [&out1, &out2] {
        let output = run(&[
            "trajectory",
            "--lat",
            "15",
            "--b0",
            "-6e-5",
            "--v0",
            "-2,1",
            "--mn",
            "2e-4,-1e-4",
            "--hours",
            "144",
            "--step",
            "0.25",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_exit(&output, 0);
    }
    assert_eq!(
        fs::read_to_string(&out1).unwrap(),
        fs::read_to_string(&out2).unwrap()
    );
}

#[test]
fn simulate_baroclinic_runs_and_reports_relation_drift() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    // Temperature-curvature and gradients matched to the reference
    // pressure state through the gas-constant coupling.
    fs::write(
        &path,
        r#"{"div":1e-5,"rot":5e-5,"curvature":1.7421602787456448e-13,"grad":[3.484320557491289e-7,1.7421602787456445e-7],"core_temp":280.0,"density":10.0,"vel":[-1.0,1.0],"pos":[0.0,0.0]}"#,
    )
    .unwrap();
    let out = dir.path().join("run.csv");
    let output = run(&[
        "simulate",
        "--model",
        "baroclinic",
        "--state",
        path.to_str().unwrap(),
        "--coriolis",
        "4.6e-5",
        "--days",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("t_hours,a,b,A1,M1,N1,K1,K2,v1,v2,x1,x2\n"));
    assert_eq!(text.lines().count() - 1, 1441);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("rotation-relation drift"), "{stdout}");
}
