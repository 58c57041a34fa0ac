use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use chaoslab::io::EVENTS_HEADER;
use chaoslab::lab::{self, ExperimentConfig, RunManifest, RunStatus};

fn run(body: Value, dir: &Path) -> RunManifest {
    let mut body = body;
    body["output_dir"] = json!(dir);
    let config = ExperimentConfig::from_json(&body.to_string()).unwrap();
    let m = lab::run(&config).unwrap();
    assert_eq!(m.status, RunStatus::Complete, "{:?}", m.error);
    m
}

/// Every listed output exists and has the recorded number of data rows.
fn check_outputs(m: &RunManifest, dir: &Path) {
    for o in &m.outputs {
        let text = fs::read_to_string(dir.join(&o.path)).unwrap();
        assert_eq!(text.lines().count() as u64, o.rows + 1, "{}", o.path);
    }
    let written: Value =
        serde_json::from_str(&fs::read_to_string(dir.join(lab::MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(written["outputs"].as_array().unwrap().len(), m.outputs.len());
}

fn names(m: &RunManifest) -> Vec<&str> {
    m.outputs.iter().map(|o| o.path.as_str()).collect()
}

#[test]
fn sweep_reports_every_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "sweep", "methods": ["ab2"], "dts": [1e-3, 5e-4, 1e-4],
               "t_end": 30.0, "sample_interval": 0.01}),
        tmp.path(),
    );
    check_outputs(&m, tmp.path());
    let table = fs::read_to_string(tmp.path().join("divergence.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("run_a,run_b,t_div,max_separation"));
    assert_eq!(table.lines().count(), 4);
    for pair in m.summary["pairs"].as_array().unwrap() {
        assert!(pair["t_div"].as_f64().unwrap() < 30.0);
    }
}

#[test]
fn divergence_reports_growth_rate() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "divergence", "system": "normal_form", "methods": ["euler"],
               "dts": [1e-3, 1e-4], "t_end": 20.0, "sample_interval": 0.01,
               "component": "euclidean"}),
        tmp.path(),
    );
    check_outputs(&m, tmp.path());
    assert!(names(&m).contains(&"separation.csv"));
    let rate = m.summary["growth_rate"].as_f64().unwrap();
    assert!(rate.is_finite() && rate > 0.0);
    let [lo, hi] = [0, 1].map(|i| m.summary["growth_window"][i].as_f64().unwrap());
    assert!(lo > 0.0 && hi == m.summary["t_div"].as_f64().unwrap());
}

#[test]
fn estat_writes_one_series_per_run() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "estat", "methods": ["ab2", "rk4"], "dts": [1e-3],
               "t_end": 10.0, "stride": 10}),
        tmp.path(),
    );
    check_outputs(&m, tmp.path());
    let series = fs::read_to_string(tmp.path().join("estat_rk4_dt0.001.csv")).unwrap();
    assert_eq!(series.lines().next(), Some("t,value"));
    // one value per sample after t = 0
    assert_eq!(series.lines().count(), 1 + 1000);
}

#[test]
fn jumps_streams_events_at_every_step() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "jumps", "system": "normal_form", "methods": ["euler"],
               "dts": [1e-2], "t_end": 3000.0, "stride": 100}),
        tmp.path(),
    );
    check_outputs(&m, tmp.path());
    let events = fs::read_to_string(tmp.path().join("events_euler_dt0.01.csv")).unwrap();
    assert_eq!(events.lines().next(), Some(EVENTS_HEADER));
    let run = &m.summary["runs"][0];
    assert_eq!(events.lines().count() as u64 - 1, run["events"].as_u64().unwrap());
    // the single crossing of this run happens between two recorded samples
    assert_eq!(run["events"], 1);
    let traj_rows = m.outputs.iter().find(|o| o.path.starts_with("traj_")).unwrap().rows;
    assert_eq!(traj_rows, 3001);
    assert!(m.notes.is_empty());
}

#[test]
fn jumps_on_standard_coordinates_carry_a_note() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "jumps", "system": "standard", "methods": ["euler"],
               "dts": [1e-2], "t_end": 5.0}),
        tmp.path(),
    );
    assert_eq!(m.summary["heuristic"], true);
    assert_eq!(m.notes.len(), 1);
}

#[test]
fn slice_round_trips_samples_and_reports_geometry() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "slice", "system": "normal_form", "methods": ["ab2"],
               "dts": [1e-3], "t_end": 200.0, "stride": 10,
               "planes": [{"axis": "z", "center": 26.81}, {"axis": "x", "center": 0.0, "half_thickness": 0.5}],
               "holes": {"radius": 0.5}, "cell": 0.25}),
        tmp.path(),
    );
    check_outputs(&m, tmp.path());
    let n = names(&m);
    for f in [
        "samples_ab2_dt0.001.csv",
        "slice_ab2_dt0.001_z26.81.csv",
        "density_ab2_dt0.001_z26.81.csv",
        "slice_ab2_dt0.001_x0.csv",
    ] {
        assert!(n.contains(&f), "{f}");
    }
    let z_plane = &m.summary["runs"][0]["planes"][0];
    assert!(z_plane["count"].as_u64().unwrap() > 0);
    assert_eq!(z_plane["holes"]["counts"].as_array().unwrap().len(), 2);
    assert!(z_plane["symmetry_ratio"].is_number());
    let x_plane = &m.summary["runs"][0]["planes"][1];
    assert!(x_plane["holes"].is_null() && x_plane["symmetry_ratio"].is_null());
    let slice_csv = fs::read_to_string(tmp.path().join("slice_ab2_dt0.001_x0.csv")).unwrap();
    assert_eq!(slice_csv.lines().next(), Some("y,z"));
}

#[test]
fn longrun_discards_only_in_statistics() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "longrun", "system": "normal_form", "methods": ["rk4"],
               "dts": [1e-2], "t_end": 50.0, "discard": 5.0}),
        tmp.path(),
    );
    check_outputs(&m, tmp.path());
    assert_eq!(m.outputs[0].rows, 5001);
    assert_eq!(m.summary["runs"][0]["discard_prefix"], 500);
}

#[test]
fn parallel_runs_keep_config_order() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "integrate", "methods": ["rk4", "euler", "ab5"],
               "dts": [1e-2, 2e-3], "t_end": 2.0}),
        tmp.path(),
    );
    let labels: Vec<&str> = m.summary["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["run"].as_str().unwrap())
        .collect();
    assert_eq!(
        labels,
        ["rk4_dt0.01", "rk4_dt0.002", "euler_dt0.01", "euler_dt0.002", "ab5_dt0.01", "ab5_dt0.002"]
    );
}

#[test]
fn adaptive_runs_use_the_output_spacing() {
    let tmp = tempfile::tempdir().unwrap();
    let m = run(
        json!({"experiment": "integrate", "methods": ["adaptive_rk"], "dts": [0.05],
               "t_end": 5.0, "tolerance": 1e-10}),
        tmp.path(),
    );
    assert_eq!(m.outputs[0].rows, 101);
}
