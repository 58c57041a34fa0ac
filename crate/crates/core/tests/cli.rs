use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chaoslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaoslab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn recipes_lists_every_figure() {
    let o = chaoslab(&["recipes"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["fig1", "fig5", "fig7", "fig9", "order"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn emitted_recipes_run_unchanged() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("recipes");
    assert_eq!(chaoslab(&["recipes", "--emit", rec.to_str().unwrap()]).status.code(), Some(0));
    let out = tmp.path().join("out");
    let o = chaoslab(&[
        "order",
        "--config",
        rec.join("order.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(manifest(&out)["status"], "complete");
    assert!(out.join("order_rk4.csv").exists());
}

#[test]
fn integrate_writes_trajectory_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"experiment": "integrate", "system": "normal_form", "methods": ["rk4", "ab3"],
            "dts": [0.01], "t_end": 1.0, "stride": 10}"#,
    );
    let o = chaoslab(&["integrate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let traj = fs::read_to_string(out.join("traj_rk4_dt0.01.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next(), Some("t,x,y,z"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[1], "1.0000000000000000e0");
    assert_eq!(traj.lines().count(), 12);

    let m = manifest(&out);
    assert_eq!(m["tool"], "chaoslab");
    assert_eq!(m["status"], "complete");
    assert_eq!(m["config"]["output_dir"], out.to_str().unwrap());
    assert_eq!(m["config"]["stride"], 10);
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    assert_eq!(outputs[0]["path"], "traj_rk4_dt0.01.csv");
    assert_eq!(outputs[0]["rows"], 11);
}

#[test]
fn usage_and_config_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cases = [
        ("empty dt list", r#"{"experiment": "sweep", "dts": [], "t_end": 1}"#, "dt list is empty"),
        ("unknown key", r#"{"experiment": "sweep", "dts": [0.01], "t_end": 1, "colour": 1}"#, "colour"),
        ("missing t_end", r#"{"experiment": "sweep", "dts": [0.01, 0.001]}"#, "t_end"),
        ("bad json", r#"{"experiment": "sweep""#, "invalid configuration"),
    ];
    for (name, body, needle) in cases {
        let cfg = write_config(d, &format!("{}.json", name.replace(' ', "_")), body);
        let out = d.join(name.replace(' ', "_"));
        let o = chaoslab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
        // nothing is computed or written for an invalid config
        assert!(!out.exists(), "{name}");
    }

    let cfg = write_config(d, "ok.json", r#"{"experiment": "integrate", "dts": [0.01], "t_end": 1}"#);
    let o = chaoslab(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not 'sweep'"));

    assert_eq!(chaoslab(&["bogus", "--config", &cfg]).status.code(), Some(1));
    assert_eq!(chaoslab(&["integrate"]).status.code(), Some(1));
    assert_eq!(chaoslab(&["integrate", "--config", "/no/such/file.json"]).status.code(), Some(1));
    assert_eq!(chaoslab(&[]).status.code(), Some(1));
}

#[test]
fn blow_up_exits_3_with_complete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"experiment": "integrate", "system": "normal_form", "methods": ["euler"],
            "dts": [0.04], "t_end": 5}"#,
    );
    let o = chaoslab(&["integrate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let m = manifest(&out);
    assert_eq!(m["status"], "complete");
    let b = &m["blow_ups"][0];
    assert_eq!(b["run"], "euler_dt0.04");
    assert!(b["t"].as_f64().unwrap() < 5.0);
    // the truncated trajectory is still written
    assert!(out.join("traj_euler_dt0.04.csv").exists());
}

#[test]
fn runtime_failure_exits_2_with_failed_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    // not a geometric progression: rejected only when the measurement starts
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"experiment": "order", "methods": ["rk4", "euler"], "dts": [0.02, 0.01, 0.003]}"#,
    );
    let o = chaoslab(&["order", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let m = manifest(&out);
    assert_eq!(m["status"], "failed");
    assert!(m["error"].as_str().unwrap().contains("geometric"));
}
