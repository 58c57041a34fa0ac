//! Experiment orchestration: JSON configs, per-run CSV outputs and a run
//! manifest written last.
//!
//! Independent runs of one experiment execute on a worker pool. Each run owns
//! its output files; results are gathered in config order, so concurrency
//! never changes what is written.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{
    divergence_time, running_e, separation_growth_rate, Component, DEFAULT_THRESHOLD,
};
use crate::attractor::{
    density_grid, hole_check, long_run_to_csv, occupancy_area, slice, symmetry_ratio, Axis,
    SampleSet, SlicePlane, DEFAULT_DISCARD,
};
use crate::error::{LabError, Result};
use crate::integrators::{
    integrate, integrate_adaptive, integrate_with, measure_order, BlowUp, MethodId, StepSpec,
    Trajectory,
};
use crate::io::{emit_series, fmt_f64, write_events, write_points, write_table, write_trajectory, SampleWriter};
use crate::manifold::{jumps_are_heuristic, JumpEvent, JumpScanner, NearZone};
use crate::systems::{equilibria, LorenzParams, State3, SystemId};

pub const TOOL_NAME: &str = "chaoslab";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Integrate,
    Sweep,
    Divergence,
    Estat,
    Jumps,
    Longrun,
    Slice,
    Order,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Integrate,
        Experiment::Sweep,
        Experiment::Divergence,
        Experiment::Estat,
        Experiment::Jumps,
        Experiment::Longrun,
        Experiment::Slice,
        Experiment::Order,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Integrate => "integrate",
            Experiment::Sweep => "sweep",
            Experiment::Divergence => "divergence",
            Experiment::Estat => "estat",
            Experiment::Jumps => "jumps",
            Experiment::Longrun => "longrun",
            Experiment::Slice => "slice",
            Experiment::Order => "order",
        }
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown experiment '{s}'")))
    }
}

/// Disks whose occupancy is counted on z-slabs. Without centers, the
/// system's nonzero equilibria are used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    #[serde(default)]
    pub centers: Vec<[f64; 2]>,
    pub radius: f64,
}

fn default_system() -> SystemId {
    SystemId::Standard
}
fn default_initial() -> [f64; 3] {
    [1.0, -1.0, 10.0]
}
fn default_methods() -> Vec<MethodId> {
    vec![MethodId::Ab2]
}
fn default_stride() -> u64 {
    1
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_component() -> Component {
    Component::X
}
fn default_discard() -> f64 {
    DEFAULT_DISCARD
}
fn default_cell() -> f64 {
    0.1
}
fn default_jump_window() -> f64 {
    50.0
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// One experiment. Runs are the product of `methods` and `dts`, in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_system")]
    pub system: SystemId,
    #[serde(default)]
    pub params: LorenzParams,
    #[serde(default = "default_initial")]
    pub initial: [f64; 3],
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodId>,
    #[serde(default)]
    pub dts: Vec<f64>,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_stride")]
    pub stride: u64,
    /// Overrides `stride` per run so that every run records at this spacing.
    #[serde(default)]
    pub sample_interval: Option<f64>,
    /// Local error tolerance for `adaptive_rk` runs.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_component")]
    pub component: Component,
    /// Growth-rate window for `divergence`.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub zone: NearZone,
    /// Width of the windows used to compare jump counts across runs.
    #[serde(default = "default_jump_window")]
    pub jump_window: f64,
    #[serde(default)]
    pub planes: Vec<SlicePlane>,
    #[serde(default = "default_discard")]
    pub discard: f64,
    #[serde(default = "default_cell")]
    pub cell: f64,
    #[serde(default)]
    pub holes: Option<HoleSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(experiment: Experiment) -> Self {
        serde_json::from_value(json!({ "experiment": experiment })).expect("defaults are valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Canonical JSON: sorted keys, defaults filled in.
    pub fn canonical(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn canonical_string(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).expect("value serializes")
    }

    fn config_err(msg: impl Into<String>) -> LabError {
        LabError::Config(msg.into())
    }

    /// Checks every referenced value; nothing is computed before this passes.
    pub fn validate(&self) -> Result<()> {
        let wrap = |e: LabError| LabError::Config(e.to_string());
        self.params.validate().map_err(wrap)?;
        if !State3::from(self.initial).is_finite() {
            return Err(Self::config_err("initial state must be finite"));
        }
        if self.methods.is_empty() {
            return Err(Self::config_err("method list is empty"));
        }
        if self.dts.is_empty() {
            return Err(Self::config_err("dt list is empty"));
        }
        if let Some(dt) = self.dts.iter().find(|dt| !(dt.is_finite() && **dt > 0.0)) {
            return Err(Self::config_err(format!("dt = {dt} must be positive")));
        }
        if self.stride == 0 {
            return Err(Self::config_err("stride must be at least 1"));
        }
        if let Some(si) = self.sample_interval {
            for &dt in &self.dts {
                let ratio = si / dt;
                if !(ratio >= 1.0 && (ratio - ratio.round()).abs() <= 1e-9 * ratio) {
                    return Err(Self::config_err(format!(
                        "sample_interval {si} is not a whole multiple of dt = {dt}"
                    )));
                }
            }
        }
        if self.experiment != Experiment::Order {
            match self.t_end {
                Some(t) if t.is_finite() && t >= 0.0 => {}
                Some(t) => return Err(Self::config_err(format!("t_end = {t} must be >= 0"))),
                None => return Err(Self::config_err("t_end is required")),
            }
        }
        if self.methods.contains(&MethodId::AdaptiveRk) {
            let tol = self
                .tolerance
                .unwrap_or(crate::integrators::ADAPTIVE_DEFAULT_TOLERANCE);
            if !(1e-14..=1e-2).contains(&tol) {
                return Err(Self::config_err(format!(
                    "tolerance {tol} outside [1e-14, 1e-2]"
                )));
            }
        }
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return Err(Self::config_err("threshold must be >= 0"));
        }
        if let Some([lo, hi]) = self.window {
            if !(lo < hi) {
                return Err(Self::config_err(format!("window [{lo}, {hi}] is empty")));
            }
        }
        self.zone.validate().map_err(wrap)?;
        if !(self.jump_window.is_finite() && self.jump_window > 0.0) {
            return Err(Self::config_err("jump_window must be positive"));
        }
        for p in &self.planes {
            p.validate().map_err(wrap)?;
        }
        if !(self.discard.is_finite() && self.discard >= 0.0) {
            return Err(Self::config_err("discard must be >= 0"));
        }
        if !(self.cell.is_finite() && self.cell > 0.0) {
            return Err(Self::config_err("cell must be positive"));
        }
        if let Some(h) = &self.holes {
            if !(h.radius.is_finite() && h.radius > 0.0) {
                return Err(Self::config_err("hole radius must be positive"));
            }
        }
        if self.system == SystemId::LinearizedAxis
            && !matches!(self.experiment, Experiment::Integrate | Experiment::Order)
        {
            return Err(Self::config_err(
                "the near-axis linearization is only available to integrate and order",
            ));
        }

        match self.experiment {
            Experiment::Divergence if self.runs().len() != 2 => Err(Self::config_err(format!(
                "divergence compares exactly 2 runs, config describes {}",
                self.runs().len()
            ))),
            Experiment::Sweep if self.runs().len() < 2 => {
                Err(Self::config_err("sweep needs at least 2 runs"))
            }
            Experiment::Slice if self.planes.is_empty() => {
                Err(Self::config_err("slice needs at least one plane"))
            }
            Experiment::Order => {
                if self.dts.len() < 3 {
                    return Err(Self::config_err("order needs at least 3 step sizes"));
                }
                if let Some(m) = self.methods.iter().find(|m| !m.is_fixed_step()) {
                    return Err(Self::config_err(format!("{m} has no fixed step size")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn runs(&self) -> Vec<RunId> {
        self.methods
            .iter()
            .flat_map(|&method| {
                self.dts.iter().map(move |&dt| RunId { method, dt })
            })
            .collect()
    }

    fn stride_for(&self, dt: f64) -> u64 {
        match self.sample_interval {
            Some(si) => (si / dt).round() as u64,
            None => self.stride,
        }
    }

    fn step_spec(&self, run: &RunId) -> Result<StepSpec> {
        StepSpec::new(
            run.method,
            run.dt,
            self.t_end.unwrap_or(0.0),
            self.stride_for(run.dt),
        )
    }
}

/// One (method, dt) combination of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunId {
    pub method: MethodId,
    pub dt: f64,
}

impl RunId {
    pub fn label(&self) -> String {
        format!("{}_dt{}", self.method, self.dt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub rows: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowUpRecord {
    pub run: String,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub status: RunStatus,
    #[serde(default)]
    pub error: Option<String>,
    pub config: Value,
    pub outputs: Vec<OutputFile>,
    pub blow_ups: Vec<BlowUpRecord>,
    pub summary: Value,
    pub notes: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    /// Process exit code: 0 success, 2 runtime failure, 3 completed with blow-up.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Failed => 2,
            RunStatus::Complete if !self.blow_ups.is_empty() => 3,
            RunStatus::Complete => 0,
        }
    }
}

/// Accumulates outputs as they are written so a failed run can still list them.
struct Outputs {
    dir: PathBuf,
    files: Vec<OutputFile>,
    blow_ups: Vec<BlowUpRecord>,
    notes: Vec<String>,
}

impl Outputs {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn add(&mut self, name: String, rows: u64) {
        self.files.push(OutputFile { path: name, rows });
    }

    fn blow_up(&mut self, run: &RunId, b: &Option<BlowUp>) {
        if let Some(b) = b {
            self.blow_ups.push(BlowUpRecord {
                run: run.label(),
                t: b.t,
                reason: b.reason.clone(),
            });
        }
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

/// Runs `config`, writing outputs and finally the manifest to
/// `config.output_dir`. Invalid configs fail before anything is computed; a
/// runtime failure still writes a manifest, marked failed.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;

    let mut out = Outputs {
        dir: dir.clone(),
        files: Vec::new(),
        blow_ups: Vec::new(),
        notes: Vec::new(),
    };
    let result = match config.experiment {
        Experiment::Integrate => run_integrate(config, &mut out),
        Experiment::Sweep => run_sweep(config, &mut out),
        Experiment::Divergence => run_divergence(config, &mut out),
        Experiment::Estat => run_estat(config, &mut out),
        Experiment::Jumps => run_jumps(config, &mut out),
        Experiment::Longrun => run_longrun(config, &mut out),
        Experiment::Slice => run_slice(config, &mut out),
        Experiment::Order => run_order(config, &mut out),
    };
    let (status, error, summary) = match result {
        Ok(summary) => (RunStatus::Complete, None, summary),
        Err(e) => (RunStatus::Failed, Some(e.to_string()), Value::Null),
    };
    let manifest = RunManifest {
        tool: TOOL_NAME.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        status,
        error,
        config: config.canonical(),
        outputs: out.files,
        blow_ups: out.blow_ups,
        summary,
        notes: out.notes,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| LabError::io(&path, e))?;
    Ok(manifest)
}

fn initial_of(config: &ExperimentConfig) -> State3 {
    State3::from(config.initial)
}

fn integrate_run(config: &ExperimentConfig, run: &RunId) -> Result<Trajectory> {
    let initial = initial_of(config);
    if run.method == MethodId::AdaptiveRk {
        let tol = config
            .tolerance
            .unwrap_or(crate::integrators::ADAPTIVE_DEFAULT_TOLERANCE);
        let spacing = run.dt * config.stride_for(run.dt) as f64;
        return integrate_adaptive(
            config.system,
            &config.params,
            initial,
            tol,
            config.t_end.unwrap_or(0.0),
            spacing,
        );
    }
    integrate(config.system, &config.params, initial, &config.step_spec(run)?)
}

/// Integrates every run in parallel and writes `traj_<label>.csv` for each.
fn integrate_all(config: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<(RunId, Trajectory)>> {
    let runs = config.runs();
    let results: Vec<Result<(RunId, Trajectory, String, u64)>> = runs
        .par_iter()
        .map(|run| {
            let traj = integrate_run(config, run)?;
            let name = format!("traj_{}.csv", run.label());
            let rows = write_trajectory(&out.path(&name), &traj)?;
            Ok((*run, traj, name, rows))
        })
        .collect();
    let mut trajs = Vec::with_capacity(results.len());
    for r in results {
        let (run, traj, name, rows) = r?;
        out.add(name, rows);
        out.blow_up(&run, &traj.blow_up);
        trajs.push((run, traj));
    }
    Ok(trajs)
}

fn run_integrate(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let trajs = integrate_all(config, out)?;
    let runs: Vec<Value> = trajs
        .iter()
        .map(|(run, t)| {
            json!({
                "run": run.label(),
                "samples": t.len(),
                "final": t.last().map(|s| s.state.to_array()),
                "blow_up_t": opt(t.blow_up.as_ref().map(|b| b.t)),
            })
        })
        .collect();
    Ok(json!({ "runs": runs }))
}

fn run_sweep(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let trajs = integrate_all(config, out)?;
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..trajs.len() {
        for j in i + 1..trajs.len() {
            let (ra, a) = &trajs[i];
            let (rb, b) = &trajs[j];
            let report = divergence_time(a, b, config.component, config.threshold)?;
            rows.push(vec![
                ra.label(),
                rb.label(),
                report.t_div.map(fmt_f64).unwrap_or_default(),
                fmt_f64(report.max_separation),
            ]);
            pairs.push(json!({
                "a": ra.label(),
                "b": rb.label(),
                "t_div": opt(report.t_div),
                "max_separation": report.max_separation,
            }));
        }
    }
    let name = "divergence.csv".to_string();
    let n = write_table(
        &out.path(&name),
        &["run_a", "run_b", "t_div", "max_separation"],
        &rows,
    )?;
    out.add(name, n);
    Ok(json!({
        "component": config.component,
        "threshold": config.threshold,
        "pairs": pairs,
    }))
}

fn run_divergence(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let trajs = integrate_all(config, out)?;
    let (ra, a) = &trajs[0];
    let (rb, b) = &trajs[1];
    let report = divergence_time(a, b, config.component, config.threshold)?;
    let name = "separation.csv".to_string();
    let n = emit_series(&report.to_series()?, &out.path(&name))?;
    out.add(name, n);

    // Default window: from the first nonzero separation up to divergence.
    let window = config.window.map(|[lo, hi]| (lo, hi)).or_else(|| {
        let start = report
            .separation_series
            .iter()
            .find(|(_, s)| *s > 0.0)
            .map(|(t, _)| *t)?;
        let end = report.t_div?;
        (start < end).then_some((start, end))
    });
    let growth_rate = match window {
        Some(w) => Some(separation_growth_rate(a, b, w)?),
        None => None,
    };
    Ok(json!({
        "a": ra.label(),
        "b": rb.label(),
        "component": config.component,
        "threshold": config.threshold,
        "t_div": opt(report.t_div),
        "max_separation": report.max_separation,
        "growth_window": window.map(|(lo, hi)| [lo, hi]),
        "growth_rate": opt(growth_rate),
    }))
}

fn run_estat(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let trajs = integrate_all(config, out)?;
    let mut runs = Vec::new();
    for (run, traj) in &trajs {
        let series = running_e(traj)?;
        let name = format!("estat_{}.csv", run.label());
        let n = emit_series(&series, &out.path(&name))?;
        out.add(name, n);
        runs.push(json!({
            "run": run.label(),
            "final_t": series.times.last(),
            "final_e": series.last_value(),
        }));
    }
    Ok(json!({ "runs": runs }))
}

struct JumpRun {
    run: RunId,
    events: Vec<JumpEvent>,
    blow_up: Option<BlowUp>,
    files: Vec<(String, u64)>,
}

fn run_jumps(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    if jumps_are_heuristic(config.system) {
        out.notes.push(
            "jump detection on standard-system coordinates is heuristic: the near-axis \
             geometry is derived for the normal form"
                .to_string(),
        );
    }
    let runs = config.runs();
    let results: Vec<Result<JumpRun>> = runs
        .par_iter()
        .map(|run| jump_run(config, run, &out.dir))
        .collect();
    let mut done = Vec::new();
    for r in results {
        let r = r?;
        for (name, rows) in &r.files {
            out.add(name.clone(), *rows);
        }
        out.blow_up(&r.run, &r.blow_up);
        done.push(r);
    }

    let t_end = config.t_end.unwrap_or(0.0);
    let windows = (t_end / config.jump_window).ceil().max(1.0) as usize;
    let window_counts = |events: &[JumpEvent]| {
        let mut counts = vec![0u32; windows];
        for e in events {
            let k = ((e.t / config.jump_window) as usize).min(windows - 1);
            counts[k] += 1;
        }
        counts
    };
    let counts: Vec<Vec<u32>> = done.iter().map(|r| window_counts(&r.events)).collect();
    let mut qualifying = Vec::new();
    for (i, ci) in counts.iter().enumerate() {
        for (j, cj) in counts.iter().enumerate() {
            if done[i].run.dt <= done[j].run.dt {
                continue;
            }
            let ws: Vec<f64> = (0..windows)
                .filter(|&k| ci[k] > 0 && cj[k] == 0)
                .map(|k| k as f64 * config.jump_window)
                .collect();
            if !ws.is_empty() {
                qualifying.push(json!({
                    "coarse": done[i].run.label(),
                    "fine": done[j].run.label(),
                    "window_starts": ws,
                }));
            }
        }
    }

    let runs: Vec<Value> = done
        .iter()
        .map(|r| {
            json!({
                "run": r.run.label(),
                "events": r.events.len(),
                "first_event_t": opt(r.events.first().map(|e| e.t)),
                "forbidden_entries": r.events.iter().filter(|e| e.sector_after % 2 == 0).count(),
            })
        })
        .collect();
    Ok(json!({
        "zone": config.zone,
        "heuristic": jumps_are_heuristic(config.system),
        "jump_window": config.jump_window,
        "runs": runs,
        "coarse_only_windows": qualifying,
    }))
}

/// Scans every step for jumps while writing the trajectory at the configured stride.
fn jump_run(config: &ExperimentConfig, run: &RunId, dir: &Path) -> Result<JumpRun> {
    let stride = config.stride_for(run.dt);
    let every_step = StepSpec::new(run.method, run.dt, config.t_end.unwrap_or(0.0), 1)?;
    let traj_name = format!("traj_{}.csv", run.label());
    let mut writer = SampleWriter::create(&dir.join(&traj_name))?;
    let mut scanner = JumpScanner::new(config.zone);
    let mut events = Vec::new();
    let mut k = 0u64;
    let outcome = integrate_with(
        config.system,
        &config.params,
        initial_of(config),
        &every_step,
        |t, s| {
            if let Some(e) = scanner.push(t, s) {
                events.push(e);
            }
            let record = k.is_multiple_of(stride);
            k += 1;
            if record {
                writer.write(t, s)
            } else {
                Ok(())
            }
        },
    )?;
    let traj_rows = writer.finish()?;
    let events_name = format!("events_{}.csv", run.label());
    let event_rows = write_events(&dir.join(&events_name), &events)?;
    Ok(JumpRun {
        run: *run,
        events,
        blow_up: outcome.blow_up,
        files: vec![(traj_name, traj_rows), (events_name, event_rows)],
    })
}

fn run_longrun(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let runs = config.runs();
    let results: Vec<Result<(RunId, String, crate::attractor::LongRunSummary)>> = runs
        .par_iter()
        .map(|run| {
            let name = format!("samples_{}.csv", run.label());
            let summary = long_run_to_csv(
                config.system,
                &config.params,
                initial_of(config),
                &config.step_spec(run)?,
                config.discard,
                &out.path(&name),
            )?;
            Ok((*run, name, summary))
        })
        .collect();
    let mut summaries = Vec::new();
    for r in results {
        let (run, name, summary) = r?;
        out.add(name, summary.samples);
        out.blow_up(&run, &summary.provenance.blow_up);
        summaries.push(json!({
            "run": run.label(),
            "samples": summary.samples,
            "discard_prefix": summary.discard_prefix,
            "total_steps": summary.provenance.total_steps,
        }));
    }
    Ok(json!({ "runs": summaries }))
}

fn hole_centers(config: &ExperimentConfig, plane: &SlicePlane) -> Result<Option<(Vec<[f64; 2]>, f64)>> {
    let Some(h) = &config.holes else {
        return Ok(None);
    };
    if plane.axis != Axis::Z {
        return Ok(None);
    }
    let centers = if h.centers.is_empty() {
        equilibria(config.system, &config.params)?
            .into_iter()
            .skip(1)
            .map(|e| [e.x, e.y])
            .collect()
    } else {
        h.centers.clone()
    };
    Ok(Some((centers, h.radius)))
}

fn run_slice(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let runs = config.runs();
    let results: Vec<Result<SliceRunResult>> = runs
        .par_iter()
        .map(|run| slice_run(config, run, &out.dir))
        .collect();
    let mut per_run = Vec::new();
    let mut areas = Vec::new();
    for (run, r) in runs.iter().zip(results) {
        let (files, summary, run_areas, blow_up) = r?;
        for (name, rows) in files {
            out.add(name, rows);
        }
        out.blow_up(run, &blow_up);
        per_run.push(summary);
        areas.push(run_areas);
    }
    // Area of each plane relative to the first run.
    let ratios: Vec<Value> = config
        .planes
        .iter()
        .enumerate()
        .map(|(p, plane)| {
            let base = areas[0][p];
            let r: Vec<Value> = areas
                .iter()
                .zip(&runs)
                .map(|(a, run)| {
                    json!({
                        "run": run.label(),
                        "area_ratio": opt((base > 0.0).then(|| a[p] / base)),
                    })
                })
                .collect();
            json!({ "plane": plane.label(), "relative_to": runs[0].label(), "ratios": r })
        })
        .collect();
    Ok(json!({ "cell": config.cell, "runs": per_run, "area_comparison": ratios }))
}

type SliceRunResult = (Vec<(String, u64)>, Value, Vec<f64>, Option<BlowUp>);

fn slice_run(config: &ExperimentConfig, run: &RunId, dir: &Path) -> Result<SliceRunResult> {
    let samples_name = format!("samples_{}.csv", run.label());
    let samples_path = dir.join(&samples_name);
    let summary = long_run_to_csv(
        config.system,
        &config.params,
        initial_of(config),
        &config.step_spec(run)?,
        config.discard,
        &samples_path,
    )?;
    let mut files = vec![(samples_name, summary.samples)];
    // second pass over the recorded samples
    let set = SampleSet::from_csv(&samples_path, summary.provenance.clone(), config.discard)?;

    let mut planes = Vec::new();
    let mut areas = Vec::new();
    for plane in &config.planes {
        let s = slice(&set, plane)?;
        let header = plane.axis.free_coordinates();
        let name = format!("slice_{}_{}.csv", run.label(), plane.label());
        let rows = write_points(&dir.join(&name), header, &s.points)?;
        files.push((name, rows));
        let grid = density_grid(&s, config.cell)?;
        let gname = format!("density_{}_{}.csv", run.label(), plane.label());
        let grows = grid.write_csv(&dir.join(&gname), header)?;
        files.push((gname, grows));

        let area = occupancy_area(&s, config.cell)?;
        areas.push(area);
        let holes = match hole_centers(config, plane)? {
            Some((centers, radius)) => {
                let counts = hole_check(&s, &centers, radius);
                json!({ "centers": centers, "radius": radius, "counts": counts })
            }
            None => Value::Null,
        };
        let symmetry = if plane.axis == Axis::Z {
            opt(symmetry_ratio(&s, config.cell)?)
        } else {
            Value::Null
        };
        planes.push(json!({
            "plane": plane,
            "count": s.count,
            "occupancy_area": area,
            "holes": holes,
            "edge_profile": grid.edge_profile(),
            "symmetry_ratio": symmetry,
        }));
    }
    let summary_json = json!({
        "run": run.label(),
        "samples": summary.samples,
        "retained": set.retained().len(),
        "planes": planes,
    });
    Ok((files, summary_json, areas, summary.provenance.blow_up))
}

fn run_order(config: &ExperimentConfig, out: &mut Outputs) -> Result<Value> {
    let mut methods = Vec::new();
    for &method in &config.methods {
        let m = measure_order(method, &config.dts)?;
        let name = format!("order_{method}.csv");
        let rows: Vec<Vec<String>> = m
            .points
            .iter()
            .map(|(dt, err)| vec![fmt_f64(*dt), fmt_f64(*err)])
            .collect();
        let n = write_table(&out.path(&name), &["dt", "error"], &rows)?;
        out.add(name, n);
        methods.push(json!({
            "method": method,
            "formal_order": method.formal_order(),
            "measured_order": m.order,
        }));
    }
    Ok(json!({ "methods": methods }))
}

/// A named, built-in experiment configuration.
#[derive(Debug, Clone)]
pub struct Recipe {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

impl Recipe {
    pub fn file_name(&self) -> String {
        format!("{}.json", self.name)
    }
}

fn recipe(name: &'static str, description: &'static str, body: Value) -> Recipe {
    let mut body = body;
    body["output_dir"] = json!(format!("out/{name}"));
    let config: ExperimentConfig = serde_json::from_value(body).expect("recipe is well formed");
    config.validate().expect("recipe is valid");
    Recipe {
        name,
        description,
        config,
    }
}

pub fn recipes() -> Vec<Recipe> {
    let sweep_dts = [1e-3, 5e-4, 1e-4];
    vec![
        recipe(
            "fig1",
            "x histories of the standard system, AB2 at three time steps, with pairwise divergence times",
            json!({
                "experiment": "sweep", "system": "standard", "methods": ["ab2"],
                "dts": sweep_dts, "t_end": 50.0, "sample_interval": 0.01,
                "component": "x", "threshold": 1.0,
            }),
        ),
        recipe(
            "fig2",
            "first 300,000 steps at dt = 1e-4 for phase-space projections",
            json!({
                "experiment": "integrate", "system": "standard", "methods": ["ab2"],
                "dts": [1e-4], "t_end": 30.0, "stride": 10,
            }),
        ),
        recipe(
            "fig3",
            "running E(t) for the three fig1 time steps up to t = 500",
            json!({
                "experiment": "estat", "system": "standard", "methods": ["ab2"],
                "dts": sweep_dts, "t_end": 500.0, "sample_interval": 0.01,
            }),
        ),
        recipe(
            "fig4",
            "normal form, Euler at two time steps: separation history and growth rate",
            json!({
                "experiment": "divergence", "system": "normal_form", "methods": ["euler"],
                "dts": [1e-3, 1e-4], "t_end": 50.0, "sample_interval": 0.01,
                "component": "euclidean", "threshold": 1.0,
            }),
        ),
        recipe(
            "fig5",
            "normal form, Euler: stable-surface crossings near the z-axis for a coarse/fine sweep",
            json!({
                "experiment": "jumps", "system": "normal_form", "methods": ["euler"],
                "dts": [2e-2, 1e-2, 5e-3, 1e-3], "t_end": 3000.0, "sample_interval": 0.1,
                "zone": { "radius": 0.5, "z_max": 15.0 }, "jump_window": 50.0,
            }),
        ),
        recipe(
            "fig6",
            "normal form, Euler: crossings for four nearly equal time steps",
            json!({
                "experiment": "jumps", "system": "normal_form", "methods": ["euler"],
                "dts": [1e-2, 1.0001e-2, 1.0002e-2, 1.0003e-2], "t_end": 3000.0, "stride": 10,
                "zone": { "radius": 0.5, "z_max": 15.0 }, "jump_window": 50.0,
            }),
        ),
        recipe(
            "fig7",
            "normal form long run (1e7 steps at dt = 1e-4) sliced normal to z, with equilibrium holes",
            json!({
                "experiment": "slice", "system": "normal_form", "methods": ["ab2"],
                "dts": [1e-4], "t_end": 1000.0, "stride": 100, "discard": 5.0,
                "planes": [
                    { "axis": "z", "center": 5.0 },
                    { "axis": "z", "center": 17.9 },
                    { "axis": "z", "center": 26.81 },
                    { "axis": "z", "center": 40.0 },
                    { "axis": "z", "center": 45.0 },
                ],
                "holes": { "radius": 0.5 }, "cell": 0.1,
            }),
        ),
        recipe(
            "fig8",
            "normal form long run sliced normal to x",
            json!({
                "experiment": "slice", "system": "normal_form", "methods": ["ab2"],
                "dts": [1e-4], "t_end": 1000.0, "stride": 100, "discard": 5.0,
                "planes": [
                    { "axis": "x", "center": 0.0 },
                    { "axis": "x", "center": 2.0 },
                    { "axis": "x", "center": 5.0 },
                ],
                "cell": 0.1,
            }),
        ),
        recipe(
            "fig9",
            "occupancy area of the bottom slab for two time steps",
            json!({
                "experiment": "slice", "system": "normal_form", "methods": ["ab2"],
                "dts": [1e-4, 1e-3], "t_end": 1000.0, "sample_interval": 0.01, "discard": 5.0,
                "planes": [
                    { "axis": "z", "center": 5.0 },
                    { "axis": "z", "center": 10.0 },
                ],
                "cell": 0.1,
            }),
        ),
        recipe(
            "order",
            "empirical convergence orders on the z-axis decay problem",
            json!({
                "experiment": "order",
                "methods": ["euler", "ab2", "ab3", "ab4", "rk2", "rk4", "crank_nicolson"],
                "dts": [0.02, 0.01, 0.005, 0.0025],
            }),
        ),
    ]
}

pub fn find_recipe(name: &str) -> Option<Recipe> {
    recipes().into_iter().find(|r| r.name == name)
}
