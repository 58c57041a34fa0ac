//! Trajectory-pair divergence diagnostics and running statistics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::integrators::Trajectory;
use crate::systems::State3;

/// Default divergence threshold on the x component.
pub const DEFAULT_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Running time average of x^2.
    EOfT,
    /// Separation between two trajectories.
    Separation,
    /// Natural log of the separation.
    SeparationLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub definition: SeriesKind,
}

impl StatSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, definition: SeriesKind) -> Result<Self> {
        if times.len() != values.len() {
            return Err(LabError::InvalidInput(format!(
                "series has {} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::InvalidInput(
                "series times must be strictly increasing".into(),
            ));
        }
        Ok(StatSeries {
            times,
            values,
            definition,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_value(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Value at the last sample time not after `t`.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let idx = self.times.partition_point(|&s| s <= t);
        idx.checked_sub(1).map(|i| self.values[i])
    }
}

/// Which part of the state difference is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    X,
    Y,
    Z,
    Euclidean,
}

impl Component {
    pub fn separation(&self, a: State3, b: State3) -> f64 {
        let d = a - b;
        match self {
            Component::X => d.x.abs(),
            Component::Y => d.y.abs(),
            Component::Z => d.z.abs(),
            Component::Euclidean => d.norm(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Component::X => "x",
            Component::Y => "y",
            Component::Z => "z",
            Component::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Component::X),
            "y" => Ok(Component::Y),
            "z" => Ok(Component::Z),
            "euclidean" => Ok(Component::Euclidean),
            other => Err(LabError::InvalidInput(format!("unknown component '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    /// Earliest common sample time with separation above the threshold.
    pub t_div: Option<f64>,
    pub threshold: f64,
    pub component: Component,
    pub max_separation: f64,
    pub separation_series: Vec<(f64, f64)>,
}

impl DivergenceReport {
    pub fn to_series(&self) -> Result<StatSeries> {
        let (times, values) = self.separation_series.iter().copied().unzip();
        StatSeries::new(times, values, SeriesKind::Separation)
    }

    /// Largest separation at common times in `[t_lo, t_hi]`.
    pub fn max_separation_in(&self, t_lo: f64, t_hi: f64) -> f64 {
        self.separation_series
            .iter()
            .filter(|(t, _)| *t >= t_lo && *t <= t_hi)
            .map(|&(_, s)| s)
            .fold(0.0, f64::max)
    }
}

/// Running average E(t) = (1/t) * integral of x^2 from t0 to t, trapezoid rule.
/// The first value is at the second sample.
pub fn running_e(traj: &Trajectory) -> Result<StatSeries> {
    if traj.len() < 2 {
        return Err(LabError::InvalidInput(
            "running average needs at least 2 samples".into(),
        ));
    }
    let t0 = traj.samples[0].t;
    let mut integral = 0.0;
    let mut times = Vec::with_capacity(traj.len() - 1);
    let mut values = Vec::with_capacity(traj.len() - 1);
    for w in traj.samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        let xa = a.state.x * a.state.x;
        let xb = b.state.x * b.state.x;
        integral += (b.t - a.t) * (xa + xb) * 0.5;
        times.push(b.t);
        values.push(integral / (b.t - t0));
    }
    StatSeries::new(times, values, SeriesKind::EOfT)
}

/// Pairs the states of `a` and `b` at their common sample times.
///
/// The finer grid is matched onto the coarser one by index when the ratio of
/// sample intervals is integral, and by linear interpolation otherwise. The
/// result does not depend on argument order except for which state comes first.
pub fn align(a: &Trajectory, b: &Trajectory) -> Result<Vec<(f64, State3, State3)>> {
    if a.is_empty() || b.is_empty() {
        return Err(LabError::NoOverlap);
    }
    let (ha, hb) = (a.sample_interval(), b.sample_interval());
    if ha < hb || (ha == hb && b.samples[0].t < a.samples[0].t) {
        let swapped = align(b, a)?;
        return Ok(swapped.into_iter().map(|(t, sb, sa)| (t, sa, sb)).collect());
    }
    // `a` is now the coarser (or equal) grid.
    let (coarse, fine) = (a, b);
    let ratio = ha / hb;
    let nearest = ratio.round();
    let same_start = coarse.samples[0].t == fine.samples[0].t;

    let mut out = Vec::new();
    if same_start && (ratio - nearest).abs() <= 1e-9 * nearest {
        let m = nearest as usize;
        for (i, s) in coarse.samples.iter().enumerate() {
            let Some(f) = fine.samples.get(i * m) else {
                break;
            };
            let t = if m == 1 { s.t.min(f.t) } else { s.t };
            out.push((t, s.state, f.state));
        }
    } else {
        let f0 = fine.samples[0].t;
        let f_last = fine.samples[fine.len() - 1].t;
        for s in &coarse.samples {
            if s.t < f0 || s.t > f_last {
                continue;
            }
            let pos = (s.t - f0) / hb;
            let i = (pos.floor() as usize).min(fine.len() - 1);
            let state = if i + 1 < fine.len() {
                let frac = pos - i as f64;
                let (p, q) = (fine.samples[i].state, fine.samples[i + 1].state);
                p + (q - p) * frac
            } else {
                fine.samples[i].state
            };
            out.push((s.t, s.state, state));
        }
    }
    if out.is_empty() {
        return Err(LabError::NoOverlap);
    }
    Ok(out)
}

/// First common time at which `component` of the two trajectories differs by
/// more than `threshold`.
pub fn divergence_time(
    a: &Trajectory,
    b: &Trajectory,
    component: Component,
    threshold: f64,
) -> Result<DivergenceReport> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(LabError::Domain {
            what: "threshold",
            value: threshold,
            domain: "[0, inf)",
        });
    }
    if a.initial != b.initial {
        return Err(LabError::InvalidInput(format!(
            "trajectories start from different states {} and {}",
            a.initial, b.initial
        )));
    }
    let pairs = align(a, b)?;
    let mut t_div = None;
    let mut max_separation = 0.0f64;
    let mut separation_series = Vec::with_capacity(pairs.len());
    for (t, sa, sb) in pairs {
        let d = component.separation(sa, sb);
        if t_div.is_none() && d > threshold {
            t_div = Some(t);
        }
        max_separation = max_separation.max(d);
        separation_series.push((t, d));
    }
    Ok(DivergenceReport {
        t_div,
        threshold,
        component,
        max_separation,
        separation_series,
    })
}

/// Least-squares slope of ln |a - b| against t over `window`: an empirical
/// finite-time growth rate.
pub fn separation_growth_rate(a: &Trajectory, b: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let (t_lo, t_hi) = window;
    if !(t_lo < t_hi) {
        return Err(LabError::InvalidInput(format!(
            "window [{t_lo}, {t_hi}] is empty"
        )));
    }
    let pairs: Vec<_> = align(a, b)?
        .into_iter()
        .filter(|(t, _, _)| *t >= t_lo && *t <= t_hi)
        .collect();
    if pairs.len() < 2 {
        return Err(LabError::InvalidInput(format!(
            "fewer than 2 common samples in [{t_lo}, {t_hi}]"
        )));
    }
    let mut ts = Vec::with_capacity(pairs.len());
    let mut logs = Vec::with_capacity(pairs.len());
    for (t, sa, sb) in pairs {
        let d = (sa - sb).norm();
        if d == 0.0 {
            return Err(LabError::ZeroSeparation { t_lo, t_hi });
        }
        ts.push(t);
        logs.push(d.ln());
    }
    least_squares_slope(&ts, &logs)
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(LabError::InvalidInput(
            "slope fit needs at least 2 paired points".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(LabError::InvalidInput("abscissae are all equal".into()));
    }
    Ok(sxy / sxx)
}
