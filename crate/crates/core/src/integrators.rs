//! Fixed-step and adaptive integrators.
//!
//! All fixed-step methods share one stepping loop that reports recorded
//! samples to a sink, so the same code path serves in-memory trajectories and
//! streamed long runs.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::least_squares_slope;
use crate::error::{LabError, Result};
use crate::systems::{solve3, LorenzParams, State3, SystemId};

/// Any component above this magnitude counts as a blow-up.
pub const BLOW_UP_THRESHOLD: f64 = 1e6;

pub const CN_TOLERANCE: f64 = 1e-12;
pub const CN_MAX_ITERATIONS: usize = 50;

pub const ADAPTIVE_MIN_STEP: f64 = 1e-14;
/// Tolerance used when `AdaptiveRk` is requested through [`integrate`].
pub const ADAPTIVE_DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    Euler,
    Ab2,
    Ab3,
    Ab4,
    Ab5,
    Rk2,
    Rk4,
    CrankNicolson,
    /// Dormand-Prince 5(4) with a PI step controller.
    AdaptiveRk,
}

impl MethodId {
    pub const ALL: [MethodId; 9] = [
        MethodId::Euler,
        MethodId::Ab2,
        MethodId::Ab3,
        MethodId::Ab4,
        MethodId::Ab5,
        MethodId::Rk2,
        MethodId::Rk4,
        MethodId::CrankNicolson,
        MethodId::AdaptiveRk,
    ];

    pub fn formal_order(&self) -> u32 {
        match self {
            MethodId::Euler => 1,
            MethodId::Ab2 => 2,
            MethodId::Ab3 => 3,
            MethodId::Ab4 => 4,
            MethodId::Ab5 => 5,
            MethodId::Rk2 => 2,
            MethodId::Rk4 => 4,
            MethodId::CrankNicolson => 2,
            MethodId::AdaptiveRk => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MethodId::Euler => "euler",
            MethodId::Ab2 => "ab2",
            MethodId::Ab3 => "ab3",
            MethodId::Ab4 => "ab4",
            MethodId::Ab5 => "ab5",
            MethodId::Rk2 => "rk2",
            MethodId::Rk4 => "rk4",
            MethodId::CrankNicolson => "crank_nicolson",
            MethodId::AdaptiveRk => "adaptive_rk",
        }
    }

    pub fn is_fixed_step(&self) -> bool {
        *self != MethodId::AdaptiveRk
    }

    /// Adams-Bashforth weights, newest derivative first.
    fn adams_bashforth_weights(&self) -> Option<&'static [f64]> {
        const AB2: [f64; 2] = [3.0 / 2.0, -1.0 / 2.0];
        const AB3: [f64; 3] = [23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0];
        const AB4: [f64; 4] = [55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0];
        const AB5: [f64; 5] = [
            1901.0 / 720.0,
            -2774.0 / 720.0,
            2616.0 / 720.0,
            -1274.0 / 720.0,
            251.0 / 720.0,
        ];
        match self {
            MethodId::Ab2 => Some(&AB2),
            MethodId::Ab3 => Some(&AB3),
            MethodId::Ab4 => Some(&AB4),
            MethodId::Ab5 => Some(&AB5),
            _ => None,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        MethodId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| LabError::InvalidInput(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSpec {
    pub method: MethodId,
    pub dt: f64,
    pub t_end: f64,
    /// Record every `stride`-th step.
    pub stride: u64,
}

impl StepSpec {
    pub fn new(method: MethodId, dt: f64, t_end: f64, stride: u64) -> Result<Self> {
        let spec = StepSpec {
            method,
            dt,
            t_end,
            stride,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(LabError::Domain {
                what: "dt",
                value: self.dt,
                domain: "(0, inf)",
            });
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(LabError::Domain {
                what: "t_end",
                value: self.t_end,
                domain: "[0, inf)",
            });
        }
        if self.stride == 0 {
            return Err(LabError::InvalidInput("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn step_count(&self) -> u64 {
        grid_count(self.t_end, self.dt)
    }

    /// Number of recorded samples for a run without blow-up.
    pub fn sample_count(&self) -> u64 {
        self.step_count() / self.stride + 1
    }

    pub fn sample_interval(&self) -> f64 {
        self.stride as f64 * self.dt
    }
}

/// `floor(span / step)`, snapping to the nearest integer when the quotient is
/// within representation error of it (so 50 / 1e-4 counts 500000 steps).
pub fn grid_count(span: f64, step: f64) -> u64 {
    let ratio = span / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        ratio.floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowUp {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: State3,
}

/// A uniformly sampled trajectory with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub system: SystemId,
    /// Present only for the standard system.
    pub params: Option<LorenzParams>,
    pub method: MethodId,
    pub dt: f64,
    pub stride: u64,
    pub t0: f64,
    pub initial: State3,
    pub samples: Vec<Sample>,
    pub blow_up: Option<BlowUp>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time between consecutive samples.
    pub fn sample_interval(&self) -> f64 {
        self.stride as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn states(&self) -> impl Iterator<Item = State3> + '_ {
        self.samples.iter().map(|s| s.state)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Builds a trajectory from externally produced samples, e.g. synthetic
    /// test series. `samples` must be uniformly spaced by `dt`.
    pub fn from_samples(system: SystemId, dt: f64, samples: Vec<Sample>) -> Trajectory {
        let (t0, initial) = samples
            .first()
            .map(|s| (s.t, s.state))
            .unwrap_or((0.0, State3::ORIGIN));
        Trajectory {
            system,
            params: None,
            method: MethodId::Euler,
            dt,
            stride: 1,
            t0,
            initial,
            samples,
            blow_up: None,
        }
    }
}

/// What a streamed run reports back once it finishes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub steps_taken: u64,
    pub samples_emitted: u64,
    pub blow_up: Option<BlowUp>,
}

fn params_for(system: SystemId, params: &LorenzParams) -> Option<LorenzParams> {
    (system == SystemId::Standard).then_some(*params)
}

fn check_initial(initial: State3) -> Result<()> {
    if initial.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!(
            "initial state {initial} is not finite"
        )))
    }
}

fn blow_up_reason(state: State3) -> Option<String> {
    if !state.is_finite() {
        Some("non-finite state".to_string())
    } else if state.max_norm() > BLOW_UP_THRESHOLD {
        Some(format!(
            "state magnitude {:e} exceeds {:e}",
            state.max_norm(),
            BLOW_UP_THRESHOLD
        ))
    } else {
        None
    }
}

/// Integrates on a uniform grid and collects every recorded sample.
pub fn integrate(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    spec: &StepSpec,
) -> Result<Trajectory> {
    if spec.method == MethodId::AdaptiveRk {
        spec.validate()?;
        return integrate_adaptive(
            system,
            params,
            initial,
            ADAPTIVE_DEFAULT_TOLERANCE,
            spec.t_end,
            spec.sample_interval(),
        );
    }
    let mut samples = Vec::with_capacity(spec.sample_count().min(1 << 24) as usize);
    let outcome = integrate_with(system, params, initial, spec, |t, state| {
        samples.push(Sample { t, state });
        Ok(())
    })?;
    Ok(Trajectory {
        system,
        params: params_for(system, params),
        method: spec.method,
        dt: spec.dt,
        stride: spec.stride,
        t0: 0.0,
        initial,
        samples,
        blow_up: outcome.blow_up,
    })
}

/// Runs a fixed-step integration, handing each recorded sample to `sink`.
///
/// Sample times are `k * stride * dt` computed by multiplication. The run
/// stops early, without error, on blow-up; the offending state is not emitted.
pub fn integrate_with<F>(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    spec: &StepSpec,
    mut sink: F,
) -> Result<RunOutcome>
where
    F: FnMut(f64, State3) -> Result<()>,
{
    spec.validate()?;
    check_initial(initial)?;
    if spec.method == MethodId::AdaptiveRk {
        return integrate_adaptive_with(
            system,
            params,
            initial,
            ADAPTIVE_DEFAULT_TOLERANCE,
            spec.t_end,
            spec.sample_interval(),
            sink,
        );
    }

    let steps = spec.step_count();
    let mut stepper = FixedStepper::new(system, *params, spec.method, spec.dt);
    let mut state = initial;
    let mut emitted = 1;
    sink(0.0, state)?;

    for k in 1..=steps {
        state = stepper.step(state, k)?;
        let t = k as f64 * spec.dt;
        if let Some(reason) = blow_up_reason(state) {
            return Ok(RunOutcome {
                steps_taken: k,
                samples_emitted: emitted,
                blow_up: Some(BlowUp { t, reason }),
            });
        }
        if k % spec.stride == 0 {
            sink(t, state)?;
            emitted += 1;
        }
    }
    Ok(RunOutcome {
        steps_taken: steps,
        samples_emitted: emitted,
        blow_up: None,
    })
}

struct FixedStepper {
    system: SystemId,
    params: LorenzParams,
    method: MethodId,
    dt: f64,
    /// Past derivatives for the multistep methods, newest first.
    history: VecDeque<State3>,
}

impl FixedStepper {
    fn new(system: SystemId, params: LorenzParams, method: MethodId, dt: f64) -> Self {
        FixedStepper {
            system,
            params,
            method,
            dt,
            history: VecDeque::with_capacity(5),
        }
    }

    fn f(&self, s: State3) -> State3 {
        self.system.eval(s, &self.params)
    }

    fn step(&mut self, y: State3, step_index: u64) -> Result<State3> {
        let dt = self.dt;
        match self.method {
            MethodId::Euler => Ok(y + self.f(y) * dt),
            MethodId::Rk2 => {
                let k1 = self.f(y);
                let k2 = self.f(y + k1 * (0.5 * dt));
                Ok(y + k2 * dt)
            }
            MethodId::Rk4 => Ok(self.rk4(y, self.f(y))),
            MethodId::Ab2 | MethodId::Ab3 | MethodId::Ab4 | MethodId::Ab5 => {
                let weights = self.method.adams_bashforth_weights().unwrap();
                let fy = self.f(y);
                self.history.push_front(fy);
                self.history.truncate(weights.len());
                if self.history.len() < weights.len() {
                    // bootstrap
                    return Ok(self.rk4(y, fy));
                }
                let mut incr = State3::ORIGIN;
                for (w, f) in weights.iter().zip(&self.history) {
                    incr = incr + *f * *w;
                }
                Ok(y + incr * dt)
            }
            MethodId::CrankNicolson => self.crank_nicolson(y, step_index),
            MethodId::AdaptiveRk => unreachable!("adaptive runs do not use the fixed stepper"),
        }
    }

    fn rk4(&self, y: State3, k1: State3) -> State3 {
        let dt = self.dt;
        let k2 = self.f(y + k1 * (0.5 * dt));
        let k3 = self.f(y + k2 * (0.5 * dt));
        let k4 = self.f(y + k3 * dt);
        y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
    }

    /// Solves Y = y + dt/2 (f(y) + f(Y)) by Newton iteration with the analytic Jacobian.
    fn crank_nicolson(&self, y: State3, step_index: u64) -> Result<State3> {
        let half = 0.5 * self.dt;
        let fy = self.f(y);
        let mut guess = y + fy * self.dt;
        let mut residual = f64::INFINITY;
        for _ in 0..=CN_MAX_ITERATIONS {
            let g = guess - y - (fy + self.f(guess)) * half;
            residual = g.max_norm();
            if residual <= CN_TOLERANCE {
                return Ok(guess);
            }
            if !residual.is_finite() {
                break;
            }
            let jf = self.system.jacobian(guess, &self.params);
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 1.0 } else { 0.0 } - half * jf[i][j];
                }
            }
            let Some(delta) = solve3(m, g.to_array()) else {
                break;
            };
            guess = guess - State3::from(delta);
        }
        Err(LabError::NewtonNotConverged {
            step: step_index,
            residual,
        })
    }
}

// Dormand-Prince 5(4) tableau; the last row doubles as the 5th-order weights.
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and 4th-order weights.
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;
const SAFETY: f64 = 0.9;

/// Adaptive Dormand-Prince integration resampled to a uniform output grid of
/// spacing `output_dt` by cubic Hermite interpolation.
pub fn integrate_adaptive(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    tolerance: f64,
    t_end: f64,
    output_dt: f64,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let outcome = integrate_adaptive_with(
        system,
        params,
        initial,
        tolerance,
        t_end,
        output_dt,
        |t, state| {
            samples.push(Sample { t, state });
            Ok(())
        },
    )?;
    Ok(Trajectory {
        system,
        params: params_for(system, params),
        method: MethodId::AdaptiveRk,
        dt: output_dt,
        stride: 1,
        t0: 0.0,
        initial,
        samples,
        blow_up: outcome.blow_up,
    })
}

/// Streaming form of [`integrate_adaptive`]. The local error of every
/// accepted step satisfies `|err_i| <= tolerance * max(1, |y_i|)`.
pub fn integrate_adaptive_with<F>(
    system: SystemId,
    params: &LorenzParams,
    initial: State3,
    tolerance: f64,
    t_end: f64,
    output_dt: f64,
    mut sink: F,
) -> Result<RunOutcome>
where
    F: FnMut(f64, State3) -> Result<()>,
{
    if !(1e-14..=1e-2).contains(&tolerance) {
        return Err(LabError::Domain {
            what: "tolerance",
            value: tolerance,
            domain: "[1e-14, 1e-2]",
        });
    }
    if !(output_dt.is_finite() && output_dt > 0.0) {
        return Err(LabError::Domain {
            what: "output_dt",
            value: output_dt,
            domain: "(0, inf)",
        });
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(LabError::Domain {
            what: "t_end",
            value: t_end,
            domain: "[0, inf)",
        });
    }
    check_initial(initial)?;

    let f = |s: State3| system.eval(s, params);
    let outputs = grid_count(t_end, output_dt);
    sink(0.0, initial)?;
    let mut emitted = 1u64;
    let mut next_out = 1u64;

    let mut t = 0.0;
    let mut y = initial;
    let mut fy = f(y);
    let mut h = initial_step(y, fy, tolerance).min(t_end.max(ADAPTIVE_MIN_STEP));
    let mut err_prev: f64 = 1e-4;
    let mut steps = 0u64;

    while next_out <= outputs {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h < ADAPTIVE_MIN_STEP {
            return Err(LabError::StepSizeUnderflow {
                t,
                min_step: ADAPTIVE_MIN_STEP,
            });
        }

        // Autonomous fields: the stage abscissae are not needed. The last
        // stage is evaluated at the 5th-order solution (FSAL).
        let mut k = [State3::ORIGIN; 7];
        k[0] = fy;
        let mut y_new = y;
        for stage in 1..7 {
            let mut acc = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    acc = acc + *kj * (h * a);
                }
            }
            k[stage] = f(acc);
            if stage == 6 {
                y_new = acc;
            }
        }
        let f_new = k[6];

        let mut err = 0.0f64;
        for i in 0..3 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += DP_E[j] * kj.to_array()[i];
            }
            let e = (h * e).abs();
            let scale = tolerance * 1f64.max(y.to_array()[i].abs()).max(y_new.to_array()[i].abs());
            err = err.max(e / scale);
        }
        if !err.is_finite() {
            h *= 0.2;
            continue;
        }

        if err <= 1.0 {
            steps += 1;
            let t_new = if last { t_end } else { t + h };
            if let Some(reason) = blow_up_reason(y_new) {
                return Ok(RunOutcome {
                    steps_taken: steps,
                    samples_emitted: emitted,
                    blow_up: Some(BlowUp { t: t_new, reason }),
                });
            }
            while next_out <= outputs {
                let t_out = next_out as f64 * output_dt;
                let at_end = next_out == outputs && last;
                if t_out > t_new && !at_end {
                    break;
                }
                let value = if at_end || t_out == t_new {
                    y_new
                } else {
                    hermite(t, y, fy, t_new, y_new, f_new, t_out)
                };
                sink(t_out, value)?;
                emitted += 1;
                next_out += 1;
            }
            t = t_new;
            y = y_new;
            fy = f_new;
            let factor = (SAFETY * err.max(1e-10).powf(-PI_ALPHA) * err_prev.powf(PI_BETA))
                .clamp(0.2, 10.0);
            err_prev = err.max(1e-4);
            h *= factor;
        } else {
            let factor = (SAFETY * err.powf(-PI_ALPHA)).clamp(0.2, 1.0);
            h *= factor;
        }
    }

    Ok(RunOutcome {
        steps_taken: steps,
        samples_emitted: emitted,
        blow_up: None,
    })
}

fn hermite(t0: f64, y0: State3, f0: State3, t1: f64, y1: State3, f1: State3, t: f64) -> State3 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    y0 * h00 + f0 * (h10 * h) + y1 * h01 + f1 * (h11 * h)
}

fn initial_step(y: State3, fy: State3, tolerance: f64) -> f64 {
    let scale = |v: f64| tolerance * 1f64.max(v.abs());
    let ya = y.to_array();
    let fa = fy.to_array();
    let d0 = (0..3).map(|i| ya[i].abs() / scale(ya[i])).fold(0.0, f64::max);
    let d1 = (0..3).map(|i| fa[i].abs() / scale(ya[i])).fold(0.0, f64::max);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.clamp(1e-8, 0.1)
}

/// Empirical convergence order and the raw points it was fitted from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderMeasurement {
    pub method: MethodId,
    pub order: f64,
    /// (dt, absolute error at t = 1)
    pub points: Vec<(f64, f64)>,
}

/// Initial height used by the order test problem.
pub const ORDER_TEST_Z0: f64 = 15.0;

/// Measures the convergence order of `method` on z' = -2.67 z (the z-axis of
/// the near-axis linearization) against its exact exponential solution at t = 1.
pub fn measure_order(method: MethodId, dts: &[f64]) -> Result<OrderMeasurement> {
    if !method.is_fixed_step() {
        return Err(LabError::CannotMeasure(format!(
            "{method} has no fixed step size"
        )));
    }
    if dts.len() < 3 {
        return Err(LabError::CannotMeasure(format!(
            "need at least 3 step sizes, got {}",
            dts.len()
        )));
    }
    let ratio = dts[1] / dts[0];
    for w in dts.windows(2) {
        if !(w[0] > 0.0 && w[1] > 0.0) || ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9 {
            return Err(LabError::CannotMeasure(
                "step sizes must form a geometric progression".into(),
            ));
        }
    }
    if (ratio - 1.0).abs() < 1e-9 {
        return Err(LabError::CannotMeasure("step sizes must differ".into()));
    }

    let exact = ORDER_TEST_Z0 * (-2.67f64).exp();
    let initial = State3::new(0.0, 0.0, ORDER_TEST_Z0);
    let params = LorenzParams::default();
    let mut points = Vec::with_capacity(dts.len());
    for &dt in dts {
        let spec = StepSpec::new(method, dt, 1.0, 1)?;
        let n = spec.step_count();
        if ((n as f64) * dt - 1.0).abs() > 1e-9 {
            return Err(LabError::CannotMeasure(format!(
                "dt = {dt} does not divide t = 1"
            )));
        }
        let traj = integrate(SystemId::LinearizedAxis, &params, initial, &spec)?;
        let end = traj.last().expect("trajectory has its initial sample").state;
        points.push((dt, (end.z - exact).abs()));
    }

    let largest = points
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty");
    if largest.1 < 1e-13 {
        return Err(LabError::CannotMeasure(format!(
            "error {:e} at dt = {} is at the round-off floor",
            largest.1, largest.0
        )));
    }
    if points.iter().any(|p| p.1 == 0.0) {
        return Err(LabError::CannotMeasure("zero error at some step size".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let order = least_squares_slope(&xs, &ys)?;
    Ok(OrderMeasurement {
        method,
        order,
        points,
    })
}
