//! C ABI over the chaoslab core.
//!
//! Every fallible function returns a [`ChlStatus`]; on failure a message is
//! available from `chl_last_error_message` on the same thread. Trajectories
//! and jump lists are opaque handles released with their `_free` function.
//! Pointer arguments named `out_*` must be valid for writes.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chaoslab::analysis::{divergence_time, running_e, Component};
use chaoslab::integrators::{integrate, measure_order, MethodId, StepSpec, Trajectory};
use chaoslab::manifold::{self, detect_jumps, JumpEvent, NearZone};
use chaoslab::systems::{self, LorenzParams, State3, SystemId};
use chaoslab::LabError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Domain = 3,
    NotConverged = 4,
    CannotMeasure = 5,
    NoOverlap = 6,
    ZeroSeparation = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChlSystem {
    Standard = 0,
    NormalForm = 1,
    LinearizedAxis = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChlMethod {
    Euler = 0,
    Ab2 = 1,
    Ab3 = 2,
    Ab4 = 3,
    Ab5 = 4,
    Rk2 = 5,
    Rk4 = 6,
    CrankNicolson = 7,
    AdaptiveRk = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChlComponent {
    X = 0,
    Y = 1,
    Z = 2,
    Euclidean = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChlState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Parameters of the standard system. A null pointer means s = 10, r = 28, b = 8/3.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChlParams {
    pub s: f64,
    pub r: f64,
    pub b: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChlJumpEvent {
    pub t: f64,
    pub before: ChlState,
    pub after: ChlState,
    pub u_before: f64,
    pub u_after: f64,
    pub sector_before: u8,
    pub sector_after: u8,
}

/// Opaque sampled trajectory.
pub struct ChlTrajectory(Trajectory);

/// Opaque list of jump events.
pub struct ChlJumpList(Vec<JumpEvent>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &LabError) -> ChlStatus {
    match e {
        LabError::InvalidInput(_) | LabError::Config(_) => ChlStatus::InvalidInput,
        LabError::Domain { .. } => ChlStatus::Domain,
        LabError::RootNotConverged { .. }
        | LabError::NewtonNotConverged { .. }
        | LabError::StepSizeUnderflow { .. } => ChlStatus::NotConverged,
        LabError::CannotMeasure(_) => ChlStatus::CannotMeasure,
        LabError::NoOverlap => ChlStatus::NoOverlap,
        LabError::ZeroSeparation { .. } => ChlStatus::ZeroSeparation,
        _ => ChlStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), ChlStatus>) -> ChlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ChlStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".to_string());
            ChlStatus::Internal
        }
    }
}

fn fail(e: LabError) -> ChlStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn null(what: &str) -> ChlStatus {
    set_error(format!("{what} is null"));
    ChlStatus::NullPointer
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, ChlStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn input<'a, T>(p: *const T, what: &str) -> Result<&'a T, ChlStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

impl From<ChlState> for State3 {
    fn from(s: ChlState) -> Self {
        State3::new(s.x, s.y, s.z)
    }
}

impl From<State3> for ChlState {
    fn from(s: State3) -> Self {
        ChlState { x: s.x, y: s.y, z: s.z }
    }
}

impl From<ChlSystem> for SystemId {
    fn from(s: ChlSystem) -> Self {
        match s {
            ChlSystem::Standard => SystemId::Standard,
            ChlSystem::NormalForm => SystemId::NormalForm,
            ChlSystem::LinearizedAxis => SystemId::LinearizedAxis,
        }
    }
}

impl From<ChlMethod> for MethodId {
    fn from(m: ChlMethod) -> Self {
        match m {
            ChlMethod::Euler => MethodId::Euler,
            ChlMethod::Ab2 => MethodId::Ab2,
            ChlMethod::Ab3 => MethodId::Ab3,
            ChlMethod::Ab4 => MethodId::Ab4,
            ChlMethod::Ab5 => MethodId::Ab5,
            ChlMethod::Rk2 => MethodId::Rk2,
            ChlMethod::Rk4 => MethodId::Rk4,
            ChlMethod::CrankNicolson => MethodId::CrankNicolson,
            ChlMethod::AdaptiveRk => MethodId::AdaptiveRk,
        }
    }
}

impl From<ChlComponent> for Component {
    fn from(c: ChlComponent) -> Self {
        match c {
            ChlComponent::X => Component::X,
            ChlComponent::Y => Component::Y,
            ChlComponent::Z => Component::Z,
            ChlComponent::Euclidean => Component::Euclidean,
        }
    }
}

unsafe fn params_of(p: *const ChlParams) -> Result<LorenzParams, ChlStatus> {
    match p.as_ref() {
        None => Ok(LorenzParams::default()),
        Some(p) => LorenzParams::new(p.s, p.r, p.b).map_err(fail),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread. Valid until the next failing
/// call on the same thread; empty if nothing has failed.
#[no_mangle]
pub extern "C" fn chl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Evaluates the vector field of `system` at `state`.
///
/// # Safety
/// `params` may be null; `out_rate` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_eval(
    system: ChlSystem,
    params: *const ChlParams,
    state: ChlState,
    out_rate: *mut ChlState,
) -> ChlStatus {
    guard(|| {
        let out_rate = out(out_rate, "out_rate")?;
        let params = params_of(params)?;
        *out_rate = SystemId::from(system).eval(state.into(), &params).into();
        Ok(())
    })
}

/// Writes the equilibria (origin first) into `out_points`, which must hold
/// `capacity` states. `out_count` receives the number of equilibria even when
/// the buffer is too small.
///
/// # Safety
/// `out_points` must be valid for `capacity` writes; `out_count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chl_equilibria(
    system: ChlSystem,
    params: *const ChlParams,
    out_points: *mut ChlState,
    capacity: usize,
    out_count: *mut usize,
) -> ChlStatus {
    guard(|| {
        let out_count = out(out_count, "out_count")?;
        let params = params_of(params)?;
        let eq = systems::equilibria(system.into(), &params).map_err(fail)?;
        *out_count = eq.len();
        if capacity < eq.len() {
            set_error(format!("buffer holds {capacity}, need {}", eq.len()));
            return Err(ChlStatus::BufferTooSmall);
        }
        if out_points.is_null() {
            return Err(null("out_points"));
        }
        for (i, e) in eq.into_iter().enumerate() {
            *out_points.add(i) = e.into();
        }
        Ok(())
    })
}

/// Slopes of the local stable and unstable directions at height `z`.
///
/// # Safety
/// Both out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_slopes(z: f64, out_a_minus: *mut f64, out_a_plus: *mut f64) -> ChlStatus {
    guard(|| {
        let a_minus = out(out_a_minus, "out_a_minus")?;
        let a_plus = out(out_a_plus, "out_a_plus")?;
        let s = manifold::slopes(z).map_err(fail)?;
        *a_minus = s.a_minus;
        *a_plus = s.a_plus;
        Ok(())
    })
}

/// Signed offset of `state` from the local stable surface.
///
/// # Safety
/// `out_u` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_stable_offset(state: ChlState, out_u: *mut f64) -> ChlStatus {
    guard(|| {
        let u = out(out_u, "out_u")?;
        *u = manifold::stable_offset(state.into()).map_err(fail)?;
        Ok(())
    })
}

/// Sector 1 to 4 of `state` relative to the local stable and unstable surfaces.
///
/// # Safety
/// `out_sector` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_classify_sector(state: ChlState, out_sector: *mut u8) -> ChlStatus {
    guard(|| {
        let sector = out(out_sector, "out_sector")?;
        *sector = manifold::classify_sector(state.into()).map_err(fail)?;
        Ok(())
    })
}

/// Integrates from `initial` to `t_end`, recording every `stride` steps.
/// For the adaptive method, `dt * stride` is the output spacing.
///
/// # Safety
/// `params` may be null; `out_traj` must be valid for writes. The handle must
/// be released with `chl_trajectory_free`.
#[no_mangle]
pub unsafe extern "C" fn chl_integrate(
    system: ChlSystem,
    params: *const ChlParams,
    initial: ChlState,
    method: ChlMethod,
    dt: f64,
    t_end: f64,
    stride: u64,
    out_traj: *mut *mut ChlTrajectory,
) -> ChlStatus {
    guard(|| {
        let slot = out(out_traj, "out_traj")?;
        *slot = ptr::null_mut();
        let params = params_of(params)?;
        let spec = StepSpec::new(method.into(), dt, t_end, stride).map_err(fail)?;
        let traj = integrate(system.into(), &params, initial.into(), &spec).map_err(fail)?;
        *slot = Box::into_raw(Box::new(ChlTrajectory(traj)));
        Ok(())
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chl_trajectory_len(traj: *const ChlTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `traj` must be a live handle; out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_trajectory_sample(
    traj: *const ChlTrajectory,
    index: usize,
    out_t: *mut f64,
    out_state: *mut ChlState,
) -> ChlStatus {
    guard(|| {
        let traj = input(traj, "traj")?;
        let t = out(out_t, "out_t")?;
        let state = out(out_state, "out_state")?;
        let Some(s) = traj.0.samples.get(index) else {
            set_error(format!("index {index} out of range ({} samples)", traj.0.len()));
            return Err(ChlStatus::InvalidInput);
        };
        *t = s.t;
        *state = s.state.into();
        Ok(())
    })
}

/// Reports whether the run was truncated by a blow-up and, if so, when.
///
/// # Safety
/// `traj` must be a live handle; out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_trajectory_blow_up(
    traj: *const ChlTrajectory,
    out_blew_up: *mut bool,
    out_t: *mut f64,
) -> ChlStatus {
    guard(|| {
        let traj = input(traj, "traj")?;
        let flag = out(out_blew_up, "out_blew_up")?;
        let t = out(out_t, "out_t")?;
        *flag = traj.0.blow_up.is_some();
        *t = traj.0.blow_up.as_ref().map_or(f64::NAN, |b| b.t);
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chl_trajectory_free(traj: *mut ChlTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Earliest common time at which `component` of the two runs differs by more
/// than `threshold`. `out_found` is false if they never do.
///
/// # Safety
/// Handles must be live; out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_divergence_time(
    a: *const ChlTrajectory,
    b: *const ChlTrajectory,
    component: ChlComponent,
    threshold: f64,
    out_found: *mut bool,
    out_t_div: *mut f64,
) -> ChlStatus {
    guard(|| {
        let a = input(a, "a")?;
        let b = input(b, "b")?;
        let found = out(out_found, "out_found")?;
        let t_div = out(out_t_div, "out_t_div")?;
        let report = divergence_time(&a.0, &b.0, component.into(), threshold).map_err(fail)?;
        *found = report.t_div.is_some();
        *t_div = report.t_div.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Running time average of x^2. Writes one (t, value) pair per sample after
/// the first into the two buffers; `out_count` always receives the length.
///
/// # Safety
/// Buffers must be valid for `capacity` writes; `out_count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chl_running_e(
    traj: *const ChlTrajectory,
    out_times: *mut f64,
    out_values: *mut f64,
    capacity: usize,
    out_count: *mut usize,
) -> ChlStatus {
    guard(|| {
        let traj = input(traj, "traj")?;
        let count = out(out_count, "out_count")?;
        let series = running_e(&traj.0).map_err(fail)?;
        *count = series.len();
        if capacity < series.len() {
            set_error(format!("buffer holds {capacity}, need {}", series.len()));
            return Err(ChlStatus::BufferTooSmall);
        }
        if out_times.is_null() || out_values.is_null() {
            return Err(null("output buffer"));
        }
        for (i, (t, v)) in series.times.iter().zip(&series.values).enumerate() {
            *out_times.add(i) = *t;
            *out_values.add(i) = *v;
        }
        Ok(())
    })
}

/// Stable-surface crossings between consecutive samples inside the zone of
/// `radius` around the z-axis, up to height `z_max`.
///
/// # Safety
/// `traj` must be live; `out_list` must be valid for writes. Release the list
/// with `chl_jump_list_free`.
#[no_mangle]
pub unsafe extern "C" fn chl_detect_jumps(
    traj: *const ChlTrajectory,
    radius: f64,
    z_max: f64,
    out_list: *mut *mut ChlJumpList,
) -> ChlStatus {
    guard(|| {
        let slot = out(out_list, "out_list")?;
        *slot = ptr::null_mut();
        let traj = input(traj, "traj")?;
        let zone = NearZone::new(radius, z_max).map_err(fail)?;
        *slot = Box::into_raw(Box::new(ChlJumpList(detect_jumps(&traj.0, &zone))));
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chl_jump_list_len(list: *const ChlJumpList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// # Safety
/// `list` must be live; `out_event` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_jump_list_get(
    list: *const ChlJumpList,
    index: usize,
    out_event: *mut ChlJumpEvent,
) -> ChlStatus {
    guard(|| {
        let list = input(list, "list")?;
        let event = out(out_event, "out_event")?;
        let Some(e) = list.0.get(index) else {
            set_error(format!("index {index} out of range ({} events)", list.0.len()));
            return Err(ChlStatus::InvalidInput);
        };
        *event = ChlJumpEvent {
            t: e.t,
            before: e.state_before.into(),
            after: e.state_after.into(),
            u_before: e.u_before,
            u_after: e.u_after,
            sector_before: e.sector_before,
            sector_after: e.sector_after,
        };
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chl_jump_list_free(list: *mut ChlJumpList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Empirical convergence order of a fixed-step method from at least three
/// step sizes in geometric progression.
///
/// # Safety
/// `dts` must point to `n` doubles; `out_order` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn chl_measure_order(
    method: ChlMethod,
    dts: *const f64,
    n: usize,
    out_order: *mut f64,
) -> ChlStatus {
    guard(|| {
        let order = out(out_order, "out_order")?;
        if dts.is_null() {
            return Err(null("dts"));
        }
        let dts = std::slice::from_raw_parts(dts, n);
        *order = measure_order(method.into(), dts).map_err(fail)?.order;
        Ok(())
    })
}
