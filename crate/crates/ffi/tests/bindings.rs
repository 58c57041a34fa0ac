use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use chaoslab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(chl_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn integrate(system: ChlSystem, method: ChlMethod, dt: f64, t_end: f64, stride: u64) -> *mut ChlTrajectory {
    let mut traj = ptr::null_mut();
    let status = unsafe {
        chl_integrate(
            system,
            ptr::null(),
            ChlState { x: 1.0, y: -1.0, z: 10.0 },
            method,
            dt,
            t_end,
            stride,
            &mut traj,
        )
    };
    assert_eq!(status, ChlStatus::Ok, "{}", last_error());
    traj
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(chl_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn eval_matches_hand_computation() {
    let mut rate = ChlState::default();
    let s = ChlState { x: 1.0, y: 2.0, z: 3.0 };
    let params = ChlParams { s: 10.0, r: 28.0, b: 2.0 };
    assert_eq!(unsafe { chl_eval(ChlSystem::Standard, &params, s, &mut rate) }, ChlStatus::Ok);
    assert_eq!(rate, ChlState { x: 10.0, y: 23.0, z: -4.0 });

    assert_eq!(unsafe { chl_eval(ChlSystem::LinearizedAxis, ptr::null(), s, &mut rate) }, ChlStatus::Ok);
    assert!((rate.z + 2.67 * 3.0).abs() < 1e-12);

    let bad = ChlParams { s: -1.0, r: 28.0, b: 2.0 };
    assert_eq!(unsafe { chl_eval(ChlSystem::Standard, &bad, s, &mut rate) }, ChlStatus::Domain);
    assert_eq!(unsafe { chl_eval(ChlSystem::Standard, ptr::null(), s, ptr::null_mut()) }, ChlStatus::NullPointer);
}

#[test]
fn equilibria_report_size_when_buffer_is_short() {
    let mut buf = [ChlState::default(); 3];
    let mut n = 0;
    let st = unsafe { chl_equilibria(ChlSystem::NormalForm, ptr::null(), buf.as_mut_ptr(), 1, &mut n) };
    assert_eq!(st, ChlStatus::BufferTooSmall);
    assert_eq!(n, 3);
    let st = unsafe { chl_equilibria(ChlSystem::NormalForm, ptr::null(), buf.as_mut_ptr(), 3, &mut n) };
    assert_eq!(st, ChlStatus::Ok);
    assert_eq!(buf[0], ChlState::default());
    assert_eq!(buf[1].x, -buf[2].x);
    assert!((buf[1].z - 26.8128).abs() < 1e-3);
}

#[test]
fn geometry_functions() {
    let (mut am, mut ap) = (0.0, 0.0);
    assert_eq!(unsafe { chl_slopes(10.0, &mut am, &mut ap) }, ChlStatus::Ok);
    assert!((am * ap - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { chl_slopes(0.0, &mut am, &mut ap) }, ChlStatus::Domain);
    assert!(last_error().contains("outside the domain"));

    let mut u = 0.0;
    let on_stable = ChlState { x: am, y: 1.0, z: 10.0 };
    assert_eq!(unsafe { chl_stable_offset(on_stable, &mut u) }, ChlStatus::Ok);
    assert!(u.abs() < 1e-12);

    let mut sector = 0u8;
    let p = ChlState { x: 0.3, y: -0.2, z: 10.0 };
    assert_eq!(unsafe { chl_classify_sector(p, &mut sector) }, ChlStatus::Ok);
    let mut mirrored = 0u8;
    let q = ChlState { x: -0.3, y: 0.2, z: 10.0 };
    assert_eq!(unsafe { chl_classify_sector(q, &mut mirrored) }, ChlStatus::Ok);
    assert_eq!((sector + 1) % 4 + 1, mirrored);
    let high = ChlState { x: 0.1, y: 0.1, z: 20.0 };
    assert_eq!(unsafe { chl_classify_sector(high, &mut sector) }, ChlStatus::Domain);
}

#[test]
fn trajectory_handle_round_trip() {
    let traj = integrate(ChlSystem::Standard, ChlMethod::Ab2, 1e-3, 2.0, 10);
    let n = unsafe { chl_trajectory_len(traj) };
    assert_eq!(n, 201);
    let (mut t, mut s) = (0.0, ChlState::default());
    assert_eq!(unsafe { chl_trajectory_sample(traj, 0, &mut t, &mut s) }, ChlStatus::Ok);
    assert_eq!((t, s), (0.0, ChlState { x: 1.0, y: -1.0, z: 10.0 }));
    assert_eq!(unsafe { chl_trajectory_sample(traj, n, &mut t, &mut s) }, ChlStatus::InvalidInput);

    let (mut blew, mut tb) = (true, 0.0);
    assert_eq!(unsafe { chl_trajectory_blow_up(traj, &mut blew, &mut tb) }, ChlStatus::Ok);
    assert!(!blew && tb.is_nan());

    let mut times = vec![0.0; n];
    let mut values = vec![0.0; n];
    let mut count = 0;
    let st = unsafe { chl_running_e(traj, times.as_mut_ptr(), values.as_mut_ptr(), n, &mut count) };
    assert_eq!(st, ChlStatus::Ok, "{}", last_error());
    assert!(count > 0 && count <= n);
    assert!(values[..count].iter().all(|v| *v >= 0.0));

    unsafe { chl_trajectory_free(traj) };
    unsafe { chl_trajectory_free(ptr::null_mut()) };
    assert_eq!(unsafe { chl_trajectory_len(ptr::null()) }, 0);
}

#[test]
fn blow_up_is_reported() {
    let traj = integrate(ChlSystem::NormalForm, ChlMethod::Euler, 0.04, 5.0, 1);
    let (mut blew, mut tb) = (false, 0.0);
    unsafe { chl_trajectory_blow_up(traj, &mut blew, &mut tb) };
    assert!(blew && tb < 5.0);
    unsafe { chl_trajectory_free(traj) };
}

#[test]
fn divergence_between_step_sizes() {
    let a = integrate(ChlSystem::Standard, ChlMethod::Ab2, 1e-3, 50.0, 10);
    let b = integrate(ChlSystem::Standard, ChlMethod::Ab2, 5e-4, 50.0, 20);
    let (mut found, mut t_div) = (false, 0.0);
    let st = unsafe { chl_divergence_time(a, b, ChlComponent::X, 1.0, &mut found, &mut t_div) };
    assert_eq!(st, ChlStatus::Ok, "{}", last_error());
    assert!(found && t_div > 0.0 && t_div < 50.0);
    unsafe {
        chl_trajectory_free(a);
        chl_trajectory_free(b);
    }
}

#[test]
fn jump_list_handle() {
    let traj = integrate(ChlSystem::NormalForm, ChlMethod::Euler, 1e-2, 3000.0, 1);
    let mut list = ptr::null_mut();
    assert_eq!(unsafe { chl_detect_jumps(traj, 0.5, 15.0, &mut list) }, ChlStatus::Ok);
    let n = unsafe { chl_jump_list_len(list) };
    for i in 0..n {
        let mut e = ChlJumpEvent::default();
        assert_eq!(unsafe { chl_jump_list_get(list, i, &mut e) }, ChlStatus::Ok);
        assert!(e.u_before * e.u_after < 0.0);
        assert_ne!(e.sector_before, e.sector_after);
    }
    let mut e = ChlJumpEvent::default();
    assert_eq!(unsafe { chl_jump_list_get(list, n, &mut e) }, ChlStatus::InvalidInput);
    unsafe { chl_jump_list_free(list) };

    let mut list = ptr::null_mut();
    assert_eq!(unsafe { chl_detect_jumps(traj, 0.5, 20.0, &mut list) }, ChlStatus::Domain);
    assert!(list.is_null());
    unsafe { chl_trajectory_free(traj) };
}

#[test]
fn order_measurement() {
    let dts = [0.02, 0.01, 0.005, 0.0025];
    let mut order = 0.0;
    let st = unsafe { chl_measure_order(ChlMethod::Rk4, dts.as_ptr(), dts.len(), &mut order) };
    assert_eq!(st, ChlStatus::Ok);
    assert!((order - 4.0).abs() < 0.2);
    let st = unsafe { chl_measure_order(ChlMethod::AdaptiveRk, dts.as_ptr(), dts.len(), &mut order) };
    assert_eq!(st, ChlStatus::CannotMeasure);
    let st = unsafe { chl_measure_order(ChlMethod::Euler, dts.as_ptr(), 2, &mut order) };
    assert_ne!(st, ChlStatus::Ok);
}

#[test]
fn errors_are_thread_local() {
    let mut am = 0.0;
    unsafe { chl_slopes(-1.0, &mut am, &mut am) };
    assert!(!last_error().is_empty());
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_empty());
}

/// Compiles a small C program against the generated header and static library.
#[test]
fn c_program_links_against_the_header() {
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(cc.status.success());
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libchaoslab_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
