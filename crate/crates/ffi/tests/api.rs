use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::ffi::{CStr, CString};
use std::ptr;

use qgame_ffi::*;

fn builtin(id: &str) -> *mut QgGame {
    let id = CString::new(id).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { qg_game_builtin(id.as_ptr(), &mut g) },
        QgStatus::Ok
    );
    g
}

fn last_error() -> String {
    let p = qg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn payoffs(g: *const QgGame, r: f64, a: QgStrategy, b: QgStrategy) -> QgPayoffs {
    let mut out = QgPayoffs {
        alice: f64::NAN,
        bob: f64::NAN,
    };
    assert_eq!(
        unsafe { qg_quantum_payoffs(g, r, a, b, &mut out) },
        QgStatus::Ok
    );
    out
}

const I_SIGMA_Z: QgStrategy = QgStrategy {
    theta: 0.0,
    phi: FRAC_PI_2,
};

#[test]
fn quantum_payoffs_through_the_abi() {
    let pd = builtin("pd");
    let p = payoffs(pd, 0.25, I_SIGMA_Z, I_SIGMA_Z);
    assert!((p.alice - 43.0 / 16.0).abs() < 1e-12 && (p.bob - 43.0 / 16.0).abs() < 1e-12);
    let bos = builtin("bos");
    let flip = QgStrategy {
        theta: PI,
        phi: 0.0,
    };
    let p = payoffs(bos, 1.0, flip, flip);
    assert!((p.alice - 2.0).abs() < 1e-12 && (p.bob - 1.0).abs() < 1e-12);
    unsafe {
        qg_game_free(pd);
        qg_game_free(bos);
    }
}

#[test]
fn classical_payoffs_and_distribution() {
    let sd = builtin("sd");
    let mut out = QgPayoffs {
        alice: 0.0,
        bob: 0.0,
    };
    assert_eq!(
        unsafe { qg_classical_payoffs(sd, 0.4, 0.5, 0.2, &mut out) },
        QgStatus::Ok
    );
    assert!((out.alice - (-0.2 + 0.9 * 0.4)).abs() < 1e-12);
    assert!((out.bob - 1.5).abs() < 1e-12);
    let mut p = [0.0; 4];
    let a = QgStrategy {
        theta: 1.0,
        phi: 0.3,
    };
    assert_eq!(
        unsafe { qg_outcome_distribution(0.5, a, I_SIGMA_Z, p.as_mut_ptr()) },
        QgStatus::Ok
    );
    assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
    unsafe { qg_game_free(sd) };
}

#[test]
fn json_games() {
    let json = CString::new(
        r#"{"name":"stag","alice_actions":["s","h"],"bob_actions":["s","h"],"payoffs":[[[4,4],[0,3]],[[3,0],[3,3]]]}"#,
    )
    .unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { qg_game_from_json(json.as_ptr(), &mut g) },
        QgStatus::Ok
    );
    let id = QgStrategy {
        theta: 0.0,
        phi: 0.0,
    };
    let p = payoffs(g, 0.0, id, id);
    assert!((p.alice - 4.0).abs() < 1e-12 && (p.bob - 4.0).abs() < 1e-12);
    unsafe { qg_game_free(g) };

    let bad = CString::new("{\"name\": 1}").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { qg_game_from_json(bad.as_ptr(), &mut g) },
        QgStatus::ParseError
    );
    assert!(g.is_null());
}

#[test]
fn errors_set_status_and_message() {
    let id = CString::new("chess").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { qg_game_builtin(id.as_ptr(), &mut g) },
        QgStatus::UnknownGame
    );
    assert!(last_error().contains("chess"));

    let pd = builtin("pd");
    let mut out = QgPayoffs {
        alice: 0.0,
        bob: 0.0,
    };
    let st = unsafe { qg_quantum_payoffs(pd, 1.5, I_SIGMA_Z, I_SIGMA_Z, &mut out) };
    assert_eq!(st, QgStatus::OutOfRange);
    assert!(last_error().contains('r'));
    let bad = QgStrategy {
        theta: 0.0,
        phi: PI,
    };
    assert_eq!(
        unsafe { qg_quantum_payoffs(pd, 0.0, bad, I_SIGMA_Z, &mut out) },
        QgStatus::OutOfRange
    );
    assert!(last_error().contains("phi"));
    assert_eq!(
        unsafe { qg_quantum_payoffs(ptr::null(), 0.0, I_SIGMA_Z, I_SIGMA_Z, &mut out) },
        QgStatus::NullPointer
    );
    assert_eq!(
        unsafe { qg_quantum_payoffs(pd, 0.0, I_SIGMA_Z, I_SIGMA_Z, ptr::null_mut()) },
        QgStatus::NullPointer
    );
    assert_eq!(
        unsafe { qg_classical_payoffs(pd, 0.0, 2.0, 0.0, &mut out) },
        QgStatus::OutOfRange
    );
    unsafe {
        qg_game_free(pd);
        qg_game_free(ptr::null_mut());
        qg_ne_report_free(ptr::null_mut());
    }
}

#[test]
fn critical_rates() {
    let bos = builtin("bos");
    let mut count = 0usize;
    let st = unsafe { qg_critical_rates(bos, 0, ptr::null_mut(), 0, &mut count) };
    assert_eq!(st, QgStatus::BufferTooSmall);
    assert_eq!(count, 2);
    let mut rates = [0.0; 4];
    assert_eq!(
        unsafe { qg_critical_rates(bos, 0, rates.as_mut_ptr(), 4, &mut count) },
        QgStatus::Ok
    );
    assert!((rates[0] - 0.2).abs() < 1e-6 && (rates[1] - 0.5).abs() < 1e-6);
    assert_eq!(
        unsafe { qg_critical_rates(bos, 1, rates.as_mut_ptr(), 4, &mut count) },
        QgStatus::Ok
    );
    assert_eq!(count, 2);
    assert!((rates[0] - 0.5).abs() < 1e-6 && (rates[1] - 0.8).abs() < 1e-6);
    assert_eq!(
        unsafe { qg_critical_rates(bos, 2, rates.as_mut_ptr(), 4, &mut count) },
        QgStatus::InvalidArgument
    );
    unsafe { qg_game_free(bos) };
}

#[test]
fn equilibrium_reports() {
    let pd = builtin("pd");
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { qg_ne_search(pd, 1.0, &mut report) }, QgStatus::Ok);
    assert_eq!(unsafe { qg_ne_report_len(report) }, 1);
    let mut f = std::mem::MaybeUninit::<QgFamily>::uninit();
    assert_eq!(
        unsafe { qg_ne_report_family(report, 0, f.as_mut_ptr()) },
        QgStatus::Ok
    );
    let f = unsafe { f.assume_init() };
    assert_eq!(f.kind, QgFamilyKind::PhiSum);
    assert_eq!(f.alice.theta, 0.0);
    assert!((f.alice.phi - FRAC_PI_4).abs() < 1e-11 && (f.bob.phi - FRAC_PI_4).abs() < 1e-11);
    assert!((f.payoffs.alice - 3.0).abs() < 1e-12 && (f.payoffs.bob - 3.0).abs() < 1e-12);
    assert!(f.max_gain <= 1e-6);
    assert!(f.member_count > 1);
    let mut spare = f;
    assert_eq!(
        unsafe { qg_ne_report_family(report, 1, &mut spare) },
        QgStatus::OutOfRange
    );
    unsafe { qg_ne_report_free(report) };
    assert_eq!(unsafe { qg_ne_report_len(ptr::null()) }, 0);
    unsafe { qg_game_free(pd) };
}

#[test]
fn header_compiles_and_links_from_c() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    // test binaries live in <profile>/deps, the library in <profile>
    let exe_dir = std::env::current_exe().unwrap();
    let lib = exe_dir
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("libqgame_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(root.join("tests/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "smoke exited with {:?}",
        out.status.code()
    );
    assert_eq!(out.stdout, b"ok\n");
}
