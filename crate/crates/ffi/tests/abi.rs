use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use wallcross_ffi::*;

const F0: [f64; 6] = [0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
const F1: [f64; 6] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];

fn hyperquadric2() -> *mut WcManifold {
    let mut m = ptr::null_mut();
    assert_eq!(wc_manifold_hyperquadric(2, &mut m), WcStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn degrees_of_f0_and_f1() {
    let m = hyperquadric2();
    let (mut a, mut d) = (0usize, 0usize);
    let mut deg = 99i64;
    unsafe {
        assert_eq!(wc_manifold_dims(m, &mut a, &mut d), WcStatus::Ok);
        assert_eq!((a, d), (3, 1));
        assert_eq!(wc_degree(m, F0.as_ptr(), 0, &mut deg), WcStatus::Ok);
        assert_eq!(deg, 2);
        assert_eq!(wc_degree(m, F1.as_ptr(), 0, &mut deg), WcStatus::Ok);
        assert_eq!(deg, 0);
        wc_manifold_free(m);
    }
}

#[test]
fn track_reports_one_crossing() {
    let m = hyperquadric2();
    let (mut delta, mut n) = (0i64, 0usize);
    let mut t = [0.0f64; 4];
    let mut s = [0i32; 4];
    unsafe {
        let st = wc_track(m, F0.as_ptr(), F1.as_ptr(), 0, &mut delta, &mut n, t.as_mut_ptr(), s.as_mut_ptr(), 4);
        assert_eq!(st, WcStatus::Ok);
        wc_manifold_free(m);
    }
    assert_eq!((delta, n, s[0]), (-2, 1, -1));
    assert!((t[0] - 0.4401370385).abs() < 1e-6);
}

#[test]
fn wall_of_midpoint_map() {
    let m = hyperquadric2();
    // kernel (1, -1, 0) lies on the conic
    let f = [1.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let (mut on, mut reg, mut ind) = (0, 0, 1.0);
    unsafe {
        assert_eq!(wc_locate_wall(m, f.as_ptr(), &mut on, &mut reg, &mut ind), WcStatus::Ok);
        assert_eq!(on, 1);
        assert_eq!(wc_locate_wall(m, F0.as_ptr(), &mut on, &mut reg, &mut ind), WcStatus::Ok);
        assert_eq!(on, 0);
        wc_manifold_free(m);
    }
}

#[test]
fn brockett_and_eg_count() {
    let (p, q) = ([-1i64], [1i64]);
    let mut d = 0;
    unsafe {
        assert_eq!(wc_brockett_degree(1, p.as_ptr(), q.as_ptr(), &mut d), WcStatus::Ok);
        assert_eq!(d, -1);
        assert_eq!(wc_brockett_degree(1, p.as_ptr(), p.as_ptr(), &mut d), WcStatus::CommonFactor);
        let mut s = ptr::null_mut();
        assert_eq!(wc_eg_count(2, 3, &mut s), WcStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "1");
        wc_string_free(s);
        assert_eq!(wc_eg_count(2, 2, &mut s), WcStatus::NotOrientable);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut deg = 0;
        assert_eq!(wc_degree(ptr::null(), F0.as_ptr(), 0, &mut deg), WcStatus::NullPointer);
        let msg = CStr::from_ptr(wc_last_error_message()).to_string_lossy().into_owned();
        assert!(msg.contains("null"));
        let mut m = ptr::null_mut();
        assert_eq!(wc_manifold_veronese(0, &mut m), WcStatus::InvalidInput);
        assert!(m.is_null());
        assert!(!wc_last_error_message().is_null());
        let m = hyperquadric2();
        let (mut a, mut d) = (0, 0);
        assert_eq!(wc_manifold_dims(m, &mut a, &mut d), WcStatus::Ok);
        assert!(wc_last_error_message().is_null());
        wc_manifold_free(m);
        wc_manifold_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(wc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    std::fs::write(
        &src,
        "#include \"wallcross.h\"\nint main(void) { WcManifold *m = 0; return wc_manifold_veronese(2, &m) == WC_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc").arg("-fsyntax-only").arg("-Wall").arg("-Werror").arg("-I").arg(include).arg(&src).output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
