//! C ABI over `wallcross`.
//!
//! Every function returns a [`WcStatus`]; on failure the message is kept per
//! thread and can be read with [`wc_last_error_message`]. Manifolds are opaque
//! handles released with [`wc_manifold_free`]. Linear maps are passed as
//! row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wallcross::degree::{degree, DegreeOptions};
use wallcross::manifold::{make_hyperquadric, make_plucker, make_veronese, Submanifold};
use wallcross::numeric::Matrix;
use wallcross::path::{track, HomPath, TrackOptions};
use wallcross::projection::ProjectionMap;
use wallcross::rational::{brockett_degree, RationalPair};
use wallcross::schubert::eg_count;
use wallcross::wall::{classify, locate_wall_point, WallOptions};
use wallcross::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OnCenter = 3,
    WallPoint = 4,
    NotOrientable = 5,
    /// The numerics could not certify a result.
    Certification = 6,
    NonTransversal = 7,
    CommonFactor = 8,
    Panic = 9,
    Other = 10,
}

/// Opaque submanifold handle.
pub struct WcManifold(Submanifold);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> WcStatus {
    match err {
        Error::NotProjectivePoint | Error::InvalidInput(_) | Error::Parse(_) | Error::ImmersionFailure(_) => {
            WcStatus::InvalidInput
        }
        Error::OnCenter | Error::SubspaceOnCenter => WcStatus::OnCenter,
        Error::WallPoint => WcStatus::WallPoint,
        Error::NotRelativelyOrientable | Error::OrientabilityUnknown => WcStatus::NotOrientable,
        Error::NonTransversal => WcStatus::NonTransversal,
        Error::CommonFactor => WcStatus::CommonFactor,
        e if e.is_certification_failure() => WcStatus::Certification,
        _ => WcStatus::Other,
    }
}

/// Runs `body`, recording errors and turning panics into `WcStatus::Panic`.
fn guard(body: impl FnOnce() -> Result<(), WcStatus>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WcStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            WcStatus::Panic
        }
    }
}

fn fail(err: Error) -> WcStatus {
    set_error(&err.to_string());
    status_of(&err)
}

fn null(what: &str) -> WcStatus {
    set_error(&format!("null pointer: {what}"));
    WcStatus::NullPointer
}

unsafe fn manifold<'a>(m: *const WcManifold) -> Result<&'a Submanifold, WcStatus> {
    m.as_ref().map(|h| &h.0).ok_or_else(|| null("manifold"))
}

/// Reads a `target_dim × ambient_dim` row-major map for `x`.
unsafe fn read_map(x: &Submanifold, data: *const f64) -> Result<ProjectionMap, WcStatus> {
    if data.is_null() {
        return Err(null("map"));
    }
    let (rows, cols) = (x.dim() + 1, x.ambient_dim());
    let s = std::slice::from_raw_parts(data, rows * cols);
    ProjectionMap::new(Matrix::from_row_slice(rows, cols, s)).map_err(fail)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), WcStatus> {
    if out.is_null() {
        return Err(null("output"));
    }
    out.write(v);
    Ok(())
}

fn boxed(r: wallcross::Result<Submanifold>, out: *mut *mut WcManifold) -> Result<(), WcStatus> {
    let x = r.map_err(fail)?;
    unsafe { write(out, Box::into_raw(Box::new(WcManifold(x)))) }
}

fn degree_options(seed: u64) -> DegreeOptions {
    DegreeOptions { seed, ..DegreeOptions::default() }
}

/// Hyperquadric `x0² = x1² + … + xn²` in `P^n`.
#[no_mangle]
pub extern "C" fn wc_manifold_hyperquadric(n: usize, out: *mut *mut WcManifold) -> WcStatus {
    guard(|| boxed(make_hyperquadric(n), out))
}

/// Rational normal curve of degree `n` in `P^n`.
#[no_mangle]
pub extern "C" fn wc_manifold_veronese(n: usize, out: *mut *mut WcManifold) -> WcStatus {
    guard(|| boxed(make_veronese(n), out))
}

/// Grassmannian of `q`-planes in `R^(p+q)` in its Plücker embedding.
#[no_mangle]
pub extern "C" fn wc_manifold_plucker(p: usize, q: usize, out: *mut *mut WcManifold) -> WcStatus {
    guard(|| boxed(make_plucker(p, q), out))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must come from a `wc_manifold_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn wc_manifold_free(m: *mut WcManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the ambient vector space and of the manifold. Maps on `m`
/// are `(dim + 1) × ambient` matrices.
///
/// # Safety
/// `m` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_manifold_dims(m: *const WcManifold, ambient: *mut usize, dim: *mut usize) -> WcStatus {
    guard(|| {
        let x = manifold(m)?;
        write(ambient, x.ambient_dim())?;
        write(dim, x.dim())
    })
}

/// Degree of `[f]_X`, certified by agreement over several regular targets.
///
/// # Safety
/// `f` points to `(dim + 1) * ambient` doubles, row-major.
#[no_mangle]
pub unsafe extern "C" fn wc_degree(m: *const WcManifold, f: *const f64, seed: u64, out: *mut i64) -> WcStatus {
    guard(|| {
        let x = manifold(m)?;
        let f = read_map(x, f)?;
        let cert = degree(&f, x, &degree_options(seed)).map_err(fail)?;
        if !cert.unanimous {
            set_error(&format!("targets disagree: {:?}", cert.sums));
            return Err(WcStatus::Certification);
        }
        write(out, cert.degree)
    })
}

/// Whether `P(ker f)` meets `X`. `regular` is 1 for a regular wall point, 0
/// otherwise; `min_indicator` is the smallest wall indicator found.
///
/// # Safety
/// `f` as in [`wc_degree`]; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_locate_wall(
    m: *const WcManifold,
    f: *const f64,
    on_wall: *mut c_int,
    regular: *mut c_int,
    min_indicator: *mut f64,
) -> WcStatus {
    guard(|| {
        let x = manifold(m)?;
        let f = read_map(x, f)?;
        let v = locate_wall_point(&f, x, &WallOptions::default()).and_then(|v| classify(&f, x, &v)).map_err(fail)?;
        write(on_wall, c_int::from(v.on_wall))?;
        write(regular, c_int::from(v.regular == Some(true)))?;
        write(min_indicator, v.min_indicator)
    })
}

/// Tracks the straight path `from → to`. Writes the degree change, the number
/// of crossings, and up to `cap` crossing parameters and signs (0 when a sign
/// is undefined).
///
/// # Safety
/// `from`, `to` as in [`wc_degree`]; `t_buf` and `sign_buf` hold `cap` entries
/// or are null when `cap` is 0.
#[no_mangle]
pub unsafe extern "C" fn wc_track(
    m: *const WcManifold,
    from: *const f64,
    to: *const f64,
    seed: u64,
    delta: *mut i64,
    n_crossings: *mut usize,
    t_buf: *mut f64,
    sign_buf: *mut c_int,
    cap: usize,
) -> WcStatus {
    guard(|| {
        let x = manifold(m)?;
        let path = HomPath::straight(&read_map(x, from)?, &read_map(x, to)?).map_err(fail)?;
        let opts = TrackOptions { seed, ..TrackOptions::default() };
        let r = track(&path, x, &opts).map_err(fail)?;
        if cap > 0 && (t_buf.is_null() || sign_buf.is_null()) {
            return Err(null("crossing buffers"));
        }
        for (i, c) in r.crossings.iter().take(cap).enumerate() {
            *t_buf.add(i) = c.t_star;
            *sign_buf.add(i) = c.sign.unwrap_or(0);
        }
        write(delta, r.delta)?;
        write(n_crossings, r.crossings.len())
    })
}

/// Brockett degree of `p/q` for monic `p`, `q` of degree `n` given by their
/// lower coefficients `a_0..a_{n-1}`.
///
/// # Safety
/// `p` and `q` each point to `n` integers.
#[no_mangle]
pub unsafe extern "C" fn wc_brockett_degree(n: usize, p: *const i64, q: *const i64, out: *mut i64) -> WcStatus {
    guard(|| {
        if p.is_null() || q.is_null() {
            return Err(null("coefficients"));
        }
        let pair = RationalPair::from_ints(std::slice::from_raw_parts(p, n), std::slice::from_raw_parts(q, n))
            .map_err(fail)?;
        write(out, brockett_degree(&pair).map_err(fail)?)
    })
}

/// Decimal string of the real Wronski degree for `(p, q)`. Free the result
/// with [`wc_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_eg_count(p: usize, q: usize, out: *mut *mut c_char) -> WcStatus {
    guard(|| {
        let v = eg_count(p, q).map_err(fail)?;
        write(out, CString::new(v.to_string()).expect("digits").into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn wc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn wc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn wc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
