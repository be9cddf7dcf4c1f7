//! C ABI for the shrinking-target laboratory.
//!
//! Conventions:
//! * Opaque handles (`StpMeasure`, `StpSystem`) own their Rust object; free
//!   them with the matching `_free` function. Handles are immutable and safe
//!   to share across threads.
//! * Exact rationals cross the boundary as NUL-terminated strings: `"p/q"`,
//!   an integer, or a finite decimal on input; `"p/q"` on output.
//! * Every fallible call returns an [`StpStatus`]; on failure a descriptive
//!   message is stored per thread and can be fetched with
//!   [`stp_last_error_message`].
//! * String outputs are written into a caller buffer; if the buffer is too
//!   small the call fails with `STP_STATUS_BUFFER_TOO_SMALL` and reports the
//!   needed size.

use num_rational::BigRational;
use num_traits::Signed;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use stplab::denjoy::{DenjoyParams, DenjoySystem};
use stplab::error::Error;
use stplab::measure::{CircleMeasure, SupportKind};
use stplab::system::SystemSpec;
use stplab::{circle, experiment, radius};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Utf8 = 3,
    PrecisionExhausted = 4,
    BudgetExhausted = 5,
    NotInvertible = 6,
    NotInSupport = 7,
    Ambiguous = 8,
    BufferTooSmall = 9,
}

/// How a support point is approached (see `stp_measure_classify`).
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StpSupportKind {
    BothSides = 0,
    IsolatedLeft = 1,
    IsolatedRight = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> StpStatus {
    match err {
        Error::PrecisionExhausted { .. } => StpStatus::PrecisionExhausted,
        Error::BisectionBudget { .. }
        | Error::ScanBudget { .. }
        | Error::TolUnachievable { .. } => StpStatus::BudgetExhausted,
        Error::NotInvertible => StpStatus::NotInvertible,
        Error::NotInSupport { .. } => StpStatus::NotInSupport,
        Error::AmbiguousAtResolution { .. } => StpStatus::Ambiguous,
        _ => StpStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> StpStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Message of the most recent failure on this thread (empty when none).
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn stp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn parse_c_rational(ptr: *const c_char) -> Result<BigRational, StpStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(StpStatus::NullPointer);
    }
    let text = match CStr::from_ptr(ptr).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("argument is not valid UTF-8".into());
            return Err(StpStatus::Utf8);
        }
    };
    stplab::config::parse_rational(text).map_err(|e| {
        set_error(e.to_string());
        StpStatus::InvalidArgument
    })
}

unsafe fn write_string(out: *mut c_char, cap: usize, needed: *mut usize, s: &str) -> StpStatus {
    let bytes = s.as_bytes();
    if !needed.is_null() {
        *needed = bytes.len() + 1;
    }
    if out.is_null() {
        set_error("null output buffer".into());
        return StpStatus::NullPointer;
    }
    if cap < bytes.len() + 1 {
        set_error(format!(
            "output buffer too small: need {} bytes",
            bytes.len() + 1
        ));
        return StpStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(bytes.as_ptr(), out as *mut u8, bytes.len());
    *out.add(bytes.len()) = 0;
    StpStatus::Ok
}

fn point(r: BigRational) -> circle::CirclePoint {
    circle::CirclePoint::from_rational(r)
}

/// A Borel probability measure on the circle (opaque).
pub struct StpMeasure {
    inner: CircleMeasure,
}

/// A measure-preserving system (opaque).
pub struct StpSystem {
    inner: SystemSpec,
}

/// Lebesgue (Haar) measure on the circle.
///
/// # Safety
/// `out` must be a valid pointer; the handle must be released with
/// `stp_measure_free`.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_lebesgue(out: *mut *mut StpMeasure) -> StpStatus {
    if out.is_null() {
        set_error("null output handle".into());
        return StpStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(StpMeasure {
        inner: CircleMeasure::lebesgue(),
    }));
    StpStatus::Ok
}

/// The middle-thirds Cantor (devil's staircase) measure at the given digit
/// depth (pass 0 for the default depth).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_cantor(depth: u32, out: *mut *mut StpMeasure) -> StpStatus {
    if out.is_null() {
        set_error("null output handle".into());
        return StpStatus::NullPointer;
    }
    let depth = if depth == 0 {
        stplab::measure::CANTOR_DEFAULT_DEPTH
    } else {
        depth
    };
    *out = Box::into_raw(Box::new(StpMeasure {
        inner: CircleMeasure::cantor(depth),
    }));
    StpStatus::Ok
}

/// The invariant measure of a Denjoy system handle.
///
/// # Safety
/// `system` must be a valid Denjoy handle from `stp_system_denjoy`.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_denjoy_invariant(
    system: *const StpSystem,
    out: *mut *mut StpMeasure,
) -> StpStatus {
    if system.is_null() || out.is_null() {
        set_error("null handle".into());
        return StpStatus::NullPointer;
    }
    match &(*system).inner {
        SystemSpec::Denjoy(sys) => {
            *out = Box::into_raw(Box::new(StpMeasure {
                inner: CircleMeasure::denjoy_invariant(sys.clone()),
            }));
            StpStatus::Ok
        }
        _ => {
            set_error("handle is not a Denjoy system".into());
            StpStatus::InvalidArgument
        }
    }
}

/// # Safety
/// `m` must come from a measure constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_free(m: *mut StpMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Measure of the counterclockwise open interval `(a, b)`, as `f64`.
///
/// # Safety
/// `m`, `a`, `b`, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_interval(
    m: *const StpMeasure,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> StpStatus {
    if m.is_null() || out.is_null() {
        set_error("null handle".into());
        return StpStatus::NullPointer;
    }
    let a = match parse_c_rational(a) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let b = match parse_c_rational(b) {
        Ok(v) => v,
        Err(s) => return s,
    };
    *out = stplab::numeric::rational_to_f64(&(*m).inner.interval_measure_rat(&a, &b));
    StpStatus::Ok
}

/// `t_n = inf { r : nu(B(x, r)) >= 1/n }` as an exact rational string.
///
/// # Safety
/// Pointers must be valid; `buf` must hold `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_t_sequence(
    m: *const StpMeasure,
    x: *const c_char,
    n: u64,
    tol: *const c_char,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> StpStatus {
    if m.is_null() {
        set_error("null handle".into());
        return StpStatus::NullPointer;
    }
    let x = match parse_c_rational(x) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let tol = match parse_c_rational(tol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match (*m).inner.t_sequence(&point(x), n, &tol) {
        Ok(t) => write_string(buf, cap, needed, &t.to_string()),
        Err(e) => fail(e),
    }
}

/// Classify a support point: the side kind plus the gap partner `y` and gap
/// length `s_x` as exact rational strings (empty when approached from both
/// sides).
///
/// # Safety
/// Pointers must be valid; the two buffers must each hold `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn stp_measure_classify(
    m: *const StpMeasure,
    x: *const c_char,
    tol: *const c_char,
    kind: *mut StpSupportKind,
    partner_buf: *mut c_char,
    gap_buf: *mut c_char,
    cap: usize,
) -> StpStatus {
    if m.is_null() || kind.is_null() {
        set_error("null handle".into());
        return StpStatus::NullPointer;
    }
    let x = match parse_c_rational(x) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let tol = match parse_c_rational(tol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    match (*m).inner.classify_support_point(&point(x), &tol) {
        Ok(c) => {
            *kind = match c.kind {
                SupportKind::BothSides => StpSupportKind::BothSides,
                SupportKind::IsolatedLeft => StpSupportKind::IsolatedLeft,
                SupportKind::IsolatedRight => StpSupportKind::IsolatedRight,
            };
            let partner = c
                .gap_partner
                .map(|p| p.to_rational().to_string())
                .unwrap_or_default();
            let gap = c.gap_size.map(|g| g.to_string()).unwrap_or_default();
            let s1 = write_string(partner_buf, cap, std::ptr::null_mut(), &partner);
            if s1 != StpStatus::Ok {
                return s1;
            }
            write_string(gap_buf, cap, std::ptr::null_mut(), &gap)
        }
        Err(e) => fail(e),
    }
}

/// Circle distance `min(|x - y|, 1 - |x - y|)` as an exact rational string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stp_circle_dist(
    x: *const c_char,
    y: *const c_char,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> StpStatus {
    let x = match parse_c_rational(x) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let y = match parse_c_rational(y) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let d = circle::dist(&point(x), &point(y));
    write_string(buf, cap, needed, &d.to_string())
}

/// Exact Lebesgue measure of a union of open balls, given parallel arrays
/// of centers and radii (rational strings), as a rational string.
///
/// # Safety
/// `centers` and `radii` must point to `count` valid strings.
#[no_mangle]
pub unsafe extern "C" fn stp_union_measure(
    centers: *const *const c_char,
    radii: *const *const c_char,
    count: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> StpStatus {
    if count > 0 && (centers.is_null() || radii.is_null()) {
        set_error("null array".into());
        return StpStatus::NullPointer;
    }
    let mut arcs = Vec::with_capacity(count);
    for i in 0..count {
        let c = match parse_c_rational(*centers.add(i)) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let r = match parse_c_rational(*radii.add(i)) {
            Ok(v) => v,
            Err(s) => return s,
        };
        if r.is_negative() {
            set_error(format!("radius {i} is negative"));
            return StpStatus::InvalidArgument;
        }
        arcs.push(circle::Arc::new(point(c), r));
    }
    let measure = circle::union_measure(&arcs);
    write_string(buf, cap, needed, &measure.to_string())
}

/// Rigid rotation by a rational angle.
///
/// # Safety
/// Pointers must be valid; release with `stp_system_free`.
#[no_mangle]
pub unsafe extern "C" fn stp_system_rotation(
    theta: *const c_char,
    out: *mut *mut StpSystem,
) -> StpStatus {
    if out.is_null() {
        set_error("null output handle".into());
        return StpStatus::NullPointer;
    }
    let theta = match parse_c_rational(theta) {
        Ok(v) => v,
        Err(s) => return s,
    };
    *out = Box::into_raw(Box::new(StpSystem {
        inner: SystemSpec::rotation(point(theta)),
    }));
    StpStatus::Ok
}

/// Rigid rotation by the golden mean at the given fixed-point bit budget.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stp_system_rotation_golden(
    bits: u32,
    out: *mut *mut StpSystem,
) -> StpStatus {
    if out.is_null() {
        set_error("null output handle".into());
        return StpStatus::NullPointer;
    }
    if bits < 64 {
        set_error("golden rotation needs at least 64 bits".into());
        return StpStatus::InvalidArgument;
    }
    *out = Box::into_raw(Box::new(StpSystem {
        inner: SystemSpec::rotation(circle::CirclePoint::golden(bits)),
    }));
    StpStatus::Ok
}

/// Truncated Denjoy homeomorphism over the golden rotation: geometric gap
/// lengths `c * lambda^|n|` for `|n| <= n_max`, untracked tail below `tol`.
///
/// # Safety
/// Pointers must be valid; release with `stp_system_free`.
#[no_mangle]
pub unsafe extern "C" fn stp_system_denjoy_golden(
    bits: u32,
    gap_scale: *const c_char,
    gap_ratio: *const c_char,
    n_max: u32,
    tol: *const c_char,
    out: *mut *mut StpSystem,
) -> StpStatus {
    if out.is_null() {
        set_error("null output handle".into());
        return StpStatus::NullPointer;
    }
    let gap_scale = match parse_c_rational(gap_scale) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let gap_ratio = match parse_c_rational(gap_ratio) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let tol = match parse_c_rational(tol) {
        Ok(v) => v,
        Err(s) => return s,
    };
    if bits < 64 {
        set_error("Denjoy construction needs at least 64 bits".into());
        return StpStatus::InvalidArgument;
    }
    let params = DenjoyParams {
        theta: circle::CirclePoint::golden(bits),
        gap_scale,
        gap_ratio,
        n_max,
        tol,
    };
    match DenjoySystem::build(params) {
        Ok(sys) => {
            *out = Box::into_raw(Box::new(StpSystem {
                inner: SystemSpec::denjoy(Arc::new(sys)),
            }));
            StpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `s` must come from a system constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn stp_system_free(s: *mut StpSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Rotation-number estimate from `iterations` averaged lift displacements.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stp_system_rotation_number(
    s: *const StpSystem,
    iterations: u64,
    out: *mut f64,
) -> StpStatus {
    if s.is_null() || out.is_null() {
        set_error("null handle".into());
        return StpStatus::NullPointer;
    }
    let from = circle::CirclePoint::from_fraction(0, 1);
    match (*s).inner.rotation_number_estimate(iterations, &from) {
        Ok(rho) => {
            *out = stplab::numeric::rational_to_f64(&rho);
            StpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// First best-return times of the inverse map at `x`: `n` is recorded when
/// `d(f^{-n}(x), x)` beats every earlier distance. Writes up to `capacity`
/// times and distances; `found` reports how many were written. Returns
/// `STP_STATUS_BUDGET_EXHAUSTED` when the scan budget ran out first (the
/// partial results are still written).
///
/// # Safety
/// `times`/`distances` must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn stp_recurrence_times(
    s: *const StpSystem,
    x: *const c_char,
    capacity: usize,
    budget: u64,
    times: *mut u64,
    distances: *mut f64,
    found: *mut usize,
) -> StpStatus {
    if s.is_null() || times.is_null() || distances.is_null() || found.is_null() {
        set_error("null handle".into());
        return StpStatus::NullPointer;
    }
    let x = match parse_c_rational(x) {
        Ok(v) => v,
        Err(st) => return st,
    };
    // Points must live on the system's backend; quantize onto a fixed
    // rotation grid when needed.
    let x = match &(*s).inner {
        SystemSpec::Rotation { theta } => match theta.backend() {
            stplab::Backend::Fixed { bits } => circle::CirclePoint::fixed_from_rational(&x, bits),
            stplab::Backend::Rational => point(x),
        },
        _ => point(x),
    };
    match (*s).inner.recurrence_times(&x, capacity, budget) {
        Ok(rec) => {
            let n = rec.len().min(capacity);
            for i in 0..n {
                let t = &rec.times[i];
                *times.add(i) = u64::try_from(t).unwrap_or(u64::MAX);
                *distances.add(i) = stplab::numeric::rational_to_f64(&rec.distances[i]);
            }
            *found = n;
            if rec.complete {
                StpStatus::Ok
            } else {
                set_error(format!(
                    "scan budget {budget} exhausted after {n} of {capacity} returns"
                ));
                StpStatus::BudgetExhausted
            }
        }
        Err(e) => fail(e),
    }
}

/// Hit count of the multiplicative expanding map: the number of `k <= h`
/// with `k alpha mod 1` inside `B(x, scale / k)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn stp_hit_count_expanding_harmonic(
    alpha: *const c_char,
    x: *const c_char,
    scale: *const c_char,
    horizon: u64,
    out: *mut u64,
) -> StpStatus {
    if out.is_null() {
        set_error("null output".into());
        return StpStatus::NullPointer;
    }
    let alpha = match parse_c_rational(alpha) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let x = match parse_c_rational(x) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let scale = match parse_c_rational(scale) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let seq = match radius::RadiusSequence::monotone(radius::Profile::Harmonic { scale }) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match experiment::hit_count(
        &SystemSpec::MultExpanding,
        &circle::TorusPoint::scalar(point(alpha)),
        &circle::TorusPoint::scalar(point(x)),
        &seq,
        horizon,
        false,
    ) {
        Ok(r) => {
            *out = r.count;
            StpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn classify_through_the_abi() {
        unsafe {
            let mut m: *mut StpMeasure = std::ptr::null_mut();
            assert_eq!(stp_measure_cantor(0, &mut m), StpStatus::Ok);
            let mut kind = StpSupportKind::BothSides;
            let mut partner = [0i8; 64];
            let mut gap = [0i8; 64];
            let status = stp_measure_classify(
                m,
                c("1/3").as_ptr(),
                c("1/1099511627776").as_ptr(),
                &mut kind,
                partner.as_mut_ptr() as *mut c_char,
                gap.as_mut_ptr() as *mut c_char,
                64,
            );
            assert_eq!(status, StpStatus::Ok);
            assert_eq!(kind, StpSupportKind::IsolatedRight);
            let partner = CStr::from_ptr(partner.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            let gap = CStr::from_ptr(gap.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            assert_eq!(partner, "2/3");
            assert_eq!(gap, "1/3");
            stp_measure_free(m);
        }
    }

    #[test]
    fn t_sequence_and_dist_round_trip_strings() {
        unsafe {
            let mut m: *mut StpMeasure = std::ptr::null_mut();
            assert_eq!(stp_measure_lebesgue(&mut m), StpStatus::Ok);
            let mut buf = [0i8; 64];
            let mut needed = 0usize;
            let status = stp_measure_t_sequence(
                m,
                c("0").as_ptr(),
                4,
                c("1/1000000000000").as_ptr(),
                buf.as_mut_ptr() as *mut c_char,
                64,
                &mut needed,
            );
            assert_eq!(status, StpStatus::Ok);
            let t = CStr::from_ptr(buf.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            assert_eq!(t, "1/8");
            stp_measure_free(m);

            let status = stp_circle_dist(
                c("1/10").as_ptr(),
                c("9/10").as_ptr(),
                buf.as_mut_ptr() as *mut c_char,
                64,
                &mut needed,
            );
            assert_eq!(status, StpStatus::Ok);
            let d = CStr::from_ptr(buf.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            assert_eq!(d, "1/5");
        }
    }

    #[test]
    fn buffer_too_small_reports_needed_size() {
        unsafe {
            let mut buf = [0i8; 2];
            let mut needed = 0usize;
            let status = stp_circle_dist(
                c("1/10").as_ptr(),
                c("9/10").as_ptr(),
                buf.as_mut_ptr() as *mut c_char,
                2,
                &mut needed,
            );
            assert_eq!(status, StpStatus::BufferTooSmall);
            assert_eq!(needed, 4); // "1/5" plus NUL
        }
    }

    #[test]
    fn union_measure_through_the_abi() {
        unsafe {
            let centers = [c("1/10"), c("2/10")];
            let radii = [c("1/10"), c("1/10")];
            let c_ptrs: Vec<*const c_char> = centers.iter().map(|s| s.as_ptr()).collect();
            let r_ptrs: Vec<*const c_char> = radii.iter().map(|s| s.as_ptr()).collect();
            let mut buf = [0i8; 64];
            let status = stp_union_measure(
                c_ptrs.as_ptr(),
                r_ptrs.as_ptr(),
                2,
                buf.as_mut_ptr() as *mut c_char,
                64,
                std::ptr::null_mut(),
            );
            assert_eq!(status, StpStatus::Ok);
            let v = CStr::from_ptr(buf.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            assert_eq!(v, "3/10"); // overlapping balls merge
        }
    }

    #[test]
    fn golden_recurrence_through_the_abi() {
        unsafe {
            let mut s: *mut StpSystem = std::ptr::null_mut();
            assert_eq!(stp_system_rotation_golden(256, &mut s), StpStatus::Ok);
            let mut times = [0u64; 6];
            let mut dists = [0f64; 6];
            let mut found = 0usize;
            let status = stp_recurrence_times(
                s,
                c("0").as_ptr(),
                6,
                10_000,
                times.as_mut_ptr(),
                dists.as_mut_ptr(),
                &mut found,
            );
            assert_eq!(status, StpStatus::Ok);
            assert_eq!(found, 6);
            assert_eq!(times, [1, 2, 3, 5, 8, 13]);
            stp_system_free(s);
        }
    }

    #[test]
    fn errors_set_messages() {
        unsafe {
            let mut out = 0f64;
            let mut m: *mut StpMeasure = std::ptr::null_mut();
            assert_eq!(stp_measure_lebesgue(&mut m), StpStatus::Ok);
            let status = stp_measure_interval(m, c("bogus").as_ptr(), c("1/2").as_ptr(), &mut out);
            assert_eq!(status, StpStatus::InvalidArgument);
            let msg = CStr::from_ptr(stp_last_error_message()).to_str().unwrap();
            assert!(msg.contains("bogus"));
            stp_measure_free(m);
        }
    }
}
