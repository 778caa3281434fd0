//! C ABI for `photon-focus`.
//!
//! Every fallible function returns a [`PfStatus`] and writes its result
//! through an out-pointer. On failure a human-readable message is available
//! from [`pf_last_error_message`] on the same thread. Objects are handed out
//! as opaque pointers and must be released with the matching `*_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use photon_focus::analysis::{self, AngleGrid, RouteChoice, SweepResult};
use photon_focus::correlations::{self, Route};
use photon_focus::{geometry, DetectionConfig, EmitterChain, Error, PureState};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    InvalidInput = 1,
    DegenerateState = 2,
    Estimation = 3,
    NullPointer = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Correlation route selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfRoute {
    /// Closed form for sweeps; quantum paths for single evaluations.
    Auto = 0,
    Paths = 1,
    Operator = 2,
    ClosedForm = 3,
}

impl From<PfRoute> for RouteChoice {
    fn from(r: PfRoute) -> Self {
        match r {
            PfRoute::Auto => RouteChoice::Auto,
            PfRoute::Paths => RouteChoice::Paths,
            PfRoute::Operator => RouteChoice::Operator,
            PfRoute::ClosedForm => RouteChoice::ClosedForm,
        }
    }
}

/// Opaque emitter chain.
pub struct PfChain(EmitterChain);

/// Opaque register state.
pub struct PfState(PureState);

/// Opaque sweep result.
pub struct PfSweep(SweepResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidInput(_) => PfStatus::InvalidInput,
            Error::DegenerateState(_) => PfStatus::DegenerateState,
            Error::Estimation(_) => PfStatus::Estimation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PfStatus::NullPointer, format!("null pointer: {what}"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            PfStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn in_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn in_slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_chain_new(n_emitters: usize, kd: f64, out: *mut *mut PfChain) -> PfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let chain = EmitterChain::new(n_emitters, kd)?;
        *out = Box::into_raw(Box::new(PfChain(chain)));
        Ok(())
    })
}

/// # Safety
/// `chain` must be NULL or a pointer returned by [`pf_chain_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_chain_free(chain: *mut PfChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// # Safety
/// `chain` must be a live chain handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_chain_n_emitters(chain: *const PfChain, out: *mut usize) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(chain, "chain")?.0.n_emitters();
        Ok(())
    })
}

/// Optical phase `-l kd sin(theta)` of emitter `l` (1-based).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_phase(l: usize, theta: f64, kd: f64, out: *mut f64) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = geometry::phase(l, theta, kd)?;
        Ok(())
    })
}

/// Permanent of an `m x m` complex matrix given row-major as interleaved
/// `(re, im)` pairs, `2 m^2` doubles in total.
///
/// # Safety
/// `entries` must point to `2 * m * m` readable doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pf_permanent(entries: *const f64, m: usize, out_re: *mut f64, out_im: *mut f64) -> PfStatus {
    guard(|| {
        let raw = in_slice(entries, 2 * m * m, "entries")?;
        let values: Vec<Complex64> = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let matrix = ndarray::Array2::from_shape_vec((m, m), values)
            .map_err(|e| Failure(PfStatus::InvalidInput, e.to_string()))?;
        let p = correlations::permanent(&matrix)?;
        *out_ref(out_re, "out_re")? = p.re;
        *out_ref(out_im, "out_im")? = p.im;
        Ok(())
    })
}

/// `G^(m)` for `m` detectors at `angles`. `PF_ROUTE_CLOSED_FORM` requires
/// the first `m - 1` angles to be equal.
///
/// # Safety
/// `chain` must be a live handle, `angles` must point to `m` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_g_m(
    chain: *const PfChain,
    angles: *const f64,
    m: usize,
    route: PfRoute,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        let chain = &in_ref(chain, "chain")?.0;
        let angles = in_slice(angles, m, "angles")?;
        let det = DetectionConfig::new(angles.to_vec())?;
        let value = match route {
            PfRoute::Auto | PfRoute::Paths => correlations::g_m_paths(chain, &det)?.value,
            PfRoute::Operator => correlations::g_m_operator(chain, &det)?.value,
            PfRoute::ClosedForm => {
                let theta1 = angles[0];
                if angles[..m - 1].iter().any(|&a| a != theta1) {
                    return Err(Failure(
                        PfStatus::InvalidInput,
                        "closed form needs the first m-1 detectors at one angle".into(),
                    ));
                }
                correlations::g_m_closed_form(chain.n_emitters(), m, theta1, angles[m - 1], chain.kd())?.value
            }
        };
        *out_ref(out, "out")? = value;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_g_m_closed_form(
    n: usize,
    m: usize,
    theta1: f64,
    theta2: f64,
    kd: f64,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = correlations::g_m_closed_form(n, m, theta1, theta2, kd)?.value;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_visibility_closed_form(n: usize, m: usize, out: *mut f64) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = correlations::visibility_closed_form(n, m)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_fwhm_predicted(n: usize, kd: f64, out: *mut f64) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = correlations::fwhm_predicted(n, kd)?;
        Ok(())
    })
}

fn emit_state(out: &mut *mut PfState, state: PureState) {
    *out = Box::into_raw(Box::new(PfState(state)));
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_fully_excited(n: usize, out: *mut *mut PfState) -> PfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        emit_state(out, PureState::fully_excited(n)?);
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_w(n: usize, out: *mut *mut PfState) -> PfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        emit_state(out, PureState::w_state(n)?);
        Ok(())
    })
}

/// Normalized register state after detections at `angles[0..k]`.
///
/// # Safety
/// `chain` must be a live handle, `angles` must point to `k` doubles (may be
/// NULL when `k == 0`) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_conditional(
    chain: *const PfChain,
    angles: *const f64,
    k: usize,
    out: *mut *mut PfState,
) -> PfStatus {
    guard(|| {
        let chain = &in_ref(chain, "chain")?.0;
        let angles = in_slice(angles, k, "angles")?;
        let out = out_ref(out, "out")?;
        emit_state(out, PureState::conditional_state(chain, angles)?);
        Ok(())
    })
}

/// Unnormalized result of one far-field operator application.
///
/// # Safety
/// `state` and `chain` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_apply_field(
    state: *const PfState,
    theta: f64,
    chain: *const PfChain,
    out: *mut *mut PfState,
) -> PfStatus {
    guard(|| {
        let state = &in_ref(state, "state")?.0;
        let chain = &in_ref(chain, "chain")?.0;
        let out = out_ref(out, "out")?;
        emit_state(out, state.apply_field(theta, chain)?);
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_norm_sq(state: *const PfState, out: *mut f64) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(state, "state")?.0.norm_sq();
        Ok(())
    })
}

/// `<a|b>`.
///
/// # Safety
/// `a` and `b` must be live handles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_overlap(
    a: *const PfState,
    b: *const PfState,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PfStatus {
    guard(|| {
        let v = in_ref(a, "a")?.0.overlap(&in_ref(b, "b")?.0)?;
        *out_ref(out_re, "out_re")? = v.re;
        *out_ref(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// Number of stored basis terms.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_len(state: *const PfState, out: *mut usize) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(state, "state")?.0.amplitudes().len();
        Ok(())
    })
}

/// Basis term `index` (in ascending mask order). Bit `l - 1` of the mask is
/// set when atom `l` is in the ground level.
///
/// # Safety
/// `state` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pf_state_entry(
    state: *const PfState,
    index: usize,
    out_ground_mask: *mut u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PfStatus {
    guard(|| {
        let state = &in_ref(state, "state")?.0;
        let (set, amp) = state.amplitudes().iter().nth(index).ok_or_else(|| {
            Failure(
                PfStatus::InvalidInput,
                format!("index {index} beyond {} terms", state.amplitudes().len()),
            )
        })?;
        *out_ref(out_ground_mask, "out_ground_mask")? = set.mask();
        *out_ref(out_re, "out_re")? = amp.re;
        *out_ref(out_im, "out_im")? = amp.im;
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a live state handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_state_free(state: *mut PfState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Mean intensity at `theta2` emitted by a normalized state.
///
/// # Safety
/// `state` and `chain` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_g1_conditional(
    state: *const PfState,
    theta2: f64,
    chain: *const PfChain,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        let state = &in_ref(state, "state")?.0;
        let chain = &in_ref(chain, "chain")?.0;
        *out_ref(out, "out")? = correlations::g1_conditional(state, theta2, chain)?;
        Ok(())
    })
}

/// Sweeps `theta2` over `points` uniform angles in `[-pi/2, pi/2]` with
/// `m - 1` detectors fixed at `theta1`.
///
/// # Safety
/// `chain` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep(
    chain: *const PfChain,
    m: usize,
    theta1: f64,
    points: usize,
    route: PfRoute,
    out: *mut *mut PfSweep,
) -> PfStatus {
    guard(|| {
        let chain = &in_ref(chain, "chain")?.0;
        let out = out_ref(out, "out")?;
        let grid = AngleGrid::full(points)?;
        let result = analysis::sweep(chain, m, theta1, &grid, route.into())?;
        *out = Box::into_raw(Box::new(PfSweep(result)));
        Ok(())
    })
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_len(sweep: *const PfSweep, out: *mut usize) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = in_ref(sweep, "sweep")?.0.len();
        Ok(())
    })
}

/// Route actually used by the sweep.
///
/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_route(sweep: *const PfSweep, out: *mut PfRoute) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = match in_ref(sweep, "sweep")?.0.meta.route {
            Route::Paths => PfRoute::Paths,
            Route::Operator => PfRoute::Operator,
            Route::ClosedForm => PfRoute::ClosedForm,
        };
        Ok(())
    })
}

/// Copies the sweep into caller buffers of capacity `capacity`. Any of the
/// three buffers may be NULL to skip it.
///
/// # Safety
/// Non-NULL buffers must each hold `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_copy(
    sweep: *const PfSweep,
    angles: *mut f64,
    values: *mut f64,
    normalized: *mut f64,
    capacity: usize,
) -> PfStatus {
    guard(|| {
        let s = &in_ref(sweep, "sweep")?.0;
        if capacity < s.len() {
            return Err(Failure(
                PfStatus::BufferTooSmall,
                format!("buffer holds {capacity}, sweep has {}", s.len()),
            ));
        }
        for (dst, src) in [(angles, &s.angles), (values, &s.values), (normalized, &s.normalized)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
            }
        }
        Ok(())
    })
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_fwhm(sweep: *const PfSweep, out: *mut f64) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = analysis::estimate_fwhm(&in_ref(sweep, "sweep")?.0)?;
        Ok(())
    })
}

/// # Safety
/// `sweep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_visibility(sweep: *const PfSweep, out: *mut f64) -> PfStatus {
    guard(|| {
        *out_ref(out, "out")? = analysis::estimate_visibility(&in_ref(sweep, "sweep")?.0)?;
        Ok(())
    })
}

/// # Safety
/// `sweep` must be NULL or a live sweep handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_sweep_free(sweep: *mut PfSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Seeded cross-check of all correlation routes.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_verify_routes(
    n_max: usize,
    trials: usize,
    seed: u64,
    out_passed: *mut bool,
    out_max_discrepancy: *mut f64,
) -> PfStatus {
    guard(|| {
        let report = analysis::verify_routes(n_max, trials, seed)?;
        *out_ref(out_passed, "out_passed")? = report.passed;
        *out_ref(out_max_discrepancy, "out_max_discrepancy")? = report.max_route_discrepancy;
        Ok(())
    })
}
