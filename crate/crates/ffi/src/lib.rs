//! C ABI for the tfqm toolkit.
//!
//! States are built from the same JSON definition documents the CLI
//! reads, held behind an opaque handle, and queried through plain
//! double/integer out-parameters. Every function returns a [`TfqmStatus`];
//! on any non-OK status a human-readable message is available from
//! [`tfqm_last_error_message`] until the next failing call on the same
//! thread.
//!
//! The generated header lives at `include/tfqm.h` (regenerated by the
//! build script via cbindgen).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tfqm::metrology::{
    coherent_variance, default_overlap_step, overlap_qfi, scaling_sweep, CollectiveGenerator,
};
use tfqm::phasespace::schmidt;
use tfqm::statedef::{self, RealizedState, StateSpec};

/// Result of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfqmStatus {
    /// Success.
    TfqmOk = 0,
    /// A pointer argument was null.
    TfqmNullPointer = 1,
    /// The state definition failed to parse or validate.
    TfqmParseError = 2,
    /// Arguments were structurally valid but out of range.
    TfqmInvalidArgument = 3,
    /// The computation rejected the state (see the error message).
    TfqmComputeError = 4,
    /// A panic was caught at the boundary; this indicates a bug.
    TfqmInternalError = 5,
}

/// Opaque state handle: a validated definition plus its sign vector.
pub struct TfqmState {
    spec: StateSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
}

fn guard<F: FnOnce() -> TfqmStatus>(f: F) -> TfqmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            TfqmStatus::TfqmInternalError
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing tfqm call on the same thread. Never
/// null.
#[no_mangle]
pub extern "C" fn tfqm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a JSON state definition (NUL-terminated UTF-8) into a new state
/// handle. On success writes the handle to `out_state`; the caller frees
/// it with [`tfqm_state_free`].
///
/// # Safety
/// `json` must point to a valid NUL-terminated string and `out_state` to
/// writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tfqm_state_from_json(
    json: *const c_char,
    out_state: *mut *mut TfqmState,
) -> TfqmStatus {
    guard(|| {
        if json.is_null() || out_state.is_null() {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("state definition is not valid UTF-8");
                return TfqmStatus::TfqmParseError;
            }
        };
        match statedef::parse(text) {
            Ok(spec) => {
                let handle = Box::new(TfqmState { spec });
                unsafe { *out_state = Box::into_raw(handle) };
                TfqmStatus::TfqmOk
            }
            Err(e) => {
                set_error(format!("[{}] {}", e.class(), e));
                TfqmStatus::TfqmParseError
            }
        }
    })
}

/// Free a state handle. Null is a no-op.
///
/// # Safety
/// `state` must be null or a pointer previously returned by
/// [`tfqm_state_from_json`] that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn tfqm_state_free(state: *mut TfqmState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

unsafe fn state_ref<'a>(state: *const TfqmState) -> Option<&'a TfqmState> {
    unsafe { state.as_ref() }
}

/// Number of photons of the state.
///
/// # Safety
/// `state` must be a live handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfqm_state_photon_count(
    state: *const TfqmState,
    out_count: *mut usize,
) -> TfqmStatus {
    guard(|| {
        let (Some(s), false) = (unsafe { state_ref(state) }, out_count.is_null()) else {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        };
        unsafe { *out_count = s.spec.family.photon_count() };
        TfqmStatus::TfqmOk
    })
}

fn variance_of(spec: &StateSpec) -> Result<f64, String> {
    match statedef::realize(spec).map_err(|e| format!("[{}] {}", e.class(), e))? {
        RealizedState::Gaussian(g) => g
            .collective_variance(&spec.alphas)
            .map_err(|e| e.to_string()),
        RealizedState::Coherent(c) => coherent_variance(&c).map_err(|e| e.to_string()),
    }
}

/// Variance of the collective generator Σ α_i ω̂_i in the state.
///
/// # Safety
/// `state` must be a live handle; `out_variance` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfqm_collective_variance(
    state: *const TfqmState,
    out_variance: *mut f64,
) -> TfqmStatus {
    guard(|| {
        let (Some(s), false) = (unsafe { state_ref(state) }, out_variance.is_null()) else {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        };
        match variance_of(&s.spec) {
            Ok(v) => {
                unsafe { *out_variance = v };
                TfqmStatus::TfqmOk
            }
            Err(message) => {
                set_error(message);
                TfqmStatus::TfqmComputeError
            }
        }
    })
}

/// Generator variance, quantum Fisher information (4 × variance) and the
/// Cramér–Rao bound 1/√(ν·QFI) for ν repetitions. Any out-pointer may be
/// null to skip that value.
///
/// # Safety
/// `state` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfqm_qfi(
    state: *const TfqmState,
    nu: u64,
    out_variance: *mut f64,
    out_qfi: *mut f64,
    out_crb: *mut f64,
) -> TfqmStatus {
    guard(|| {
        let Some(s) = (unsafe { state_ref(state) }) else {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        };
        if nu < 1 {
            set_error("nu must be at least 1");
            return TfqmStatus::TfqmInvalidArgument;
        }
        let variance = match variance_of(&s.spec) {
            Ok(v) => v,
            Err(message) => {
                set_error(message);
                return TfqmStatus::TfqmComputeError;
            }
        };
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        if !(variance > 0.0) {
            set_error(format!("variance must be positive (got {variance})"));
            return TfqmStatus::TfqmComputeError;
        }
        let qfi = 4.0 * variance;
        unsafe {
            if !out_variance.is_null() {
                *out_variance = variance;
            }
            if !out_qfi.is_null() {
                *out_qfi = qfi;
            }
            if !out_crb.is_null() {
                *out_crb = 1.0 / (nu as f64 * qfi).sqrt();
            }
        }
        TfqmStatus::TfqmOk
    })
}

/// Quantum Fisher information by the finite-difference overlap route on
/// the grid representation. `dtheta <= 0` selects the default step
/// 0.01/ΔΩ. Requires a two-photon state.
///
/// # Safety
/// `state` must be a live handle; `out_qfi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfqm_overlap_qfi(
    state: *const TfqmState,
    dtheta: f64,
    out_qfi: *mut f64,
) -> TfqmStatus {
    guard(|| {
        let (Some(s), false) = (unsafe { state_ref(state) }, out_qfi.is_null()) else {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        };
        let compute = || -> Result<f64, String> {
            let j = statedef::realize_jsa(&s.spec).map_err(|e| format!("[{}] {}", e.class(), e))?;
            let step = if dtheta > 0.0 {
                dtheta
            } else {
                default_overlap_step(&j, &s.spec.alphas).map_err(|e| e.to_string())?
            };
            overlap_qfi(&j, &s.spec.alphas, step).map_err(|e| e.to_string())
        };
        match compute() {
            Ok(f) => {
                unsafe { *out_qfi = f };
                TfqmStatus::TfqmOk
            }
            Err(message) => {
                set_error(message);
                TfqmStatus::TfqmComputeError
            }
        }
    })
}

/// Schmidt entanglement measures of a two-photon state: entropy in bits
/// and the participation ratio (Schmidt number). Either out-pointer may be
/// null.
///
/// # Safety
/// `state` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfqm_schmidt_entropy(
    state: *const TfqmState,
    out_entropy_bits: *mut f64,
    out_schmidt_number: *mut f64,
) -> TfqmStatus {
    guard(|| {
        let Some(s) = (unsafe { state_ref(state) }) else {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        };
        let compute = || -> Result<(f64, f64), String> {
            let j = statedef::realize_jsa(&s.spec).map_err(|e| format!("[{}] {}", e.class(), e))?;
            let r = schmidt(&j).map_err(|e| e.to_string())?;
            Ok((r.entropy_bits, r.schmidt_number))
        };
        match compute() {
            Ok((entropy, number)) => {
                unsafe {
                    if !out_entropy_bits.is_null() {
                        *out_entropy_bits = entropy;
                    }
                    if !out_schmidt_number.is_null() {
                        *out_schmidt_number = number;
                    }
                }
                TfqmStatus::TfqmOk
            }
            Err(message) => {
                set_error(message);
                TfqmStatus::TfqmComputeError
            }
        }
    })
}

/// Collective variance of the correlated n-photon family at correlation
/// `eta` for each entry of `n_values`, written to `out_variances`
/// (same length). `out_transition_n` (nullable) receives η/(1−η), or
/// +inf at η = 1.
///
/// # Safety
/// `n_values` must point to `len` readable u64 values, `out_variances` to
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tfqm_scaling_sweep(
    eta: f64,
    delta_omega: f64,
    n_values: *const u64,
    len: usize,
    out_variances: *mut f64,
    out_transition_n: *mut f64,
) -> TfqmStatus {
    guard(|| {
        if n_values.is_null() || out_variances.is_null() {
            set_error("null pointer argument");
            return TfqmStatus::TfqmNullPointer;
        }
        if len == 0 {
            set_error("len must be at least 1");
            return TfqmStatus::TfqmInvalidArgument;
        }
        let n_list: Vec<u64> = unsafe { std::slice::from_raw_parts(n_values, len) }.to_vec();
        match scaling_sweep(eta, delta_omega, &n_list) {
            Ok(report) => {
                for (i, p) in report.points.iter().enumerate() {
                    unsafe { *out_variances.add(i) = p.variance };
                }
                if !out_transition_n.is_null() {
                    unsafe { *out_transition_n = report.transition_n };
                }
                TfqmStatus::TfqmOk
            }
            Err(e) => {
                set_error(e.to_string());
                TfqmStatus::TfqmInvalidArgument
            }
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tfqm_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    fn build(json: &str) -> *mut TfqmState {
        let c = CString::new(json).unwrap();
        let mut state: *mut TfqmState = ptr::null_mut();
        let status = unsafe { tfqm_state_from_json(c.as_ptr(), &mut state) };
        assert_eq!(status, TfqmStatus::TfqmOk, "{}", last_error());
        state
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(tfqm_last_error_message()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn round_trip_variance_and_qfi() {
        let state = build(
            r#"{"schema":1,"family":"heisenberg","n":2,"delta_omega":1.0,"eta":0.99}"#,
        );
        let mut count = 0usize;
        assert_eq!(
            unsafe { tfqm_state_photon_count(state, &mut count) },
            TfqmStatus::TfqmOk
        );
        assert_eq!(count, 2);

        let mut variance = 0.0;
        assert_eq!(
            unsafe { tfqm_collective_variance(state, &mut variance) },
            TfqmStatus::TfqmOk
        );
        assert!((variance - 4.0 / 1.01).abs() < 1e-12);

        let (mut v, mut q, mut c) = (0.0, 0.0, 0.0);
        assert_eq!(
            unsafe { tfqm_qfi(state, 4, &mut v, &mut q, &mut c) },
            TfqmStatus::TfqmOk
        );
        assert_eq!(q, 4.0 * v);
        assert!((c - 1.0 / (16.0 * v).sqrt()).abs() < 1e-15);
        unsafe { tfqm_state_free(state) };
    }

    #[test]
    fn overlap_route_agrees_with_variance_route() {
        let state = build(
            r#"{"schema":1,"family":"gaussian-pair","delta_omega":1.0,"rho":0.6,
                "mean1":0.0,"mean2":0.0,
                "grid":{"omega_min":-8.0,"omega_max":8.0,"n_points":161}}"#,
        );
        let mut variance = 0.0;
        unsafe { tfqm_collective_variance(state, &mut variance) };
        let mut qfi = 0.0;
        assert_eq!(
            unsafe { tfqm_overlap_qfi(state, 0.0, &mut qfi) },
            TfqmStatus::TfqmOk,
            "{}",
            last_error()
        );
        assert!((qfi - 4.0 * variance).abs() / (4.0 * variance) < 1e-3);
        unsafe { tfqm_state_free(state) };
    }

    #[test]
    fn schmidt_measures_flow_through() {
        let state = build(
            r#"{"schema":1,"family":"gaussian-pair","delta_omega":1.7320508075688772,
                "rho":-0.6666666666666666,"mean1":0.0,"mean2":0.0,
                "grid":{"omega_min":-9.0,"omega_max":9.0,"n_points":192}}"#,
        );
        let (mut entropy, mut number) = (0.0, 0.0);
        assert_eq!(
            unsafe { tfqm_schmidt_entropy(state, &mut entropy, &mut number) },
            TfqmStatus::TfqmOk,
            "{}",
            last_error()
        );
        assert!(entropy > 0.5, "entropy {entropy}");
        assert!(number > 1.0);
        unsafe { tfqm_state_free(state) };
    }

    #[test]
    fn sweep_fills_caller_buffers() {
        let n = [1u64, 2, 4, 8];
        let mut variances = [0.0f64; 4];
        let mut transition = 0.0f64;
        let status = unsafe {
            tfqm_scaling_sweep(
                0.99,
                1.0,
                n.as_ptr(),
                n.len(),
                variances.as_mut_ptr(),
                &mut transition,
            )
        };
        assert_eq!(status, TfqmStatus::TfqmOk, "{}", last_error());
        assert!((transition - 99.0).abs() < 1e-9);
        for (nv, v) in n.iter().zip(&variances) {
            let nf = *nv as f64;
            let expected = nf * nf / (nf * 0.01 + 0.99);
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        let c = CString::new(r#"{"schema":1,"family":"nope"}"#).unwrap();
        let mut state: *mut TfqmState = ptr::null_mut();
        let status = unsafe { tfqm_state_from_json(c.as_ptr(), &mut state) };
        assert_eq!(status, TfqmStatus::TfqmParseError);
        assert!(state.is_null());
        assert!(last_error().contains("SchemaError"));

        let mut v = 0.0;
        assert_eq!(
            unsafe { tfqm_collective_variance(ptr::null(), &mut v) },
            TfqmStatus::TfqmNullPointer
        );

        // Compute error: three photons cannot bridge to a pair amplitude.
        let state = build(r#"{"schema":1,"family":"separable","n":3,"delta_omega":1.0}"#);
        let mut qfi = 0.0;
        assert_eq!(
            unsafe { tfqm_overlap_qfi(state, 0.0, &mut qfi) },
            TfqmStatus::TfqmComputeError
        );
        unsafe { tfqm_state_free(state) };
    }

    #[test]
    fn version_is_a_c_string() {
        let v = unsafe { CStr::from_ptr(tfqm_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
