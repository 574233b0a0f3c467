//! C ABI for the spinboson library.
//!
//! Conventions:
//! - Every function returns an [`SbStatus`] code; output values go
//!   through out-pointers.
//! - `SbBath`, `SbLayout` and `SbMatrix` are opaque handles created by
//!   `*_new` and released by the matching `*_free`. A `free` on NULL is
//!   a no-op.
//! - All pointers must be valid for the duration of the call; arrays
//!   carry explicit lengths. Nothing is retained across calls.
//! - Panics are caught at the boundary and reported as
//!   `SB_STATUS_INTERNAL_ERROR`.
//!
//! The matching header is maintained at `include/spinboson.h`; the
//! `header_matches_exports` test keeps the two in sync.

use std::os::raw::{c_char, c_double, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use spinboson::config::RunConfig;
use spinboson::correlation::{build_contraction_matrix, Channel, ContractionMatrix, QubitLayout};
use spinboson::dfs::{collective_z_residual, dfs_decoupling_check, RegisterState};
use spinboson::error::Error;
use spinboson::quad::QuadOptions;
use spinboson::threshold::{self, Prefactor, ThresholdQuery};
use spinboson::wick::{gaussian_moment, matching_count, ErrorPattern};
use spinboson::{bath, BathSpec, KernelQuery};

/// Status codes returned by every API function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IntegrationFailed = 3,
    CapacityExceeded = 4,
    DimensionMismatch = 5,
    UndefinedRatio = 6,
    InternalError = 7,
}

fn status_of(err: &Error) -> SbStatus {
    match err {
        Error::Domain(_) | Error::Config(_) | Error::InvariantViolation(_) | Error::Resonance { .. } => {
            SbStatus::InvalidArgument
        }
        Error::IntegrationFailure { .. } | Error::ExtrapolationDiverged { .. } => {
            SbStatus::IntegrationFailed
        }
        Error::KernelFailure { source, .. } => status_of(source),
        Error::Capacity(_) | Error::TruncationTail { .. } => SbStatus::CapacityExceeded,
        Error::DimensionMismatch(_) | Error::OddRegister { .. } => SbStatus::DimensionMismatch,
        Error::UndefinedRatio(_) => SbStatus::UndefinedRatio,
        _ => SbStatus::InternalError,
    }
}

/// Opaque bath parameter set.
pub struct SbBath(BathSpec, QuadOptions);
/// Opaque qubit layout.
pub struct SbLayout(QubitLayout);
/// Opaque contraction matrix.
pub struct SbMatrix(ContractionMatrix);

/// Channel selectors for `sb_contraction_matrix_new`.
pub const SB_CHANNEL_DEPHASING_Z: c_int = 0;
pub const SB_CHANNEL_BITFLIP_Z: c_int = 1;
pub const SB_CHANNEL_BITFLIP_Y: c_int = 2;

fn channel_of(raw: c_int) -> Option<Channel> {
    match raw {
        SB_CHANNEL_DEPHASING_Z => Some(Channel::DephasingZ),
        SB_CHANNEL_BITFLIP_Z => Some(Channel::BitflipZ),
        SB_CHANNEL_BITFLIP_Y => Some(Channel::BitflipY),
        _ => None,
    }
}

fn guarded<F: FnOnce() -> SbStatus>(f: F) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => SbStatus::InternalError,
    }
}

/// Human-readable description of a status code (static storage).
#[no_mangle]
pub extern "C" fn sb_status_message(status: SbStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        SbStatus::Ok => b"ok\0",
        SbStatus::NullPointer => b"null pointer argument\0",
        SbStatus::InvalidArgument => b"invalid argument\0",
        SbStatus::IntegrationFailed => b"quadrature did not converge\0",
        SbStatus::CapacityExceeded => b"capacity exceeded\0",
        SbStatus::DimensionMismatch => b"dimension mismatch\0",
        SbStatus::UndefinedRatio => b"undefined ratio\0",
        SbStatus::InternalError => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Library version (static storage).
#[no_mangle]
pub extern "C" fn sb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Create a bath handle. `abs_tol`/`rel_tol` <= 0 select the defaults.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sb_bath_new(
    coupling_strength: c_double,
    spectral_exponent: c_double,
    cutoff: c_double,
    sound_speed: c_double,
    temperature: c_double,
    abs_tol: c_double,
    rel_tol: c_double,
    out: *mut *mut SbBath,
) -> SbStatus {
    if out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        match BathSpec::new(
            coupling_strength,
            spectral_exponent,
            cutoff,
            sound_speed,
            temperature,
        ) {
            Ok(spec) => {
                let mut quad = QuadOptions::default();
                if abs_tol > 0.0 {
                    quad.abs_tol = abs_tol;
                }
                if rel_tol > 0.0 {
                    quad.rel_tol = rel_tol;
                }
                unsafe { *out = Box::into_raw(Box::new(SbBath(spec, quad))) };
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `bath` must come from `sb_bath_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sb_bath_free(bath: *mut SbBath) {
    if !bath.is_null() {
        drop(unsafe { Box::from_raw(bath) });
    }
}

/// Create a layout handle from `n` positions stored as 3 doubles each.
///
/// # Safety
/// `positions` must point to `3 * n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_layout_new(
    positions: *const c_double,
    n: usize,
    splitting: c_double,
    out: *mut *mut SbLayout,
) -> SbStatus {
    if positions.is_null() || out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let flat = unsafe { std::slice::from_raw_parts(positions, 3 * n) };
        let pts: Vec<[f64; 3]> = flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        match QubitLayout::new(pts, splitting) {
            Ok(layout) => {
                unsafe { *out = Box::into_raw(Box::new(SbLayout(layout))) };
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `layout` must come from `sb_layout_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sb_layout_free(layout: *mut SbLayout) {
    if !layout.is_null() {
        drop(unsafe { Box::from_raw(layout) });
    }
}

/// coth(omega / 2T); exactly 1 at T = 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_thermal_factor(
    omega: c_double,
    temperature: c_double,
    out: *mut c_double,
) -> SbStatus {
    if out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| match bath::thermal_factor(omega, temperature) {
        Ok(v) => {
            unsafe { *out = v };
            SbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn kernel_common(
    bath_handle: *const SbBath,
    separation: c_double,
    time: c_double,
    splitting: c_double,
    dephasing: bool,
    out_value: *mut c_double,
    out_error: *mut c_double,
    out_resonance: *mut c_int,
) -> SbStatus {
    if bath_handle.is_null() || out_value.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let SbBath(spec, quad) = unsafe { &*bath_handle };
        let query = match KernelQuery::new(separation, time, splitting) {
            Ok(q) => q,
            Err(e) => return status_of(&e),
        };
        let result = if dephasing {
            bath::dephasing_kernel(spec, &query, quad)
        } else {
            bath::bitflip_kernel(spec, &query, quad)
        };
        match result {
            Ok(k) => {
                unsafe {
                    *out_value = k.value;
                    if !out_error.is_null() {
                        *out_error = k.abs_error;
                    }
                    if !out_resonance.is_null() {
                        *out_resonance = k.resonance_dominated as c_int;
                    }
                }
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Equal-time dephasing kernel C(R, t). `out_error` may be NULL.
///
/// # Safety
/// Pointer arguments must be valid or NULL where documented.
#[no_mangle]
pub unsafe extern "C" fn sb_dephasing_kernel(
    bath: *const SbBath,
    separation: c_double,
    time: c_double,
    out_value: *mut c_double,
    out_error: *mut c_double,
) -> SbStatus {
    unsafe {
        kernel_common(
            bath,
            separation,
            time,
            0.0,
            true,
            out_value,
            out_error,
            std::ptr::null_mut(),
        )
    }
}

/// Equal-time bit-flip kernel. `out_error` / `out_resonance_dominated`
/// may be NULL.
///
/// # Safety
/// Pointer arguments must be valid or NULL where documented.
#[no_mangle]
pub unsafe extern "C" fn sb_bitflip_kernel(
    bath: *const SbBath,
    separation: c_double,
    time: c_double,
    splitting: c_double,
    out_value: *mut c_double,
    out_error: *mut c_double,
    out_resonance_dominated: *mut c_int,
) -> SbStatus {
    unsafe {
        kernel_common(
            bath,
            separation,
            time,
            splitting,
            false,
            out_value,
            out_error,
            out_resonance_dominated,
        )
    }
}

/// Bath-mediated ZZ coupling constant (principal value for splitting > 0).
///
/// # Safety
/// Pointer arguments must be valid or NULL where documented.
#[no_mangle]
pub unsafe extern "C" fn sb_effective_zz_coupling(
    bath: *const SbBath,
    separation: c_double,
    splitting: c_double,
    out_value: *mut c_double,
    out_error: *mut c_double,
) -> SbStatus {
    if bath.is_null() || out_value.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let SbBath(spec, quad) = unsafe { &*bath };
        match bath::effective_zz_coupling(spec, separation, splitting, quad) {
            Ok(k) => {
                unsafe {
                    *out_value = k.value;
                    if !out_error.is_null() {
                        *out_error = k.abs_error;
                    }
                }
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Build the contraction matrix of a layout at time `t`. `channel` is
/// one of the SB_CHANNEL_* constants.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_contraction_matrix_new(
    bath: *const SbBath,
    layout: *const SbLayout,
    time: c_double,
    channel: c_int,
    out: *mut *mut SbMatrix,
) -> SbStatus {
    if bath.is_null() || layout.is_null() || out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let SbBath(spec, quad) = unsafe { &*bath };
        let SbLayout(layout) = unsafe { &*layout };
        let Some(channel) = channel_of(channel) else {
            return SbStatus::InvalidArgument;
        };
        match build_contraction_matrix(spec, layout, time, channel, quad) {
            Ok(m) => {
                unsafe { *out = Box::into_raw(Box::new(SbMatrix(m))) };
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `matrix` must come from `sb_contraction_matrix_new` and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn sb_contraction_matrix_free(matrix: *mut SbMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Number of qubits of the matrix.
///
/// # Safety
/// `matrix` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn sb_contraction_matrix_dim(matrix: *const SbMatrix) -> usize {
    if matrix.is_null() {
        return 0;
    }
    unsafe { &*matrix }.0.dim()
}

/// Entry (j, m) split into real and imaginary parts.
///
/// # Safety
/// Pointer arguments must be valid; `out_im` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sb_contraction_matrix_get(
    matrix: *const SbMatrix,
    j: usize,
    m: usize,
    out_re: *mut c_double,
    out_im: *mut c_double,
) -> SbStatus {
    if matrix.is_null() || out_re.is_null() {
        return SbStatus::NullPointer;
    }
    let c = unsafe { &(*matrix).0 };
    if j >= c.dim() || m >= c.dim() {
        return SbStatus::DimensionMismatch;
    }
    let v = c.get(j, m);
    unsafe {
        *out_re = v.re;
        if !out_im.is_null() {
            *out_im = v.im;
        }
    }
    SbStatus::Ok
}

/// `C[j][m] / sqrt(C[j][j] C[m][m])`.
///
/// # Safety
/// Pointer arguments must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_correlation_ratio(
    matrix: *const SbMatrix,
    j: usize,
    m: usize,
    out: *mut c_double,
) -> SbStatus {
    if matrix.is_null() || out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| match unsafe { &(*matrix).0 }.correlation_ratio(j, m) {
        Ok(r) => {
            unsafe { *out = r };
            SbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Squared amplitude A_n^2 of the error pattern `qubits[0..n]`.
///
/// # Safety
/// `qubits` must point to `n` indices; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_gaussian_moment(
    matrix: *const SbMatrix,
    qubits: *const usize,
    n: usize,
    out: *mut c_double,
) -> SbStatus {
    if matrix.is_null() || qubits.is_null() || out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let c = unsafe { &(*matrix).0 };
        let qubits = unsafe { std::slice::from_raw_parts(qubits, n) }.to_vec();
        let pattern = match ErrorPattern::new(qubits, c.channel) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match gaussian_moment(c, &pattern) {
            Ok(v) => {
                unsafe { *out = v };
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// (2n-1)!! perfect matchings of n error slots.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_matching_count(n: usize, out: *mut u64) -> SbStatus {
    if out.is_null() {
        return SbStatus::NullPointer;
    }
    if n == 0 || n > 20 {
        return SbStatus::InvalidArgument; // (2*21-1)!! overflows u64
    }
    unsafe { *out = matching_count(n) };
    SbStatus::Ok
}

/// P_fail = P_th (P_1/P_th)^n for independent noise.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_independent_pfail(
    p1: c_double,
    p_th: c_double,
    weight: u64,
    out: *mut c_double,
) -> SbStatus {
    if out.is_null() {
        return SbStatus::NullPointer;
    }
    match ThresholdQuery::new(p1, p_th, weight) {
        Ok(q) => {
            unsafe { *out = threshold::independent_pfail(&q) };
            SbStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Correlation-enhanced failure rate; `exact_prefactor` != 0 selects the
/// (2n-1)!! combinatorial prefactor instead of sqrt(2)(2n/e)^n.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_correlated_pfail(
    p1: c_double,
    p_th: c_double,
    weight: u64,
    exact_prefactor: c_int,
    out: *mut c_double,
) -> SbStatus {
    if out.is_null() {
        return SbStatus::NullPointer;
    }
    let prefactor = if exact_prefactor != 0 {
        Prefactor::Exact
    } else {
        Prefactor::Asymptotic
    };
    match ThresholdQuery::new(p1, p_th, weight) {
        Ok(q) => {
            unsafe { *out = threshold::correlated_pfail(&q, prefactor) };
            SbStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Concatenation breakdown point (e / 2n) P_th.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_breakdown_point(
    p_th: c_double,
    weight: u64,
    out: *mut c_double,
) -> SbStatus {
    if out.is_null() {
        return SbStatus::NullPointer;
    }
    if !(p_th > 0.0 && p_th < 1.0) || weight < 1 {
        return SbStatus::InvalidArgument;
    }
    unsafe { *out = threshold::breakdown_point(p_th, weight) };
    SbStatus::Ok
}

unsafe fn register_from_raw(
    amplitudes: *const c_double,
    n_qubits: usize,
) -> Result<RegisterState, Error> {
    let len = 2usize << n_qubits; // 2 doubles per amplitude
    let flat = unsafe { std::slice::from_raw_parts(amplitudes, len) };
    let amps: Vec<Complex64> = flat
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    RegisterState::new(n_qubits, amps)
}

/// || (sum_j Z_j) |psi> || for a state given as interleaved re/im
/// amplitudes (2^n_qubits pairs).
///
/// # Safety
/// `amplitudes` must point to `2^(n_qubits+1)` doubles; `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn sb_collective_z_residual(
    amplitudes: *const c_double,
    n_qubits: usize,
    out: *mut c_double,
) -> SbStatus {
    if amplitudes.is_null() || out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| match unsafe { register_from_raw(amplitudes, n_qubits) } {
        Ok(state) => {
            unsafe { *out = collective_z_residual(&state) };
            SbStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Second-moment decoherence exponent of a state under a contraction
/// matrix.
///
/// # Safety
/// As [`sb_collective_z_residual`]; `matrix` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn sb_dfs_decoupling_check(
    matrix: *const SbMatrix,
    amplitudes: *const c_double,
    n_qubits: usize,
    out: *mut c_double,
) -> SbStatus {
    if matrix.is_null() || amplitudes.is_null() || out.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let state = match unsafe { register_from_raw(amplitudes, n_qubits) } {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match dfs_decoupling_check(unsafe { &(*matrix).0 }, &state) {
            Ok(v) => {
                unsafe { *out = v };
                SbStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Validate a TOML run configuration file; returns InvalidArgument with
/// no further detail if it does not parse or validate.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn sb_config_check(path: *const c_char) -> SbStatus {
    if path.is_null() {
        return SbStatus::NullPointer;
    }
    guarded(|| {
        let cstr = unsafe { std::ffi::CStr::from_ptr(path) };
        let Ok(utf8) = cstr.to_str() else {
            return SbStatus::InvalidArgument;
        };
        match RunConfig::from_path(std::path::Path::new(utf8)) {
            Ok(_) => SbStatus::Ok,
            Err(e) => status_of(&e),
        }
    })
}
