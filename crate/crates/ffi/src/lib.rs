//! C bindings for `medshrink`.
//!
//! Fits are returned through an opaque [`MedshrinkFit`] handle that owns the
//! estimate. Every fallible entry point returns a [`MedshrinkStatus`]; the
//! message for the most recent failure on the calling thread is available
//! from [`medshrink_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use medshrink::estimator::{fit, EstimatorConfig, FitResult, NoiseMode};
use medshrink::medians::NoiseRule;
use medshrink::wavelet::FilterName;
use medshrink::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedshrinkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    UnknownFilter = 3,
    DegenerateNoise = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Estimator options. Zero means "use the default" for `j0_plus_one`,
/// `block_cardinality` and `h_inv_sq`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MedshrinkOptions {
    /// NUL-terminated filter name (`haar`, `db2`, `db4`), or NULL for db4.
    pub wavelet: *const c_char,
    pub j0_plus_one: u32,
    pub block_cardinality: usize,
    /// Known `h(0)^-2`; the value is estimated from the data when zero.
    pub h_inv_sq: f64,
    pub paired_mean_noise: bool,
    pub shrink: bool,
    pub bias_correction: bool,
    /// Report a degenerate noise estimate as an error.
    pub strict: bool,
}

/// Grid sizes chosen for a sample.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MedshrinkGridPlan {
    pub levels: u32,
    pub bins_per_axis: usize,
    pub bin_count: usize,
    pub kappa: usize,
}

/// Opaque fitted estimate.
pub struct MedshrinkFit {
    inner: FitResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: MedshrinkStatus, msg: impl Into<String>) -> MedshrinkStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> MedshrinkStatus {
    match e {
        Error::UnknownFilter(_) => MedshrinkStatus::UnknownFilter,
        Error::DegenerateNoise { .. } => MedshrinkStatus::DegenerateNoise,
        _ => MedshrinkStatus::InvalidInput,
    }
}

fn guarded(f: impl FnOnce() -> MedshrinkStatus) -> MedshrinkStatus {
    catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(MedshrinkStatus::Panic, "internal panic"))
}

/// Options matching the library defaults.
#[no_mangle]
pub extern "C" fn medshrink_default_options() -> MedshrinkOptions {
    MedshrinkOptions {
        wavelet: ptr::null(),
        j0_plus_one: 0,
        block_cardinality: 0,
        h_inv_sq: 0.0,
        paired_mean_noise: false,
        shrink: true,
        bias_correction: true,
        strict: false,
    }
}

unsafe fn estimator_config(opts: &MedshrinkOptions) -> Result<EstimatorConfig, MedshrinkStatus> {
    let filter = if opts.wavelet.is_null() {
        FilterName::Db4
    } else {
        let name = CStr::from_ptr(opts.wavelet)
            .to_str()
            .map_err(|_| fail(MedshrinkStatus::UnknownFilter, "wavelet name is not UTF-8"))?;
        name.parse::<FilterName>()
            .map_err(|e| fail(status_of(&e), e.to_string()))?
    };
    if !(opts.h_inv_sq >= 0.0 && opts.h_inv_sq.is_finite()) {
        return Err(fail(
            MedshrinkStatus::InvalidInput,
            format!("h_inv_sq must be finite and non-negative, got {}", opts.h_inv_sq),
        ));
    }
    Ok(EstimatorConfig {
        filter,
        j0: opts.j0_plus_one.checked_sub(1),
        block_cardinality: (opts.block_cardinality > 0).then_some(opts.block_cardinality),
        noise_mode: if opts.h_inv_sq > 0.0 {
            NoiseMode::Known(opts.h_inv_sq)
        } else {
            NoiseMode::Estimate
        },
        noise_rule: if opts.paired_mean_noise {
            NoiseRule::PairedMean
        } else {
            NoiseRule::PairedMedian
        },
        shrinkage_enabled: opts.shrink,
        bias_correction: opts.bias_correction,
    })
}

/// Fits the estimator to `n` observations.
///
/// `u` holds `n * q` coordinates in row-major order and `y` holds `n`
/// responses. `options` may be NULL for the defaults. On success `*out`
/// receives a handle that must be released with [`medshrink_fit_free`].
///
/// # Safety
/// `u` and `y` must point to readable arrays of the stated lengths, `options`
/// must be NULL or valid, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit(
    u: *const f64,
    y: *const f64,
    n: usize,
    q: usize,
    options: *const MedshrinkOptions,
    out: *mut *mut MedshrinkFit,
) -> MedshrinkStatus {
    guarded(|| {
        if u.is_null() || y.is_null() || out.is_null() {
            return fail(MedshrinkStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        let Some(len) = n.checked_mul(q) else {
            return fail(MedshrinkStatus::InvalidInput, "n * q overflows");
        };
        let opts = if options.is_null() {
            medshrink_default_options()
        } else {
            *options
        };
        let config = match estimator_config(&opts) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let u = std::slice::from_raw_parts(u, len);
        let y = std::slice::from_raw_parts(y, n);
        match fit(u, y, q, &config) {
            Ok(inner) => {
                if opts.strict && inner.noise.degenerate {
                    let e = Error::DegenerateNoise {
                        floor: medshrink::medians::NOISE_FLOOR,
                    };
                    return fail(status_of(&e), e.to_string());
                }
                *out = Box::into_raw(Box::new(MedshrinkFit { inner }));
                MedshrinkStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a fit. NULL is ignored.
///
/// # Safety
/// `fit` must be NULL or a handle from [`medshrink_fit`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_free(fit: *mut MedshrinkFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Number of bins in the estimate (`T^q`), or 0 for NULL.
///
/// # Safety
/// `fit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_len(fit: *const MedshrinkFit) -> usize {
    fit.as_ref().map_or(0, |f| f.inner.f_hat.len())
}

/// Bins per axis (`T`), or 0 for NULL.
///
/// # Safety
/// `fit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_side(fit: *const MedshrinkFit) -> usize {
    fit.as_ref().map_or(0, |f| f.inner.f_hat.side())
}

/// Copies the estimate at the bin points into `buf`, first axis slowest.
///
/// # Safety
/// `fit` must be a live handle and `buf` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_values(
    fit: *const MedshrinkFit,
    buf: *mut f64,
    cap: usize,
) -> MedshrinkStatus {
    let Some(f) = fit.as_ref() else {
        return fail(MedshrinkStatus::NullPointer, "null fit handle");
    };
    if buf.is_null() {
        return fail(MedshrinkStatus::NullPointer, "null output buffer");
    }
    let values = f.inner.f_hat.as_slice();
    if cap < values.len() {
        return fail(
            MedshrinkStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    MedshrinkStatus::Ok
}

/// Estimated median bias that was subtracted from the fit. NaN for NULL.
///
/// # Safety
/// `fit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_bias(fit: *const MedshrinkFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.inner.b_hat)
}

/// `h(0)^-2` used for shrinkage. NaN for NULL.
///
/// # Safety
/// `fit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_h_inv_sq(fit: *const MedshrinkFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.inner.noise.h_inv_sq)
}

/// Whether the noise estimate fell below the floor and was clamped.
///
/// # Safety
/// `fit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn medshrink_fit_noise_degenerate(fit: *const MedshrinkFit) -> bool {
    fit.as_ref().is_some_and(|f| f.inner.noise.degenerate)
}

/// Threshold constant of the block James-Stein rule.
#[no_mangle]
pub extern "C" fn medshrink_lambda_star() -> f64 {
    medshrink::shrinkage::lambda_star()
}

/// Grid sizes the estimator would use for `n` points in dimension `q`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn medshrink_plan_grid(
    n: usize,
    q: usize,
    out: *mut MedshrinkGridPlan,
) -> MedshrinkStatus {
    if out.is_null() {
        return fail(MedshrinkStatus::NullPointer, "null output pointer");
    }
    guarded(|| match medshrink::grid::plan_grid(n, q) {
        Ok(d) => {
            *out = MedshrinkGridPlan {
                levels: d.levels,
                bins_per_axis: d.bins_per_axis,
                bin_count: d.bin_count,
                kappa: d.kappa,
            };
            MedshrinkStatus::Ok
        }
        Err(e) => fail(status_of(&e), e.to_string()),
    })
}

/// Message for the last failure on this thread, or NULL if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn medshrink_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
