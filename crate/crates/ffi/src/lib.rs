//! C ABI over `pcc-core`.
//!
//! Models are opaque `PccModel` handles created by `pcc_model_fit` or
//! `pcc_model_load` and released with `pcc_model_free`. Every fallible
//! call returns a `PccStatus`; on failure `pcc_last_error_message` gives a
//! description that stays valid until the next failing call on the same
//! thread. Labels crossing the boundary are 1-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::slice;

use pcc_core::datasets::LabeledDataset;
use pcc_core::encoding::{ClassIndicator, EncodingSpec};
use pcc_core::linalg::DenseMatrix;
use pcc_core::model::{load_model, save_model};
use pcc_core::PccError;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Shape = 3,
    Domain = 4,
    Precondition = 5,
    Convergence = 6,
    Format = 7,
    Checksum = 8,
    Io = 9,
    /// A Rust panic was caught at the boundary.
    Internal = 10,
}

/// Opaque trained model.
pub struct PccModel(pcc_core::PccModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &PccError) -> PccStatus {
    match e {
        PccError::Shape(_) => PccStatus::Shape,
        PccError::Domain(_) => PccStatus::Domain,
        PccError::InvalidParameter(_) => PccStatus::InvalidParameter,
        PccError::Precondition(_) => PccStatus::Precondition,
        PccError::Convergence { .. } => PccStatus::Convergence,
        PccError::Format { .. } => PccStatus::Format,
        PccError::Checksum { .. } => PccStatus::Checksum,
        PccError::Io { .. } => PccStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(PccError),
}

impl From<PccError> for Failure {
    fn from(e: PccError) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PccStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            PccStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal error: panic caught at the C boundary");
            PccStatus::Internal
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a valid pointer.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

/// # Safety
/// `p` must be null or point to `len` readable values.
unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| PccError::InvalidParameter("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Trains a model.
///
/// `features` holds `n` instances of `d_x` values each, one instance after
/// the other. `labels` holds `n` 1-based class labels in `1..=n_classes`.
/// On success `*out` receives a handle to free with `pcc_model_free`.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_fit(
    features: *const f64,
    labels: *const u32,
    d_x: usize,
    n: usize,
    n_classes: usize,
    alpha: f64,
    n_e: usize,
    out: *mut *mut PccModel,
) -> PccStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let len = d_x.checked_mul(n).ok_or_else(|| PccError::Shape("d_x * n overflows".into()))?;
        let x = slice_arg(features, len, "features")?;
        let y = slice_arg(labels, n, "labels")?;
        let mut zero_based = Vec::with_capacity(n);
        for &l in y {
            zero_based.push(ClassIndicator::from_label(l as usize, n_classes)?.index());
        }
        let data = LabeledDataset::new("ffi", DenseMatrix::from_col_major(d_x, n, x.to_vec())?, zero_based, n_classes)?;
        let spec = EncodingSpec::for_dataset(&data, alpha)?;
        let model = pcc_core::PccModel::fit(spec, &data, n_e)?;
        *out = Box::into_raw(Box::new(PccModel(model)));
        Ok(())
    })
}

/// Reads a model file written by `pcc_model_save` or the `pcc` tool.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_load(path: *const c_char, out: *mut *mut PccModel) -> PccStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let model = load_model(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(PccModel(model)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_save(model: *const PccModel, path: *const c_char) -> PccStatus {
    guard(|| {
        let m = non_null(model, "model")?;
        save_model(&m.0, &path_arg(path)?)?;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_free(model: *mut PccModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// See `pcc_model_predict`.
unsafe fn predict(
    model: *const PccModel,
    x: *const f64,
    x_len: usize,
    label: Option<u32>,
    label_out: *mut u32,
    scores_out: *mut f64,
    scores_len: usize,
) -> PccStatus {
    guard(|| {
        let m = &non_null(model, "model")?.0;
        let x = slice_arg(x, x_len, "x")?;
        if label_out.is_null() {
            return Err(Failure::Null("label_out"));
        }
        let n_c = m.spec().n_classes();
        if !scores_out.is_null() && scores_len != n_c {
            return Err(PccError::Shape(format!("scores buffer holds {scores_len}, model has {n_c} classes")).into());
        }
        let p = match label {
            Some(l) => m.predict_with_labels(x, ClassIndicator::from_label(l as usize, n_c)?)?,
            None => m.predict_class(x)?,
        };
        *label_out = p.label as u32;
        if !scores_out.is_null() {
            slice::from_raw_parts_mut(scores_out, scores_len).copy_from_slice(&p.scores);
        }
        Ok(())
    })
}

/// Predicts the 1-based class of `x` (`x_len` must equal the feature
/// dimension). `scores_out` may be null; otherwise it receives the
/// `scores_len == n_classes` class scores.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_predict(
    model: *const PccModel,
    x: *const f64,
    x_len: usize,
    label_out: *mut u32,
    scores_out: *mut f64,
    scores_len: usize,
) -> PccStatus {
    predict(model, x, x_len, None, label_out, scores_out, scores_len)
}

/// Like `pcc_model_predict`, with the 1-based `label` encoded in the input.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_predict_with_label(
    model: *const PccModel,
    x: *const f64,
    x_len: usize,
    label: u32,
    label_out: *mut u32,
    scores_out: *mut f64,
    scores_len: usize,
) -> PccStatus {
    predict(model, x, x_len, Some(label), label_out, scores_out, scores_len)
}

/// Feature dimension, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_d_x(model: *const PccModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.spec().d_x())
}

/// Number of classes, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_n_classes(model: *const PccModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.spec().n_classes())
}

/// Retained components, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_n_e(model: *const PccModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.n_e())
}

/// Class weight α, or NaN for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_alpha(model: *const PccModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.0.spec().alpha())
}

/// Stored basis entries (`n_e * (d_x + n_classes)`), or 0 for null.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcc_model_parameter_count(model: *const PccModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.parameter_count())
}

/// Message of the last failure on this thread; empty if none. Owned by the
/// library.
#[no_mangle]
pub extern "C" fn pcc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, NUL-terminated and static.
#[no_mangle]
pub extern "C" fn pcc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
