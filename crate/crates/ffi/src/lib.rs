//! C ABI over the `hybridevs` library.
//!
//! Objects cross the boundary as opaque handles created by `hevs_*_new` /
//! `hevs_*_parse` style constructors and released with the matching
//! `hevs_*_free`. Fallible calls return an [`HevsStatus`]; the message of the
//! most recent failure on the calling thread is available from
//! [`hevs_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::{
    cell::RefCell,
    ffi::{c_char, CStr, CString},
    panic::{catch_unwind, AssertUnwindSafe},
    ptr, slice,
};

use hybridevs::{
    raw_io, DemosaicMode, DpcMode, Error, PatternSpec, RawImage, RestoreConfig, RgbImage,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HevsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidPattern = 2,
    InvalidDimensions = 3,
    LengthMismatch = 4,
    RangeError = 5,
    DimensionMismatch = 6,
    TooSmall = 7,
    InvalidConfig = 8,
    InvalidUtf8 = 9,
    Panic = 10,
    Other = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HevsDpcMode {
    None = 0,
    ZeroMask = 1,
    MedianDeviation = 2,
    Both = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HevsDemosaicMode {
    Bilinear = 0,
    GradientCorrected = 1,
}

/// Pipeline settings. Obtain defaults from [`hevs_restore_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HevsRestoreOptions {
    pub dpc: HevsDpcMode,
    pub demosaic: HevsDemosaicMode,
    pub threshold: u16,
    pub radius: u32,
    pub inpaint: bool,
}

/// Opaque pattern handle.
pub struct HevsPattern(PatternSpec);
/// Opaque 10-bit raw frame handle.
pub struct HevsRaw(RawImage);
/// Opaque 8-bit RGB image handle.
pub struct HevsRgb(RgbImage);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> HevsStatus {
    match err {
        Error::InvalidPattern(_) => HevsStatus::InvalidPattern,
        Error::InvalidDimensions { .. } => HevsStatus::InvalidDimensions,
        Error::LengthMismatch { .. } => HevsStatus::LengthMismatch,
        Error::RangeError { .. } => HevsStatus::RangeError,
        Error::DimensionMismatch(_) => HevsStatus::DimensionMismatch,
        Error::TooSmall { .. } => HevsStatus::TooSmall,
        Error::InvalidConfig(_) => HevsStatus::InvalidConfig,
        _ => HevsStatus::Other,
    }
}

/// Runs `f`, recording the error message and mapping panics.
fn guard(f: impl FnOnce() -> Result<(), HevsStatus>) -> HevsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HevsStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            HevsStatus::Panic
        }
    }
}

fn fail(err: Error) -> HevsStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null() -> HevsStatus {
    set_error("null pointer argument");
    HevsStatus::NullPointer
}

unsafe fn out_handle<T>(out: *mut *mut T, value: T) -> Result<(), HevsStatus> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, HevsStatus> {
    p.as_ref().ok_or_else(null)
}

/// NUL-terminated library version. Static storage, do not free.
#[no_mangle]
pub extern "C" fn hevs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn hevs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// The default 4x4 pattern.
#[no_mangle]
pub extern "C" fn hevs_pattern_default() -> *mut HevsPattern {
    Box::into_raw(Box::new(HevsPattern(PatternSpec::default())))
}

/// Parses a pattern from its 4-line text form.
#[no_mangle]
pub unsafe extern "C" fn hevs_pattern_parse(
    text: *const c_char,
    out: *mut *mut HevsPattern,
) -> HevsStatus {
    guard(|| {
        if text.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("pattern text is not UTF-8");
            HevsStatus::InvalidUtf8
        })?;
        let spec: PatternSpec = s.parse().map_err(fail)?;
        out_handle(out, HevsPattern(spec))
    })
}

/// Pixel class code ('R', 'G', 'B' or 'E') at (x, y).
#[no_mangle]
pub unsafe extern "C" fn hevs_pattern_classify(
    p: *const HevsPattern,
    x: usize,
    y: usize,
) -> c_char {
    match p.as_ref() {
        Some(p) => p.0.classify(x, y).code() as c_char,
        None => 0,
    }
}

#[no_mangle]
pub unsafe extern "C" fn hevs_pattern_free(p: *mut HevsPattern) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies `width * height` row-major 10-bit samples into a new frame.
#[no_mangle]
pub unsafe extern "C" fn hevs_raw_new(
    samples: *const u16,
    width: usize,
    height: usize,
    out: *mut *mut HevsRaw,
) -> HevsStatus {
    guard(|| {
        if samples.is_null() {
            return Err(null());
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| fail(Error::InvalidDimensions { width, height }))?;
        let data = slice::from_raw_parts(samples, n).to_vec();
        let raw = RawImage::new(width, height, data).map_err(fail)?;
        out_handle(out, HevsRaw(raw))
    })
}

/// Decodes a headerless little-endian 16-bit container.
#[no_mangle]
pub unsafe extern "C" fn hevs_raw_read(
    bytes: *const u8,
    len: usize,
    width: usize,
    height: usize,
    out: *mut *mut HevsRaw,
) -> HevsStatus {
    guard(|| {
        if bytes.is_null() {
            return Err(null());
        }
        let raw =
            raw_io::read_raw(slice::from_raw_parts(bytes, len), width, height).map_err(fail)?;
        out_handle(out, HevsRaw(raw))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hevs_raw_free(p: *mut HevsRaw) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub extern "C" fn hevs_restore_options_default() -> HevsRestoreOptions {
    let c = RestoreConfig::default();
    HevsRestoreOptions {
        dpc: HevsDpcMode::Both,
        demosaic: HevsDemosaicMode::GradientCorrected,
        threshold: c.threshold,
        radius: c.radius as u32,
        inpaint: c.inpaint,
    }
}

fn to_config(spec: PatternSpec, o: &HevsRestoreOptions) -> RestoreConfig {
    RestoreConfig {
        spec,
        dpc: match o.dpc {
            HevsDpcMode::None => DpcMode::None,
            HevsDpcMode::ZeroMask => DpcMode::ZeroMask,
            HevsDpcMode::MedianDeviation => DpcMode::MedianDeviation,
            HevsDpcMode::Both => DpcMode::Both,
        },
        demosaic: match o.demosaic {
            HevsDemosaicMode::Bilinear => DemosaicMode::Bilinear,
            HevsDemosaicMode::GradientCorrected => DemosaicMode::GradientCorrected,
        },
        threshold: o.threshold,
        radius: o.radius as usize,
        inpaint: o.inpaint,
    }
}

/// Restores a raw frame to RGB. `pattern` and `options` may be null for
/// the defaults.
#[no_mangle]
pub unsafe extern "C" fn hevs_restore(
    raw: *const HevsRaw,
    pattern: *const HevsPattern,
    options: *const HevsRestoreOptions,
    out: *mut *mut HevsRgb,
) -> HevsStatus {
    guard(|| {
        let raw = handle(raw)?;
        let spec = pattern
            .as_ref()
            .map_or_else(PatternSpec::default, |p| p.0.clone());
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| hevs_restore_options_default());
        let rgb = hybridevs::restore(&raw.0, &to_config(spec, &opts)).map_err(fail)?;
        out_handle(out, HevsRgb(rgb))
    })
}

/// Copies `width * height * 3` interleaved RGB bytes into a new image.
#[no_mangle]
pub unsafe extern "C" fn hevs_rgb_new(
    data: *const u8,
    width: usize,
    height: usize,
    out: *mut *mut HevsRgb,
) -> HevsStatus {
    guard(|| {
        if data.is_null() {
            return Err(null());
        }
        let n = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or_else(|| fail(Error::InvalidDimensions { width, height }))?;
        let rgb =
            RgbImage::new(width, height, slice::from_raw_parts(data, n).to_vec()).map_err(fail)?;
        out_handle(out, HevsRgb(rgb))
    })
}

#[no_mangle]
pub unsafe extern "C" fn hevs_rgb_width(p: *const HevsRgb) -> usize {
    p.as_ref().map_or(0, |p| p.0.width())
}

#[no_mangle]
pub unsafe extern "C" fn hevs_rgb_height(p: *const HevsRgb) -> usize {
    p.as_ref().map_or(0, |p| p.0.height())
}

/// Borrowed pointer to the interleaved pixels, valid until the handle is freed.
#[no_mangle]
pub unsafe extern "C" fn hevs_rgb_data(p: *const HevsRgb) -> *const u8 {
    p.as_ref().map_or(ptr::null(), |p| p.0.data().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn hevs_rgb_free(p: *mut HevsRgb) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// PSNR in dB between two RGB images of equal size.
#[no_mangle]
pub unsafe extern "C" fn hevs_psnr(
    a: *const HevsRgb,
    b: *const HevsRgb,
    out: *mut f64,
) -> HevsStatus {
    metric(a, b, out, hybridevs::psnr)
}

/// Mean SSIM between two RGB images of equal size, at least 11x11.
#[no_mangle]
pub unsafe extern "C" fn hevs_ssim(
    a: *const HevsRgb,
    b: *const HevsRgb,
    out: *mut f64,
) -> HevsStatus {
    metric(a, b, out, hybridevs::ssim)
}

unsafe fn metric(
    a: *const HevsRgb,
    b: *const HevsRgb,
    out: *mut f64,
    f: fn(&RgbImage, &RgbImage) -> hybridevs::Result<f64>,
) -> HevsStatus {
    guard(|| {
        let (a, b) = (handle(a)?, handle(b)?);
        if out.is_null() {
            return Err(null());
        }
        *out = f(&a.0, &b.0).map_err(fail)?;
        Ok(())
    })
}
