//! C ABI for geocurrents.
//!
//! Every entry point returns a [`GcStatus`] and writes its result through an
//! out-pointer. Handles are opaque and owned by the caller, who releases them
//! with the matching `*_free`. Strings returned through `char **` are owned by
//! the caller and released with [`gc_string_free`]. After a failure,
//! [`gc_last_error`] describes it until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use geocurrents::charts::{Chart, Metric};
use geocurrents::currents::{self, LevelVector};
use geocurrents::morphisms::Endomorphism;
use geocurrents::pairing::{intersection_form, PulledBackLength, TableOptions};
use geocurrents::spectra;
use geocurrents::words::{self, Alphabet, CyclicWord, Word};
use geocurrents::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    InvalidInput = 1,
    InvalidChart = 2,
    RankMismatch = 3,
    Unsupported = 4,
    ZeroCurrent = 5,
    NotRealizable = 6,
    ChartMismatch = 7,
    NotInjective = 8,
    WindowExhausted = 9,
    LevelTooLow = 10,
    Io = 11,
    NullPointer = 12,
    Panic = 13,
}

impl From<&Error> for GcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => GcStatus::InvalidInput,
            Error::InvalidChart(_) => GcStatus::InvalidChart,
            Error::RankMismatch { .. } => GcStatus::RankMismatch,
            Error::Unsupported(_) => GcStatus::Unsupported,
            Error::ZeroCurrent => GcStatus::ZeroCurrent,
            Error::NotRealizable(_) => GcStatus::NotRealizable,
            Error::ChartMismatch(_) => GcStatus::ChartMismatch,
            Error::NotInjective(_) => GcStatus::NotInjective,
            Error::WindowExhausted { .. } => GcStatus::WindowExhausted,
            Error::LevelTooLow { .. } => GcStatus::LevelTooLow,
            Error::Io(_) => GcStatus::Io,
        }
    }
}

/// A graph with a marking.
pub struct GcChart(Arc<Chart>);

/// An endomorphism of a free group of finite rank.
pub struct GcEndomorphism(Endomorphism);

/// A finite-level coordinate vector of a current.
pub struct GcLevelVector(LevelVector);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Domain(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type FfiResult<T> = std::result::Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> GcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GcStatus::Ok,
        Ok(Err(Failure::Domain(e))) => {
            set_error(e.to_string());
            GcStatus::from(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            GcStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            GcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Domain(Error::InvalidInput(format!("{what} is not UTF-8"))))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| Failure::Domain(Error::InvalidInput("result contains nul".into())))?;
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Built-in chart: `bouquetK`, `theta` or `dumbbell`.
///
/// # Safety
/// `name` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_chart_builtin(name: *const c_char, out: *mut *mut GcChart) -> GcStatus {
    guard(|| {
        let chart = Chart::builtin(str_arg(name, "name")?)?;
        put_box(out, GcChart(Arc::new(chart)))
    })
}

/// Chart from its JSON description.
///
/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_chart_from_json(json: *const c_char, out: *mut *mut GcChart) -> GcStatus {
    guard(|| {
        let v: serde_json::Value = serde_json::from_str(str_arg(json, "json")?).map_err(Error::from)?;
        put_box(out, GcChart(Arc::new(Chart::from_json(&v)?)))
    })
}

/// # Safety
/// `chart` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_chart_rank(chart: *const GcChart, out: *mut usize) -> GcStatus {
    guard(|| put(out, handle(chart, "chart")?.0.rank(), "out"))
}

/// # Safety
/// `chart` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gc_chart_free(chart: *mut GcChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Parses an endomorphism expression (`tau`, `phi*sigma^-1`, `a=>ab; b=>b`).
///
/// # Safety
/// `expr` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_endo_parse(expr: *const c_char, rank: usize, out: *mut *mut GcEndomorphism) -> GcStatus {
    guard(|| put_box(out, GcEndomorphism(Endomorphism::parse(str_arg(expr, "expr")?, rank)?)))
}

/// Image of a word; a leading `~` marks a cyclic word.
///
/// # Safety
/// `endo` must be a live handle, `word` a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_endo_apply(endo: *const GcEndomorphism, word: *const c_char, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let f = &handle(endo, "endo")?.0;
        let text = str_arg(word, "word")?;
        let alphabet = Alphabet::new(f.domain_rank())?;
        let image = if text.starts_with('~') {
            let w = CyclicWord::parse(&alphabet, text)?;
            f.apply_cyclic(&w)?.map_or_else(|| "~".to_string(), |c| c.to_string())
        } else {
            f.apply(&Word::parse(&alphabet, text)?)?.to_string()
        };
        put_string(out, image)
    })
}

/// # Safety
/// `endo` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_endo_is_injective(endo: *const GcEndomorphism, out: *mut bool) -> GcStatus {
    guard(|| put(out, handle(endo, "endo")?.0.is_injective(), "out"))
}

/// # Safety
/// `endo` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gc_endo_free(endo: *mut GcEndomorphism) {
    if !endo.is_null() {
        drop(Box::from_raw(endo));
    }
}

/// `⟨v, w⟩` for a word `v` and a cyclic word `w` of the given rank.
///
/// # Safety
/// `v` and `w` must be valid C strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_count_occurrences(v: *const c_char, w: *const c_char, rank: usize, out: *mut u64) -> GcStatus {
    guard(|| {
        let alphabet = Alphabet::new(rank)?;
        let v = Word::parse(&alphabet, str_arg(v, "v")?)?;
        let w = CyclicWord::parse(&alphabet, str_arg(w, "w")?)?;
        put(out, words::count_occurrences(&v, &w)?, "out")
    })
}

/// Level-`level` coordinates of the rational current of a cyclic word.
///
/// # Safety
/// `chart` must be a live handle, `word` a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_current_rational(
    chart: *const GcChart,
    word: *const c_char,
    level: usize,
    out: *mut *mut GcLevelVector,
) -> GcStatus {
    guard(|| {
        let chart = &handle(chart, "chart")?.0;
        let w = CyclicWord::parse(&chart.alphabet(), str_arg(word, "word")?)?;
        put_box(out, GcLevelVector(currents::rational_current(chart, &w, level)?))
    })
}

/// Level-`level` coordinates of the uniform current on a bouquet.
///
/// # Safety
/// `chart` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_current_uniform(chart: *const GcChart, level: usize, out: *mut *mut GcLevelVector) -> GcStatus {
    guard(|| {
        let chart = &handle(chart, "chart")?.0;
        put_box(out, GcLevelVector(currents::uniform_current(chart, level)?))
    })
}

/// # Safety
/// `json` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_current_from_json(json: *const c_char, out: *mut *mut GcLevelVector) -> GcStatus {
    guard(|| {
        let v: serde_json::Value = serde_json::from_str(str_arg(json, "json")?).map_err(Error::from)?;
        put_box(out, GcLevelVector(LevelVector::from_json(&v)?))
    })
}

/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_current_to_json(x: *const GcLevelVector, out: *mut *mut c_char) -> GcStatus {
    guard(|| put_string(out, handle(x, "current")?.0.to_json().to_string()))
}

/// Cyclic word whose current equals an integral point.
///
/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_current_realize(x: *const GcLevelVector, out: *mut *mut c_char) -> GcStatus {
    guard(|| put_string(out, currents::realize_integer_point(&handle(x, "current")?.0)?.to_string()))
}

/// # Safety
/// `x` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gc_current_free(x: *mut GcLevelVector) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// `I(ℓ, x)` as `"p/q"`, with `ℓ` given as a JSON metric on the current's
/// chart; NULL means simplicial.
///
/// # Safety
/// `x` must be a live handle, `metric_json` NULL or a valid C string, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_intersection_form(
    x: *const GcLevelVector,
    metric_json: *const c_char,
    out: *mut *mut c_char,
) -> GcStatus {
    guard(|| {
        let x = &handle(x, "current")?.0;
        let metric = if metric_json.is_null() {
            Metric::simplicial(x.chart())
        } else {
            let v: serde_json::Value = serde_json::from_str(str_arg(metric_json, "metric")?).map_err(Error::from)?;
            Metric::from_json(x.chart(), &v)?
        };
        put_string(out, intersection_form(x.chart(), &metric, x)?.to_string())
    })
}

/// Exact generic stretching factor of `ℓ_A ∘ f` as `"p/q"`.
///
/// # Safety
/// `endo` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gc_stretch_exact(endo: *const GcEndomorphism, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let spec = PulledBackLength::of_endomorphism(&handle(endo, "endo")?.0)?;
        put_string(out, spectra::generic_stretch_exact(&spec, &TableOptions::default())?.value.to_string())
    })
}

/// Closed-form generic stretch of `φ = στ²` at rank `k`, as `"p/q"`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_closed_form_phi(k: usize, out: *mut *mut c_char) -> GcStatus {
    guard(|| put_string(out, spectra::closed_form_phi(k)?.to_string()))
}

/// Closed-form generic stretch of `φ⁻¹` at rank `k`, as `"p/q"`. With
/// `corrected` false this is the proposed form, which disagrees with the
/// exact value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gc_closed_form_phi_inverse(k: usize, corrected: bool, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let v = if corrected { spectra::closed_form_phi_inverse_corrected(k)? } else { spectra::closed_form_phi_inverse(k)? };
        put_string(out, v.to_string())
    })
}
