//! C ABI over the irrarray toolkit.
//!
//! Conventions:
//!
//! - Every fallible function returns an [`IrrStatus`]; results go through
//!   out-pointers that are written only on success.
//! - After a failure, [`irr_last_error`] describes it. The message belongs
//!   to the calling thread and stays valid until that thread's next call.
//! - Strings returned through out-pointers are owned by the caller and are
//!   released with [`irr_string_free`]. Handles have their own `_free`
//!   functions; passing NULL to any `_free` is a no-op.
//! - Panics never cross the boundary; they surface as `IRR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use irrarray::beamforming::Architecture;
use irrarray::optimizer::{objective, Evaluator, ObjectiveSpec, RealizationSet};
use irrarray::scenario::ScenarioConfig;
use irrarray::tiling::{
    build_dictionary, count_domino, count_thinned, enumerate_exact_covers, sample_thinned, ArrayConfig, ArrayKind,
    ShapeSet,
};
use irrarray::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    InvalidLayout = 4,
    DegenerateChannel = 5,
    DegenerateMask = 6,
    Evaluation = 7,
    Scenario = 8,
    Io = 9,
    Json = 10,
    OutOfRange = 11,
    Panic = 12,
}

/// Scenario parameters.
pub struct IrrScenario(ScenarioConfig);

/// One array layout.
pub struct IrrConfig(ArrayConfig);

/// Layouts produced by enumeration.
pub struct IrrConfigList(Vec<ArrayConfig>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(IrrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => IrrStatus::InvalidArgument,
            Error::InvalidLayout(_) => IrrStatus::InvalidLayout,
            Error::DegenerateChannel(_) => IrrStatus::DegenerateChannel,
            Error::DegenerateMask(_) => IrrStatus::DegenerateMask,
            Error::Evaluation(_) => IrrStatus::Evaluation,
            Error::Scenario(_) => IrrStatus::Scenario,
            Error::Io(_) => IrrStatus::Io,
            Error::Json(_) => IrrStatus::Json,
        };
        Failure(code, e.to_string())
    }
}

fn fail<T>(code: IrrStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(code, msg.into()))
}

/// Runs `f`, records any failure and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IrrStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IrrStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            IrrStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(IrrStatus::NullPointer, format!("{what} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(IrrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(IrrStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return fail(IrrStatus::NullPointer, format!("{what} is NULL"));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).or_else(|_| fail(IrrStatus::Json, "string contains an interior NUL"))
}

unsafe fn check_out<T>(out: *mut T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        fail(IrrStatus::NullPointer, format!("{what} is NULL"))
    } else {
        Ok(())
    }
}

/// Message describing the last failure on this thread (empty after a
/// success). Never NULL.
#[no_mangle]
pub extern "C" fn irr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn irr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact number of domino tilings of a `rows × cols` board, as a decimal
/// string.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn irr_count_domino(rows: usize, cols: usize, out: *mut *mut c_char) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        put(out, c_string(count_domino(rows, cols).to_string())?, "out")
    })
}

/// Exact number of `elements`-element thinned layouts spanning the full
/// `rows × cols` aperture, as a decimal string.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn irr_count_thinned(rows: usize, cols: usize, elements: usize, out: *mut *mut c_char) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        put(out, c_string(count_thinned(rows, cols, elements).to_string())?, "out")
    })
}

/// Enumerates up to `cap` tilings of `kind` (`"domino"` or `"tetromino"`);
/// `seed` fixes the search order.
///
/// # Safety
/// `kind` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_enumerate(
    kind: *const c_char,
    rows: usize,
    cols: usize,
    cap: usize,
    seed: u64,
    out: *mut *mut IrrConfigList,
) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let kind: ArrayKind = read_str(kind, "kind")?.parse()?;
        let Some(family) = kind.shape_family() else {
            return fail(IrrStatus::InvalidArgument, format!("{kind} layouts are not tilings"));
        };
        let q = build_dictionary(rows, cols, &ShapeSet::for_family(family))?;
        let list = Box::new(IrrConfigList(enumerate_exact_covers(&q, cap, seed)));
        put(out, Box::into_raw(list), "out")
    })
}

/// Number of layouts in `list` (0 for NULL).
///
/// # Safety
/// `list` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn irr_config_list_len(list: *const IrrConfigList) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

/// Copies layout `index` of `list` into a new handle.
///
/// # Safety
/// `list` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_config_list_get(list: *const IrrConfigList, index: usize, out: *mut *mut IrrConfig) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let list = handle(list, "list")?;
        let Some(cfg) = list.0.get(index) else {
            return fail(IrrStatus::OutOfRange, format!("index {index} outside a list of {}", list.0.len()));
        };
        put(out, Box::into_raw(Box::new(IrrConfig(cfg.clone()))), "out")
    })
}

/// # Safety
/// `list` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn irr_config_list_free(list: *mut IrrConfigList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Uniformly random full-aperture thinned layout.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_sample_thinned(rows: usize, cols: usize, elements: usize, seed: u64, out: *mut *mut IrrConfig) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let cfg = sample_thinned(rows, cols, elements, seed)?;
        put(out, Box::into_raw(Box::new(IrrConfig(cfg))), "out")
    })
}

/// Parses and validates a layout from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_config_from_json(json: *const c_char, out: *mut *mut IrrConfig) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let cfg = ArrayConfig::from_json(read_str(json, "json")?)?;
        put(out, Box::into_raw(Box::new(IrrConfig(cfg))), "out")
    })
}

/// JSON form of a layout.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_config_to_json(config: *const IrrConfig, out: *mut *mut c_char) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let cfg = handle(config, "config")?;
        put(out, c_string(cfg.0.to_json())?, "out")
    })
}

/// Number of feeds (clusters) of a layout (0 for NULL).
///
/// # Safety
/// `config` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn irr_config_feeds(config: *const IrrConfig) -> usize {
    config.as_ref().map_or(0, |c| c.0.feeds())
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn irr_config_free(config: *mut IrrConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Built-in default scenario.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_scenario_default(out: *mut *mut IrrScenario) -> IrrStatus {
    guard(|| put(out, Box::into_raw(Box::new(IrrScenario(ScenarioConfig::default()))), "out"))
}

/// Scenario from TOML text; omitted keys take their defaults.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_scenario_from_toml(toml: *const c_char, out: *mut *mut IrrScenario) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let s = ScenarioConfig::from_toml(read_str(toml, "toml")?)?;
        put(out, Box::into_raw(Box::new(IrrScenario(s))), "out")
    })
}

/// # Safety
/// `scenario` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn irr_scenario_free(scenario: *mut IrrScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Monte-Carlo evaluation of `config` with architecture `arch` (`"fd"`,
/// `"hfc"` or `"hpc"`) at the scenario SNR, including sidelobe levels.
/// `realizations = 0` uses the scenario's count. The report is written as
/// JSON.
///
/// # Safety
/// Handles must be live, `arch` NUL-terminated and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn irr_evaluate(
    scenario: *const IrrScenario,
    config: *const IrrConfig,
    arch: *const c_char,
    realizations: usize,
    out_json: *mut *mut c_char,
) -> IrrStatus {
    guard(|| {
        check_out(out_json, "out_json")?;
        let scenario = &handle(scenario, "scenario")?.0;
        let config = &handle(config, "config")?.0;
        let arch: Architecture = read_str(arch, "arch")?.parse()?;
        let n = if realizations == 0 { scenario.realizations } else { realizations };
        let ev = Evaluator::new(scenario)?;
        let set = RealizationSet::draw(&scenario.channel_params(), scenario.seed, n)?;
        let report = ev.evaluate(config, arch, scenario.eta_db, &set, true)?;
        let json = serde_json::to_string(&report).map_err(Error::from)?;
        put(out_json, c_string(json)?, "out_json")
    })
}

/// Scalarized objective `β·R̄/R̄_ref + (1 − β)·Φ/Φ_ref` (SLLs in dB).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn irr_objective(
    mean_se: f64,
    sll_db: f64,
    beta: f64,
    r_ref: f64,
    phi_ref_db: f64,
    out: *mut f64,
) -> IrrStatus {
    guard(|| {
        check_out(out, "out")?;
        let spec = ObjectiveSpec::new(beta, r_ref, phi_ref_db)?;
        put(out, objective(mean_se, sll_db, &spec), "out")
    })
}
