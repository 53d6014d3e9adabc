//! C interface to the planner.
//!
//! Every function returns an [`AitaxStatus`]; on failure the message is
//! available from [`aitax_last_error`] on the same thread. Handles are opaque
//! and owned by the caller, who releases them with the matching `_free`.
//! Strings returned through out-parameters are released with [`aitax_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};

use aitax::cli::config::parse_config;
use aitax::planner;
use aitax::sweep::ParamPath;
use aitax::wedges::{intratemporal_wedge, wedge_report, wedge_via_multipliers, CapitalKind};
use aitax::{AgentKind, EconomyConfig, Error, PlannerSolution, Regime};

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AitaxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    InvalidConfig = 3,
    SolverFailure = 4,
    InvalidArgument = 5,
    Panic = 6,
}

#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AitaxRegime {
    NoneBind = 0,
    CognitiveBinds = 1,
    ManualBinds = 2,
    BothBind = 3,
}

impl From<Regime> for AitaxRegime {
    fn from(r: Regime) -> Self {
        match r {
            Regime::NoneBind => AitaxRegime::NoneBind,
            Regime::CognitiveBinds => AitaxRegime::CognitiveBinds,
            Regime::ManualBinds => AitaxRegime::ManualBinds,
            Regime::BothBind => AitaxRegime::BothBind,
        }
    }
}

/// Built-in economies.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AitaxDesk {
    Symmetric = 0,
    CognitiveBinding = 1,
    ManualBinding = 2,
    Threshold = 3,
    SymmetricCobbDouglas = 4,
}

/// Period-0 summary of a solution. Capital wedges use the multiplier form.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AitaxSummary {
    /// An [`AitaxRegime`] value.
    pub regime: i32,
    pub tau_k: f64,
    pub tau_ai: f64,
    pub tau_y_c: f64,
    pub tau_y_m: f64,
    pub mu_c: f64,
    pub mu_m: f64,
    pub objective: f64,
    pub foc_residual: f64,
    /// Number of periods in the allocation.
    pub periods: usize,
}

/// Opaque economy configuration.
pub struct AitaxConfig(EconomyConfig);

/// Opaque planner solution.
pub struct AitaxSolution(PlannerSolution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Fail(AitaxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidConfig(_) | Error::Parse(_) => AitaxStatus::InvalidConfig,
            Error::DegenerateGrid(_) | Error::InfeasibleUbi(_) | Error::OutOfHorizon(_) => AitaxStatus::InvalidArgument,
            _ => AitaxStatus::SolverFailure,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail> + UnwindSafe) -> AitaxStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => {
            set_error("");
            AitaxStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AitaxStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(AitaxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AitaxStatus::InvalidString, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn aitax_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn aitax_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a TOML economy description.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_config_from_toml(toml: *const c_char, out: *mut *mut AitaxConfig) -> AitaxStatus {
    guard(|| {
        let cfg = parse_config(text(toml, "toml")?)?;
        put(out, AitaxConfig(cfg))
    })
}

/// One of the built-in economies; `desk` takes an [`AitaxDesk`] value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_config_desk(desk: i32, out: *mut *mut AitaxConfig) -> AitaxStatus {
    guard(|| {
        let cfg = match desk {
            0 => EconomyConfig::symmetric(),
            1 => EconomyConfig::cognitive_binding_desk(),
            2 => EconomyConfig::manual_binding_desk(),
            3 => EconomyConfig::threshold_desk(),
            4 => EconomyConfig::symmetric_cobb_douglas(),
            _ => return Err(Fail(AitaxStatus::InvalidArgument, format!("unknown desk {desk}"))),
        };
        put(out, AitaxConfig(cfg))
    })
}

/// Sets one sweepable parameter (`a_ai`, `z_c`, `z_m`, `mu_top`, `theta_m`, `delta_ai`).
/// The config is unchanged when the new value fails validation.
///
/// # Safety
/// `config` must come from this library; `name` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn aitax_config_set(config: *mut AitaxConfig, name: *const c_char, value: f64) -> AitaxStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let param: ParamPath = text(name, "name")?
            .parse()
            .map_err(|e: Error| Fail(AitaxStatus::InvalidArgument, e.to_string()))?;
        cfg.0 = param.apply(&cfg.0, value)?;
        Ok(())
    })
}

/// Reads one sweepable parameter.
///
/// # Safety
/// `config` must come from this library; `name` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_config_get(
    config: *const AitaxConfig,
    name: *const c_char,
    out: *mut f64,
) -> AitaxStatus {
    guard(|| {
        let cfg = borrow(config, "config")?;
        let param: ParamPath = text(name, "name")?
            .parse()
            .map_err(|e: Error| Fail(AitaxStatus::InvalidArgument, e.to_string()))?;
        *out.as_mut().ok_or_else(|| null("out"))? = param.get(&cfg.0);
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aitax_config_free(config: *mut AitaxConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Solves in the config's mode (steady state or finite horizon).
///
/// # Safety
/// `config` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_solve(config: *const AitaxConfig, out: *mut *mut AitaxSolution) -> AitaxStatus {
    guard(|| {
        let cfg = borrow(config, "config")?;
        let sol = aitax::cli::solve_config(&cfg.0)?;
        put(out, AitaxSolution(sol))
    })
}

/// # Safety
/// `solution` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_solution_summary(solution: *const AitaxSolution, out: *mut AitaxSummary) -> AitaxStatus {
    guard(|| {
        let sol = &borrow(solution, "solution")?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = AitaxSummary {
            regime: AitaxRegime::from(sol.regime) as i32,
            tau_k: wedge_via_multipliers(sol, CapitalKind::K, 0)?,
            tau_ai: wedge_via_multipliers(sol, CapitalKind::Ai, 0)?,
            tau_y_c: intratemporal_wedge(sol, AgentKind::Cognitive, 0)?,
            tau_y_m: intratemporal_wedge(sol, AgentKind::Manual, 0)?,
            mu_c: sol.multipliers.mu.cognitive,
            mu_m: sol.multipliers.mu.manual,
            objective: sol.objective,
            foc_residual: sol.foc_residual,
            periods: sol.allocation.len(),
        };
        Ok(())
    })
}

/// Full solution and wedge report as JSON; free with [`aitax_string_free`].
///
/// # Safety
/// `solution` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_solution_to_json(solution: *const AitaxSolution, out: *mut *mut c_char) -> AitaxStatus {
    guard(|| {
        let sol = &borrow(solution, "solution")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let wedges = wedge_report(sol)?;
        let doc = serde_json::json!({ "solution": sol, "wedges": wedges });
        let s = CString::new(doc.to_string()).map_err(|e| Fail(AitaxStatus::Panic, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `solution` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aitax_solution_free(solution: *mut AitaxSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Brackets the steady-state regime flip of `name` in `[lo, hi]` to width `tol`.
///
/// # Safety
/// `config` must come from this library; `name` NUL-terminated; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_find_threshold(
    config: *const AitaxConfig,
    name: *const c_char,
    lo: f64,
    hi: f64,
    tol: f64,
    bracket_lo: *mut f64,
    bracket_hi: *mut f64,
) -> AitaxStatus {
    guard(|| {
        let cfg = borrow(config, "config")?;
        let param: ParamPath = text(name, "name")?
            .parse()
            .map_err(|e: Error| Fail(AitaxStatus::InvalidArgument, e.to_string()))?;
        if bracket_lo.is_null() || bracket_hi.is_null() {
            return Err(null("bracket output"));
        }
        let t = aitax::sweep::find_threshold(&cfg.0, param, lo, hi, tol)?;
        *bracket_lo = t.bracket.0;
        *bracket_hi = t.bracket.1;
        Ok(())
    })
}

/// Whether the technology passes all wage-premium checks on the default grid.
///
/// # Safety
/// `config` must come from this library; `passes` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aitax_check_assumptions(config: *const AitaxConfig, passes: *mut bool) -> AitaxStatus {
    guard(|| {
        let cfg = borrow(config, "config")?;
        let grid = planner::default_assumption_grid(&cfg.0, 5);
        let report = aitax::production::check_assumptions(&cfg.0.tech, &grid)?;
        *passes.as_mut().ok_or_else(|| null("passes"))? = report.all_pass();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn aitax_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
