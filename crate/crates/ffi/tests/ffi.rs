use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use aitax::EconomyConfig;
use aitax_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(aitax_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn desk(kind: AitaxDesk) -> *mut AitaxConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { aitax_config_desk(kind as i32, &mut cfg) }, AitaxStatus::Ok);
    cfg
}

fn summary(cfg: *const AitaxConfig) -> AitaxSummary {
    let mut sol = ptr::null_mut();
    assert_eq!(
        unsafe { aitax_solve(cfg, &mut sol) },
        AitaxStatus::Ok,
        "{}",
        last_error()
    );
    let mut s = AitaxSummary::default();
    assert_eq!(unsafe { aitax_solution_summary(sol, &mut s) }, AitaxStatus::Ok);
    unsafe { aitax_solution_free(sol) };
    s
}

#[test]
fn desks_solve_to_their_regimes() {
    for (kind, regime) in [
        (AitaxDesk::Symmetric, AitaxRegime::NoneBind),
        (AitaxDesk::CognitiveBinding, AitaxRegime::CognitiveBinds),
        (AitaxDesk::ManualBinding, AitaxRegime::ManualBinds),
    ] {
        let cfg = desk(kind);
        let s = summary(cfg);
        assert_eq!(s.regime, regime as i32, "{kind:?}");
        assert!(s.foc_residual <= 1e-8);
        assert_eq!(s.periods, 1);
        unsafe { aitax_config_free(cfg) };
    }
}

#[test]
fn summary_matches_library() {
    let cfg = desk(AitaxDesk::ManualBinding);
    let s = summary(cfg);
    let sol = aitax::planner::solve_steady_state(&EconomyConfig::manual_binding_desk()).unwrap();
    let r = aitax::wedges::wedge_report(&sol).unwrap();
    assert_eq!(s.tau_y_c, r.tau_y[0].cognitive);
    assert_eq!(s.tau_y_m, r.tau_y[0].manual);
    assert_eq!(s.mu_m, sol.multipliers.mu.manual);
    assert_eq!(s.objective, sol.objective);
    assert!(s.tau_ai > 0.0 && s.tau_k < 0.0);
    unsafe { aitax_config_free(cfg) };
}

#[test]
fn toml_parameters_and_errors() {
    let text = aitax::cli::config::to_toml(&EconomyConfig::threshold_desk()).unwrap();
    let c = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { aitax_config_from_toml(c.as_ptr(), &mut cfg) }, AitaxStatus::Ok);

    let name = CString::new("a_ai").unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { aitax_config_get(cfg, name.as_ptr(), &mut v) }, AitaxStatus::Ok);
    assert_eq!(v, 0.1);
    assert_eq!(
        unsafe { aitax_config_set(cfg, name.as_ptr(), -1.0) },
        AitaxStatus::InvalidConfig
    );
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { aitax_config_get(cfg, name.as_ptr(), &mut v) }, AitaxStatus::Ok);
    assert_eq!(v, 0.1, "failed set leaves config unchanged");
    assert!(last_error().is_empty());

    let (mut lo, mut hi) = (0.0, 0.0);
    let st = unsafe { aitax_find_threshold(cfg, name.as_ptr(), 0.1, 10.0, 1e-3, &mut lo, &mut hi) };
    assert_eq!(st, AitaxStatus::Ok, "{}", last_error());
    assert!(hi - lo <= 1e-3 && lo > 0.1 && hi < 0.2);
    unsafe { aitax_config_free(cfg) };

    let bad = CString::new("g = 0.05\nbogus = 1").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(
        unsafe { aitax_config_from_toml(bad.as_ptr(), &mut cfg) },
        AitaxStatus::InvalidConfig
    );
    assert!(cfg.is_null());
    assert!(last_error().contains("config parse error"));
}

#[test]
fn null_and_invalid_arguments() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { aitax_config_desk(99, &mut cfg) }, AitaxStatus::InvalidArgument);
    assert_eq!(
        unsafe { aitax_config_desk(0, ptr::null_mut()) },
        AitaxStatus::NullPointer
    );
    assert_eq!(
        unsafe { aitax_config_from_toml(ptr::null(), &mut cfg) },
        AitaxStatus::NullPointer
    );
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { aitax_solve(ptr::null(), &mut sol) }, AitaxStatus::NullPointer);
    let bytes = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { aitax_config_from_toml(bytes.as_ptr().cast(), &mut cfg) },
        AitaxStatus::InvalidString
    );
    let c = desk(AitaxDesk::Symmetric);
    let name = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { aitax_config_set(c, name.as_ptr(), 1.0) },
        AitaxStatus::InvalidArgument
    );
    let mut passes = false;
    assert_eq!(unsafe { aitax_check_assumptions(c, &mut passes) }, AitaxStatus::Ok);
    assert!(passes);
    unsafe {
        aitax_config_free(c);
        aitax_config_free(ptr::null_mut());
        aitax_solution_free(ptr::null_mut());
        aitax_string_free(ptr::null_mut());
    }
}

#[test]
fn json_export_round_trips() {
    let cfg = desk(AitaxDesk::CognitiveBinding);
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { aitax_solve(cfg, &mut sol) }, AitaxStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { aitax_solution_to_json(sol, &mut s) }, AitaxStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe {
        aitax_string_free(s);
        aitax_solution_free(sol);
        aitax_config_free(cfg);
    }
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["solution"]["regime"], "cognitive_binds");
    assert_eq!(doc["wedges"]["verdicts"]["applicable"], true);
}

#[test]
fn errors_are_per_thread() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { aitax_config_desk(99, &mut cfg) }, AitaxStatus::InvalidArgument);
    std::thread::spawn(|| assert!(last_error().is_empty())).join().unwrap();
    assert!(last_error().contains("99"));
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_is_current_and_links_from_c() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(crate_dir.join("include/aitax.h")).unwrap();
    for f in [
        "aitax_last_error",
        "aitax_version",
        "aitax_config_from_toml",
        "aitax_config_desk",
        "aitax_config_set",
        "aitax_config_get",
        "aitax_config_free",
        "aitax_solve",
        "aitax_solution_summary",
        "aitax_solution_to_json",
        "aitax_solution_free",
        "aitax_find_threshold",
        "aitax_check_assumptions",
        "aitax_string_free",
        "typedef struct AitaxConfig AitaxConfig",
        "AITAX_REGIME_MANUAL_BINDS",
    ] {
        assert!(header.contains(f), "header lacks {f}");
    }

    let lib = target_dir().join("libaitax_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C link check: no static library or C compiler");
        return;
    }
    let out_dir = smoke_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "C smoke exited {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}

fn smoke_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi-smoke");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
