//! Command-line front end: `check-assumptions`, `solve`, `sweep`, `oracle-verify`.
//!
//! Exit codes are stable: 0 success, 1 assumption failure, 2 usage or config
//! error, 3 solver failure, 4 both constraints bind, 5 no regime flip between
//! the sweep endpoints, 6 oracle disagreement.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::economy::{EconomyConfig, SolveMode};
use crate::error::Error;
use crate::oracle::{self, GridSpec, OracleComparison};
use crate::planner::{self, foc_residuals, PlannerSolution, Regime};
use crate::production::{self, AssumptionGrid, AssumptionReport, Verdict};
use crate::sweep::{self, ParamPath, SweepResult, Threshold};
use crate::wedges::{wedge_report, ClaimVerdict, WedgeReport};
use config::load_config;
use output::{manifest_path, to_json, write_file, Cell, Outcome, RunManifest, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSUMPTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_BOTH_BIND: i32 = 4;
pub const EXIT_NO_FLIP: i32 = 5;
pub const EXIT_ORACLE: i32 = 6;

/// Reserved for stochastic components; every algorithm here is deterministic.
pub const SEED_VAR: &str = "PLANNER_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "aitax",
    version,
    about = "Optimal taxation of capital, AI and labor with incentive constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the wage-premium assumptions of the technology on a grid.
    CheckAssumptions(CheckArgs),
    /// Solve the planner problem and report allocation, multipliers and wedges.
    Solve(SolveArgs),
    /// Sweep one parameter and optionally bracket the regime flip.
    Sweep(SweepArgs),
    /// Compare the steady state against a brute-force grid search.
    OracleVerify(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Steady,
    Finite,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; JSON goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub config: PathBuf,
    /// Points per axis.
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    /// Lower end of a uniform grid on every input; default is a grid around the first-best steady state.
    #[arg(long, requires = "hi")]
    pub lo: Option<f64>,
    #[arg(long, requires = "lo")]
    pub hi: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub config: PathBuf,
    /// Overrides the mode in the config file.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Horizon for `--mode finite`.
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// One of a_ai, z_c, z_m, mu_top, theta_m, delta_ai.
    #[arg(long)]
    pub param: String,
    #[arg(long)]
    pub lo: f64,
    #[arg(long)]
    pub hi: f64,
    #[arg(long, default_value_t = 25)]
    pub points: usize,
    /// Log-spaced grid.
    #[arg(long)]
    pub log: bool,
    /// Bisect the regime flip between the endpoints.
    #[arg(long)]
    pub threshold: bool,
    /// Bracket width for `--threshold`.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Solve every point from scratch, in parallel.
    #[arg(long)]
    pub cold: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub config: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub grid_points: usize,
    /// Factor the grid spans each way around the solution.
    #[arg(long, default_value_t = oracle::DEFAULT_SPREAD)]
    pub spread: f64,
    /// Allowance per unit of grid diagonal step in the objective comparison.
    #[arg(long, default_value_t = oracle::LIPSCHITZ_ALLOWANCE)]
    pub lipschitz: f64,
    /// Verify this solution file (JSON from `solve`) instead of solving.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses arguments, runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (name, config_path) = match &cli.command {
        Command::CheckAssumptions(a) => ("check-assumptions", &a.config),
        Command::Solve(a) => ("solve", &a.config),
        Command::Sweep(a) => ("sweep", &a.config),
        Command::OracleVerify(a) => ("oracle-verify", &a.config),
    };
    let loaded = match load_config(config_path) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut manifest = RunManifest::new(name, config_path, &loaded.bytes);
    if let Ok(seed) = std::env::var(SEED_VAR) {
        manifest.param("planner_seed_ignored", seed);
    }
    let mut run = Run {
        manifest,
        start: Instant::now(),
    };
    let cfg = loaded.config;
    let result = match &cli.command {
        Command::CheckAssumptions(a) => check_assumptions(&mut run, &cfg, a),
        Command::Solve(a) => solve(&mut run, &cfg, a),
        Command::Sweep(a) => sweep(&mut run, &cfg, a),
        Command::OracleVerify(a) => oracle_verify(&mut run, &cfg, a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn fail(code: i32, e: impl ToString) -> CliError {
    CliError {
        code,
        message: e.to_string(),
    }
}

/// Exit code for a library error raised while computing.
fn code_of(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::Parse(_) | Error::DegenerateGrid(_) | Error::InfeasibleUbi(_) => EXIT_USAGE,
        Error::NoFlipInRange(_) => EXIT_NO_FLIP,
        Error::Io(_) => EXIT_USAGE,
        _ => EXIT_SOLVER,
    }
}

fn lib(e: Error) -> CliError {
    fail(code_of(&e), e)
}

type CliResult = Result<i32, CliError>;

struct Run {
    manifest: RunManifest,
    start: Instant,
}

impl Run {
    fn finish(&mut self, code: i32, message: impl Into<String>) {
        self.manifest.duration_seconds = self.start.elapsed().as_secs_f64();
        self.manifest.outcome = Outcome {
            exit_code: code,
            message: message.into(),
        };
    }

    /// Writes `payload` (JSON) or `table` (CSV plus manifest sidecar).
    fn emit<P: Serialize>(&self, out: &OutputArgs, payload: &P, table: &Table) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Doc<'a, P> {
            manifest: &'a RunManifest,
            #[serde(flatten)]
            payload: &'a P,
            table: &'a Table,
        }
        let doc = Doc {
            manifest: &self.manifest,
            payload,
            table,
        };
        let io = |e: Error| fail(EXIT_USAGE, e);
        match (out.format, &out.out) {
            (Format::Json, None) => {
                print!("{}", to_json(&doc).map_err(io)?);
            }
            (Format::Json, Some(path)) => write_file(path, &to_json(&doc).map_err(io)?).map_err(io)?,
            (Format::Csv, None) => return Err(fail(EXIT_USAGE, "--format csv needs --out")),
            (Format::Csv, Some(path)) => {
                write_file(path, &table.to_csv().map_err(io)?).map_err(io)?;
                write_file(&manifest_path(path), &to_json(&self.manifest).map_err(io)?).map_err(io)?;
            }
        }
        Ok(())
    }
}

fn sidecar(out: &OutputArgs, suffix: &str) -> Option<PathBuf> {
    out.out.as_ref().map(|p| {
        let mut s = p.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    })
}

// ---------------------------------------------------------------------------
// check-assumptions

const INPUT_NAMES: [&str; 4] = ["l_c", "l_m", "k", "ai"];

fn assumption_table(report: &AssumptionReport) -> Table {
    let mut t = Table::new(&[
        "assumption",
        "verdict",
        "worst_derivative",
        "worst_direction",
        "worst_l_c",
        "worst_l_m",
        "worst_k",
        "worst_ai",
    ]);
    for c in report.checks() {
        let p = c.worst_point.to_array();
        t.push(vec![
            Cell::text(format!("{:?}", c.assumption)),
            Cell::text(verdict_name(c.verdict)),
            Cell::Num(c.worst_derivative),
            Cell::text(INPUT_NAMES[c.worst_direction]),
            Cell::Num(p[0]),
            Cell::Num(p[1]),
            Cell::Num(p[2]),
            Cell::Num(p[3]),
        ]);
    }
    t
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::NonStrict => "non_strict",
    }
}

fn check_assumptions(run: &mut Run, cfg: &EconomyConfig, a: &CheckArgs) -> CliResult {
    run.manifest.param("points", a.points);
    if a.points < 3 {
        return Err(fail(EXIT_USAGE, "assumption grid needs at least 3 points per axis"));
    }
    let grid = match (a.lo, a.hi) {
        (Some(lo), Some(hi)) => {
            run.manifest.param("lo", lo);
            run.manifest.param("hi", hi);
            if !(lo > 0.0 && hi > lo) {
                return Err(fail(EXIT_USAGE, "grid needs 0 < lo < hi"));
            }
            AssumptionGrid::uniform(lo, hi, a.points)
        }
        _ => {
            run.manifest.param("grid", "first_best_centered");
            planner::default_assumption_grid(cfg, a.points)
        }
    };
    let report = production::check_assumptions(&cfg.tech, &grid).map_err(lib)?;
    let code = if report.all_pass() { EXIT_OK } else { EXIT_ASSUMPTION };
    let summary: Vec<String> = report
        .checks()
        .iter()
        .map(|c| format!("{:?} {}", c.assumption, verdict_name(c.verdict)))
        .collect();
    let message = summary.join(", ");
    eprintln!("{message}");
    run.finish(code, message);
    #[derive(Serialize)]
    struct Payload<'a> {
        report: &'a AssumptionReport,
    }
    run.emit(&a.output, &Payload { report: &report }, &assumption_table(&report))?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// solve

fn claim_cell(report: &WedgeReport, i: usize) -> Cell {
    match report.verdicts.claims.get(i) {
        Some(c) if report.verdicts.applicable => Cell::text(c.verdict.as_str()),
        _ => Cell::text("not_applicable"),
    }
}

/// One row per period.
pub fn solution_table(sol: &PlannerSolution, wedges: &WedgeReport) -> Table {
    let mut t = Table::new(&[
        "t",
        "c_c",
        "c_m",
        "l_c",
        "l_m",
        "k",
        "ai",
        "w_c",
        "w_m",
        "dwealth_dk",
        "dwealth_dai",
        "lambda",
        "mu_c",
        "mu_m",
        "x_k",
        "x_ai",
        "tau_k_c",
        "tau_k_m",
        "tau_ai_c",
        "tau_ai_m",
        "tau_y_c",
        "tau_y_m",
        "slack_c",
        "slack_m",
        "regime",
        "foc_residual",
        "p1",
        "p2",
        "p3",
    ]);
    let mu = sol.multipliers.mu;
    for (i, p) in sol.allocation.periods.iter().enumerate() {
        let opt = |v: Option<f64>| v.map(Cell::Num).unwrap_or(Cell::Empty);
        let tk = wedges.tau_k.get(i);
        let tai = wedges.tau_ai.get(i);
        t.push(vec![
            Cell::Int(i as i64),
            Cell::Num(p.c.cognitive),
            Cell::Num(p.c.manual),
            Cell::Num(p.l.cognitive),
            Cell::Num(p.l.manual),
            Cell::Num(p.k),
            Cell::Num(p.ai),
            Cell::Num(sol.wages[i].cognitive),
            Cell::Num(sol.wages[i].manual),
            Cell::Num(sol.wealth_mp[i][0]),
            Cell::Num(sol.wealth_mp[i][1]),
            Cell::Num(sol.multipliers.lambda[i]),
            Cell::Num(mu.cognitive),
            Cell::Num(mu.manual),
            Cell::Num(sol.multipliers.x_k[i]),
            Cell::Num(sol.multipliers.x_ai[i]),
            opt(tk.map(|w| w.cognitive)),
            opt(tk.map(|w| w.manual)),
            opt(tai.map(|w| w.cognitive)),
            opt(tai.map(|w| w.manual)),
            Cell::Num(wedges.tau_y[i].cognitive),
            Cell::Num(wedges.tau_y[i].manual),
            Cell::Num(sol.slacks.cognitive.slack),
            Cell::Num(sol.slacks.manual.slack),
            Cell::text(sol.regime.as_str()),
            Cell::Num(sol.foc_residual),
            claim_cell(wedges, 0),
            claim_cell(wedges, 1),
            claim_cell(wedges, 2),
        ]);
    }
    t
}

/// Solves in the requested mode. A finite horizon with both initial stocks
/// at zero starts from the steady state.
pub fn solve_config(cfg: &EconomyConfig) -> crate::Result<PlannerSolution> {
    match cfg.mode {
        SolveMode::SteadyState => planner::solve_steady_state(cfg),
        SolveMode::FiniteHorizon(_) => {
            let mut c = *cfg;
            if c.k0 == 0.0 && c.ai0 == 0.0 {
                let ss = planner::solve_steady_state(cfg)?;
                c.k0 = ss.allocation.periods[0].k;
                c.ai0 = ss.allocation.periods[0].ai;
            }
            planner::solve_finite_horizon(&c)
        }
    }
}

fn solve(run: &mut Run, cfg: &EconomyConfig, a: &SolveArgs) -> CliResult {
    let mut cfg = *cfg;
    match (a.mode, a.horizon) {
        (Some(Mode::Steady), _) => cfg.mode = SolveMode::SteadyState,
        (Some(Mode::Finite), Some(t)) => cfg.mode = SolveMode::FiniteHorizon(t),
        (Some(Mode::Finite), None) => {
            if !matches!(cfg.mode, SolveMode::FiniteHorizon(_)) {
                return Err(fail(
                    EXIT_USAGE,
                    "--mode finite needs --T or a finite_horizon mode in the config",
                ));
            }
        }
        (None, Some(t)) => cfg.mode = SolveMode::FiniteHorizon(t),
        (None, None) => {}
    }
    run.manifest.param(
        "mode",
        match cfg.mode {
            SolveMode::SteadyState => "steady".to_string(),
            SolveMode::FiniteHorizon(t) => format!("finite T={t}"),
        },
    );
    let sol = solve_config(&cfg).map_err(|e| {
        run.finish(code_of(&e), e.to_string());
        lib(e)
    })?;
    let wedges = wedge_report(&sol).map_err(lib)?;
    let residuals = foc_residuals(&sol.config, &sol.candidate()).map_err(lib)?;
    let code = if sol.regime == Regime::BothBind {
        EXIT_BOTH_BIND
    } else {
        EXIT_OK
    };
    let verdicts: Vec<String> = wedges
        .verdicts
        .claims
        .iter()
        .map(|c| format!("{} {}", c.name, c.verdict.as_str()))
        .collect();
    let mut message = format!("regime {}; foc residual {:.2e}", sol.regime, sol.foc_residual);
    if !verdicts.is_empty() {
        message.push_str(&format!("; {}", verdicts.join(", ")));
    }
    for w in &sol.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{message}");
    run.finish(code, message);
    #[derive(Serialize)]
    struct Payload<'a> {
        solution: &'a PlannerSolution,
        wedges: &'a WedgeReport,
        foc_residuals: &'a planner::FocResiduals,
    }
    let payload = Payload {
        solution: &sol,
        wedges: &wedges,
        foc_residuals: &residuals,
    };
    run.emit(&a.output, &payload, &solution_table(&sol, &wedges))?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// sweep

pub fn sweep_table(result: &SweepResult) -> Table {
    let mut t = Table::new(&[
        result.param.as_str(),
        "status",
        "regime",
        "tau_k",
        "tau_ai",
        "tau_y_c",
        "tau_y_m",
        "wage_ratio",
        "objective",
        "failure",
    ]);
    for p in &result.points {
        let mut row = vec![Cell::Num(p.value)];
        match p.summary {
            Some(s) => row.extend([
                Cell::text("ok"),
                Cell::text(s.regime.as_str()),
                Cell::Num(s.tau_k),
                Cell::Num(s.tau_ai),
                Cell::Num(s.tau_y_c),
                Cell::Num(s.tau_y_m),
                Cell::Num(s.wage_ratio),
                Cell::Num(s.objective),
                Cell::Empty,
            ]),
            None => {
                row.push(Cell::text("failed"));
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                row.push(Cell::text(p.failure.clone().unwrap_or_default()));
            }
        }
        t.push(row);
    }
    t
}

fn sweep(run: &mut Run, cfg: &EconomyConfig, a: &SweepArgs) -> CliResult {
    let param: ParamPath = a.param.parse().map_err(lib)?;
    for (k, v) in [
        ("param", param.to_string()),
        ("lo", a.lo.to_string()),
        ("hi", a.hi.to_string()),
        ("points", a.points.to_string()),
        ("log", a.log.to_string()),
        ("threshold", a.threshold.to_string()),
        ("cold", a.cold.to_string()),
    ] {
        run.manifest.param(k, v);
    }
    let values = sweep::grid(a.lo, a.hi, a.points, a.log).map_err(lib)?;
    let result = if a.cold {
        sweep::sweep_cold(cfg, param, &values)
    } else {
        sweep::sweep(cfg, param, &values)
    }
    .map_err(lib)?;

    let mut code = EXIT_OK;
    let mut threshold: Option<Threshold> = None;
    let mut message = format!(
        "{} of {} points converged; {} regime change(s)",
        result.points.iter().filter(|p| p.summary.is_some()).count(),
        result.points.len(),
        result.regime_changes()
    );
    if a.threshold {
        run.manifest.param("tol", a.tol);
        match sweep::find_threshold(cfg, param, a.lo, a.hi, a.tol) {
            Ok(t) => {
                message.push_str(&format!(
                    "; bracket [{}, {}]",
                    output::num(t.bracket.0),
                    output::num(t.bracket.1)
                ));
                if let Some(an) = &t.anomaly {
                    message.push_str(&format!("; anomaly: {an}"));
                }
                threshold = Some(t);
            }
            Err(e) => {
                code = code_of(&e);
                message.push_str(&format!("; {e}"));
            }
        }
    }
    eprintln!("{message}");
    run.finish(code, message);
    #[derive(Serialize)]
    struct Payload<'a> {
        sweep: &'a SweepResult,
        threshold: &'a Option<Threshold>,
    }
    run.emit(
        &a.output,
        &Payload {
            sweep: &result,
            threshold: &threshold,
        },
        &sweep_table(&result),
    )?;
    if let (Some(t), Some(path)) = (&threshold, sidecar(&a.output, ".threshold.json")) {
        #[derive(Serialize)]
        struct Bracket<'a> {
            manifest: &'a RunManifest,
            threshold: &'a Threshold,
        }
        let doc = Bracket {
            manifest: &run.manifest,
            threshold: t,
        };
        write_file(&path, &to_json(&doc).map_err(lib)?).map_err(lib)?;
    }
    Ok(code)
}

// ---------------------------------------------------------------------------
// oracle-verify

fn oracle_table(c: &OracleComparison) -> Table {
    let mut t = Table::new(&[
        "solver_objective",
        "oracle_objective",
        "allowance",
        "objective_ok",
        "solver_regime",
        "oracle_regime",
        "regimes_agree",
        "best_c_c",
        "best_c_m",
        "best_l_c",
        "best_l_m",
        "best_k",
        "best_ai",
    ]);
    let mut row = vec![
        Cell::Num(c.solver_objective),
        Cell::Num(c.oracle_objective),
        Cell::Num(c.allowance),
        Cell::text(c.objective_ok.to_string()),
        Cell::text(c.solver_regime.as_str()),
        Cell::text(c.oracle_regime.map(|r| r.as_str()).unwrap_or("indeterminate")),
        Cell::text(c.regimes_agree.to_string()),
    ];
    row.extend(c.oracle.best.values.iter().map(|&v| Cell::Num(v)));
    t.push(row);
    t
}

/// Reads a `solve` JSON file and checks it is a converged steady state of `cfg`.
fn read_solution(path: &Path, cfg: &EconomyConfig) -> Result<PlannerSolution, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("solution file is not JSON: {e}"))?;
    let sol: PlannerSolution = serde_json::from_value(doc.get("solution").cloned().unwrap_or(doc))
        .map_err(|e| format!("solution file is malformed: {e}"))?;
    if sol.config != *cfg {
        return Err("solution file was produced for a different economy".into());
    }
    if !sol.is_stationary() {
        return Err("solution file is not a steady state".into());
    }
    let res = foc_residuals(cfg, &sol.candidate()).map_err(|e| format!("solution file does not evaluate: {e}"))?;
    if !(res.max_abs() <= 1e-8) {
        return Err(format!(
            "solution file violates optimality conditions (max residual {:.3e})",
            res.max_abs()
        ));
    }
    Ok(sol)
}

fn oracle_verify(run: &mut Run, cfg: &EconomyConfig, a: &OracleArgs) -> CliResult {
    run.manifest.param("grid_points", a.grid_points);
    run.manifest.param("spread", a.spread);
    run.manifest.param("lipschitz", a.lipschitz);
    if a.grid_points < 3 || !(a.spread > 1.0) {
        return Err(fail(
            EXIT_USAGE,
            "oracle grid needs at least 3 points and a spread above 1",
        ));
    }
    let mut cfg = *cfg;
    cfg.mode = SolveMode::SteadyState;
    let sol = match &a.solution {
        Some(path) => {
            run.manifest.param("solution", path.display());
            match read_solution(path, &cfg) {
                Ok(s) => s,
                Err(msg) => {
                    run.finish(EXIT_ORACLE, msg.clone());
                    return Err(fail(EXIT_ORACLE, msg));
                }
            }
        }
        None => planner::solve_steady_state(&cfg).map_err(lib)?,
    };
    let grid = GridSpec::around_solution(&sol, a.spread, a.grid_points);
    let cmp = oracle::compare(&cfg, &sol, &grid, a.lipschitz).map_err(lib)?;
    let code = if cmp.agrees() { EXIT_OK } else { EXIT_ORACLE };
    let message = format!(
        "solver {} / oracle {}; objective {} vs oracle {} (allowance {:.3e})",
        cmp.solver_regime,
        cmp.oracle_regime.map(|r| r.as_str()).unwrap_or("indeterminate"),
        output::num(cmp.solver_objective),
        output::num(cmp.oracle_objective),
        cmp.allowance
    );
    eprintln!("{message}");
    run.finish(code, message);
    #[derive(Serialize)]
    struct Payload<'a> {
        comparison: &'a OracleComparison,
        grid: &'a GridSpec,
    }
    run.emit(
        &a.output,
        &Payload {
            comparison: &cmp,
            grid: &grid,
        },
        &oracle_table(&cmp),
    )?;
    Ok(code)
}

/// Claim verdicts of a solution in type order of the binding constraint; used by tests.
pub fn verdict_summary(report: &WedgeReport) -> Vec<(String, ClaimVerdict)> {
    report
        .verdicts
        .claims
        .iter()
        .map(|c| (c.name.clone(), c.verdict))
        .collect()
}
