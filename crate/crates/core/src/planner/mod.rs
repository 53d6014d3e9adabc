//! Constrained-efficient allocations by an active-set search over which
//! incentive constraint binds, each case solved as a square KKT system by
//! damped Newton.
//!
//! Unknowns are carried in logs (consumption above the UBI floor, hours,
//! capital stocks, feasibility multipliers) so iterates stay interior;
//! incentive multipliers are carried in levels and their sign is checked on
//! acceptance.

pub mod kkt;
pub mod newton;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::economy::{
    validate_config, AgentKind, Allocation, EconomyConfig, PeriodAllocation, SolveMode, TypePair, CONSUMPTION_FLOOR,
};
use crate::error::{Error, Result};
use crate::preferences::{icc_slack, lifetime_utility, u_prime, IccEvaluation, Stream, TOL_ICC};
use crate::production::{self, check_assumptions, AssumptionGrid, AssumptionReport, FactorInputs};

use kkt::Role;
pub use kkt::{foc_residuals, FocResiduals, KktCandidate};
use newton::NewtonOptions;

/// Which incentive constraints hold with equality and a positive multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NoneBind,
    CognitiveBinds,
    ManualBinds,
    BothBind,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::NoneBind => "none_bind",
            Regime::CognitiveBinds => "cognitive_binds",
            Regime::ManualBinds => "manual_binds",
            Regime::BothBind => "both_bind",
        }
    }

    fn active_set(self) -> TypePair<bool> {
        match self {
            Regime::NoneBind => TypePair::new(false, false),
            Regime::CognitiveBinds => TypePair::new(true, false),
            Regime::ManualBinds => TypePair::new(false, true),
            Regime::BothBind => TypePair::new(true, true),
        }
    }

    fn from_active(active: TypePair<bool>) -> Self {
        match (active.cognitive, active.manual) {
            (false, false) => Regime::NoneBind,
            (true, false) => Regime::CognitiveBinds,
            (false, true) => Regime::ManualBinds,
            (true, true) => Regime::BothBind,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none_bind" => Ok(Regime::NoneBind),
            "cognitive_binds" => Ok(Regime::CognitiveBinds),
            "manual_binds" => Ok(Regime::ManualBinds),
            "both_bind" => Ok(Regime::BothBind),
            other => Err(Error::Parse(format!("unknown regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    /// Feasibility multiplier per period.
    pub lambda: Vec<f64>,
    pub mu: TypePair<f64>,
    /// `X^K_t` per period.
    pub x_k: Vec<f64>,
    /// `X^AI_t` per period.
    pub x_ai: Vec<f64>,
    /// Wage-ratio chain term of each type's own incentive constraint in its labor condition.
    pub y_term: Vec<TypePair<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSolution {
    pub config: EconomyConfig,
    pub ubi: f64,
    pub allocation: Allocation,
    pub multipliers: Multipliers,
    pub regime: Regime,
    /// Max-norm of the KKT residuals at the returned point.
    pub foc_residual: f64,
    pub slacks: TypePair<IccEvaluation>,
    pub wages: Vec<TypePair<f64>>,
    /// `dF~/dK, dF~/dAI` per period.
    pub wealth_mp: Vec<[f64; 2]>,
    pub objective: f64,
    pub assumption_report: AssumptionReport,
    pub warnings: Vec<String>,
}

impl PlannerSolution {
    pub fn candidate(&self) -> KktCandidate {
        KktCandidate {
            allocation: self.allocation.clone(),
            lambda: self.multipliers.lambda.clone(),
            mu: self.multipliers.mu,
            ubi: self.ubi,
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.allocation.is_stationary()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub newton: NewtonOptions,
    /// Scaled restarts of the first-best point tried per active set.
    pub restarts: usize,
    /// Points per axis of the assumption grid attached to every solution.
    pub assumption_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            restarts: 8,
            assumption_points: 5,
        }
    }
}

/// Classifies a solution from its slacks and multipliers.
pub fn detect_regime(slacks: TypePair<f64>, mu: TypePair<f64>) -> Result<Regime> {
    let mut binds = TypePair::new(false, false);
    for h in AgentKind::BOTH {
        if mu[h] > TOL_ICC {
            if slacks[h].abs() > TOL_ICC {
                return Err(Error::InconsistentMultipliers(format!(
                    "mu_{h} = {:e} with slack {:e}",
                    mu[h], slacks[h]
                )));
            }
            binds[h] = true;
        }
    }
    Ok(Regime::from_active(binds))
}

/// Regime of a solved instance.
pub fn solution_regime(sol: &PlannerSolution) -> Result<Regime> {
    detect_regime(sol.slacks.map(|s| s.slack), sol.multipliers.mu)
}

// ---------------------------------------------------------------------------
// steady state

#[derive(Debug, Clone, Copy)]
struct StationaryLayout {
    ubi: f64,
    active: TypePair<bool>,
    pinned: TypePair<bool>,
}

impl StationaryLayout {
    fn len(&self) -> usize {
        let free_c = AgentKind::BOTH.iter().filter(|&&h| !self.pinned[h]).count();
        let mu = AgentKind::BOTH.iter().filter(|&&h| self.active[h]).count();
        free_c + 5 + mu
    }

    fn pack(&self, cand: &KktCandidate) -> DVector<f64> {
        let p = &cand.allocation.periods[0];
        let mut v = Vec::with_capacity(self.len());
        for h in AgentKind::BOTH {
            if !self.pinned[h] {
                v.push((p.c[h] - self.ubi).max(CONSUMPTION_FLOOR).ln());
            }
        }
        v.extend([
            p.l.cognitive.ln(),
            p.l.manual.ln(),
            p.k.ln(),
            p.ai.ln(),
            cand.lambda[0].ln(),
        ]);
        for h in AgentKind::BOTH {
            if self.active[h] {
                v.push(cand.mu[h]);
            }
        }
        DVector::from_vec(v)
    }

    fn unpack(&self, config: &EconomyConfig, x: &DVector<f64>) -> KktCandidate {
        let mut i = 0;
        let mut c = TypePair::new(0.0, 0.0);
        for h in AgentKind::BOTH {
            c[h] = if self.pinned[h] {
                self.ubi
            } else {
                i += 1;
                (x[i - 1].exp() + self.ubi).max(CONSUMPTION_FLOOR)
            };
        }
        let l = TypePair::new(x[i].exp(), x[i + 1].exp());
        let (k, ai, lambda) = (x[i + 2].exp(), x[i + 3].exp(), x[i + 4].exp());
        i += 5;
        let mut mu = TypePair::new(0.0, 0.0);
        for h in AgentKind::BOTH {
            if self.active[h] {
                mu[h] = x[i];
                i += 1;
            }
        }
        KktCandidate {
            allocation: Allocation::stationary(PeriodAllocation::new(config, c, l, k, ai)),
            lambda: vec![lambda],
            mu,
            ubi: self.ubi,
        }
    }

    fn residual(&self, config: &EconomyConfig, x: &DVector<f64>) -> Option<DVector<f64>> {
        let cand = self.unpack(config, x);
        let eval = kkt::evaluate(config, &cand).ok()?;
        let v: Vec<f64> = eval
            .components
            .iter()
            .filter(|c| match c.role {
                Role::Consumption { h, .. } => !self.pinned[h],
                Role::Labor { .. } | Role::Capital { .. } | Role::Feasibility { .. } => true,
                Role::IccSlack { h } => self.active[h],
                _ => false,
            })
            .map(|c| c.value)
            .collect();
        debug_assert_eq!(v.len(), self.len());
        if v.iter().all(|x| x.is_finite()) {
            Some(DVector::from_vec(v))
        } else {
            None
        }
    }
}

/// Capital stocks solving `beta dF~/di = 1` at fixed hours.
fn first_best_capital(config: &EconomyConfig, l: TypePair<f64>) -> Option<(f64, f64)> {
    let beta = config.prefs.beta;
    let lc = config.pi(AgentKind::Cognitive) * l.cognitive * config.z(AgentKind::Cognitive);
    let lm = config.pi(AgentKind::Manual) * l.manual * config.z(AgentKind::Manual);
    let f = |x: &DVector<f64>| {
        let mp = production::marginal_products(&config.tech, FactorInputs::new(lc, lm, x[0].exp(), x[1].exp())).ok()?;
        Some(DVector::from_vec(vec![
            beta * mp.wealth_k() - 1.0,
            beta * mp.wealth_ai() - 1.0,
        ]))
    };
    let opts = NewtonOptions {
        tol: 1e-12,
        ..NewtonOptions::default()
    };
    let start = (lc + lm).ln();
    let out = newton::solve(f, DVector::from_vec(vec![start, start]), &opts);
    out.converged.then(|| (out.x[0].exp(), out.x[1].exp()))
}

/// Initial candidate for the first-best system from a labor guess.
fn first_best_guess(config: &EconomyConfig, ubi: f64, hours: f64) -> Option<KktCandidate> {
    let l = TypePair::new(hours, hours);
    let (k, ai) = first_best_capital(config, l)?;
    let period = PeriodAllocation::new(config, TypePair::new(1.0, 1.0), l, k, ai);
    let y = production::output(
        &config.tech,
        FactorInputs::new(period.eff.cognitive, period.eff.manual, k, ai),
    )
    .ok()?;
    let c = y - config.tech.delta_k * k - config.tech.delta_ai * ai - config.g;
    if !(c > ubi) {
        return None;
    }
    let period = PeriodAllocation::new(config, TypePair::new(c, c), l, k, ai);
    Some(KktCandidate {
        allocation: Allocation::stationary(period),
        lambda: vec![u_prime(&config.prefs, c).ok()?],
        mu: TypePair::new(0.0, 0.0),
        ubi,
    })
}

fn scaled(cand: &KktCandidate, s: f64) -> KktCandidate {
    let mut out = cand.clone();
    for p in &mut out.allocation.periods {
        for h in AgentKind::BOTH {
            p.c[h] = cand.ubi + (p.c[h] - cand.ubi) * s;
            p.l[h] *= s;
            p.eff[h] *= s;
        }
        p.k *= s;
        p.ai *= s;
    }
    out.allocation.terminal.0 *= s;
    out.allocation.terminal.1 *= s;
    out
}

/// `1` first, then `n` log-spaced factors in `[1/2, 2]` nearest-to-one first.
fn restart_scalings(n: usize) -> Vec<f64> {
    let mut s: Vec<f64> = (0..n)
        .map(|k| {
            let frac = if n == 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
            (std::f64::consts::LN_2 * (2.0 * frac - 1.0)).exp()
        })
        .collect();
    s.sort_by(|a, b| a.ln().abs().total_cmp(&b.ln().abs()).then(a.total_cmp(b)));
    let mut out = vec![1.0];
    out.extend(s);
    out
}

fn run_stationary(
    config: &EconomyConfig,
    layout: StationaryLayout,
    start: &KktCandidate,
    opts: &NewtonOptions,
) -> Option<KktCandidate> {
    let x0 = layout.pack(start);
    let out = newton::solve(|x| layout.residual(config, x), x0, opts);
    out.converged.then(|| layout.unpack(config, &out.x))
}

/// Slack allowed on the sign of a pinned-consumption bound multiplier.
const PINNED_TOL: f64 = 1e-10;

/// Accepts a converged candidate for an active set: multipliers non-negative,
/// the constraints left out satisfied, bound multipliers of pinned consumption
/// non-negative.
fn acceptable(config: &EconomyConfig, layout: &StationaryLayout, cand: &KktCandidate) -> Result<bool> {
    let eval = kkt::evaluate(config, cand)?;
    for h in AgentKind::BOTH {
        if layout.active[h] && cand.mu[h] < -TOL_ICC {
            return Ok(false);
        }
        if !layout.active[h] && eval.lifetime_slack[h] < -TOL_ICC {
            return Ok(false);
        }
    }
    for c in &eval.components {
        if let Role::Consumption { h, .. } = c.role {
            if layout.pinned[h] && c.value > PINNED_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn build_solution(
    config: &EconomyConfig,
    cand: KktCandidate,
    opts: &SolveOptions,
    warnings: Vec<String>,
) -> Result<PlannerSolution> {
    let eval = kkt::evaluate(config, &cand)?;
    let residuals = foc_residuals(config, &cand)?;
    let wages: Vec<TypePair<f64>> = eval.terms.iter().map(|t| t.wages).collect();
    let slacks = TypePair::from_fn(|h| icc_slack(&cand.allocation, &wages, &config.prefs, h));
    let slacks = TypePair::new(slacks.cognitive?, slacks.manual?);

    let stationary = cand.allocation.is_stationary();
    let mut objective = 0.0;
    for h in AgentKind::BOTH {
        let value = if stationary {
            let p = &cand.allocation.periods[0];
            lifetime_utility(&config.prefs, Stream::Stationary(p.c[h], p.l[h]))?
        } else {
            let pairs: Vec<(f64, f64)> = cand.allocation.periods.iter().map(|p| (p.c[h], p.l[h])).collect();
            lifetime_utility(&config.prefs, Stream::Finite(&pairs))?
        };
        objective += config.pi(h) * value;
    }

    let grid = assumption_grid(&cand.allocation, opts.assumption_points.max(3));
    let assumption_report = check_assumptions(&config.tech, &grid)?;
    let regime = detect_regime(slacks.map(|s| s.slack), cand.mu)?;
    let mut warnings = warnings;
    if !assumption_report.all_pass() {
        warnings.push("technology does not pass the wage-premium assumption checks at the solution".into());
    }
    if regime == Regime::BothBind {
        warnings.push("both incentive constraints bind; outside the single-binding cases".into());
    }
    for h in AgentKind::BOTH {
        let j = h.other();
        if cand.mu[h] >= config.pi(j) + cand.mu[j] {
            warnings.push(format!("mu_{h} is not below pi_{j}; lambda > 0 is not attainable"));
        }
    }

    Ok(PlannerSolution {
        config: *config,
        ubi: cand.ubi,
        multipliers: Multipliers {
            lambda: cand.lambda.clone(),
            mu: cand.mu,
            x_k: eval.terms.iter().map(|t| t.x[0]).collect(),
            x_ai: eval.terms.iter().map(|t| t.x[1]).collect(),
            y_term: eval.terms.iter().map(|t| t.y_term).collect(),
        },
        wealth_mp: eval.terms.iter().map(|t| t.wealth_mp).collect(),
        allocation: cand.allocation,
        regime,
        foc_residual: residuals.max_abs(),
        slacks,
        wages,
        objective,
        assumption_report,
        warnings,
    })
}

/// Log-spaced grid over `[min/2, 2 max]` of each factor across periods.
fn assumption_grid(alloc: &Allocation, points: usize) -> AssumptionGrid {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [0.0f64; 4];
    for p in &alloc.periods {
        let x = [p.eff.cognitive, p.eff.manual, p.k, p.ai];
        for i in 0..4 {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
    }
    AssumptionGrid {
        axes: std::array::from_fn(|i| production::log_space(lo[i] / 2.0, hi[i] * 2.0, points)),
    }
}

fn steady_config(config: &EconomyConfig) -> Result<EconomyConfig> {
    validate_config(config).into_result()?;
    let mut cfg = *config;
    cfg.mode = SolveMode::SteadyState;
    Ok(cfg)
}

fn first_best_candidate(config: &EconomyConfig, ubi: f64, opts: &SolveOptions) -> Option<KktCandidate> {
    let layout = StationaryLayout {
        ubi,
        active: TypePair::new(false, false),
        pinned: TypePair::new(false, false),
    };
    for hours in [1.0, 0.5, 2.0, 0.25, 4.0, 0.1, 10.0] {
        let Some(guess) = first_best_guess(config, ubi, hours) else {
            continue;
        };
        if let Some(c) = run_stationary(config, layout, &guess, &opts.newton) {
            return Some(c);
        }
    }
    None
}

/// Steady state of the planner problem without incentive constraints.
pub fn first_best(config: &EconomyConfig) -> Result<PlannerSolution> {
    first_best_with(config, &SolveOptions::default())
}

pub fn first_best_with(config: &EconomyConfig, opts: &SolveOptions) -> Result<PlannerSolution> {
    let cfg = steady_config(config)?;
    let cand = first_best_candidate(&cfg, 0.0, opts)
        .ok_or_else(|| Error::NoInteriorSolution("Newton failed from every restart".into()))?;
    build_solution(&cfg, cand, opts, Vec::new())
}

/// `points` per axis over `[x/2, 2x]` around the first-best factor inputs;
/// `[0.5, 2]` on every axis when the first best does not solve.
pub fn default_assumption_grid(config: &EconomyConfig, points: usize) -> AssumptionGrid {
    match first_best(config) {
        Ok(fb) => {
            let p = &fb.allocation.periods[0];
            AssumptionGrid::around(FactorInputs::new(p.eff.cognitive, p.eff.manual, p.k, p.ai), points)
        }
        Err(_) => AssumptionGrid::uniform(0.5, 2.0, points),
    }
}

/// Active-set solve of the stationary planner problem.
pub fn solve_steady_state(config: &EconomyConfig) -> Result<PlannerSolution> {
    solve_stationary(config, 0.0, None, &SolveOptions::default())
}

pub fn solve_steady_state_with(
    config: &EconomyConfig,
    warm: Option<&PlannerSolution>,
    opts: &SolveOptions,
) -> Result<PlannerSolution> {
    solve_stationary(config, 0.0, warm, opts)
}

pub(crate) fn solve_stationary(
    config: &EconomyConfig,
    ubi: f64,
    warm: Option<&PlannerSolution>,
    opts: &SolveOptions,
) -> Result<PlannerSolution> {
    let cfg = steady_config(config)?;
    if !(ubi >= 0.0 && ubi.is_finite()) {
        return Err(Error::InfeasibleUbi(ubi));
    }

    // warm start: reuse the previous active set and point first
    if let Some(prev) = warm.filter(|p| p.is_stationary()) {
        let active = prev.regime.active_set();
        let layout = StationaryLayout {
            ubi,
            active,
            pinned: TypePair::new(false, false),
        };
        let mut start = prev.candidate();
        start.ubi = ubi;
        if let Some(c) = run_stationary(&cfg, layout, &start, &opts.newton) {
            if acceptable(&cfg, &layout, &c)? && (active.cognitive || active.manual || first_best_ok(&cfg, &c)?) {
                return build_solution(&cfg, c, opts, Vec::new());
            }
        }
    }

    let Some(fb) = first_best_candidate(&cfg, ubi, opts) else {
        return Err(if ubi > 0.0 {
            Error::InfeasibleUbi(ubi)
        } else {
            Error::NoRegimeFound("first-best system has no interior solution".into())
        });
    };
    let fb_eval = kkt::evaluate(&cfg, &fb)?;
    let fb_slack = fb_eval.lifetime_slack;
    if fb_slack.cognitive >= -TOL_ICC && fb_slack.manual >= -TOL_ICC {
        return build_solution(&cfg, fb, opts, Vec::new());
    }

    let mut order: Vec<AgentKind> = AgentKind::BOTH.to_vec();
    order.sort_by(|a, b| fb_slack[*a].total_cmp(&fb_slack[*b]));
    let mut sets = vec![Regime::from_active(TypePair::from_fn(|h| h == order[0]))];
    sets.push(Regime::from_active(TypePair::from_fn(|h| h == order[1])));
    sets.push(Regime::BothBind);

    let pin_options: Vec<TypePair<bool>> = if ubi > 0.0 {
        vec![
            TypePair::new(false, false),
            TypePair::new(true, false),
            TypePair::new(false, true),
            TypePair::new(true, true),
        ]
    } else {
        vec![TypePair::new(false, false)]
    };

    let mut notes = Vec::new();
    for pinned in &pin_options {
        for regime in &sets {
            let layout = StationaryLayout {
                ubi,
                active: regime.active_set(),
                pinned: *pinned,
            };
            for s in restart_scalings(opts.restarts) {
                for mu0 in [0.05, 0.005, 0.2] {
                    let mut start = scaled(&fb, s);
                    for h in AgentKind::BOTH {
                        if layout.active[h] {
                            start.mu[h] = mu0 * cfg.pi(h.other());
                        }
                    }
                    if let Some(c) = run_stationary(&cfg, layout, &start, &opts.newton) {
                        if acceptable(&cfg, &layout, &c)? {
                            return build_solution(&cfg, c, opts, Vec::new());
                        }
                        notes.push(format!("{regime}: converged point rejected by sign checks"));
                    }
                }
            }
        }
    }
    if ubi > 0.0 {
        return Err(Error::InfeasibleUbi(ubi));
    }
    notes.dedup();
    Err(Error::NoRegimeFound(if notes.is_empty() {
        "no active set converged".into()
    } else {
        notes.join("; ")
    }))
}

fn first_best_ok(config: &EconomyConfig, cand: &KktCandidate) -> Result<bool> {
    let eval = kkt::evaluate(config, cand)?;
    Ok(eval.lifetime_slack.cognitive >= -TOL_ICC && eval.lifetime_slack.manual >= -TOL_ICC)
}

/// Dispatches on the configured mode.
pub fn solve(config: &EconomyConfig) -> Result<PlannerSolution> {
    match config.mode {
        SolveMode::SteadyState => solve_steady_state(config),
        SolveMode::FiniteHorizon(_) => solve_finite_horizon(config),
    }
}

// ---------------------------------------------------------------------------
// finite horizon

#[derive(Debug, Clone, Copy)]
struct FiniteLayout {
    periods: usize,
    active: TypePair<bool>,
    terminal: (f64, f64),
}

impl FiniteLayout {
    fn mu_count(&self) -> usize {
        AgentKind::BOTH.iter().filter(|&&h| self.active[h]).count()
    }

    fn len(&self) -> usize {
        5 * self.periods + 2 * (self.periods - 1) + self.mu_count()
    }

    fn pack(&self, cand: &KktCandidate) -> DVector<f64> {
        let mut v = Vec::with_capacity(self.len());
        for (t, p) in cand.allocation.periods.iter().enumerate() {
            v.extend([
                p.c.cognitive.ln(),
                p.c.manual.ln(),
                p.l.cognitive.ln(),
                p.l.manual.ln(),
                cand.lambda[t].ln(),
            ]);
        }
        for p in &cand.allocation.periods[1..] {
            v.extend([p.k.ln(), p.ai.ln()]);
        }
        for h in AgentKind::BOTH {
            if self.active[h] {
                v.push(cand.mu[h]);
            }
        }
        DVector::from_vec(v)
    }

    fn unpack(&self, config: &EconomyConfig, x: &DVector<f64>) -> KktCandidate {
        let n = self.periods;
        let stocks = 5 * n;
        let mut periods = Vec::with_capacity(n);
        let mut lambda = Vec::with_capacity(n);
        for t in 0..n {
            let b = 5 * t;
            let c = TypePair::new(x[b].exp().max(CONSUMPTION_FLOOR), x[b + 1].exp().max(CONSUMPTION_FLOOR));
            let l = TypePair::new(x[b + 2].exp(), x[b + 3].exp());
            let (k, ai) = if t == 0 {
                (config.k0, config.ai0)
            } else {
                let s = stocks + 2 * (t - 1);
                (x[s].exp(), x[s + 1].exp())
            };
            periods.push(PeriodAllocation::new(config, c, l, k, ai));
            lambda.push(x[b + 4].exp());
        }
        let mut i = stocks + 2 * (n - 1);
        let mut mu = TypePair::new(0.0, 0.0);
        for h in AgentKind::BOTH {
            if self.active[h] {
                mu[h] = x[i];
                i += 1;
            }
        }
        KktCandidate {
            allocation: Allocation {
                periods,
                terminal: self.terminal,
            },
            lambda,
            mu,
            ubi: 0.0,
        }
    }

    fn residual(&self, config: &EconomyConfig, x: &DVector<f64>) -> Option<DVector<f64>> {
        let cand = self.unpack(config, x);
        let eval = kkt::evaluate(config, &cand).ok()?;
        let v: Vec<f64> = eval
            .components
            .iter()
            .filter(|c| match c.role {
                Role::Consumption { .. } | Role::Labor { .. } | Role::Capital { .. } | Role::Feasibility { .. } => true,
                Role::IccSlack { h } => self.active[h],
                _ => false,
            })
            .map(|c| c.value)
            .collect();
        debug_assert_eq!(v.len(), self.len());
        v.iter().all(|x| x.is_finite()).then(|| DVector::from_vec(v))
    }
}

fn repeat_steady(ss: &PlannerSolution, periods: usize, config: &EconomyConfig) -> KktCandidate {
    let p = ss.allocation.periods[0];
    let mut first = p;
    first.k = config.k0;
    first.ai = config.ai0;
    let mut all = vec![p; periods];
    all[0] = first;
    KktCandidate {
        allocation: Allocation {
            periods: all,
            terminal: (p.k, p.ai),
        },
        lambda: vec![ss.multipliers.lambda[0]; periods],
        mu: ss.multipliers.mu,
        ubi: 0.0,
    }
}

/// Direct transcription over `t = 0..=T` with initial stocks from the config
/// and terminal stocks pinned to the steady state.
pub fn solve_finite_horizon(config: &EconomyConfig) -> Result<PlannerSolution> {
    solve_finite_horizon_with(config, &SolveOptions::default())
}

pub fn solve_finite_horizon_with(config: &EconomyConfig, opts: &SolveOptions) -> Result<PlannerSolution> {
    let horizon = match config.mode {
        SolveMode::FiniteHorizon(t) if t >= 1 => t,
        SolveMode::FiniteHorizon(t) => return Err(Error::HorizonTooShort(t)),
        SolveMode::SteadyState => return Err(Error::HorizonTooShort(0)),
    };
    validate_config(config).into_result()?;
    if !(config.k0 > 0.0 && config.ai0 > 0.0) {
        return Err(Error::Domain(
            "finite-horizon solves need positive initial stocks".into(),
        ));
    }
    let ss = solve_stationary(config, 0.0, None, opts)?;
    let (k_ss, ai_ss) = (ss.allocation.periods[0].k, ss.allocation.periods[0].ai);
    let periods = horizon + 1;

    let mut sets = vec![ss.regime];
    for r in [
        Regime::NoneBind,
        Regime::CognitiveBinds,
        Regime::ManualBinds,
        Regime::BothBind,
    ] {
        if !sets.contains(&r) {
            sets.push(r);
        }
    }

    for regime in sets {
        let layout = FiniteLayout {
            periods,
            active: regime.active_set(),
            terminal: (k_ss, ai_ss),
        };
        for steps in [1usize, 4, 16] {
            let mut cfg = *config;
            let mut cand: Option<KktCandidate> = None;
            let mut ok = true;
            for s in 1..=steps {
                let frac = s as f64 / steps as f64;
                cfg.k0 = k_ss + (config.k0 - k_ss) * frac;
                cfg.ai0 = ai_ss + (config.ai0 - ai_ss) * frac;
                let mut start = match &cand {
                    Some(c) => c.clone(),
                    None => repeat_steady(&ss, periods, &cfg),
                };
                start.allocation.periods[0].k = cfg.k0;
                start.allocation.periods[0].ai = cfg.ai0;
                for h in AgentKind::BOTH {
                    if layout.active[h] && start.mu[h] == 0.0 {
                        start.mu[h] = 0.05 * cfg.pi(h.other());
                    }
                    if !layout.active[h] {
                        start.mu[h] = 0.0;
                    }
                }
                let x0 = layout.pack(&start);
                let out = newton::solve(|x| layout.residual(&cfg, x), x0, &opts.newton);
                if !out.converged {
                    ok = false;
                    break;
                }
                cand = Some(layout.unpack(&cfg, &out.x));
            }
            if !ok {
                continue;
            }
            let cand = cand.expect("at least one continuation step");
            let eval = kkt::evaluate(config, &cand)?;
            let signs_ok = AgentKind::BOTH.iter().all(|&h| {
                if layout.active[h] {
                    cand.mu[h] >= -TOL_ICC
                } else {
                    eval.lifetime_slack[h] >= -TOL_ICC
                }
            });
            if signs_ok {
                return build_solution(config, cand, opts, Vec::new());
            }
            break;
        }
    }
    Err(Error::NoRegimeFound("no active set converged over the horizon".into()))
}
