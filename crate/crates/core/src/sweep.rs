//! One-parameter sweeps, regime-flip bracketing and the lump-sum transfer re-solve.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::economy::{validate_config, AgentKind, EconomyConfig};
use crate::error::{Error, Result};
use crate::planner::{self, PlannerSolution, Regime, SolveOptions};
use crate::wedges::{intratemporal_wedge, wedge_via_multipliers, CapitalKind};

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamPath {
    AAi,
    ZC,
    ZM,
    MuTop,
    ThetaM,
    DeltaAi,
}

impl ParamPath {
    pub const ALL: [ParamPath; 6] = [
        ParamPath::AAi,
        ParamPath::ZC,
        ParamPath::ZM,
        ParamPath::MuTop,
        ParamPath::ThetaM,
        ParamPath::DeltaAi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamPath::AAi => "a_ai",
            ParamPath::ZC => "z_c",
            ParamPath::ZM => "z_m",
            ParamPath::MuTop => "mu_top",
            ParamPath::ThetaM => "theta_m",
            ParamPath::DeltaAi => "delta_ai",
        }
    }

    pub fn get(self, config: &EconomyConfig) -> f64 {
        match self {
            ParamPath::AAi => config.tech.a_ai,
            ParamPath::ZC => config.agents.cognitive.z,
            ParamPath::ZM => config.agents.manual.z,
            ParamPath::MuTop => config.tech.mu_top,
            ParamPath::ThetaM => config.tech.theta_m,
            ParamPath::DeltaAi => config.tech.delta_ai,
        }
    }

    /// Copy of `config` with the parameter set to `value`, validated.
    pub fn apply(self, config: &EconomyConfig, value: f64) -> Result<EconomyConfig> {
        let mut cfg = *config;
        match self {
            ParamPath::AAi => cfg.tech.a_ai = value,
            ParamPath::ZC => cfg.agents.cognitive.z = value,
            ParamPath::ZM => cfg.agents.manual.z = value,
            ParamPath::MuTop => cfg.tech.mu_top = value,
            ParamPath::ThetaM => cfg.tech.theta_m = value,
            ParamPath::DeltaAi => cfg.tech.delta_ai = value,
        }
        validate_config(&cfg).into_result()?;
        Ok(cfg)
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        ParamPath::ALL.into_iter().find(|p| p.as_str() == key).ok_or_else(|| {
            let names: Vec<&str> = ParamPath::ALL.iter().map(|p| p.as_str()).collect();
            Error::Parse(format!(
                "unknown sweep parameter `{s}` (expected one of {})",
                names.join(", ")
            ))
        })
    }
}

/// Grid of `points` values over `[lo, hi]`, log-spaced when `log` is set.
pub fn grid(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::DegenerateGrid("grid needs ≥ 2 points".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::DegenerateGrid(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if log && !(lo > 0.0) {
        return Err(Error::DegenerateGrid("log grid needs lo > 0".into()));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            let f = k as f64 / n;
            if k == points - 1 {
                hi
            } else if log {
                (lo.ln() + f * (hi.ln() - lo.ln())).exp()
            } else {
                lo + f * (hi - lo)
            }
        })
        .collect())
}

/// Summary of a converged grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub regime: Regime,
    pub tau_k: f64,
    pub tau_ai: f64,
    pub tau_y_c: f64,
    pub tau_y_m: f64,
    pub wage_ratio: f64,
    pub objective: f64,
}

impl PointSummary {
    pub fn from_solution(sol: &PlannerSolution) -> Result<Self> {
        Ok(Self {
            regime: sol.regime,
            tau_k: wedge_via_multipliers(sol, CapitalKind::K, 0)?,
            tau_ai: wedge_via_multipliers(sol, CapitalKind::Ai, 0)?,
            tau_y_c: intratemporal_wedge(sol, AgentKind::Cognitive, 0)?,
            tau_y_m: intratemporal_wedge(sol, AgentKind::Manual, 0)?,
            wage_ratio: sol.wages[0].cognitive / sol.wages[0].manual,
            objective: sol.objective,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// `None` when the point failed; `failure` then says why.
    pub summary: Option<PointSummary>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param: ParamPath,
    pub points: Vec<SweepPoint>,
    /// First adjacent pair of grid values where the regime goes from cognitive to manual binding.
    pub threshold_bracket: Option<(f64, f64)>,
}

impl SweepResult {
    /// Number of adjacent converged pairs whose regimes differ.
    pub fn regime_changes(&self) -> usize {
        let regimes: Vec<Regime> = self.points.iter().filter_map(|p| p.summary.map(|s| s.regime)).collect();
        regimes.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

fn check_grid(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::DegenerateGrid("grid needs ≥ 2 points".into()));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::DegenerateGrid("grid must be strictly increasing".into()));
    }
    Ok(())
}

fn point(value: f64, outcome: Result<PlannerSolution>) -> (SweepPoint, Option<PlannerSolution>) {
    match outcome.and_then(|sol| PointSummary::from_solution(&sol).map(|s| (s, sol))) {
        Ok((summary, sol)) => (
            SweepPoint {
                value,
                summary: Some(summary),
                failure: None,
            },
            Some(sol),
        ),
        Err(e) => (
            SweepPoint {
                value,
                summary: None,
                failure: Some(e.to_string()),
            },
            None,
        ),
    }
}

fn finish(param: ParamPath, points: Vec<SweepPoint>) -> SweepResult {
    let threshold_bracket = points.windows(2).find_map(|w| match (w[0].summary, w[1].summary) {
        (Some(a), Some(b)) if a.regime == Regime::CognitiveBinds && b.regime == Regime::ManualBinds => {
            Some((w[0].value, w[1].value))
        }
        _ => None,
    });
    SweepResult {
        param,
        points,
        threshold_bracket,
    }
}

/// Steady state at every grid value, each warm-started from the last converged point.
pub fn sweep(config: &EconomyConfig, param: ParamPath, values: &[f64]) -> Result<SweepResult> {
    check_grid(values)?;
    let opts = SolveOptions::default();
    let mut warm: Option<PlannerSolution> = None;
    let mut points = Vec::with_capacity(values.len());
    for &v in values {
        let outcome = param
            .apply(config, v)
            .and_then(|cfg| planner::solve_steady_state_with(&cfg, warm.as_ref(), &opts));
        let (p, sol) = point(v, outcome);
        if sol.is_some() {
            warm = sol;
        }
        points.push(p);
    }
    Ok(finish(param, points))
}

/// Same as [`sweep`] with every point solved from scratch, concurrently.
pub fn sweep_cold(config: &EconomyConfig, param: ParamPath, values: &[f64]) -> Result<SweepResult> {
    check_grid(values)?;
    let points = values
        .par_iter()
        .map(|&v| {
            let outcome = param.apply(config, v).and_then(|cfg| planner::solve_steady_state(&cfg));
            point(v, outcome).0
        })
        .collect();
    Ok(finish(param, points))
}

/// One bisection probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub value: f64,
    pub regime: Option<Regime>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub param: ParamPath,
    /// `(lo, hi)` with `lo < hi`; the regime at `lo` is `regimes.0`.
    pub bracket: (f64, f64),
    pub regimes: (Regime, Regime),
    pub trace: Vec<Probe>,
    /// Probes whose regime matched neither endpoint or whose solve failed.
    /// Bisection stops at the first one.
    pub anomaly: Option<String>,
}

impl Threshold {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

fn probe(config: &EconomyConfig, param: ParamPath, value: f64) -> Probe {
    match param
        .apply(config, value)
        .and_then(|cfg| planner::solve_steady_state(&cfg))
    {
        Ok(sol) => Probe {
            value,
            regime: Some(sol.regime),
            failure: None,
        },
        Err(e) => Probe {
            value,
            regime: None,
            failure: Some(e.to_string()),
        },
    }
}

/// Bisects `[lo, hi]` (either order) until the bracket is at most `tol` wide.
pub fn find_threshold(config: &EconomyConfig, param: ParamPath, lo: f64, hi: f64, tol: f64) -> Result<Threshold> {
    if !(tol > 0.0) {
        return Err(Error::DegenerateGrid(format!(
            "bracket tolerance must be positive, got {tol}"
        )));
    }
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if !(a < b) {
        return Err(Error::DegenerateGrid("endpoints coincide".into()));
    }
    let pa = probe(config, param, a);
    let pb = probe(config, param, b);
    let (ra, rb) = match (pa.regime, pb.regime) {
        (Some(ra), Some(rb)) => (ra, rb),
        _ => {
            let why = pa.failure.or(pb.failure).unwrap_or_default();
            return Err(Error::NoRegimeFound(format!("endpoint solve failed: {why}")));
        }
    };
    if ra == rb {
        return Err(Error::NoFlipInRange(ra.to_string()));
    }
    let flip = [Regime::CognitiveBinds, Regime::ManualBinds];
    if !flip.contains(&ra) || !flip.contains(&rb) {
        return Err(Error::NoFlipInRange(format!(
            "{ra} and {rb}; endpoints must be cognitive_binds and manual_binds"
        )));
    }

    let mut trace = vec![pa, pb];
    let mut anomaly = None;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let p = probe(config, param, mid);
        match p.regime {
            Some(r) if r == ra => a = mid,
            Some(r) if r == rb => b = mid,
            Some(r) => anomaly = Some(format!("{param} = {mid}: regime {r} matches neither endpoint")),
            None => anomaly = Some(format!("{param} = {mid}: {}", p.failure.clone().unwrap_or_default())),
        }
        trace.push(p);
        if anomaly.is_some() {
            break;
        }
    }
    Ok(Threshold {
        param,
        bracket: (a, b),
        regimes: (ra, rb),
        trace,
        anomaly,
    })
}

/// Steady state with consumption `c~_h = c_h + ubi`, `c_h >= 0`.
pub fn apply_ubi(config: &EconomyConfig, ubi: f64) -> Result<PlannerSolution> {
    planner::solve_stationary(config, ubi, None, &SolveOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_names_round_trip() {
        for p in ParamPath::ALL {
            assert_eq!(p.as_str().parse::<ParamPath>().unwrap(), p);
        }
        assert_eq!("a_AI".parse::<ParamPath>().unwrap(), ParamPath::AAi);
        assert!("beta".parse::<ParamPath>().is_err());
    }

    #[test]
    fn apply_validates() {
        let cfg = EconomyConfig::symmetric();
        assert!(ParamPath::MuTop.apply(&cfg, 1.5).is_err());
        let out = ParamPath::ZC.apply(&cfg, 3.0).unwrap();
        assert_eq!(ParamPath::ZC.get(&out), 3.0);
    }

    #[test]
    fn grid_shapes() {
        let g = grid(0.1, 10.0, 25, true).unwrap();
        assert_eq!(g.len(), 25);
        assert!((g[12] - 1.0).abs() < 1e-14);
        assert_eq!(g[24], 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(grid(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        let err = grid(0.1, 10.0, 1, true).unwrap_err().to_string();
        assert!(err.contains("grid needs ≥ 2 points"));
        assert!(grid(0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn sweep_rejects_unordered_grid() {
        assert!(sweep(&EconomyConfig::symmetric(), ParamPath::AAi, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn same_regime_endpoints_have_no_flip() {
        let cfg = EconomyConfig::cognitive_binding_desk();
        let err = find_threshold(&cfg, ParamPath::AAi, 0.1, 0.12, 1e-3).unwrap_err();
        assert!(err.to_string().contains("no flip in range"));
    }

    #[test]
    fn zero_ubi_is_the_baseline() {
        let cfg = EconomyConfig::cognitive_binding_desk();
        assert_eq!(
            apply_ubi(&cfg, 0.0).unwrap(),
            planner::solve_steady_state(&cfg).unwrap()
        );
        assert!(apply_ubi(&cfg, -0.1).is_err());
    }
}
