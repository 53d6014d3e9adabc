//! Intertemporal and intratemporal wedges of a planner solution and the
//! sign checks they are expected to satisfy in each single-binding regime.

use serde::{Deserialize, Serialize};

use crate::economy::{AgentKind, TypePair};
use crate::error::{Error, Result};
use crate::planner::{PlannerSolution, Regime};
use crate::preferences::{nu_prime, u_prime};

/// Margin a strict inequality must clear to count as satisfied.
pub const TOL_SIGN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapitalKind {
    K,
    Ai,
}

impl CapitalKind {
    pub const BOTH: [CapitalKind; 2] = [CapitalKind::K, CapitalKind::Ai];

    fn index(self) -> usize {
        match self {
            CapitalKind::K => 0,
            CapitalKind::Ai => 1,
        }
    }
}

/// Period whose values a transition `t -> t+1` reads; every `t` maps to 0 in a steady state.
fn next_period(sol: &PlannerSolution, t: usize) -> Result<usize> {
    if sol.is_stationary() {
        return Ok(0);
    }
    if t + 1 >= sol.allocation.len() {
        return Err(Error::OutOfHorizon(t));
    }
    Ok(t + 1)
}

fn period(sol: &PlannerSolution, t: usize) -> Result<usize> {
    if sol.is_stationary() {
        Ok(0)
    } else if t < sol.allocation.len() {
        Ok(t)
    } else {
        Err(Error::OutOfHorizon(t))
    }
}

/// `1 - u'(c_{h,t}) / (beta u'(c_{h,t+1}) dF~_{t+1}/di)`.
pub fn intertemporal_wedge(sol: &PlannerSolution, h: AgentKind, i: CapitalKind, t: usize) -> Result<f64> {
    let prefs = &sol.config.prefs;
    let next = next_period(sol, t)?;
    let now = if sol.is_stationary() { 0 } else { t };
    let up_now = u_prime(prefs, sol.allocation.periods[now].c[h])?;
    let up_next = u_prime(prefs, sol.allocation.periods[next].c[h])?;
    Ok(1.0 - up_now / (prefs.beta * up_next * sol.wealth_mp[next][i.index()]))
}

/// `1 - nu'(l_{h,t}) / (w_{h,t} u'(c_{h,t}))`.
pub fn intratemporal_wedge(sol: &PlannerSolution, h: AgentKind, t: usize) -> Result<f64> {
    let t = period(sol, t)?;
    let p = &sol.allocation.periods[t];
    if !(p.l[h] > 0.0) {
        return Err(Error::WedgeUndefined(format!("zero hours for {h} in period {t}")));
    }
    let prefs = &sol.config.prefs;
    Ok(1.0 - nu_prime(prefs, p.l[h])? / (sol.wages[t][h] * u_prime(prefs, p.c[h])?))
}

/// `-X^i / (lambda dF~/di)` at the period the transition `t -> t+1` lands in.
pub fn wedge_via_multipliers(sol: &PlannerSolution, i: CapitalKind, t: usize) -> Result<f64> {
    let next = next_period(sol, t)?;
    let lambda = sol.multipliers.lambda[next];
    if !(lambda > 0.0) {
        return Err(Error::InconsistentMultipliers(format!(
            "lambda = {lambda} is not positive"
        )));
    }
    let x = match i {
        CapitalKind::K => sol.multipliers.x_k[next],
        CapitalKind::Ai => sol.multipliers.x_ai[next],
    };
    Ok(-x / (lambda * sol.wealth_mp[next][i.index()]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimVerdict {
    Pass,
    Fail,
    /// Inside the sign margin.
    Indeterminate,
}

impl ClaimVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimVerdict::Pass => "pass",
            ClaimVerdict::Fail => "fail",
            ClaimVerdict::Indeterminate => "indeterminate",
        }
    }

    /// Fail dominates indeterminate, which dominates pass.
    fn and(self, other: Self) -> Self {
        use ClaimVerdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            _ => Pass,
        }
    }
}

/// `value > 0` with margin.
fn positive(value: f64) -> ClaimVerdict {
    if value > TOL_SIGN {
        ClaimVerdict::Pass
    } else if value < -TOL_SIGN || value.is_nan() {
        ClaimVerdict::Fail
    } else {
        ClaimVerdict::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    /// `P1`..`P3`, primed for the manual-binding mirror.
    pub name: String,
    pub verdict: ClaimVerdict,
    /// Worst observed value of each checked quantity.
    pub observed: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub regime: Regime,
    /// `false` when no single constraint binds; `claims` is then empty.
    pub applicable: bool,
    pub claims: Vec<Claim>,
}

impl PropositionReport {
    pub fn all_pass(&self) -> bool {
        self.applicable && self.claims.iter().all(|c| c.verdict == ClaimVerdict::Pass)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeReport {
    /// Per transition `t -> t+1`; a single entry in a steady state.
    pub tau_k: Vec<TypePair<f64>>,
    pub tau_ai: Vec<TypePair<f64>>,
    /// Per period.
    pub tau_y: Vec<TypePair<f64>>,
    pub verdicts: PropositionReport,
}

fn transitions(sol: &PlannerSolution) -> std::ops::Range<usize> {
    if sol.is_stationary() {
        0..1
    } else {
        0..sol.allocation.len() - 1
    }
}

/// Periods the propositions speak about: all of them from `t = 1` on.
fn claimed_periods(sol: &PlannerSolution) -> std::ops::Range<usize> {
    if sol.is_stationary() {
        0..1
    } else {
        1..sol.allocation.len()
    }
}

/// Signed checks for the binding type `b`; `high` is the capital whose wealth
/// return should exceed the other's and which carries the positive wedge.
fn claims_for(sol: &PlannerSolution, report: &WedgeReport, b: AgentKind) -> Result<Vec<Claim>> {
    let (high, low, prime) = match b {
        AgentKind::Cognitive => (CapitalKind::K, CapitalKind::Ai, ""),
        AgentKind::Manual => (CapitalKind::Ai, CapitalKind::K, "'"),
    };
    let name_of = |c: CapitalKind| match c {
        CapitalKind::K => "k",
        CapitalKind::Ai => "ai",
    };

    // P1: the high capital earns the higher wealth return
    let mut gap = f64::INFINITY;
    for t in claimed_periods(sol) {
        let mp = sol.wealth_mp[t];
        gap = gap.min(mp[high.index()] - mp[low.index()]);
    }
    let p1 = Claim {
        name: format!("P1{prime}"),
        verdict: positive(gap),
        observed: vec![(format!("dwealth_{}_minus_dwealth_{}", name_of(high), name_of(low)), gap)],
    };

    // P2: high-return capital taxed, the other subsidized, type-independent
    let series = |c: CapitalKind| match c {
        CapitalKind::K => &report.tau_k,
        CapitalKind::Ai => &report.tau_ai,
    };
    let mut min_high = f64::INFINITY;
    let mut max_low = f64::NEG_INFINITY;
    let mut spread = 0.0f64;
    for (tau_f, tau_t) in series(high).iter().zip(series(low)) {
        for h in AgentKind::BOTH {
            min_high = min_high.min(tau_f[h]);
            max_low = max_low.max(tau_t[h]);
        }
        spread = spread.max((tau_f.cognitive - tau_f.manual).abs());
        spread = spread.max((tau_t.cognitive - tau_t.manual).abs());
    }
    let independence = if spread <= TOL_SIGN {
        ClaimVerdict::Pass
    } else {
        ClaimVerdict::Fail
    };
    let p2 = Claim {
        name: format!("P2{prime}"),
        verdict: positive(min_high).and(positive(-max_low)).and(independence),
        observed: vec![
            (format!("tau_{}", name_of(high)), min_high),
            (format!("tau_{}", name_of(low)), max_low),
            ("type_spread".into(), spread),
        ],
    };

    // P3: the binding type's labor is subsidized at the margin
    let mut max_tau_y = f64::NEG_INFINITY;
    for t in claimed_periods(sol) {
        max_tau_y = max_tau_y.max(report.tau_y[t][b]);
    }
    let p3 = Claim {
        name: format!("P3{prime}"),
        verdict: positive(-max_tau_y),
        observed: vec![(format!("tau_y_{b}"), max_tau_y)],
    };
    Ok(vec![p1, p2, p3])
}

/// Wedges of every type and period plus the regime's proposition checks.
pub fn wedge_report(sol: &PlannerSolution) -> Result<WedgeReport> {
    let mut tau_k = Vec::new();
    let mut tau_ai = Vec::new();
    for t in transitions(sol) {
        let k = TypePair::from_fn(|h| intertemporal_wedge(sol, h, CapitalKind::K, t));
        let ai = TypePair::from_fn(|h| intertemporal_wedge(sol, h, CapitalKind::Ai, t));
        tau_k.push(TypePair::new(k.cognitive?, k.manual?));
        tau_ai.push(TypePair::new(ai.cognitive?, ai.manual?));
    }
    let mut tau_y = Vec::new();
    for t in 0..sol.allocation.len() {
        let y = TypePair::from_fn(|h| intratemporal_wedge(sol, h, t));
        tau_y.push(TypePair::new(y.cognitive?, y.manual?));
    }
    let mut report = WedgeReport {
        tau_k,
        tau_ai,
        tau_y,
        verdicts: PropositionReport {
            regime: sol.regime,
            applicable: false,
            claims: Vec::new(),
        },
    };
    let binding = match sol.regime {
        Regime::CognitiveBinds => Some(AgentKind::Cognitive),
        Regime::ManualBinds => Some(AgentKind::Manual),
        Regime::NoneBind | Regime::BothBind => None,
    };
    if let Some(b) = binding {
        report.verdicts.claims = claims_for(sol, &report, b)?;
        report.verdicts.applicable = true;
    }
    Ok(report)
}

/// Proposition verdicts for the detected regime.
pub fn verify_propositions(sol: &PlannerSolution) -> Result<PropositionReport> {
    Ok(wedge_report(sol)?.verdicts)
}
