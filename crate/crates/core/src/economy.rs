//! Economy parameterization and the allocation object shared by the solvers.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Consumption floor used inside the solvers; log and CRRA utility diverge at zero.
pub const CONSUMPTION_FLOOR: f64 = 1e-10;

/// The two worker types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Cognitive,
    Manual,
}

impl AgentKind {
    pub const BOTH: [AgentKind; 2] = [AgentKind::Cognitive, AgentKind::Manual];

    /// The complementary type `j` of `h` in `H = {c, m}`.
    pub fn other(self) -> AgentKind {
        match self {
            AgentKind::Cognitive => AgentKind::Manual,
            AgentKind::Manual => AgentKind::Cognitive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Cognitive => "cognitive",
            AgentKind::Manual => "manual",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value held once per worker type.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypePair<T> {
    pub cognitive: T,
    pub manual: T,
}

impl<T> TypePair<T> {
    pub fn new(cognitive: T, manual: T) -> Self {
        Self { cognitive, manual }
    }

    pub fn from_fn(mut f: impl FnMut(AgentKind) -> T) -> Self {
        let cognitive = f(AgentKind::Cognitive);
        let manual = f(AgentKind::Manual);
        Self { cognitive, manual }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> TypePair<U> {
        TypePair {
            cognitive: f(&self.cognitive),
            manual: f(&self.manual),
        }
    }
}

impl<T> Index<AgentKind> for TypePair<T> {
    type Output = T;
    fn index(&self, kind: AgentKind) -> &T {
        match kind {
            AgentKind::Cognitive => &self.cognitive,
            AgentKind::Manual => &self.manual,
        }
    }
}

impl<T> IndexMut<AgentKind> for TypePair<T> {
    fn index_mut(&mut self, kind: AgentKind) -> &mut T {
        match kind {
            AgentKind::Cognitive => &mut self.cognitive,
            AgentKind::Manual => &mut self.manual,
        }
    }
}

/// Population share and labor productivity of one worker type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentTypeParams {
    /// Population share, in (0, 1).
    pub pi: f64,
    /// Effective units produced per hour worked.
    pub z: f64,
}

/// Period utility of consumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityForm {
    Log,
    /// Constant relative risk aversion with curvature `gamma` (> 0, != 1).
    Crra(f64),
}

/// Power disutility of labor, `psi * l^(1+phi) / (1+phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisutilityParams {
    pub psi: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceParams {
    pub beta: f64,
    pub u_form: UtilityForm,
    pub nu_form: DisutilityParams,
}

/// Which nested technology the economy uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TechForm {
    /// K nests with cognitive labor, effective AI with manual labor.
    NestComplements,
    /// AI is a perfect substitute for cognitive labor inside the cognitive nest.
    NestSubstituteCognitive,
    /// The `NestComplements` share structure with every exponent at the log limit.
    CobbDouglas,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyParams {
    pub form: TechForm,
    /// Total factor productivity `A`.
    pub scale: f64,
    pub mu_top: f64,
    pub lambda_c: f64,
    pub theta_m: f64,
    pub sigma_top: f64,
    pub rho_c: f64,
    pub rho_m: f64,
    pub a_ai: f64,
    pub delta_k: f64,
    pub delta_ai: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    #[default]
    SteadyState,
    /// Finite horizon with periods `t = 0..=T`.
    FiniteHorizon(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyConfig {
    pub agents: TypePair<AgentTypeParams>,
    pub prefs: PreferenceParams,
    pub tech: TechnologyParams,
    /// Government spending per period.
    pub g: f64,
    /// Initial stocks; used only over a finite horizon.
    #[serde(default)]
    pub k0: f64,
    #[serde(default)]
    pub ai0: f64,
    #[serde(default)]
    pub mode: SolveMode,
}

impl EconomyConfig {
    pub fn pi(&self, kind: AgentKind) -> f64 {
        self.agents[kind].pi
    }

    pub fn z(&self, kind: AgentKind) -> f64 {
        self.agents[kind].z
    }

    /// Reference economy: equal shares, equal productivity, symmetric nests.
    pub fn symmetric() -> Self {
        Self {
            agents: TypePair::new(AgentTypeParams { pi: 0.5, z: 1.0 }, AgentTypeParams { pi: 0.5, z: 1.0 }),
            prefs: PreferenceParams {
                beta: 0.96,
                u_form: UtilityForm::Log,
                nu_form: DisutilityParams { psi: 1.0, phi: 1.0 },
            },
            tech: TechnologyParams {
                form: TechForm::NestComplements,
                scale: 1.0,
                mu_top: 0.5,
                lambda_c: 0.3,
                theta_m: 0.3,
                sigma_top: 0.5,
                rho_c: -1.0,
                rho_m: -1.0,
                a_ai: 1.0,
                delta_k: 0.1,
                delta_ai: 0.1,
            },
            g: 0.05,
            k0: 0.0,
            ai0: 0.0,
            mode: SolveMode::SteadyState,
        }
    }

    /// Cognitive workers twice as productive, AI a weak complement to manual work.
    pub fn cognitive_binding_desk() -> Self {
        let mut cfg = Self::symmetric();
        cfg.agents.cognitive.z = 2.0;
        cfg.tech.a_ai = 0.1;
        cfg
    }

    /// AI substitutes cognitive work, is highly productive and fully depreciates.
    pub fn manual_binding_desk() -> Self {
        let mut cfg = Self::substitute_base();
        cfg.tech.delta_ai = 1.0;
        cfg.tech.a_ai = 10.0;
        cfg
    }

    /// Economy used for the AI-productivity sweep; its regime flips inside `a_ai` in `[0.1, 10]`.
    pub fn threshold_desk() -> Self {
        let mut cfg = Self::substitute_base();
        cfg.agents.cognitive.pi = 0.1;
        cfg.agents.manual.pi = 0.9;
        cfg.tech.delta_ai = 0.0;
        cfg.tech.a_ai = 0.1;
        cfg
    }

    /// Cobb-Douglas with equal labor and equal capital exponents; symmetric at any `a_ai`.
    pub fn symmetric_cobb_douglas() -> Self {
        let mut cfg = Self::symmetric();
        cfg.tech.form = TechForm::CobbDouglas;
        cfg.tech.lambda_c = 0.5;
        cfg.tech.theta_m = 0.5;
        cfg
    }

    fn substitute_base() -> Self {
        let mut cfg = Self::symmetric();
        cfg.agents.cognitive.z = 2.0;
        cfg.tech.form = TechForm::NestSubstituteCognitive;
        cfg.tech.sigma_top = -0.5;
        cfg.tech.rho_c = -1.0;
        cfg
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.to_string(),
            message: message.into(),
        });
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("pass");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

fn in_open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

/// Checks every invariant of the parameterization and lists the ones that fail.
pub fn validate_config(config: &EconomyConfig) -> ValidationReport {
    let mut report = ValidationReport::default();

    for kind in AgentKind::BOTH {
        let a = &config.agents[kind];
        if !in_open_unit(a.pi) {
            report.push(&format!("agents.{kind}.pi"), "population share not in (0,1)");
        }
        if !(a.z > 0.0 && a.z.is_finite()) {
            report.push(&format!("agents.{kind}.z"), "productivity must be positive");
        }
    }
    let share_sum = config.agents.cognitive.pi + config.agents.manual.pi;
    if !((share_sum - 1.0).abs() <= 1e-12) {
        report.push("agents", "shares do not sum to 1");
    }

    let p = &config.prefs;
    if !in_open_unit(p.beta) {
        report.push("prefs.beta", "discount factor not in (0,1)");
    }
    if let UtilityForm::Crra(gamma) = p.u_form {
        if !(gamma > 0.0 && gamma.is_finite()) || gamma == 1.0 {
            report.push("prefs.u_form.crra", "curvature must be positive and different from 1");
        }
    }
    if !(p.nu_form.psi > 0.0 && p.nu_form.psi.is_finite()) {
        report.push("prefs.nu_form.psi", "disutility scale must be positive");
    }
    if !(p.nu_form.phi > 0.0 && p.nu_form.phi.is_finite()) {
        report.push("prefs.nu_form.phi", "disutility curvature must be positive");
    }

    let t = &config.tech;
    if !(t.scale > 0.0 && t.scale.is_finite()) {
        report.push("tech.scale", "scale must be positive");
    }
    for (name, v) in [
        ("tech.mu_top", t.mu_top),
        ("tech.lambda_c", t.lambda_c),
        ("tech.theta_m", t.theta_m),
    ] {
        if !in_open_unit(v) {
            report.push(name, "share parameter not in (0,1)");
        }
    }
    for (name, v) in [
        ("tech.sigma_top", t.sigma_top),
        ("tech.rho_c", t.rho_c),
        ("tech.rho_m", t.rho_m),
    ] {
        if !(v <= 1.0 && v.is_finite()) {
            report.push(name, "exponent must be finite and at most 1");
        }
    }
    if t.form == TechForm::NestComplements && !(t.rho_c < t.sigma_top && t.rho_m < t.sigma_top) {
        report.push(
            "tech.sigma_top",
            "nest_complements needs rho_c < sigma_top and rho_m < sigma_top",
        );
    }
    if !(t.a_ai > 0.0 && t.a_ai.is_finite()) {
        report.push("tech.a_ai", "AI productivity must be positive");
    }
    for (name, v) in [("tech.delta_k", t.delta_k), ("tech.delta_ai", t.delta_ai)] {
        if !(0.0..=1.0).contains(&v) {
            report.push(name, "depreciation not in [0,1]");
        }
    }

    if !(config.g >= 0.0 && config.g.is_finite()) {
        report.push("g", "government spending must be non-negative");
    }
    if !(config.k0 >= 0.0 && config.k0.is_finite()) {
        report.push("k0", "initial capital must be non-negative");
    }
    if !(config.ai0 >= 0.0 && config.ai0.is_finite()) {
        report.push("ai0", "initial AI must be non-negative");
    }
    if config.mode == SolveMode::FiniteHorizon(0) {
        report.push("mode.finite_horizon", "horizon must be at least 1");
    }

    report
}

/// Aggregate effective labor `L_h = pi_h * l_h * z_h`.
pub fn effective_labor(pi: f64, hours: f64, z: f64) -> Result<f64> {
    if !in_open_unit(pi) || !(hours >= 0.0) || !(z > 0.0) {
        return Err(Error::Domain(format!(
            "effective_labor needs pi in (0,1), l >= 0, z > 0 (got {pi}, {hours}, {z})"
        )));
    }
    Ok(pi * hours * z)
}

/// Quantities of one period of an allocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodAllocation {
    pub c: TypePair<f64>,
    pub l: TypePair<f64>,
    /// Effective labor `L_h`, stored alongside hours.
    pub eff: TypePair<f64>,
    pub k: f64,
    pub ai: f64,
}

impl PeriodAllocation {
    pub fn new(config: &EconomyConfig, c: TypePair<f64>, l: TypePair<f64>, k: f64, ai: f64) -> Self {
        let eff = TypePair::from_fn(|h| config.pi(h) * l[h] * config.z(h));
        Self { c, l, eff, k, ai }
    }

    /// Largest deviation from `L_h = pi_h l_h z_h`.
    pub fn labor_inconsistency(&self, config: &EconomyConfig) -> f64 {
        AgentKind::BOTH
            .iter()
            .map(|&h| (self.eff[h] - config.pi(h) * self.l[h] * config.z(h)).abs())
            .fold(0.0, f64::max)
    }
}

/// An allocation: one entry for a steady state, `T + 1` entries for a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub periods: Vec<PeriodAllocation>,
    /// Stocks carried out of the last period, `(K_{T+1}, AI_{T+1})`; equal to the stocks for a steady state.
    pub terminal: (f64, f64),
}

impl Allocation {
    pub fn stationary(period: PeriodAllocation) -> Self {
        let terminal = (period.k, period.ai);
        Self {
            periods: vec![period],
            terminal,
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.periods.len() == 1
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Capital stocks entering period `t + 1`.
    pub fn next_stocks(&self, t: usize) -> (f64, f64) {
        if t + 1 < self.periods.len() {
            (self.periods[t + 1].k, self.periods[t + 1].ai)
        } else {
            self.terminal
        }
    }

    pub fn check(&self, config: &EconomyConfig) -> Result<()> {
        for (t, p) in self.periods.iter().enumerate() {
            for h in AgentKind::BOTH {
                if !(p.c[h] > 0.0) {
                    return Err(Error::Domain(format!(
                        "consumption of {h} in period {t} is not positive"
                    )));
                }
                if !(p.l[h] >= 0.0) {
                    return Err(Error::Domain(format!("labor of {h} in period {t} is negative")));
                }
            }
            if !(p.k >= 0.0 && p.ai >= 0.0) {
                return Err(Error::Domain(format!("negative capital in period {t}")));
            }
            let gap = p.labor_inconsistency(config);
            if gap > 1e-12 * (1.0 + p.eff.cognitive.max(p.eff.manual)) {
                return Err(Error::Domain(format!(
                    "effective labor inconsistent in period {t} by {gap:e}"
                )));
            }
        }
        Ok(())
    }
}
