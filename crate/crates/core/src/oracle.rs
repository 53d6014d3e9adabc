//! Brute-force search over stationary allocations on a product grid.
//!
//! Shares only primitives (technology, utility) with the solver; no Newton,
//! no multipliers. Used to check that solver outputs are constrained maxima
//! and that the detected regime is right.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::economy::{validate_config, AgentKind, EconomyConfig, TypePair};
use crate::error::{Error, Result};
use crate::planner::{PlannerSolution, Regime};
use crate::preferences::{nu_eval, u_eval};
use crate::production::{self, log_space, FactorInputs};

/// Default allowance multiplying the grid diagonal step in the objective comparison.
pub const LIPSCHITZ_ALLOWANCE: f64 = 10.0;

/// Default factor a solution-centred grid spans each way.
pub const DEFAULT_SPREAD: f64 = 1.2;

/// Axis order: `c_c, c_m, l_c, l_m, K, AI`.
pub const AXIS_NAMES: [&str; 6] = ["c_c", "c_m", "l_c", "l_m", "k", "ai"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        log_space(self.lo, self.hi, self.points)
    }

    /// Largest gap between neighbours.
    fn step(&self) -> f64 {
        let v = self.values();
        v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: [Axis; 6],
}

impl GridSpec {
    /// `points` log-spaced values over `[x / spread, x spread]` around each coordinate.
    pub fn around(center: [f64; 6], spread: f64, points: usize) -> Self {
        GridSpec {
            axes: center.map(|x| Axis {
                lo: x / spread,
                hi: x * spread,
                points,
            }),
        }
    }

    /// Grid centred on a stationary solution.
    pub fn around_solution(sol: &PlannerSolution, spread: f64, points: usize) -> Self {
        let p = &sol.allocation.periods[0];
        Self::around(
            [p.c.cognitive, p.c.manual, p.l.cognitive, p.l.manual, p.k, p.ai],
            spread,
            points,
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (a, name) in self.axes.iter().zip(AXIS_NAMES) {
            if a.points < 3 {
                return Err(Error::DegenerateGrid(format!("axis {name} needs at least 3 points")));
            }
            if !(a.lo > 0.0 && a.hi > a.lo && a.hi.is_finite()) {
                return Err(Error::DegenerateGrid(format!("axis {name} needs 0 < lo < hi")));
            }
        }
        Ok(())
    }

    /// Euclidean norm of the largest per-axis steps.
    pub fn diagonal_step(&self) -> f64 {
        self.axes.iter().map(|a| a.step().powi(2)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub values: [f64; 6],
    pub objective: f64,
    /// Flow incentive slack of each type.
    pub slacks: TypePair<f64>,
    /// Grid slack resolution: largest slack change over one step along any axis.
    pub slack_resolution: TypePair<f64>,
    /// Largest objective change over one step along any axis.
    pub objective_resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Best feasible point satisfying both incentive constraints.
    pub best: GridPoint,
    /// Best feasible point ignoring incentive constraints.
    pub relaxed: GridPoint,
    pub feasible_points: usize,
    pub admissible_points: usize,
    pub diagonal_step: f64,
}

struct Scan<'a> {
    config: &'a EconomyConfig,
    axes: Vec<Vec<f64>>,
}

struct Eval {
    objective: f64,
    slacks: TypePair<f64>,
}

impl Scan<'_> {
    fn point(&self, idx: [usize; 6]) -> [f64; 6] {
        std::array::from_fn(|i| self.axes[i][idx[i]])
    }

    /// `None` when infeasible or outside the domain.
    fn eval(&self, x: [f64; 6]) -> Option<Eval> {
        let cfg = self.config;
        let prefs = &cfg.prefs;
        let (c, l) = (TypePair::new(x[0], x[1]), TypePair::new(x[2], x[3]));
        let (k, ai) = (x[4], x[5]);
        let inputs = FactorInputs::new(
            cfg.pi(AgentKind::Cognitive) * l.cognitive * cfg.z(AgentKind::Cognitive),
            cfg.pi(AgentKind::Manual) * l.manual * cfg.z(AgentKind::Manual),
            k,
            ai,
        );
        let y = production::output(&cfg.tech, inputs).ok()?;
        let spend: f64 = AgentKind::BOTH.iter().map(|&h| cfg.pi(h) * c[h]).sum::<f64>()
            + cfg.tech.delta_k * k
            + cfg.tech.delta_ai * ai
            + cfg.g;
        if spend > y {
            return None;
        }
        let z = TypePair::new(cfg.z(AgentKind::Cognitive), cfg.z(AgentKind::Manual));
        let w = production::wages(&cfg.tech, z, inputs).ok()?;
        let flow =
            |cons: f64, hours: f64| -> Option<f64> { Some(u_eval(prefs, cons).ok()? - nu_eval(prefs, hours).ok()?) };
        let mut objective = 0.0;
        let mut slacks = TypePair::new(0.0, 0.0);
        for h in AgentKind::BOTH {
            let j = h.other();
            let own = flow(c[h], l[h])?;
            objective += cfg.pi(h) * own;
            slacks[h] = own - flow(c[j], l[j] * w[j] / w[h])?;
        }
        Some(Eval {
            objective: objective / (1.0 - prefs.beta),
            slacks,
        })
    }

    /// Largest slack and objective changes to a grid neighbour.
    fn resolution(&self, idx: [usize; 6], at: &Eval) -> (TypePair<f64>, f64) {
        let mut res = TypePair::new(0.0f64, 0.0f64);
        let mut obj = 0.0f64;
        for axis in 0..6 {
            for step in [-1i64, 1] {
                let n = idx[axis] as i64 + step;
                if n < 0 || n as usize >= self.axes[axis].len() {
                    continue;
                }
                let mut nb = idx;
                nb[axis] = n as usize;
                // neighbours outside the feasible set still carry a slack value
                if let Some((o, s)) = self.unconstrained(self.point(nb)) {
                    obj = obj.max((o - at.objective).abs());
                    for h in AgentKind::BOTH {
                        res[h] = res[h].max((s[h] - at.slacks[h]).abs());
                    }
                }
            }
        }
        (res, obj)
    }

    /// Objective and slacks without the resource constraint.
    fn unconstrained(&self, x: [f64; 6]) -> Option<(f64, TypePair<f64>)> {
        let cfg = self.config;
        let prefs = &cfg.prefs;
        let inputs = FactorInputs::new(
            cfg.pi(AgentKind::Cognitive) * x[2] * cfg.z(AgentKind::Cognitive),
            cfg.pi(AgentKind::Manual) * x[3] * cfg.z(AgentKind::Manual),
            x[4],
            x[5],
        );
        let z = TypePair::new(cfg.z(AgentKind::Cognitive), cfg.z(AgentKind::Manual));
        let w = production::wages(&cfg.tech, z, inputs).ok()?;
        let (c, l) = (TypePair::new(x[0], x[1]), TypePair::new(x[2], x[3]));
        let mut s = TypePair::new(0.0, 0.0);
        let mut objective = 0.0;
        for h in AgentKind::BOTH {
            let j = h.other();
            let own = u_eval(prefs, c[h]).ok()? - nu_eval(prefs, l[h]).ok()?;
            let mimic = u_eval(prefs, c[j]).ok()? - nu_eval(prefs, l[j] * w[j] / w[h]).ok()?;
            objective += cfg.pi(h) * own;
            s[h] = own - mimic;
        }
        Some((objective / (1.0 - prefs.beta), s))
    }
}

/// Higher objective wins; ties go to the lexicographically smaller index.
fn better(a: &(f64, [usize; 6]), b: &(f64, [usize; 6])) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1))
}

#[derive(Clone, Copy, Default)]
struct Tally {
    best: Option<(f64, [usize; 6])>,
    relaxed: Option<(f64, [usize; 6])>,
    feasible: usize,
    admissible: usize,
}

fn pick(a: Option<(f64, [usize; 6])>, b: Option<(f64, [usize; 6])>) -> Option<(f64, [usize; 6])> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if better(&x, &y) == Ordering::Less { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            best: pick(self.best, other.best),
            relaxed: pick(self.relaxed, other.relaxed),
            feasible: self.feasible + other.feasible,
            admissible: self.admissible + other.admissible,
        }
    }
}

/// Enumerates the full product grid and returns the best incentive-compatible
/// feasible stationary allocation, plus the best feasible one ignoring incentives.
pub fn brute_force_steady(config: &EconomyConfig, grid: &GridSpec) -> Result<OracleResult> {
    validate_config(config).into_result()?;
    grid.validate()?;
    let scan = Scan {
        config,
        axes: grid.axes.iter().map(Axis::values).collect(),
    };
    let dims: [usize; 6] = std::array::from_fn(|i| scan.axes[i].len());
    let inner: usize = dims[1..].iter().product();

    // one task per (first-axis, second-axis) pair; the merge is order-independent
    let tally = (0..dims[0] * dims[1])
        .into_par_iter()
        .map(|outer| {
            let mut t = Tally::default();
            let (i0, i1) = (outer / dims[1], outer % dims[1]);
            for rest in 0..inner / dims[1] {
                let mut r = rest;
                let mut idx = [i0, i1, 0, 0, 0, 0];
                for a in (2..6).rev() {
                    idx[a] = r % dims[a];
                    r /= dims[a];
                }
                let Some(e) = scan.eval(scan.point(idx)) else {
                    continue;
                };
                t.feasible += 1;
                t.relaxed = pick(t.relaxed, Some((e.objective, idx)));
                if e.slacks.cognitive >= 0.0 && e.slacks.manual >= 0.0 {
                    t.admissible += 1;
                    t.best = pick(t.best, Some((e.objective, idx)));
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);

    let describe = |found: (f64, [usize; 6])| -> GridPoint {
        let values = scan.point(found.1);
        let e = scan.eval(values).expect("recorded points are feasible");
        let (slack_resolution, objective_resolution) = scan.resolution(found.1, &e);
        GridPoint {
            values,
            objective: e.objective,
            slacks: e.slacks,
            slack_resolution,
            objective_resolution,
        }
    };
    let best = tally.best.ok_or(Error::EmptyFeasibleSet)?;
    let relaxed = tally.relaxed.ok_or(Error::EmptyFeasibleSet)?;
    Ok(OracleResult {
        best: describe(best),
        relaxed: describe(relaxed),
        feasible_points: tally.feasible,
        admissible_points: tally.admissible,
        diagonal_step: grid.diagonal_step(),
    })
}

/// Regime read off the grid search.
///
/// No constraint binds when imposing both leaves the grid optimum unchanged.
/// Otherwise a type binds when its constraint cuts off the unconstrained best
/// and its slack at the constrained best is within one grid step of zero.
pub fn oracle_regime(result: &OracleResult) -> Result<Regime> {
    let relaxed = &result.relaxed;
    if relaxed.objective <= result.best.objective {
        return Ok(Regime::NoneBind);
    }
    let best = &result.best;
    let near = TypePair::from_fn(|h| best.slacks[h].abs() <= best.slack_resolution[h]);
    let cut = TypePair::from_fn(|h| relaxed.slacks[h] < 0.0);
    let binding = TypePair::from_fn(|h| near[h] && cut[h]);
    let pick = if binding.cognitive || binding.manual {
        binding
    } else {
        near
    };
    match (pick.cognitive, pick.manual) {
        (true, true) => Ok(Regime::BothBind),
        (true, false) => Ok(Regime::CognitiveBinds),
        (false, true) => Ok(Regime::ManualBinds),
        (false, false) => Err(Error::IndeterminateRegime(format!(
            "slacks {:.3e} / {:.3e} exceed grid resolution {:.3e} / {:.3e}",
            best.slacks.cognitive, best.slacks.manual, best.slack_resolution.cognitive, best.slack_resolution.manual
        ))),
    }
}

/// Solver-versus-grid comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub solver_objective: f64,
    pub oracle_objective: f64,
    /// `L h`.
    pub allowance: f64,
    pub objective_ok: bool,
    pub solver_regime: Regime,
    /// `None` when the grid cannot decide; `regime_note` says why.
    pub oracle_regime: Option<Regime>,
    pub regime_note: Option<String>,
    pub regimes_agree: bool,
    pub oracle: OracleResult,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.objective_ok && self.regimes_agree
    }
}

/// Runs the grid search around a stationary solution and compares.
pub fn compare(
    config: &EconomyConfig,
    sol: &PlannerSolution,
    grid: &GridSpec,
    lipschitz: f64,
) -> Result<OracleComparison> {
    let oracle = brute_force_steady(config, grid)?;
    let allowance = lipschitz * oracle.diagonal_step;
    let (oracle_regime, regime_note) = match oracle_regime(&oracle) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(OracleComparison {
        solver_objective: sol.objective,
        oracle_objective: oracle.best.objective,
        allowance,
        objective_ok: sol.objective >= oracle.best.objective - allowance,
        solver_regime: sol.regime,
        regimes_agree: oracle_regime == Some(sol.regime),
        oracle_regime,
        regime_note,
        oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::solve_steady_state;

    fn small_grid(sol: &PlannerSolution) -> GridSpec {
        GridSpec::around_solution(sol, DEFAULT_SPREAD, 5)
    }

    #[test]
    fn grid_validation() {
        let mut g = GridSpec::around([1.0; 6], 2.0, 3);
        assert!(g.validate().is_ok());
        g.axes[2].points = 2;
        assert!(g.validate().is_err());
        let mut g = GridSpec::around([1.0; 6], 2.0, 3);
        g.axes[0].lo = 0.0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn symmetric_best_is_symmetric() {
        let cfg = EconomyConfig::symmetric();
        let sol = solve_steady_state(&cfg).unwrap();
        let out = brute_force_steady(&cfg, &small_grid(&sol)).unwrap();
        let v = out.best.values;
        assert_eq!(v[0], v[1]);
        assert_eq!(v[2], v[3]);
        assert_eq!(oracle_regime(&out).unwrap(), Regime::NoneBind);
    }

    #[test]
    fn unreachable_consumption_is_empty() {
        let cfg = EconomyConfig::symmetric();
        let mut g = GridSpec::around([1.0; 6], 2.0, 3);
        g.axes[0] = Axis {
            lo: 1e3,
            hi: 2e3,
            points: 3,
        };
        assert!(matches!(brute_force_steady(&cfg, &g), Err(Error::EmptyFeasibleSet)));
    }

    #[test]
    fn tie_break_prefers_smaller_index() {
        let a = (1.0, [0, 0, 0, 0, 0, 1]);
        let b = (1.0, [0, 0, 0, 0, 1, 0]);
        assert_eq!(pick(Some(a), Some(b)), Some(a));
        assert_eq!(pick(Some(b), Some(a)), Some(a));
        let c = (2.0, [5; 6]);
        assert_eq!(pick(Some(a), Some(c)), Some(c));
    }

    #[test]
    fn refinement_never_lowers_the_best() {
        // 3 -> 5 -> 9 log-spaced points over the same range are nested grids
        let cfg = EconomyConfig::cognitive_binding_desk();
        let sol = solve_steady_state(&cfg).unwrap();
        let mut last = f64::NEG_INFINITY;
        for n in [3, 5, 9] {
            let out = brute_force_steady(&cfg, &GridSpec::around_solution(&sol, DEFAULT_SPREAD, n)).unwrap();
            assert!(out.best.objective >= last);
            last = out.best.objective;
        }
    }
}
