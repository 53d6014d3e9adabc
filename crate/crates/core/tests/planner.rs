use aitax::economy::SolveMode;
use aitax::planner::{self, foc_residuals};
use aitax::production::{self, FactorInputs};
use aitax::sweep::ParamPath;
use aitax::{AgentKind, EconomyConfig, Error, PlannerSolution, Regime};
use proptest::prelude::*;

fn inputs(cfg: &EconomyConfig, sol: &PlannerSolution, t: usize) -> [f64; 4] {
    let p = &sol.allocation.periods[t];
    let eff = |h| cfg.pi(h) * p.l[h] * cfg.z(h);
    [eff(AgentKind::Cognitive), eff(AgentKind::Manual), p.k, p.ai]
}

fn fd_wages(cfg: &EconomyConfig, x: [f64; 4]) -> [f64; 2] {
    let f = |x: [f64; 4]| production::output(&cfg.tech, FactorInputs::from_array(x)).unwrap();
    let d = |i: usize| {
        let h = 1e-6 * x[i];
        let (mut up, mut dn) = (x, x);
        up[i] += h;
        dn[i] -= h;
        (f(up) - f(dn)) / (2.0 * h)
    };
    [cfg.z(AgentKind::Cognitive) * d(0), cfg.z(AgentKind::Manual) * d(1)]
}

/// Resource use minus available wealth in period `t`; zero when feasibility binds.
fn resource_gap(cfg: &EconomyConfig, sol: &PlannerSolution, t: usize) -> f64 {
    let x = inputs(cfg, sol, t);
    let p = &sol.allocation.periods[t];
    let y = production::output(&cfg.tech, FactorInputs::from_array(x)).unwrap();
    let wealth = y + (1.0 - cfg.tech.delta_k) * p.k + (1.0 - cfg.tech.delta_ai) * p.ai;
    let (k1, ai1) = sol.allocation.next_stocks(t);
    let spend: f64 = AgentKind::BOTH.iter().map(|&h| cfg.pi(h) * p.c[h]).sum::<f64>() + cfg.g + k1 + ai1;
    spend - wealth
}

/// Period-`t` utility gap of type `h` between truth-telling and mimicking (log utility).
fn icc_flow(cfg: &EconomyConfig, sol: &PlannerSolution, t: usize, h: AgentKind) -> f64 {
    let w = fd_wages(cfg, inputs(cfg, sol, t));
    let idx = |k: AgentKind| if k == AgentKind::Cognitive { 0 } else { 1 };
    let j = h.other();
    let p = &sol.allocation.periods[t];
    let nu = cfg.prefs.nu_form;
    let dis = |l: f64| nu.psi * l.powf(1.0 + nu.phi) / (1.0 + nu.phi);
    let mimic = p.l[j] * w[idx(j)] / w[idx(h)];
    (p.c[h].ln() - dis(p.l[h])) - (p.c[j].ln() - dis(mimic))
}

/// Discounted incentive slack; the single period of a steady state stands for all.
fn icc_slack(cfg: &EconomyConfig, sol: &PlannerSolution, h: AgentKind) -> f64 {
    let beta = cfg.prefs.beta;
    if sol.allocation.is_stationary() {
        icc_flow(cfg, sol, 0, h) / (1.0 - beta)
    } else {
        (0..sol.allocation.len())
            .map(|t| beta.powi(t as i32) * icc_flow(cfg, sol, t, h))
            .sum()
    }
}

fn check_solution(cfg: &EconomyConfig, sol: &PlannerSolution) {
    let res = foc_residuals(&sol.config, &sol.candidate()).unwrap().max_abs();
    assert!(res <= 1e-8, "residual {res:e}");
    for t in 0..sol.allocation.len() {
        let gap = resource_gap(cfg, sol, t);
        assert!(gap.abs() <= 1e-8, "period {t}: resource gap {gap:e}");
    }
    for h in AgentKind::BOTH {
        let s = icc_slack(cfg, sol, h);
        assert!(s >= -1e-6, "{h} incentive slack {s:e}");
        let binds = matches!(
            (sol.regime, h),
            (Regime::CognitiveBinds, AgentKind::Cognitive) | (Regime::ManualBinds, AgentKind::Manual) | (Regime::BothBind, _)
        );
        if binds {
            assert!(s.abs() <= 1e-6, "{h} should bind, slack {s:e}");
        }
    }
}

#[test]
fn desk_solutions_are_feasible_and_incentive_compatible() {
    for cfg in [
        EconomyConfig::symmetric(),
        EconomyConfig::cognitive_binding_desk(),
        EconomyConfig::manual_binding_desk(),
        EconomyConfig::threshold_desk(),
        EconomyConfig::symmetric_cobb_douglas(),
    ] {
        let sol = planner::solve_steady_state(&cfg).unwrap();
        check_solution(&cfg, &sol);
    }
}

#[test]
fn first_best_has_no_labor_wedges_and_weakly_dominates() {
    for cfg in [
        EconomyConfig::cognitive_binding_desk(),
        EconomyConfig::manual_binding_desk(),
    ] {
        let fb = planner::first_best(&cfg).unwrap();
        let sb = planner::solve_steady_state(&cfg).unwrap();
        assert!(fb.objective >= sb.objective - 1e-10);
        let x = inputs(&cfg, &fb, 0);
        let w = fd_wages(&cfg, x);
        let p = &fb.allocation.periods[0];
        for (i, h) in AgentKind::BOTH.into_iter().enumerate() {
            let mrs = cfg.prefs.nu_form.psi * p.l[h].powf(cfg.prefs.nu_form.phi) * p.c[h];
            assert!((mrs / w[i] - 1.0).abs() <= 1e-6, "{h}: mrs {mrs} wage {}", w[i]);
        }
        // Log utility: the unconstrained planner equalises consumption.
        assert!((p.c.cognitive - p.c.manual).abs() <= 1e-8);
    }
}

#[test]
fn finite_horizon_transition_converges_towards_steady_state() {
    let mut cfg = EconomyConfig::cognitive_binding_desk();
    let ss = planner::solve_steady_state(&cfg).unwrap();
    let p = ss.allocation.periods[0];
    cfg.k0 = 0.8 * p.k;
    cfg.ai0 = 1.2 * p.ai;
    cfg.mode = SolveMode::FiniteHorizon(30);
    let sol = planner::solve_finite_horizon(&cfg).unwrap();
    assert_eq!(sol.allocation.len(), 31);
    assert_eq!(sol.allocation.periods[0].k, cfg.k0);
    assert_eq!(sol.allocation.periods[0].ai, cfg.ai0);
    assert_eq!(sol.allocation.terminal, (p.k, p.ai));
    check_solution(&cfg, &sol);
    let mid = &sol.allocation.periods[15];
    assert!((mid.k - p.k).abs() < 0.2 * (cfg.k0 - p.k).abs());
    assert!((mid.ai - p.ai).abs() < 0.2 * (cfg.ai0 - p.ai).abs());
    assert_eq!(sol.regime, ss.regime);
}

#[test]
fn finite_horizon_rejects_bad_inputs() {
    let mut cfg = EconomyConfig::cognitive_binding_desk();
    cfg.mode = SolveMode::FiniteHorizon(10);
    assert!(matches!(planner::solve_finite_horizon(&cfg), Err(Error::Domain(_))));
    cfg.k0 = 1.0;
    cfg.ai0 = 1.0;
    cfg.mode = SolveMode::FiniteHorizon(0);
    assert!(matches!(
        planner::solve_finite_horizon(&cfg),
        Err(Error::HorizonTooShort(0))
    ));
    cfg.mode = SolveMode::SteadyState;
    assert!(planner::solve_finite_horizon(&cfg).is_err());
}

#[test]
fn dispatch_follows_mode() {
    let mut cfg = EconomyConfig::symmetric();
    assert!(planner::solve(&cfg).unwrap().is_stationary());
    let ss = planner::solve_steady_state(&cfg).unwrap();
    cfg.k0 = ss.allocation.periods[0].k;
    cfg.ai0 = ss.allocation.periods[0].ai;
    cfg.mode = SolveMode::FiniteHorizon(5);
    assert_eq!(planner::solve(&cfg).unwrap().allocation.len(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn threshold_desk_solutions_hold_across_ai_productivity(a in 0.1f64..10.0) {
        let cfg = ParamPath::AAi.apply(&EconomyConfig::threshold_desk(), a).unwrap();
        let sol = planner::solve_steady_state(&cfg).unwrap();
        prop_assert!(matches!(sol.regime, Regime::CognitiveBinds | Regime::ManualBinds));
        check_solution(&cfg, &sol);
    }

    #[test]
    fn complements_desk_solutions_hold_across_skill_gaps(z in 1.2f64..3.0, a in 0.05f64..0.5) {
        let mut cfg = EconomyConfig::cognitive_binding_desk();
        cfg.agents.cognitive.z = z;
        cfg.tech.a_ai = a;
        let sol = planner::solve_steady_state(&cfg).unwrap();
        check_solution(&cfg, &sol);
        let wages = &sol.wages[0];
        prop_assert!(wages.cognitive > wages.manual);
    }
}
