//! Period utility, labor disutility, lifetime welfare and incentive-compatibility slack.

use serde::{Deserialize, Serialize};

use crate::economy::{AgentKind, Allocation, PreferenceParams, TypePair, UtilityForm};
use crate::error::{Error, Result};

/// Slack magnitude at or below which an incentive constraint counts as binding.
pub const TOL_ICC: f64 = 1e-8;

fn check_consumption(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("consumption must be positive, got {c}")))
    }
}

fn check_labor(l: f64) -> Result<()> {
    if l >= 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("labor must be non-negative, got {l}")))
    }
}

pub fn u_eval(prefs: &PreferenceParams, c: f64) -> Result<f64> {
    check_consumption(c)?;
    Ok(match prefs.u_form {
        UtilityForm::Log => c.ln(),
        UtilityForm::Crra(gamma) => c.powf(1.0 - gamma) / (1.0 - gamma),
    })
}

pub fn u_prime(prefs: &PreferenceParams, c: f64) -> Result<f64> {
    check_consumption(c)?;
    Ok(match prefs.u_form {
        UtilityForm::Log => 1.0 / c,
        UtilityForm::Crra(gamma) => c.powf(-gamma),
    })
}

pub fn u_second(prefs: &PreferenceParams, c: f64) -> Result<f64> {
    check_consumption(c)?;
    Ok(match prefs.u_form {
        UtilityForm::Log => -1.0 / (c * c),
        UtilityForm::Crra(gamma) => -gamma * c.powf(-gamma - 1.0),
    })
}

pub fn nu_eval(prefs: &PreferenceParams, l: f64) -> Result<f64> {
    check_labor(l)?;
    let p = prefs.nu_form;
    Ok(p.psi * l.powf(1.0 + p.phi) / (1.0 + p.phi))
}

pub fn nu_prime(prefs: &PreferenceParams, l: f64) -> Result<f64> {
    check_labor(l)?;
    let p = prefs.nu_form;
    Ok(p.psi * l.powf(p.phi))
}

pub fn nu_second(prefs: &PreferenceParams, l: f64) -> Result<f64> {
    check_labor(l)?;
    let p = prefs.nu_form;
    Ok(p.psi * p.phi * l.powf(p.phi - 1.0))
}

/// Hours type `h` must work at wage `w_h` to earn type `j`'s labor income `l_j w_j`.
pub fn mimic_labor(l_j: f64, w_j: f64, w_h: f64) -> Result<f64> {
    if !(w_h > 0.0) {
        return Err(Error::Domain(format!("own wage must be positive, got {w_h}")));
    }
    if !(l_j >= 0.0 && w_j >= 0.0) {
        return Err(Error::Domain("mimicked labor and wage must be non-negative".into()));
    }
    Ok(l_j * w_j / w_h)
}

/// Period flows to be discounted.
#[derive(Debug, Clone, Copy)]
pub enum Stream<'a> {
    /// A constant `(c, l)` pair held forever.
    Stationary(f64, f64),
    /// `(c_t, l_t)` for `t = 0..=T`.
    Finite(&'a [(f64, f64)]),
}

/// `sum_t beta^t flow_t`, or `flow / (1 - beta)` for a constant flow.
pub fn discount(beta: f64, flows: &[f64], stationary: bool) -> f64 {
    if stationary {
        debug_assert_eq!(flows.len(), 1);
        flows[0] / (1.0 - beta)
    } else {
        let mut weight = 1.0;
        let mut total = 0.0;
        for f in flows {
            total += weight * f;
            weight *= beta;
        }
        total
    }
}

pub fn flow_utility(prefs: &PreferenceParams, c: f64, l: f64) -> Result<f64> {
    Ok(u_eval(prefs, c)? - nu_eval(prefs, l)?)
}

pub fn lifetime_utility(prefs: &PreferenceParams, stream: Stream<'_>) -> Result<f64> {
    match stream {
        Stream::Stationary(c, l) => Ok(discount(prefs.beta, &[flow_utility(prefs, c, l)?], true)),
        Stream::Finite(pairs) => {
            let flows = pairs
                .iter()
                .map(|&(c, l)| flow_utility(prefs, c, l))
                .collect::<Result<Vec<_>>>()?;
            Ok(discount(prefs.beta, &flows, false))
        }
    }
}

/// Both sides of the incentive constraint of one type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IccEvaluation {
    pub own_value: f64,
    pub mimic_value: f64,
    pub slack: f64,
}

/// Per-period flow of the incentive slack of type `h`:
/// `u(c_h) - nu(l_h) - u(c_j) + nu(l_j w_j / w_h)`.
pub fn icc_flow(
    prefs: &PreferenceParams,
    c: TypePair<f64>,
    l: TypePair<f64>,
    w: TypePair<f64>,
    h: AgentKind,
) -> Result<(f64, f64)> {
    let j = h.other();
    let own = flow_utility(prefs, c[h], l[h])?;
    let mimic = flow_utility(prefs, c[j], mimic_labor(l[j], w[j], w[h])?)?;
    Ok((own, mimic))
}

/// Slack of the lifetime incentive constraint of type `h`, taking wages as given.
pub fn icc_slack(
    allocation: &Allocation,
    wages: &[TypePair<f64>],
    prefs: &PreferenceParams,
    h: AgentKind,
) -> Result<IccEvaluation> {
    if wages.len() != allocation.periods.len() {
        return Err(Error::Domain("one wage pair per period is required".into()));
    }
    let mut own = Vec::with_capacity(wages.len());
    let mut mimic = Vec::with_capacity(wages.len());
    for (p, w) in allocation.periods.iter().zip(wages) {
        if !(w.cognitive > 0.0 && w.manual > 0.0) {
            return Err(Error::Domain("wages must be strictly positive".into()));
        }
        let (o, m) = icc_flow(prefs, p.c, p.l, *w, h)?;
        own.push(o);
        mimic.push(m);
    }
    let stationary = allocation.is_stationary();
    let own_value = discount(prefs.beta, &own, stationary);
    let mimic_value = discount(prefs.beta, &mimic, stationary);
    Ok(IccEvaluation {
        own_value,
        mimic_value,
        slack: own_value - mimic_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::{DisutilityParams, EconomyConfig, PeriodAllocation};
    use proptest::prelude::*;

    fn log_prefs() -> PreferenceParams {
        EconomyConfig::symmetric().prefs
    }

    fn crra(gamma: f64) -> PreferenceParams {
        PreferenceParams {
            u_form: UtilityForm::Crra(gamma),
            ..log_prefs()
        }
    }

    fn with_nu(psi: f64, phi: f64) -> PreferenceParams {
        PreferenceParams {
            nu_form: DisutilityParams { psi, phi },
            ..log_prefs()
        }
    }

    #[test]
    fn utility_examples() {
        let p = log_prefs();
        assert_eq!(u_eval(&p, 1.0).unwrap(), 0.0);
        assert_eq!(u_prime(&p, 1.0).unwrap(), 1.0);
        assert_eq!(u_prime(&p, 2.0).unwrap(), 0.5);
        assert_eq!(u_prime(&crra(2.0), 2.0).unwrap(), 0.25);
        assert!(u_eval(&p, 0.0).is_err());
        assert!(u_prime(&p, -1.0).is_err());
    }

    #[test]
    fn disutility_examples() {
        let p = with_nu(1.0, 1.0);
        assert_eq!(nu_eval(&p, 1.0).unwrap(), 0.5);
        assert_eq!(nu_prime(&p, 1.0).unwrap(), 1.0);
        assert_eq!(nu_second(&p, 1.0).unwrap(), 1.0);
        assert_eq!(nu_eval(&p, 0.0).unwrap(), 0.0);
        assert_eq!(nu_prime(&with_nu(2.0, 1.0), 3.0).unwrap(), 6.0);
        assert!(nu_eval(&p, -0.1).is_err());
    }

    #[test]
    fn mimic_labor_examples() {
        assert_eq!(mimic_labor(1.0, 0.5, 1.0).unwrap(), 0.5);
        assert_eq!(mimic_labor(0.7, 1.3, 1.3).unwrap(), 0.7);
        assert_eq!(mimic_labor(2.0, 1.0, 0.5).unwrap(), 4.0);
        assert!(mimic_labor(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn lifetime_utility_examples() {
        let p = log_prefs();
        // u(1) - nu(0) = 0
        assert_eq!(lifetime_utility(&p, Stream::Stationary(1.0, 0.0)).unwrap(), 0.0);
        assert!((discount(0.96, &[0.04], true) - 1.0).abs() < 1e-15);
        assert_eq!(discount(0.5, &[1.0, 2.0], false), 2.0);
        let pairs = [(1.0, 0.0), (std::f64::consts::E, 0.0)];
        let mut p = p;
        p.beta = 0.5;
        assert!((lifetime_utility(&p, Stream::Finite(&pairs)).unwrap() - 0.5).abs() < 1e-15);
    }

    fn stationary(c: (f64, f64), l: (f64, f64)) -> Allocation {
        let cfg = EconomyConfig::symmetric();
        Allocation::stationary(PeriodAllocation::new(
            &cfg,
            TypePair::new(c.0, c.1),
            TypePair::new(l.0, l.1),
            1.0,
            1.0,
        ))
    }

    #[test]
    fn symmetric_allocation_has_zero_slack() {
        let a = stationary((0.8, 0.8), (0.9, 0.9));
        let w = [TypePair::new(1.1, 1.1)];
        for h in AgentKind::BOTH {
            assert_eq!(icc_slack(&a, &w, &log_prefs(), h).unwrap().slack, 0.0);
        }
    }

    #[test]
    fn higher_wage_type_prefers_mimicking_at_equal_bundles() {
        let a = stationary((0.8, 0.8), (0.9, 0.9));
        let w = [TypePair::new(1.5, 1.0)];
        assert!(icc_slack(&a, &w, &log_prefs(), AgentKind::Cognitive).unwrap().slack < 0.0);
        assert!(icc_slack(&a, &w, &log_prefs(), AgentKind::Manual).unwrap().slack > 0.0);
    }

    #[test]
    fn zero_wage_rejected() {
        let a = stationary((0.8, 0.8), (0.9, 0.9));
        assert!(icc_slack(&a, &[TypePair::new(0.0, 1.0)], &log_prefs(), AgentKind::Cognitive).is_err());
        assert!(icc_slack(&a, &[], &log_prefs(), AgentKind::Cognitive).is_err());
    }

    proptest! {
        #[test]
        fn marginal_utilities_match_central_differences(c in 0.05..20.0f64, gamma in 0.2..5.0f64, psi in 0.2..5.0f64, phi in 0.2..4.0f64) {
            for p in [log_prefs(), crra(gamma)] {
                let h = 1e-6 * c;
                let fd = (u_eval(&p, c + h).unwrap() - u_eval(&p, c - h).unwrap()) / (2.0 * h);
                let an = u_prime(&p, c).unwrap();
                prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0));
                let fd2 = (u_prime(&p, c + h).unwrap() - u_prime(&p, c - h).unwrap()) / (2.0 * h);
                let an2 = u_second(&p, c).unwrap();
                prop_assert!((fd2 - an2).abs() <= 1e-6 * an2.abs().max(1.0));
            }
            let p = with_nu(psi, phi);
            let l = c;
            let h = 1e-6 * l;
            let fd = (nu_eval(&p, l + h).unwrap() - nu_eval(&p, l - h).unwrap()) / (2.0 * h);
            let an = nu_prime(&p, l).unwrap();
            prop_assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0));
            let fd2 = (nu_prime(&p, l + h).unwrap() - nu_prime(&p, l - h).unwrap()) / (2.0 * h);
            let an2 = nu_second(&p, l).unwrap();
            prop_assert!((fd2 - an2).abs() <= 1e-6 * an2.abs().max(1.0));
        }

        #[test]
        fn relabeling_symmetric_economy_swaps_slacks(c in 0.1..3.0f64, d in 0.1..3.0f64, l in 0.1..2.0f64, m in 0.1..2.0f64, w in 0.2..3.0f64, v in 0.2..3.0f64) {
            let p = log_prefs();
            let a = stationary((c, d), (l, m));
            let b = stationary((d, c), (m, l));
            let wa = [TypePair::new(w, v)];
            let wb = [TypePair::new(v, w)];
            let sa = icc_slack(&a, &wa, &p, AgentKind::Cognitive).unwrap().slack;
            let sb = icc_slack(&b, &wb, &p, AgentKind::Manual).unwrap().slack;
            prop_assert!((sa - sb).abs() <= 1e-12 * (1.0 + sa.abs()));
        }

        #[test]
        fn more_own_consumption_raises_own_slack(c in 0.1..3.0f64, d in 0.1..3.0f64, l in 0.1..2.0f64, m in 0.1..2.0f64, bump in 0.01..1.0f64) {
            let p = log_prefs();
            let w = [TypePair::new(1.3, 0.8)];
            let base = icc_slack(&stationary((c, d), (l, m)), &w, &p, AgentKind::Cognitive).unwrap().slack;
            let more = icc_slack(&stationary((c + bump, d), (l, m)), &w, &p, AgentKind::Cognitive).unwrap().slack;
            prop_assert!(more > base);
        }
    }
}
