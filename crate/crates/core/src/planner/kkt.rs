//! First-order conditions of the planner Lagrangian
//!
//! ```text
//! sum_t beta^t { sum_h pi_h [u(c_h) - nu(l_h)]
//!              + sum_h mu_h [u(c_h) - nu(l_h) - u(c_j) + nu(l_j w_j / w_h)]
//!              + lambda_t [F~_t - sum_h pi_h c_h - K_{t+1} - AI_{t+1} - g] }
//! ```
//!
//! Wages move with every factor, so the mimicking disutility contributes
//! chain terms to the labor and capital conditions: `X^i` for capital and
//! `Y_h` (own incentive constraint) plus a cross term (the other type's
//! constraint) for labor.

use serde::{Deserialize, Serialize};

use crate::economy::{AgentKind, Allocation, EconomyConfig, PeriodAllocation, TypePair};
use crate::error::{Error, Result};
use crate::preferences::{discount, flow_utility, nu_prime, u_prime};
use crate::production::{self, labor_index, FactorInputs, AI, K};

/// Allocation plus multipliers; consumption in the allocation is total consumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktCandidate {
    pub allocation: Allocation,
    pub lambda: Vec<f64>,
    pub mu: TypePair<f64>,
    /// Lump-sum consumption component common to both types.
    pub ubi: f64,
}

/// Quantities of one period that the conditions are built from.
#[derive(Debug, Clone, Copy)]
pub struct PeriodTerms {
    pub y: f64,
    pub f_tilde: f64,
    pub wealth_mp: [f64; 2],
    pub wages: TypePair<f64>,
    /// Hours type `h` works to earn type `j`'s labor income.
    pub mimic: TypePair<f64>,
    /// `X^K, X^AI`.
    pub x: [f64; 2],
    /// Chain term of `h`'s own constraint in `h`'s labor condition.
    pub y_term: TypePair<f64>,
    /// Term of the other type's constraint in `h`'s labor condition.
    pub cross: TypePair<f64>,
    /// Per-period incentive slack flow of each type.
    pub icc_flow: TypePair<f64>,
    pub flow_utility: TypePair<f64>,
}

pub fn period_terms(config: &EconomyConfig, p: &PeriodAllocation, mu: TypePair<f64>) -> Result<PeriodTerms> {
    let prefs = &config.prefs;
    let z = TypePair::new(config.z(AgentKind::Cognitive), config.z(AgentKind::Manual));
    let inputs = FactorInputs::new(p.eff.cognitive, p.eff.manual, p.k, p.ai);
    let so = production::second_order(&config.tech, inputs)?;
    let wages = TypePair::new(
        so.grad[production::LC] * z.cognitive,
        so.grad[production::LM] * z.manual,
    );

    let mut mimic = TypePair::new(0.0, 0.0);
    let mut x = [0.0; 2];
    let mut y_term = TypePair::new(0.0, 0.0);
    let mut cross = TypePair::new(0.0, 0.0);
    let mut icc_flow = TypePair::new(0.0, 0.0);
    let flow = TypePair::new(
        flow_utility(prefs, p.c.cognitive, p.l.cognitive)?,
        flow_utility(prefs, p.c.manual, p.l.manual)?,
    );

    for h in AgentKind::BOTH {
        let j = h.other();
        // r = w_j / w_h; type h mimicking j works l_j r hours
        let (r, dr) = so.wage_ratio(z, j, h);
        let hours = p.l[j] * r;
        mimic[h] = hours;
        let nu_m = nu_prime(prefs, hours)?;
        let weight = mu[h] * nu_m * p.l[j];
        x[0] += weight * dr[K];
        x[1] += weight * dr[AI];
        // through L_h = pi_h l_h z_h
        y_term[h] = weight * dr[labor_index(h)] * config.pi(h) * config.z(h);
        // through l_j directly and through L_j
        cross[j] = mu[h] * nu_m * (r + p.l[j] * dr[labor_index(j)] * config.pi(j) * config.z(j));
        icc_flow[h] = flow[h] - flow_utility(prefs, p.c[j], hours)?;
    }

    Ok(PeriodTerms {
        y: so.y,
        f_tilde: production::wealth_from_output(&config.tech, so.y, p.k, p.ai),
        wealth_mp: [
            so.grad[K] + 1.0 - config.tech.delta_k,
            so.grad[AI] + 1.0 - config.tech.delta_ai,
        ],
        wages,
        mimic,
        x,
        y_term,
        cross,
        icc_flow,
        flow_utility: flow,
    })
}

/// What a residual component measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Consumption {
        h: AgentKind,
        t: usize,
        pinned: bool,
    },
    Labor {
        h: AgentKind,
        t: usize,
    },
    Capital {
        capital: usize,
        t: usize,
    },
    Feasibility {
        t: usize,
    },
    InitialStock {
        capital: usize,
    },
    /// Flow slack in a steady state, discounted lifetime slack over a finite horizon.
    IccSlack {
        h: AgentKind,
    },
    Complementarity {
        h: AgentKind,
    },
    SlackViolation {
        h: AgentKind,
    },
    MultiplierSign {
        h: AgentKind,
    },
}

#[derive(Debug, Clone)]
pub struct Component {
    pub role: Role,
    pub value: f64,
}

/// Everything the conditions evaluate to at a candidate.
pub struct KktEvaluation {
    pub components: Vec<Component>,
    pub terms: Vec<PeriodTerms>,
    /// Discounted lifetime slack of each type.
    pub lifetime_slack: TypePair<f64>,
}

fn capital_name(i: usize) -> &'static str {
    if i == 0 {
        "k"
    } else {
        "ai"
    }
}

impl Role {
    pub fn name(&self, stationary: bool) -> String {
        let at = |base: String, t: usize| if stationary { base } else { format!("{base}[{t}]") };
        match *self {
            Role::Consumption { h, t, .. } => at(format!("consumption_{h}"), t),
            Role::Labor { h, t } => at(format!("labor_{h}"), t),
            Role::Capital { capital, t } => at(format!("capital_{}", capital_name(capital)), t),
            Role::Feasibility { t } => at("feasibility".to_string(), t),
            Role::InitialStock { capital } => format!("initial_{}", capital_name(capital)),
            Role::IccSlack { h } => format!("icc_slack_{h}"),
            Role::Complementarity { h } => format!("icc_complementarity_{h}"),
            Role::SlackViolation { h } => format!("icc_violation_{h}"),
            Role::MultiplierSign { h } => format!("mu_sign_{h}"),
        }
    }
}

/// Evaluates every condition at the candidate. The steady state uses
/// `1 = beta dF~/di + beta X^i / lambda`; a finite horizon uses
/// `lambda_{t-1} = beta lambda_t dF~_t/di + beta X^i_t` for `t >= 1`.
pub fn evaluate(config: &EconomyConfig, cand: &KktCandidate) -> Result<KktEvaluation> {
    let alloc = &cand.allocation;
    let n = alloc.periods.len();
    if n == 0 || cand.lambda.len() != n {
        return Err(Error::Domain("candidate needs one multiplier per period".into()));
    }
    let stationary = alloc.is_stationary();
    let beta = config.prefs.beta;
    let mu = cand.mu;
    let terms = alloc
        .periods
        .iter()
        .map(|p| period_terms(config, p, mu))
        .collect::<Result<Vec<_>>>()?;

    let mut comps = Vec::with_capacity(9 * n + 8);
    for (t, (p, tm)) in alloc.periods.iter().zip(&terms).enumerate() {
        let lambda = cand.lambda[t];
        for h in AgentKind::BOTH {
            let j = h.other();
            let pi = config.pi(h);
            let up = u_prime(&config.prefs, p.c[h])?;
            let value = up * (pi + mu[h] - mu[j]) - lambda * pi;
            let pinned = stationary && p.c[h] - cand.ubi <= 0.0;
            comps.push(Component {
                role: Role::Consumption { h, t, pinned },
                value,
            });
        }
        for h in AgentKind::BOTH {
            let pi = config.pi(h);
            let value = (pi + mu[h]) * nu_prime(&config.prefs, p.l[h])?
                - tm.y_term[h]
                - tm.cross[h]
                - lambda * pi * tm.wages[h];
            comps.push(Component {
                role: Role::Labor { h, t },
                value,
            });
        }
        let (k_next, ai_next) = alloc.next_stocks(t);
        let consumption: f64 = AgentKind::BOTH.iter().map(|&h| config.pi(h) * p.c[h]).sum();
        comps.push(Component {
            role: Role::Feasibility { t },
            value: tm.f_tilde - consumption - k_next - ai_next - config.g,
        });
        for i in 0..2 {
            if stationary {
                comps.push(Component {
                    role: Role::Capital { capital: i, t },
                    value: beta * tm.wealth_mp[i] + beta * tm.x[i] / lambda - 1.0,
                });
            } else if t >= 1 {
                comps.push(Component {
                    role: Role::Capital { capital: i, t },
                    value: beta * lambda * tm.wealth_mp[i] + beta * tm.x[i] - cand.lambda[t - 1],
                });
            }
        }
    }
    if !stationary {
        comps.push(Component {
            role: Role::InitialStock { capital: 0 },
            value: alloc.periods[0].k - config.k0,
        });
        comps.push(Component {
            role: Role::InitialStock { capital: 1 },
            value: alloc.periods[0].ai - config.ai0,
        });
    }

    let mut lifetime_slack = TypePair::new(0.0, 0.0);
    for h in AgentKind::BOTH {
        let flows: Vec<f64> = terms.iter().map(|tm| tm.icc_flow[h]).collect();
        let equation_slack = if stationary {
            flows[0]
        } else {
            discount(beta, &flows, false)
        };
        lifetime_slack[h] = discount(beta, &flows, stationary);
        comps.push(Component {
            role: Role::IccSlack { h },
            value: equation_slack,
        });
        comps.push(Component {
            role: Role::Complementarity { h },
            value: mu[h] * equation_slack,
        });
        comps.push(Component {
            role: Role::SlackViolation { h },
            value: equation_slack.min(0.0),
        });
        comps.push(Component {
            role: Role::MultiplierSign { h },
            value: mu[h].min(0.0),
        });
    }

    Ok(KktEvaluation {
        components: comps,
        terms,
        lifetime_slack,
    })
}

/// Named residuals of the optimality conditions; pure evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocResiduals {
    pub entries: Vec<(String, f64)>,
}

impl FocResiduals {
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, (_, v)| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Evaluates every KKT condition at a candidate and names each residual.
///
/// Raw incentive slacks are not residuals (a slack constraint is legitimately
/// positive); complementarity, primal violation and multiplier sign are.
/// Where `c_h` sits at the UBI floor the consumption condition becomes the
/// sign requirement on the bound multiplier.
pub fn foc_residuals(config: &EconomyConfig, cand: &KktCandidate) -> Result<FocResiduals> {
    cand.allocation.check(config)?;
    let eval = evaluate(config, cand)?;
    let stationary = cand.allocation.is_stationary();
    let entries = eval
        .components
        .iter()
        .filter(|c| !matches!(c.role, Role::IccSlack { .. }))
        .map(|c| {
            let value = match c.role {
                Role::Consumption { pinned: true, .. } => c.value.max(0.0),
                _ => c.value,
            };
            (c.role.name(stationary), value)
        })
        .collect();
    Ok(FocResiduals { entries })
}
