//! Nested CES technology: output, total wealth, marginal products, wages, and
//! numerical certification of the wage-premium assumptions.
//!
//! Every form is a composition of two-input CES aggregators
//! `g(a, b) = [s a^rho + (1 - s) b^rho]^(1/rho)` (geometric mean at `rho = 0`).
//! Each aggregator carries its value, gradient, and Hessian with respect to the
//! four factor inputs, so first and second partials of `F` are closed-form.

use serde::{Deserialize, Serialize};

use crate::economy::{AgentKind, TechForm, TechnologyParams, TypePair};
use crate::error::{Error, Result};

/// Exponents with magnitude below this use the log (Cobb-Douglas) limit.
pub const LOG_LIMIT_THRESHOLD: f64 = 1e-6;
/// Derivative magnitude below which a sign is not considered strict.
pub const TOL_STRICT: f64 = 1e-8;

pub const LC: usize = 0;
pub const LM: usize = 1;
pub const K: usize = 2;
pub const AI: usize = 3;

/// The four factor inputs of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorInputs {
    pub lc: f64,
    pub lm: f64,
    pub k: f64,
    pub ai: f64,
}

impl FactorInputs {
    pub fn new(lc: f64, lm: f64, k: f64, ai: f64) -> Self {
        Self { lc, lm, k, ai }
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self::new(x[LC], x[LM], x[K], x[AI])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.lc, self.lm, self.k, self.ai]
    }

    pub fn labor(self, kind: AgentKind) -> f64 {
        match kind {
            AgentKind::Cognitive => self.lc,
            AgentKind::Manual => self.lm,
        }
    }

    fn scaled(self, s: f64) -> Self {
        Self::new(s * self.lc, s * self.lm, s * self.k, s * self.ai)
    }

    fn check_nonneg(self) -> Result<()> {
        if self.to_array().iter().all(|x| *x >= 0.0 && x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "factor inputs must be finite and non-negative: {self:?}"
            )))
        }
    }

    fn check_positive(self) -> Result<()> {
        if self.to_array().iter().all(|x| *x > 0.0 && x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "factor inputs must be strictly positive: {self:?}"
            )))
        }
    }
}

pub fn labor_index(kind: AgentKind) -> usize {
    match kind {
        AgentKind::Cognitive => LC,
        AgentKind::Manual => LM,
    }
}

type Grad = [f64; 4];
type Hess = [[f64; 4]; 4];

/// A scalar function of the factor inputs with its first and second derivatives.
#[derive(Debug, Clone, Copy)]
struct Node {
    value: f64,
    grad: Grad,
    hess: Hess,
}

impl Node {
    fn linear(x: &[f64; 4], terms: &[(usize, f64)]) -> Self {
        let mut grad = [0.0; 4];
        let mut value = 0.0;
        for &(i, coef) in terms {
            value += coef * x[i];
            grad[i] += coef;
        }
        Self {
            value,
            grad,
            hess: [[0.0; 4]; 4],
        }
    }

    fn scale(mut self, s: f64) -> Self {
        self.value *= s;
        for i in 0..4 {
            self.grad[i] *= s;
            for j in 0..4 {
                self.hess[i][j] *= s;
            }
        }
        self
    }
}

fn is_log_limit(rho: f64) -> bool {
    rho.abs() < LOG_LIMIT_THRESHOLD
}

/// Value of `g(a, b)` for non-negative arguments.
fn ces_value(share: f64, rho: f64, a: f64, b: f64) -> f64 {
    if is_log_limit(rho) {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        // exp-log form keeps the limit exact
        (share * a.ln() + (1.0 - share) * b.ln()).exp()
    } else if rho < 0.0 && (a == 0.0 || b == 0.0) {
        0.0
    } else {
        (share * a.powf(rho) + (1.0 - share) * b.powf(rho)).powf(1.0 / rho)
    }
}

/// `g(a, b)` with chain-rule propagation of gradient and Hessian; needs `a, b > 0`.
fn ces(share: f64, rho: f64, a: &Node, b: &Node) -> Node {
    let rho = if is_log_limit(rho) { 0.0 } else { rho };
    let g = ces_value(share, rho, a.value, b.value);
    // g_a = s (g/a)^(1-rho), g_b = (1-s) (g/b)^(1-rho)
    let ga = share * (g / a.value).powf(1.0 - rho);
    let gb = (1.0 - share) * (g / b.value).powf(1.0 - rho);
    let gaa = (1.0 - rho) * ga * (ga / g - 1.0 / a.value);
    let gbb = (1.0 - rho) * gb * (gb / g - 1.0 / b.value);
    let gab = (1.0 - rho) * ga * gb / g;

    let grad = std::array::from_fn(|i| ga * a.grad[i] + gb * b.grad[i]);
    let hess = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            gaa * a.grad[i] * a.grad[j]
                + gab * (a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j])
                + gbb * b.grad[i] * b.grad[j]
                + ga * a.hess[i][j]
                + gb * b.hess[i][j]
        })
    });
    Node { value: g, grad, hess }
}

/// Exponents actually used by the form; Cobb-Douglas forces all of them to the log limit.
fn exponents(tech: &TechnologyParams) -> (f64, f64, f64) {
    match tech.form {
        TechForm::CobbDouglas => (0.0, 0.0, 0.0),
        _ => (tech.sigma_top, tech.rho_c, tech.rho_m),
    }
}

fn output_value(tech: &TechnologyParams, x: FactorInputs) -> f64 {
    let (sigma, rho_c, rho_m) = exponents(tech);
    let (xc, xm) = match tech.form {
        TechForm::NestComplements | TechForm::CobbDouglas => (
            ces_value(tech.lambda_c, rho_c, x.k, x.lc),
            ces_value(tech.theta_m, rho_m, tech.a_ai * x.ai, x.lm),
        ),
        TechForm::NestSubstituteCognitive => (ces_value(tech.lambda_c, rho_c, x.k, x.lc + tech.a_ai * x.ai), x.lm),
    };
    tech.scale * ces_value(tech.mu_top, sigma, xc, xm)
}

fn output_node(tech: &TechnologyParams, x: FactorInputs) -> Node {
    let (sigma, rho_c, rho_m) = exponents(tech);
    let arr = x.to_array();
    let (xc, xm) = match tech.form {
        TechForm::NestComplements | TechForm::CobbDouglas => (
            ces(
                tech.lambda_c,
                rho_c,
                &Node::linear(&arr, &[(K, 1.0)]),
                &Node::linear(&arr, &[(LC, 1.0)]),
            ),
            ces(
                tech.theta_m,
                rho_m,
                &Node::linear(&arr, &[(AI, tech.a_ai)]),
                &Node::linear(&arr, &[(LM, 1.0)]),
            ),
        ),
        TechForm::NestSubstituteCognitive => (
            ces(
                tech.lambda_c,
                rho_c,
                &Node::linear(&arr, &[(K, 1.0)]),
                &Node::linear(&arr, &[(LC, 1.0), (AI, tech.a_ai)]),
            ),
            Node::linear(&arr, &[(LM, 1.0)]),
        ),
    };
    ces(tech.mu_top, sigma, &xc, &xm).scale(tech.scale)
}

/// Output `Y = F(L_c, L_m, K, AI)`.
pub fn output(tech: &TechnologyParams, x: FactorInputs) -> Result<f64> {
    x.check_nonneg()?;
    Ok(output_value(tech, x))
}

/// Output plus undepreciated capital, `Y + (1 - delta_K) K + (1 - delta_AI) AI`.
pub fn total_wealth(tech: &TechnologyParams, x: FactorInputs) -> Result<f64> {
    let y = output(tech, x)?;
    Ok(wealth_from_output(tech, y, x.k, x.ai))
}

pub fn wealth_from_output(tech: &TechnologyParams, y: f64, k: f64, ai: f64) -> f64 {
    y + (1.0 - tech.delta_k) * k + (1.0 - tech.delta_ai) * ai
}

/// Partials of `F` and of total wealth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalProducts {
    /// `dF/dL_c, dF/dL_m, dF/dK, dF/dAI`.
    pub mp: [f64; 4],
    /// `dF~/dK, dF~/dAI`.
    pub wealth_mp: [f64; 2],
}

impl MarginalProducts {
    pub fn wealth_k(&self) -> f64 {
        self.wealth_mp[0]
    }

    pub fn wealth_ai(&self) -> f64 {
        self.wealth_mp[1]
    }
}

fn wealth_partials(tech: &TechnologyParams, mp: &[f64; 4]) -> [f64; 2] {
    [mp[K] + 1.0 - tech.delta_k, mp[AI] + 1.0 - tech.delta_ai]
}

/// Closed-form partials of `F` and total wealth.
pub fn marginal_products(tech: &TechnologyParams, x: FactorInputs) -> Result<MarginalProducts> {
    x.check_positive()?;
    let node = output_node(tech, x);
    Ok(MarginalProducts {
        mp: node.grad,
        wealth_mp: wealth_partials(tech, &node.grad),
    })
}

/// Full evaluation of the technology at one input point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TechEvaluation {
    pub y: f64,
    pub f_tilde: f64,
    pub mp: [f64; 4],
    pub wealth_mp: [f64; 2],
    pub wages: TypePair<f64>,
}

pub fn evaluate(tech: &TechnologyParams, z: TypePair<f64>, x: FactorInputs) -> Result<TechEvaluation> {
    x.check_positive()?;
    let node = output_node(tech, x);
    Ok(TechEvaluation {
        y: node.value,
        f_tilde: wealth_from_output(tech, node.value, x.k, x.ai),
        mp: node.grad,
        wealth_mp: wealth_partials(tech, &node.grad),
        wages: TypePair::new(node.grad[LC] * z.cognitive, node.grad[LM] * z.manual),
    })
}

/// Wages `w_h = (dF/dL_h) z_h`.
pub fn wages(tech: &TechnologyParams, z: TypePair<f64>, x: FactorInputs) -> Result<TypePair<f64>> {
    let mp = marginal_products(tech, x)?;
    Ok(TypePair::new(mp.mp[LC] * z.cognitive, mp.mp[LM] * z.manual))
}

/// `(dF/dL_c) / (dF/dL_m)`.
pub fn mpl_ratio(tech: &TechnologyParams, x: FactorInputs) -> Result<f64> {
    let mp = marginal_products(tech, x)?;
    Ok(mp.mp[LC] / mp.mp[LM])
}

/// First and second derivatives of `F` at a point.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrder {
    pub y: f64,
    pub grad: [f64; 4],
    pub hess: [[f64; 4]; 4],
}

pub fn second_order(tech: &TechnologyParams, x: FactorInputs) -> Result<SecondOrder> {
    x.check_positive()?;
    let n = output_node(tech, x);
    Ok(SecondOrder {
        y: n.value,
        grad: n.grad,
        hess: n.hess,
    })
}

impl SecondOrder {
    /// Ratio `w_j / w_h` and its gradient with respect to `(L_c, L_m, K, AI)`.
    pub fn wage_ratio(&self, z: TypePair<f64>, j: AgentKind, h: AgentKind) -> (f64, [f64; 4]) {
        let (ij, ih) = (labor_index(j), labor_index(h));
        let ratio = (z[j] * self.grad[ij]) / (z[h] * self.grad[ih]);
        let mut d = [0.0; 4];
        for (x, dx) in d.iter_mut().enumerate() {
            *dx = ratio * (self.hess[ij][x] / self.grad[ij] - self.hess[ih][x] / self.grad[ih]);
        }
        (ratio, d)
    }
}

/// Maximum relative error `|analytic - numeric| / max(1, |analytic|)` between the
/// closed-form partials and central differences with the given step.
pub fn grad_check(tech: &TechnologyParams, point: FactorInputs, step: f64) -> Result<f64> {
    point.check_positive()?;
    let arr = point.to_array();
    let min = arr.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(step > 0.0 && step < min) {
        return Err(Error::InvalidStep(step));
    }
    let analytic = marginal_products(tech, point)?.mp;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        let mut up = arr;
        let mut down = arr;
        up[i] += step;
        down[i] -= step;
        let numeric = (output_value(tech, FactorInputs::from_array(up))
            - output_value(tech, FactorInputs::from_array(down)))
            / (2.0 * step);
        worst = worst.max((analytic[i] - numeric).abs() / analytic[i].abs().max(1.0));
    }
    Ok(worst)
}

/// Rectangular grid over `(L_c, L_m, K, AI)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionGrid {
    pub axes: [Vec<f64>; 4],
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

impl AssumptionGrid {
    /// `points` log-spaced values per axis over `[x/2, 2x]` around `center`.
    pub fn around(center: FactorInputs, points: usize) -> Self {
        let c = center.to_array();
        Self {
            axes: std::array::from_fn(|i| log_space(c[i] / 2.0, c[i] * 2.0, points)),
        }
    }

    /// The same `[lo, hi]` range with `points` log-spaced values on every axis.
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            axes: std::array::from_fn(|_| log_space(lo, hi, points)),
        }
    }

    fn validate(&self) -> Result<()> {
        for (i, axis) in self.axes.iter().enumerate() {
            if axis.len() < 3 {
                return Err(Error::DegenerateGrid(format!("axis {i} has fewer than 3 points")));
            }
            if axis.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::DegenerateGrid(format!("axis {i} has a non-positive value")));
            }
        }
        Ok(())
    }

    fn points(&self) -> impl Iterator<Item = FactorInputs> + '_ {
        let [a, b, c, d] = &self.axes;
        a.iter().flat_map(move |&lc| {
            b.iter().flat_map(move |&lm| {
                c.iter()
                    .flat_map(move |&k| d.iter().map(move |&ai| FactorInputs::new(lc, lm, k, ai)))
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NonStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assumption {
    A1,
    A2,
    A3,
}

/// Outcome of one assumption over the whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub verdict: Verdict,
    /// Grid point with the smallest signed margin.
    pub worst_point: FactorInputs,
    /// Derivative of the MPL ratio observed there.
    pub worst_derivative: f64,
    /// Input the derivative was taken in at the worst point.
    pub worst_direction: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub a1: AssumptionCheck,
    pub a2: AssumptionCheck,
    pub a3: AssumptionCheck,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        [self.a1, self.a2, self.a3].iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn checks(&self) -> [AssumptionCheck; 3] {
        [self.a1, self.a2, self.a3]
    }
}

fn ratio_derivative(tech: &TechnologyParams, x: FactorInputs, dir: usize) -> Result<f64> {
    let arr = x.to_array();
    let h = 1e-4 * arr[dir];
    let mut up = arr;
    let mut down = arr;
    up[dir] += h;
    down[dir] -= h;
    let r_up = mpl_ratio(tech, FactorInputs::from_array(up))?;
    let r_down = mpl_ratio(tech, FactorInputs::from_array(down))?;
    Ok((r_up - r_down) / (2.0 * h))
}

struct Tracker {
    assumption: Assumption,
    worst_margin: f64,
    worst: Option<(FactorInputs, f64, usize)>,
}

impl Tracker {
    fn new(assumption: Assumption) -> Self {
        Self {
            assumption,
            worst_margin: f64::INFINITY,
            worst: None,
        }
    }

    fn observe(&mut self, x: FactorInputs, dir: usize, derivative: f64, required_sign: f64) {
        let margin = required_sign * derivative;
        if margin < self.worst_margin || self.worst.is_none() {
            self.worst_margin = margin;
            self.worst = Some((x, derivative, dir));
        }
    }

    fn finish(self) -> AssumptionCheck {
        let (worst_point, worst_derivative, worst_direction) = self.worst.expect("grid is non-empty");
        let verdict = if self.worst_margin < -TOL_STRICT {
            Verdict::Fail
        } else if self.worst_margin <= TOL_STRICT {
            Verdict::NonStrict
        } else {
            Verdict::Pass
        };
        AssumptionCheck {
            assumption: self.assumption,
            verdict,
            worst_point,
            worst_derivative,
            worst_direction,
        }
    }
}

/// Signs the central-difference derivative of the MPL ratio at every grid point:
/// increasing in `K` (A1), decreasing in `AI` (A2), decreasing in `L_c` and
/// increasing in `L_m` (A3).
pub fn check_assumptions(tech: &TechnologyParams, grid: &AssumptionGrid) -> Result<AssumptionReport> {
    grid.validate()?;
    let mut a1 = Tracker::new(Assumption::A1);
    let mut a2 = Tracker::new(Assumption::A2);
    let mut a3 = Tracker::new(Assumption::A3);
    for x in grid.points() {
        a1.observe(x, K, ratio_derivative(tech, x, K)?, 1.0);
        a2.observe(x, AI, ratio_derivative(tech, x, AI)?, -1.0);
        a3.observe(x, LC, ratio_derivative(tech, x, LC)?, -1.0);
        a3.observe(x, LM, ratio_derivative(tech, x, LM)?, 1.0);
    }
    Ok(AssumptionReport {
        a1: a1.finish(),
        a2: a2.finish(),
        a3: a3.finish(),
    })
}

/// Scales the inputs and reports `F(s x) / (s F(x))`; exactly one for the provided forms.
pub fn homogeneity_ratio(tech: &TechnologyParams, x: FactorInputs, s: f64) -> Result<f64> {
    Ok(output(tech, x.scaled(s))? / (s * output(tech, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::EconomyConfig;
    use proptest::prelude::*;

    fn unit() -> FactorInputs {
        FactorInputs::new(1.0, 1.0, 1.0, 1.0)
    }

    fn cobb_douglas() -> TechnologyParams {
        let mut t = EconomyConfig::symmetric().tech;
        t.form = TechForm::CobbDouglas;
        t.mu_top = 0.5;
        t.lambda_c = 0.5;
        t.theta_m = 0.5;
        t.a_ai = 1.0;
        t
    }

    /// Cobb-Douglas with exponents L_c 0.3, L_m 0.1, K 0.2, AI 0.4.
    fn cobb_douglas_uneven() -> TechnologyParams {
        let mut t = cobb_douglas();
        t.lambda_c = 0.4;
        t.theta_m = 0.8;
        t
    }

    fn linear_nests() -> TechnologyParams {
        let mut t = EconomyConfig::symmetric().tech;
        t.sigma_top = 1.0;
        t.rho_c = 1.0;
        t.rho_m = 1.0;
        t.mu_top = 0.5;
        t.lambda_c = 0.5;
        t.theta_m = 0.5;
        t.a_ai = 1.0;
        t
    }

    fn desk_complements() -> TechnologyParams {
        let mut t = EconomyConfig::symmetric().tech;
        t.sigma_top = 0.5;
        t.rho_c = -1.0;
        t.rho_m = -1.0;
        t
    }

    #[test]
    fn output_examples() {
        assert!((output(&cobb_douglas(), unit()).unwrap() - 1.0).abs() < 1e-15);
        let y = output(&cobb_douglas(), FactorInputs::new(1.0, 1.0, 16.0, 1.0)).unwrap();
        assert!((y - 2.0).abs() < 1e-14);
        assert!((output(&linear_nests(), unit()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn output_rejects_negative_inputs() {
        assert!(output(&cobb_douglas(), FactorInputs::new(-1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn zero_input_in_complementary_nest_shuts_that_nest() {
        // X_c = 0, X_m = 1, so y = (1 - mu_top)^(1 / sigma_top)
        let y = output(&desk_complements(), FactorInputs::new(0.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((y - 0.25).abs() < 1e-15);
        let mut t = desk_complements();
        t.sigma_top = -0.5;
        assert_eq!(output(&t, FactorInputs::new(0.0, 1.0, 1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn total_wealth_examples() {
        let mut t = cobb_douglas();
        t.delta_k = 1.0;
        t.delta_ai = 1.0;
        assert!((total_wealth(&t, FactorInputs::new(1.0, 1.0, 1.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            wealth_from_output(
                &{
                    let mut t = t;
                    t.delta_k = 0.5;
                    t
                },
                1.0,
                2.0,
                0.0
            ),
            2.0
        );
        t.delta_k = 0.1;
        t.delta_ai = 0.1;
        assert!((wealth_from_output(&t, 1.0, 1.0, 1.0) - 2.8).abs() < 1e-15);
    }

    #[test]
    fn marginal_product_examples() {
        let mp = marginal_products(&cobb_douglas(), unit()).unwrap();
        for p in mp.mp {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let mp = marginal_products(&linear_nests(), unit()).unwrap();
        assert!((mp.mp[K] - 0.25).abs() < 1e-15);
        assert!((mp.wealth_k() - (0.25 + 0.9)).abs() < 1e-15);
    }

    #[test]
    fn wage_examples() {
        let w = wages(&cobb_douglas(), TypePair::new(2.0, 1.0), unit()).unwrap();
        assert!((w.cognitive - 0.5).abs() < 1e-15);
        let w = wages(&cobb_douglas_uneven(), TypePair::new(1.0, 1.0), unit()).unwrap();
        assert!((w.cognitive - 0.3).abs() < 1e-15);
        assert!((w.manual - 0.1).abs() < 1e-15);
        let w = wages(&desk_complements(), TypePair::new(1.0, 1.0), unit()).unwrap();
        assert!((w.cognitive - w.manual).abs() < 1e-15);
    }

    #[test]
    fn mpl_ratio_examples() {
        assert!((mpl_ratio(&desk_complements(), unit()).unwrap() - 1.0).abs() < 1e-14);
        let t = cobb_douglas_uneven();
        for k in [0.5, 1.0, 7.0] {
            let r = mpl_ratio(&t, FactorInputs::new(1.0, 1.0, k, 1.0)).unwrap();
            assert!((r - 3.0).abs() < 1e-13);
        }
        let t = desk_complements();
        let r1 = mpl_ratio(&t, unit()).unwrap();
        let r2 = mpl_ratio(&t, FactorInputs::new(1.0, 1.0, 2.0, 1.0)).unwrap();
        assert!(r2 > r1);
    }

    #[test]
    fn cobb_douglas_a1_is_non_strict() {
        let grid = AssumptionGrid::uniform(0.5, 2.0, 5);
        let report = check_assumptions(&cobb_douglas_uneven(), &grid).unwrap();
        assert_eq!(report.a1.verdict, Verdict::NonStrict);
        assert_eq!(report.a2.verdict, Verdict::NonStrict);
        assert_eq!(report.a3.verdict, Verdict::Pass);
        assert!(!report.all_pass());
    }

    #[test]
    fn desk_nests_pass_all_assumptions() {
        let grid = AssumptionGrid::uniform(0.5, 2.0, 5);
        let report = check_assumptions(&desk_complements(), &grid).unwrap();
        assert!(report.all_pass(), "{report:?}");

        let mut sub = EconomyConfig::symmetric().tech;
        sub.form = TechForm::NestSubstituteCognitive;
        sub.rho_c = 0.5;
        let report = check_assumptions(&sub, &grid).unwrap();
        assert_eq!(report.a2.verdict, Verdict::Pass);

        let report = check_assumptions(&EconomyConfig::threshold_desk().tech, &grid).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn reversed_nest_ordering_fails_a1() {
        let mut t = desk_complements();
        t.rho_c = 0.9;
        let report = check_assumptions(&t, &AssumptionGrid::uniform(0.5, 2.0, 3)).unwrap();
        assert_eq!(report.a1.verdict, Verdict::Fail);
    }

    #[test]
    fn degenerate_grid_rejected() {
        let grid = AssumptionGrid::uniform(0.5, 2.0, 2);
        assert!(matches!(
            check_assumptions(&desk_complements(), &grid),
            Err(Error::DegenerateGrid(_))
        ));
        let mut grid = AssumptionGrid::uniform(0.5, 2.0, 3);
        grid.axes[2][0] = 0.0;
        assert!(check_assumptions(&desk_complements(), &grid).is_err());
    }

    #[test]
    fn grad_check_examples() {
        assert!(grad_check(&cobb_douglas(), unit(), 1e-6).unwrap() <= 1e-6);
        assert!(matches!(
            grad_check(&cobb_douglas(), unit(), 0.0),
            Err(Error::InvalidStep(_))
        ));
        assert!(grad_check(&cobb_douglas(), unit(), 2.0).is_err());
    }

    #[test]
    fn exponent_limit_is_continuous() {
        let mut near = desk_complements();
        near.sigma_top = 1e-7;
        near.rho_c = 1e-7;
        near.rho_m = 1e-7;
        let mut exact = near;
        exact.sigma_top = 0.0;
        exact.rho_c = 0.0;
        exact.rho_m = 0.0;
        let x = unit();
        let (a, b) = (output(&near, x).unwrap(), output(&exact, x).unwrap());
        assert!((a - b).abs() / b <= 1e-5);
        // just outside the routing threshold the power form is used
        near.sigma_top = 2e-6;
        near.rho_c = 2e-6;
        near.rho_m = 2e-6;
        let a = output(&near, FactorInputs::new(1.3, 0.7, 2.0, 0.4)).unwrap();
        let b = output(&exact, FactorInputs::new(1.3, 0.7, 2.0, 0.4)).unwrap();
        assert!((a - b).abs() / b <= 1e-5);
    }

    /// Second partials against central differences of the closed-form gradient.
    #[test]
    fn hessian_matches_gradient_differences() {
        for tech in [
            desk_complements(),
            EconomyConfig::threshold_desk().tech,
            cobb_douglas_uneven(),
        ] {
            let x = FactorInputs::new(0.8, 1.3, 2.1, 0.6);
            let so = second_order(&tech, x).unwrap();
            let arr = x.to_array();
            for j in 0..4 {
                let h = 1e-6 * arr[j];
                let mut up = arr;
                let mut down = arr;
                up[j] += h;
                down[j] -= h;
                let gu = marginal_products(&tech, FactorInputs::from_array(up)).unwrap().mp;
                let gd = marginal_products(&tech, FactorInputs::from_array(down)).unwrap().mp;
                for i in 0..4 {
                    let fd = (gu[i] - gd[i]) / (2.0 * h);
                    assert!((fd - so.hess[i][j]).abs() <= 1e-6 * so.hess[i][j].abs().max(1.0));
                }
            }
        }
    }

    fn forms() -> impl Strategy<Value = TechnologyParams> {
        (
            0usize..3,
            0.1..0.9f64,
            0.1..0.9f64,
            0.1..0.9f64,
            -2.0..0.9f64,
            -2.0..0.9f64,
            0.2..5.0f64,
        )
            .prop_map(|(f, mu, lam, th, rc, rm, a)| {
                let mut t = EconomyConfig::symmetric().tech;
                t.form = [
                    TechForm::NestComplements,
                    TechForm::NestSubstituteCognitive,
                    TechForm::CobbDouglas,
                ][f];
                t.mu_top = mu;
                t.lambda_c = lam;
                t.theta_m = th;
                t.sigma_top = 0.95;
                t.rho_c = rc;
                t.rho_m = rm;
                t.a_ai = a;
                t
            })
    }

    fn points() -> impl Strategy<Value = FactorInputs> {
        (0.2..5.0f64, 0.2..5.0f64, 0.2..5.0f64, 0.2..5.0f64).prop_map(|(a, b, c, d)| FactorInputs::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_one(t in forms(), x in points(), s in 0.1..10.0f64) {
            prop_assert!((homogeneity_ratio(&t, x, s).unwrap() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn euler_identity(t in forms(), x in points()) {
            let so = second_order(&t, x).unwrap();
            let sum: f64 = (0..4).map(|i| so.grad[i] * x.to_array()[i]).sum();
            prop_assert!((sum - so.y).abs() <= 1e-8 * so.y);
        }

        #[test]
        fn positive_output_and_marginals(t in forms(), x in points()) {
            let e = evaluate(&t, TypePair::new(1.0, 1.0), x).unwrap();
            prop_assert!(e.y > 0.0);
            prop_assert!(e.mp.iter().all(|p| *p > 0.0));
            let expected = e.y + (1.0 - t.delta_k) * x.k + (1.0 - t.delta_ai) * x.ai;
            prop_assert!((e.f_tilde - expected).abs() <= 1e-14 * expected);
            prop_assert!((e.wealth_mp[0] - e.mp[K] - (1.0 - t.delta_k)).abs() <= 1e-15);
        }

        #[test]
        fn analytic_partials_match_central_differences(t in forms(), x in points()) {
            prop_assert!(grad_check(&t, x, 1e-6).unwrap() <= 1e-6);
        }
    }
}
