//! Damped Newton iteration on a square nonlinear system.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Convergence threshold on the max-norm of the residual.
    pub tol: f64,
    pub max_halvings: usize,
    /// Cap on the max-norm of a single full step.
    pub max_step: f64,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            tol: 1e-10,
            max_halvings: 40,
            max_step: 1.0,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn max_norm(v: &DVector<f64>) -> f64 {
    v.iter()
        .fold(0.0_f64, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

fn merit(v: &DVector<f64>) -> f64 {
    let n = v.norm_squared();
    if n.is_finite() {
        n
    } else {
        f64::INFINITY
    }
}

/// Central-difference Jacobian of `f` at `x`.
pub fn jacobian<F>(f: &F, x: &DVector<f64>, step: f64) -> Option<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let n = x.len();
    let m = f(x)?.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.clone();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let up = f(&probe)?;
        probe[j] = x[j] - h;
        let down = f(&probe)?;
        probe[j] = x[j];
        jac.set_column(j, &((up - down) / (2.0 * h)));
    }
    Some(jac)
}

/// Solves `f(x) = 0` from `x0`. `f` returns `None` outside its domain.
pub fn solve<F>(f: F, x0: DVector<f64>, opts: &NewtonOptions) -> NewtonOutcome
where
    F: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let mut x = x0;
    let Some(mut fx) = f(&x) else {
        return NewtonOutcome {
            x,
            residual: f64::INFINITY,
            iterations: 0,
            converged: false,
        };
    };
    let mut res = max_norm(&fx);
    for it in 0..opts.max_iterations {
        if res <= opts.tol {
            return NewtonOutcome {
                x,
                residual: res,
                iterations: it,
                converged: true,
            };
        }
        let Some(jac) = jacobian(&f, &x, opts.fd_step) else {
            break;
        };
        let Some(mut dx) = jac.lu().solve(&(-&fx)) else {
            break;
        };
        let big = max_norm(&dx);
        if !big.is_finite() {
            break;
        }
        if big > opts.max_step {
            dx *= opts.max_step / big;
        }

        let current = merit(&fx);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = &x + alpha * &dx;
            if let Some(ft) = f(&trial) {
                if merit(&ft) < current {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((xn, fnew)) => {
                x = xn;
                fx = fnew;
                res = max_norm(&fx);
            }
            None => break,
        }
    }
    NewtonOutcome {
        converged: res <= opts.tol,
        x,
        residual: res,
        iterations: opts.max_iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonlinear_system() {
        // x^2 + y^2 = 4, x = y
        let f = |v: &DVector<f64>| Some(DVector::from_vec(vec![v[0] * v[0] + v[1] * v[1] - 4.0, v[0] - v[1]]));
        let out = solve(f, DVector::from_vec(vec![3.0, 0.5]), &NewtonOptions::default());
        assert!(out.converged);
        assert!((out.x[0] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn reports_failure_outside_domain() {
        let f = |v: &DVector<f64>| {
            if v[0] > 0.0 {
                Some(DVector::from_vec(vec![v[0].ln() + 10.0]))
            } else {
                None
            }
        };
        let out = solve(f, DVector::from_vec(vec![-1.0]), &NewtonOptions::default());
        assert!(!out.converged);
    }

    #[test]
    fn jacobian_matches_analytic() {
        let f = |v: &DVector<f64>| Some(DVector::from_vec(vec![v[0].sin() * v[1], v[1].exp()]));
        let x = DVector::from_vec(vec![0.3, 0.7]);
        let j = jacobian(&f, &x, 1e-6).unwrap();
        assert!((j[(0, 0)] - 0.3f64.cos() * 0.7).abs() < 1e-9);
        assert!((j[(0, 1)] - 0.3f64.sin()).abs() < 1e-9);
        assert!(j[(1, 0)].abs() < 1e-12);
        assert!((j[(1, 1)] - 0.7f64.exp()).abs() < 1e-9);
    }
}
