//! Damped Gauss–Newton for small real nonlinear systems.
//!
//! Systems may be overdetermined (more residuals than unknowns), which is
//! how gauge-fixed quaternionic equations appear: the real unknowns are
//! fewer than the real components of the residual. Steps solve the linear
//! least-squares problem `J δ = −r` through an SVD of the finite-difference
//! Jacobian.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions {
    /// Stop once the max-norm of the residual is at or below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative central-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-13, max_iter: 60, fd_step: 1e-7 }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn max_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) })
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `‖f(x)‖` from `x0`. `f` returns `None` where it is undefined
/// (a singular intermediate), which the line search treats as a rejection.
pub fn gauss_newton<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> NewtonOutcome
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = match f(&x) {
        Some(r) if r.iter().all(|v| v.is_finite()) => r,
        _ => {
            return NewtonOutcome { x, residual: f64::INFINITY, iterations: 0, converged: false };
        }
    };
    let m = r.len();
    let mut res = max_norm(&r);
    let mut iterations = 0;
    while res > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(m, n);
        let mut ok = true;
        for j in 0..n {
            let h = opts.fd_step * (1.0 + x[j].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            match (f(&xp), f(&xm)) {
                (Some(rp), Some(rm)) => {
                    for i in 0..m {
                        jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
                    }
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        let rhs = -DVector::from_column_slice(&r);
        let svd = jac.svd(true, true);
        let max_sv = svd.singular_values.max();
        let step = match svd.solve(&rhs, max_sv * 1e-14) {
            Ok(s) => s,
            Err(_) => break,
        };
        if !step.iter().all(|v| v.is_finite()) {
            break;
        }

        let base = sq_norm(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Some(rc) = f(&cand) {
                if rc.iter().all(|v| v.is_finite()) && sq_norm(&rc) < base {
                    x = cand;
                    r = rc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        res = max_norm(&r);
    }
    NewtonOutcome { x, residual: res, iterations, converged: res <= opts.tol }
}
