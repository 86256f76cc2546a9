//! Damped Newton iteration for nodal systems with a 2×2-block tridiagonal
//! Jacobian.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::linalg::BlockTridiagMatrix;

/// Residual vector together with the size of the terms it was summed from.
///
/// `magnitude` is the Euclidean norm of the per-entry sums of absolute
/// values of all contributions; `f64::EPSILON * magnitude` estimates the
/// rounding error of evaluating the residual.
#[derive(Debug, Clone)]
pub struct Residual {
    pub values: Vec<Point>,
    pub magnitude: f64,
}

impl Residual {
    pub fn norm(&self) -> f64 {
        l2(&self.values)
    }
}

pub(crate) fn l2(v: &[Point]) -> f64 {
    v.iter().map(|p| p.norm_squared()).sum::<f64>().sqrt()
}

pub trait NewtonProblem {
    fn residual(&self, x: &[Point]) -> Residual;
    fn jacobian(&self, x: &[Point]) -> BlockTridiagMatrix;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Convergence when `|r|_2 <= rel_tol * max(1, |r_0|_2)`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Step halvings allowed per iteration before giving up.
    pub max_halvings: usize,
    /// Largest nodal displacement of a trial step; longer Newton corrections
    /// are shortened before the halving search starts.
    pub max_step: Option<f64>,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iter: 20,
            max_halvings: 10,
            max_step: None,
        }
    }
}

/// Multiple of the rounding estimate below which residuals are not resolved.
const ROUNDOFF_FACTOR: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    /// Tolerance in force at the last check.
    pub tolerance: f64,
    /// Number of step halvings in each iteration.
    pub halvings: Vec<usize>,
    /// Residual norm after each iteration, starting with the initial guess.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl fmt::Display for NewtonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} iterations, residual {:.3e} (tolerance {:.3e}, initial {:.3e})",
            if self.converged {
                "converged"
            } else {
                "not converged"
            },
            self.iterations,
            self.residual_norm,
            self.tolerance,
            self.initial_residual_norm
        )
    }
}

impl NewtonReport {
    /// Estimated order of convergence from the last three residuals.
    pub fn observed_order(&self) -> Option<f64> {
        let r = &self.residual_history;
        if r.len() < 3 {
            return None;
        }
        let (a, b, c) = (r[r.len() - 3], r[r.len() - 2], r[r.len() - 1]);
        if !(a > 0.0 && b > 0.0 && c > 0.0) || a == b {
            return None;
        }
        Some((c / b).ln() / (b / a).ln())
    }
}

pub fn solve(
    problem: &impl NewtonProblem,
    initial: Vec<Point>,
    settings: &NewtonSettings,
) -> Result<(Vec<Point>, NewtonReport)> {
    let mut x = initial;
    let mut r = problem.residual(&x);
    let mut r_norm = r.norm();
    let r0 = r_norm;
    let tolerance = |res: &Residual| {
        (settings.rel_tol * r0.max(1.0)).max(ROUNDOFF_FACTOR * f64::EPSILON * res.magnitude)
    };
    let mut report = NewtonReport {
        iterations: 0,
        residual_norm: r_norm,
        initial_residual_norm: r0,
        tolerance: tolerance(&r),
        halvings: Vec::new(),
        residual_history: vec![r_norm],
        converged: false,
    };
    if !r_norm.is_finite() {
        return Err(Error::NewtonFailed(Box::new(report)));
    }
    loop {
        report.tolerance = tolerance(&r);
        if r_norm <= report.tolerance {
            report.converged = true;
            return Ok((x, report));
        }
        if report.iterations >= settings.max_iter {
            return Err(Error::NewtonFailed(Box::new(report)));
        }
        let jac = problem.jacobian(&x);
        let neg: Vec<Point> = r.values.iter().map(|v| -v).collect();
        let delta = match jac.solve(&neg) {
            Ok(d) => d,
            Err(_) => return Err(Error::NewtonFailed(Box::new(report))),
        };
        let longest = delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let mut lambda = match settings.max_step {
            Some(cap) if longest > cap => cap / longest,
            _ => 1.0,
        };
        let mut halvings = 0;
        loop {
            let trial: Vec<Point> = x.iter().zip(&delta).map(|(a, d)| a + d * lambda).collect();
            let rt = problem.residual(&trial);
            let rt_norm = rt.norm();
            if rt_norm < r_norm {
                x = trial;
                r = rt;
                r_norm = rt_norm;
                break;
            }
            if halvings == settings.max_halvings {
                report.halvings.push(halvings);
                report.iterations += 1;
                return Err(Error::NewtonFailed(Box::new(report)));
            }
            lambda *= 0.5;
            halvings += 1;
        }
        report.iterations += 1;
        report.halvings.push(halvings);
        report.residual_norm = r_norm;
        report.residual_history.push(r_norm);
    }
}
