use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{ExactSolution, ManufacturedTorus, ShrinkingSphere};
use crate::grid::error_norms_with;
use crate::quadrature::{gauss2, gauss5, GaussRule};

use super::evolution::{run_evolution_observed, RunConfig, Scheme};
use super::initial::{initial_curve, InitialSpec};

/// Problems with a known exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceCase {
    /// Forced oscillating torus on `[0, 1]`.
    ManufacturedTorus,
    /// Unforced shrinking sphere on `[0, 0.125]`.
    Sphere,
}

impl ConvergenceCase {
    pub fn final_time(self) -> f64 {
        match self {
            Self::ManufacturedTorus => ManufacturedTorus::FINAL_TIME,
            Self::Sphere => ShrinkingSphere::FINAL_TIME,
        }
    }

    fn exact(self) -> &'static dyn ExactSolution {
        match self {
            Self::ManufacturedTorus => &ManufacturedTorus,
            Self::Sphere => &ShrinkingSphere,
        }
    }

    /// Quadrature for the error integrals: the torus errors are integrated
    /// to high accuracy, the sphere errors with the 2-point Gauss rule per
    /// element, the convention of the published reference values.
    pub fn error_rule(self) -> &'static GaussRule {
        match self {
            Self::ManufacturedTorus => gauss5(),
            Self::Sphere => gauss2(),
        }
    }

    fn initial(self) -> InitialSpec {
        match self {
            Self::ManufacturedTorus => InitialSpec::ManufacturedTorus,
            Self::Sphere => InitialSpec::Sphere,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub j: usize,
    /// `max_m |x(t_m) - X^m|_0`.
    pub l2: f64,
    pub eoc_l2: Option<f64>,
    /// `max_m |x(t_m) - X^m|_1`, the `H1` seminorm.
    pub h1: f64,
    pub eoc_h1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

fn eoc(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).ln() / 2f64.ln()
}

impl ConvergenceTable {
    pub const CSV_HEADER: &'static str = "J,maxL2,EOC_L2,maxH1,EOC_H1";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s += &format!(
                "{},{:.16e},{},{:.16e},{}\n",
                r.j,
                r.l2,
                opt(r.eoc_l2),
                r.h1,
                opt(r.eoc_h1)
            );
        }
        s
    }
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        writeln!(
            f,
            "{:>6} {:>12} {:>6} {:>12} {:>6}",
            "J", "max L2", "EOC", "max H1", "EOC"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6} {:>12.4e} {:>6} {:>12.4e} {:>6}",
                r.j,
                r.l2,
                opt(r.eoc_l2),
                r.h1,
                opt(r.eoc_h1)
            )?;
        }
        Ok(())
    }
}

/// Errors of one run with `dt = h^2`, maximized over all time levels.
fn max_errors(scheme: Scheme, case: ConvergenceCase, j: usize) -> Result<(f64, f64)> {
    let h = 1.0 / j as f64;
    let mut cfg = RunConfig::new(j, h * h, case.final_time(), scheme, case.initial());
    cfg.forcing = case == ConvergenceCase::ManufacturedTorus;
    cfg.record_series = false;
    cfg.stop_at_singularity = false;
    let x0 = initial_curve(&cfg.initial, cfg.grid()?)?;
    let exact = case.exact();
    let rule = case.error_rule();
    let (mut l2, mut h1) = (0.0_f64, 0.0_f64);
    run_evolution_observed(&cfg, x0, |_, t, x| {
        let e = error_norms_with(x, exact, t, rule);
        l2 = l2.max(e.l2);
        h1 = h1.max(e.h1_semi);
    })?;
    Ok((l2, h1))
}

/// Runs the case for each `J` (concurrently) with `dt = h^2`.
pub fn run_convergence(
    scheme: Scheme,
    case: ConvergenceCase,
    js: &[usize],
) -> Result<ConvergenceTable> {
    if js.is_empty() {
        return Err(Error::invalid("no grid sizes given"));
    }
    if js.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid sizes must be strictly increasing"));
    }
    let scheme = match (scheme, case) {
        (Scheme::Q, ConvergenceCase::Sphere) => Scheme::QOpenAdapted,
        (s, _) => s,
    };
    let errors: Vec<(f64, f64)> = js
        .par_iter()
        .map(|&j| max_errors(scheme, case, j))
        .collect::<Result<_>>()?;
    let rows = js
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(i, (&j, &(l2, h1)))| {
            let prev = i.checked_sub(1).map(|k| errors[k]);
            ConvergenceRow {
                j,
                l2,
                eoc_l2: prev.map(|p| eoc(p.0, l2)),
                h1,
                eoc_h1: prev.map(|p| eoc(p.1, h1)),
            }
        })
        .collect();
    Ok(ConvergenceTable { rows })
}
