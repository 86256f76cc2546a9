//! The nonlinear scheme with unconditional energy decay.
//!
//! `X^{m+1}` solves, for all test functions `eta`,
//!
//! ```text
//! ((x1^m)^2 D_t X^{m+1}, eta |X^m_rho|^2) + ((x1^m)^2 X^{m+1}_rho, eta_rho)
//!     + (x1^{m+1}, eta . e1 |X^{m+1}_rho|^2) = (pi^h f^{m+1}, eta)
//! ```
//!
//! The last term couples the coordinates nonlinearly; the system is solved
//! by a damped Newton iteration with the exact Jacobian. Without forcing,
//! every solution satisfies
//!
//! ```text
//! E(X^{m+1}) + dt ((x1^m)^2 |D_t X^{m+1}|^2, |X^m_rho|^2) <= E(X^m),
//! E(X) = 1/2 ((X . e1)^2, |X_rho|^2).
//! ```

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::exact::{ExactSolution, Formulation};
use crate::grid::{element_data, Curve, Point, Topology};
use crate::linalg::BlockTridiagMatrix;
use crate::newton::{self, NewtonProblem, NewtonReport, NewtonSettings, Residual};
use crate::quadrature::gauss3;
use crate::scheme_p::load_vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryVariant {
    /// Closed curves.
    ClosedStandard,
    /// Open curves with `x1 = 0` imposed at both endpoints. Known to
    /// distribute vertices badly near the axis; kept for comparison runs.
    OpenAdapted,
}

impl BoundaryVariant {
    pub fn topology(self) -> Topology {
        match self {
            Self::ClosedStandard => Topology::Closed,
            Self::OpenAdapted => Topology::Open,
        }
    }
}

#[derive(Clone, Copy)]
pub struct StepConfigQ<'a> {
    pub dt: f64,
    pub newton: NewtonSettings,
    pub forcing: Option<&'a dyn ExactSolution>,
    pub variant: BoundaryVariant,
}

impl<'a> StepConfigQ<'a> {
    pub fn new(dt: f64, variant: BoundaryVariant) -> Self {
        Self {
            dt,
            newton: NewtonSettings::default(),
            forcing: None,
            variant,
        }
    }

    pub fn closed(dt: f64) -> Self {
        Self::new(dt, BoundaryVariant::ClosedStandard)
    }

    pub fn with_forcing(mut self, exact: &'a dyn ExactSolution) -> Self {
        self.forcing = Some(exact);
        self
    }

    fn validate(&self, curve: &Curve) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.newton.rel_tol > 0.0) || self.newton.max_iter == 0 {
            return Err(Error::invalid(
                "Newton tolerance and iteration limit must be positive",
            ));
        }
        if curve.grid().topology() != self.variant.topology() {
            return Err(Error::UnsupportedTopology(format!(
                "{:?} needs a {} curve",
                self.variant,
                self.variant.topology()
            )));
        }
        Ok(())
    }
}

/// Nonlinear system of one step, with quantities of the old time level
/// precomputed per element.
pub struct StepProblemQ<'c> {
    xm: &'c Curve,
    inv_dt: f64,
    /// `|X^m_rho|^2` per element.
    old_speed_sq: Vec<f64>,
    /// `(x1^m)^2` at the Gauss points of each element.
    old_radius_sq: Vec<[f64; 3]>,
    load: Option<Vec<Point>>,
    variant: BoundaryVariant,
}

impl<'c> StepProblemQ<'c> {
    pub fn new(xm: &'c Curve, cfg: &StepConfigQ<'_>, t_next: f64) -> Self {
        let rule = gauss3();
        let grid = xm.grid();
        let old_radius_sq = (0..grid.elements())
            .map(|e| {
                let (a, b) = xm.element(e);
                let mut r = [0.0; 3];
                for (q, &xi) in rule.points.iter().enumerate() {
                    let x1 = a.x * (1.0 - xi) + b.x * xi;
                    r[q] = x1 * x1;
                }
                r
            })
            .collect();
        Self {
            xm,
            inv_dt: 1.0 / cfg.dt,
            old_speed_sq: element_data(xm).iter().map(|d| d.speed_sq).collect(),
            old_radius_sq,
            load: cfg
                .forcing
                .map(|exact| load_vector(xm, |rho| exact.forcing(rho, t_next, Formulation::Q))),
            variant: cfg.variant,
        }
    }

    fn boundary(&self) -> Option<(usize, usize)> {
        match self.variant {
            BoundaryVariant::ClosedStandard => None,
            BoundaryVariant::OpenAdapted => self.xm.grid().boundary_dofs(),
        }
    }
}

impl NewtonProblem for StepProblemQ<'_> {
    fn residual(&self, x: &[Point]) -> Residual {
        let grid = self.xm.grid();
        let h = grid.h();
        let rule = gauss3();
        let old = self.xm.points();
        let mut r = vec![Point::zeros(); x.len()];
        let mut mag = vec![Point::zeros(); x.len()];
        for e in 0..grid.elements() {
            let (a, b) = grid.element_dofs(e);
            let delta = x[b] - x[a];
            let speed_sq = delta.norm_squared() / (h * h);
            let (ma, mb) = (x[a] - old[a], x[b] - old[b]);
            let mut stiff = 0.0;
            for (q, (xi, w)) in rule.iter().enumerate() {
                let phi = [1.0 - xi, xi];
                let rsq = self.old_radius_sq[e][q];
                stiff += w * rsq;
                let c = w * h * self.old_speed_sq[e] * rsq * self.inv_dt;
                let d = ma * phi[0] + mb * phi[1];
                // rounding of the unknowns themselves, not only of their increments
                let d_mag =
                    (x[a].abs() + old[a].abs()) * phi[0] + (x[b].abs() + old[b].abs()) * phi[1];
                let x1 = x[a].x * phi[0] + x[b].x * phi[1];
                let nl = w * h * speed_sq * x1;
                for (node, p) in [(a, phi[0]), (b, phi[1])] {
                    let term = d * (c * p);
                    r[node] += term;
                    mag[node] += d_mag * (c * p).abs();
                    r[node].x += nl * p;
                    mag[node].x += (nl * p).abs();
                }
            }
            let flux = delta * (stiff / h);
            r[a] -= flux;
            r[b] += flux;
            let flux_mag = (x[a].abs() + x[b].abs()) * (stiff / h);
            mag[a] += flux_mag;
            mag[b] += flux_mag;
        }
        if let Some(load) = &self.load {
            for ((ri, mi), l) in r.iter_mut().zip(mag.iter_mut()).zip(load) {
                *ri -= l;
                *mi += l.abs();
            }
        }
        if let Some((first, last)) = self.boundary() {
            for i in [first, last] {
                r[i].x = x[i].x;
                mag[i].x = x[i].x.abs();
            }
        }
        Residual {
            values: r,
            magnitude: newton::l2(&mag),
        }
    }

    fn jacobian(&self, x: &[Point]) -> BlockTridiagMatrix {
        let grid = self.xm.grid();
        let h = grid.h();
        let rule = gauss3();
        let mut jac = BlockTridiagMatrix::zeros(x.len(), grid.is_closed());
        for e in 0..grid.elements() {
            let (a, b) = grid.element_dofs(e);
            let delta = x[b] - x[a];
            let speed_sq = delta.norm_squared() / (h * h);
            let nodes = [a, b];
            let sign = [-1.0, 1.0];
            let mut local = [[Matrix2::<f64>::zeros(); 2]; 2];
            let mut stiff = 0.0;
            for (q, (xi, w)) in rule.iter().enumerate() {
                let phi = [1.0 - xi, xi];
                let rsq = self.old_radius_sq[e][q];
                stiff += w * rsq;
                let c = w * h * self.old_speed_sq[e] * rsq * self.inv_dt;
                let x1 = x[a].x * phi[0] + x[b].x * phi[1];
                for i in 0..2 {
                    for j in 0..2 {
                        let m = &mut local[i][j];
                        let mass = c * phi[i] * phi[j];
                        m[(0, 0)] += mass + w * h * speed_sq * phi[j] * phi[i];
                        m[(1, 1)] += mass;
                        // d|X_rho|^2 / dX_j = 2 s_j delta / h^2
                        let dv = 2.0 * sign[j] / (h * h);
                        m[(0, 0)] += w * h * x1 * phi[i] * dv * delta.x;
                        m[(0, 1)] += w * h * x1 * phi[i] * dv * delta.y;
                    }
                }
            }
            let k = stiff / h;
            for i in 0..2 {
                for j in 0..2 {
                    let s = k * sign[i] * sign[j];
                    local[i][j][(0, 0)] += s;
                    local[i][j][(1, 1)] += s;
                    jac.add(nodes[i], nodes[j], local[i][j]);
                }
            }
        }
        if let Some((first, last)) = self.boundary() {
            let n = x.len();
            for i in [first, last] {
                let clear_row0 = |m: &mut Matrix2<f64>| {
                    m[(0, 0)] = 0.0;
                    m[(0, 1)] = 0.0;
                };
                clear_row0(&mut jac.lower[i]);
                clear_row0(&mut jac.upper[i]);
                clear_row0(&mut jac.diag[i]);
                jac.diag[i][(0, 0)] = 1.0;
                debug_assert!(i < n);
            }
        }
        jac
    }
}

/// Residual of the step equations at `xnext`, one pair per node.
pub fn residual_q(xm: &Curve, xnext: &Curve, cfg: &StepConfigQ<'_>, t_next: f64) -> Vec<Point> {
    StepProblemQ::new(xm, cfg, t_next)
        .residual(xnext.points())
        .values
}

/// Exact Jacobian of [`residual_q`] with respect to the nodal values of `xnext`.
pub fn jacobian_q(
    xm: &Curve,
    xnext: &Curve,
    cfg: &StepConfigQ<'_>,
    t_next: f64,
) -> BlockTridiagMatrix {
    StepProblemQ::new(xm, cfg, t_next).jacobian(xnext.points())
}

/// One step of the nonlinear scheme, Newton-solved from the initial guess `X^m`.
pub fn step_q(xm: &Curve, cfg: &StepConfigQ<'_>, t_next: f64) -> Result<(Curve, NewtonReport)> {
    cfg.validate(xm)?;
    xm.check_admissible()?;
    let problem = StepProblemQ::new(xm, cfg, t_next);
    let (points, report) = newton::solve(&problem, xm.points().to_vec(), &cfg.newton)?;
    Ok((Curve::new(*xm.grid(), points)?, report))
}

/// `E(X) = 1/2 ((X . e1)^2, |X_rho|^2)`.
pub fn energy_q(curve: &Curve) -> f64 {
    let h = curve.grid().h();
    element_data(curve)
        .iter()
        .enumerate()
        .map(|(e, d)| {
            let (a, b) = curve.element(e);
            0.5 * h * d.speed_sq * (a.x * a.x + a.x * b.x + b.x * b.x) / 3.0
        })
        .sum()
}

/// `dt ((x1^m)^2 |D_t X^{m+1}|^2, |X^m_rho|^2)`, the energy dissipated by one step.
pub fn dissipation_q(xm: &Curve, xnext: &Curve, dt: f64) -> f64 {
    let h = xm.grid().h();
    let rule = gauss3();
    element_data(xm)
        .iter()
        .enumerate()
        .map(|(e, d)| {
            let (a, b) = xm.element(e);
            let (na, nb) = xnext.element(e);
            let (va, vb) = ((na - a) / dt, (nb - b) / dt);
            let integral = rule.integrate(|xi| {
                let x1 = a.x * (1.0 - xi) + b.x * xi;
                let v = va * (1.0 - xi) + vb * xi;
                x1 * x1 * v.norm_squared()
            });
            dt * h * d.speed_sq * integral
        })
        .sum()
}
