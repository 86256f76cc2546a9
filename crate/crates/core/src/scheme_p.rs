//! The linear semi-implicit scheme.
//!
//! Given `X^m`, the new curve `X^{m+1}` solves, for all test functions `eta`,
//!
//! ```text
//! (x1^m (X^{m+1} - X^m)/dt, eta |X^m_rho|^2) + (x1^m X^{m+1}_rho, eta_rho)
//!     + (eta . e1, |X^m_rho|^2) = (pi^h f^{m+1}, eta)
//! ```
//!
//! where `x1^m = X^m . e1` and the right-hand side `f` is only present in
//! manufactured-solution runs. Both coordinates share the same symmetric
//! positive definite matrix, so a step costs one factorization and two
//! tridiagonal solves. On open curves the first coordinate is fixed to zero
//! at the two endpoints.

use crate::error::{Error, Result};
use crate::exact::{ExactSolution, Formulation};
use crate::grid::{element_data, Curve, Point};
use crate::linalg::{BandedLu, TridiagMatrix};

#[derive(Clone, Copy)]
pub struct StepConfigP<'a> {
    pub dt: f64,
    pub forcing: Option<&'a dyn ExactSolution>,
}

impl<'a> StepConfigP<'a> {
    pub fn new(dt: f64) -> Self {
        Self { dt, forcing: None }
    }

    pub fn with_forcing(mut self, exact: &'a dyn ExactSolution) -> Self {
        self.forcing = Some(exact);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Assembled linear systems of one step.
#[derive(Debug, Clone)]
pub struct StepSystemP {
    /// `W/dt + S` without boundary conditions.
    pub matrix: TridiagMatrix,
    /// Matrix for the first coordinate of an open curve, with identity rows
    /// at the endpoints and the corresponding columns eliminated.
    pub constrained: Option<TridiagMatrix>,
    /// Right-hand sides for `x1` and `x2`.
    pub rhs: [Vec<f64>; 2],
    /// Weighted mass matrix `W` with weight `x1^m |X^m_rho|^2`.
    pub mass: TridiagMatrix,
    /// Weighted stiffness matrix `S` with weight `x1^m`.
    pub stiffness: TridiagMatrix,
}

impl StepSystemP {
    pub fn component_matrix(&self, k: usize) -> &TridiagMatrix {
        match (&self.constrained, k) {
            (Some(m), 0) => m,
            _ => &self.matrix,
        }
    }
}

/// Consistent P1 mass matrix contribution `(pi^h f, chi_i)` on a uniform grid.
pub(crate) fn load_vector(curve: &Curve, f: impl Fn(f64) -> Point) -> Vec<Point> {
    let grid = curve.grid();
    let h = grid.h();
    let nodal: Vec<Point> = grid.nodes().map(f).collect();
    let mut out = vec![Point::zeros(); grid.dofs()];
    for e in 0..grid.elements() {
        let (a, b) = grid.element_dofs(e);
        out[a] += (nodal[a] * 2.0 + nodal[b]) * (h / 6.0);
        out[b] += (nodal[a] + nodal[b] * 2.0) * (h / 6.0);
    }
    out
}

pub fn assemble_step_p(xm: &Curve, cfg: &StepConfigP<'_>, t_next: f64) -> Result<StepSystemP> {
    cfg.validate()?;
    xm.check_admissible()?;
    let grid = *xm.grid();
    let n = grid.dofs();
    let h = grid.h();
    let cyclic = grid.is_closed();
    let mut mass = TridiagMatrix::zeros(n, cyclic);
    let mut stiffness = TridiagMatrix::zeros(n, cyclic);
    let mut tension = vec![0.0; n];

    for (e, data) in element_data(xm).iter().enumerate() {
        let (a, b) = grid.element_dofs(e);
        let (ra, rb) = (xm.points()[a].x, xm.points()[b].x);
        let w = h * data.speed_sq / 12.0;
        mass.add(a, a, w * (3.0 * ra + rb));
        mass.add(a, b, w * (ra + rb));
        mass.add(b, a, w * (ra + rb));
        mass.add(b, b, w * (ra + 3.0 * rb));
        let k = (ra + rb) / (2.0 * h);
        stiffness.add(a, a, k);
        stiffness.add(a, b, -k);
        stiffness.add(b, a, -k);
        stiffness.add(b, b, k);
        let g = 0.5 * h * data.speed_sq;
        tension[a] += g;
        tension[b] += g;
    }

    let inv_dt = 1.0 / cfg.dt;
    let matrix = TridiagMatrix {
        lower: combine(&mass.lower, &stiffness.lower, inv_dt),
        diag: combine(&mass.diag, &stiffness.diag, inv_dt),
        upper: combine(&mass.upper, &stiffness.upper, inv_dt),
        cyclic,
    };

    let old = [xm.component(0), xm.component(1)];
    let mut rhs = [mass.mul_vec(&old[0]), mass.mul_vec(&old[1])];
    for r in rhs.iter_mut() {
        r.iter_mut().for_each(|v| *v *= inv_dt);
    }
    for (r, g) in rhs[0].iter_mut().zip(&tension) {
        *r -= g;
    }
    if let Some(exact) = cfg.forcing {
        let load = load_vector(xm, |rho| exact.forcing(rho, t_next, Formulation::P));
        for (i, l) in load.iter().enumerate() {
            rhs[0][i] += l.x;
            rhs[1][i] += l.y;
        }
    }

    let constrained = grid.boundary_dofs().map(|(first, last)| {
        let mut m = matrix.clone();
        m.set_identity_row(first, 1.0);
        m.set_identity_row(last, 1.0);
        m.lower[first + 1] = 0.0;
        m.upper[last - 1] = 0.0;
        rhs[0][first] = 0.0;
        rhs[0][last] = 0.0;
        m
    });

    Ok(StepSystemP {
        matrix,
        constrained,
        rhs,
        mass,
        stiffness,
    })
}

fn combine(mass: &[f64], stiffness: &[f64], inv_dt: f64) -> Vec<f64> {
    mass.iter()
        .zip(stiffness)
        .map(|(m, s)| m * inv_dt + s)
        .collect()
}

/// Factors `a` and rejects it unless every pivot is positive.
pub(crate) fn factor_spd(a: &TridiagMatrix) -> Result<BandedLu<f64>> {
    let lu = a.factor()?;
    let (row, pivot) = lu.min_pivot();
    if pivot <= 0.0 {
        return Err(Error::NotPositiveDefinite { row, pivot });
    }
    Ok(lu)
}

/// Solves an assembled step.
pub fn solve_step_p(xm: &Curve, system: &StepSystemP) -> Result<Curve> {
    let lu = factor_spd(&system.matrix)?;
    let x2 = lu.solve(&system.rhs[1]);
    let x1 = match &system.constrained {
        Some(m) => factor_spd(m)?.solve(&system.rhs[0]),
        None => lu.solve(&system.rhs[0]),
    };
    let points = x1
        .into_iter()
        .zip(x2)
        .map(|(a, b)| Point::new(a, b))
        .collect();
    Curve::new(*xm.grid(), points)
}

/// One time step from `xm` to the curve at time `t_next`.
pub fn step_p(xm: &Curve, cfg: &StepConfigP<'_>, t_next: f64) -> Result<Curve> {
    let system = assemble_step_p(xm, cfg, t_next)?;
    solve_step_p(xm, &system)
}
