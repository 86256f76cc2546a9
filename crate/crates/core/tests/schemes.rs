//! Single steps of both schemes against dense brute-force oracles and
//! constructed exact solutions.

mod common;

use std::f64::consts::PI;

use axiflow::exact::{ExactSolution, Formulation, ManufacturedTorus, ShrinkingSphere};
use axiflow::grid::{error_norms, interpolate, nodal_error_norms};
use axiflow::scheme_p::{assemble_step_p, step_p, StepConfigP};
use axiflow::scheme_q::{
    dissipation_q, energy_q, residual_q, step_q, BoundaryVariant, StepConfigQ,
};
use axiflow::{Curve, Error, Grid, Point, Topology};
use common::{
    dense, dense_mass, dense_solve, dense_weighted_matrices, element_integral, on_element, wobbly,
    N_ORACLE,
};
use nalgebra::{DMatrix, DVector};

/// One step of the linear scheme assembled densely with a 50-point rule.
fn oracle_step_p(xm: &Curve, dt: f64, forcing: Option<(&dyn ExactSolution, f64)>) -> Vec<Point> {
    let grid = *xm.grid();
    let n = grid.dofs();
    let (w, s) = dense_weighted_matrices(xm);
    let a = &w / dt + &s;
    let mut g = DVector::zeros(n);
    for e in 0..grid.elements() {
        let (ia, ib) = grid.element_dofs(e);
        g[ia] += element_integral(&grid, e, N_ORACLE, |_, pa, pb| {
            on_element(xm, e, pb).1.norm_squared() * pa
        });
        g[ib] += element_integral(&grid, e, N_ORACLE, |_, _, pb| {
            on_element(xm, e, pb).1.norm_squared() * pb
        });
    }
    let mut load = [DVector::zeros(n), DVector::zeros(n)];
    if let Some((exact, t)) = forcing {
        let m = dense_mass(&grid);
        let nodal: Vec<Point> = grid
            .nodes()
            .map(|rho| exact.forcing(rho, t, Formulation::P))
            .collect();
        load[0] = &m * DVector::from_iterator(n, nodal.iter().map(|p| p.x));
        load[1] = &m * DVector::from_iterator(n, nodal.iter().map(|p| p.y));
    }
    let old = [
        DVector::from_vec(xm.component(0)),
        DVector::from_vec(xm.component(1)),
    ];
    let mut rhs0 = &w * &old[0] / dt - g + &load[0];
    let rhs1 = &w * &old[1] / dt + &load[1];
    let mut a0 = a.clone();
    if let Some((first, last)) = grid.boundary_dofs() {
        for i in [first, last] {
            a0.row_mut(i).fill(0.0);
            a0[(i, i)] = 1.0;
            rhs0[i] = 0.0;
        }
    }
    let x0 = dense_solve(&a0, rhs0.as_slice());
    let x1 = dense_solve(&a, rhs1.as_slice());
    x0.into_iter()
        .zip(x1)
        .map(|(p, q)| Point::new(p, q))
        .collect()
}

fn max_dist(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn sphere0(grid: Grid) -> Curve {
    let mut x = interpolate(grid, |rho| ShrinkingSphere.position(rho, 0.0));
    let n = grid.dofs();
    x.points_mut()[0].x = 0.0;
    x.points_mut()[n - 1].x = 0.0;
    x
}

#[test]
fn manufactured_torus_first_step() {
    let exact = ManufacturedTorus;
    let grid = Grid::closed(32).unwrap();
    let dt = grid.h() * grid.h();
    let x0 = interpolate(grid, |rho| exact.position(rho, 0.0));
    let x1 = step_p(&x0, &StepConfigP::new(dt).with_forcing(&exact), dt).unwrap();
    let oracle = oracle_step_p(&x0, dt, Some((&exact, dt)));
    assert!(max_dist(x1.points(), &oracle) < 1e-10);
    assert!(nodal_error_norms(&x1, &exact, dt).l2 <= 1e-4);
    let oracle_curve = Curve::new(grid, oracle).unwrap();
    let (e_scheme, e_oracle) = (
        error_norms(&x1, &exact, dt).l2,
        error_norms(&oracle_curve, &exact, dt).l2,
    );
    assert!((e_scheme - e_oracle).abs() < 1e-10);
}

#[test]
fn sphere_first_step() {
    let grid = Grid::open(32).unwrap();
    let dt = grid.h() * grid.h();
    let x0 = sphere0(grid);
    let x1 = step_p(&x0, &StepConfigP::new(dt), dt).unwrap();
    let oracle = oracle_step_p(&x0, dt, None);
    assert!(max_dist(x1.points(), &oracle) < 1e-10);
    let r = ShrinkingSphere::radius(dt);
    let err: Vec<f64> = x1.points().iter().map(|p| (p.norm() - r).abs()).collect();
    assert!(err[1..32].iter().all(|e| *e <= 5e-4));
    // the poles lag behind by 6.1e-4; the oracle step shows the same lag
    let oracle_pole = (oracle[0].norm() - r).abs();
    assert!((err[0] - oracle_pole).abs() < 1e-10 && (err[32] - oracle_pole).abs() < 1e-10);
    assert_eq!(x1.points()[0].x, 0.0);
    assert_eq!(x1.points()[32].x, 0.0);
}

#[test]
fn step_satisfies_discrete_equations() {
    let xm = wobbly(Grid::closed(48).unwrap(), 2.0, 0.7, &[0.1, 0.04]);
    let dt = 1e-3;
    let cfg = StepConfigP::new(dt);
    let sys = assemble_step_p(&xm, &cfg, dt).unwrap();
    let xn = step_p(&xm, &cfg, dt).unwrap();
    for k in 0..2 {
        let ax = sys.component_matrix(k).mul_vec(&xn.component(k));
        let scale = sys.rhs[k].iter().map(|v| v.abs()).fold(0.0, f64::max);
        let res = ax
            .iter()
            .zip(&sys.rhs[k])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(res <= 1e-11 * scale);
    }
}

#[test]
fn step_matrix_is_spd_and_homogeneous_system_is_trivial() {
    for x in [
        wobbly(Grid::closed(20).unwrap(), 1.5, 0.6, &[0.2]),
        sphere0(Grid::open(20).unwrap()),
    ] {
        let sys = assemble_step_p(&x, &StepConfigP::new(1e-2), 1e-2).unwrap();
        for k in 0..2 {
            let m = sys.component_matrix(k);
            assert!(m.factor().unwrap().min_pivot().1 > 0.0);
            let d = dense(m);
            assert!(d.clone().cholesky().is_some());
            let zero = m.solve(&vec![0.0; m.len()]).unwrap();
            assert!(zero.iter().all(|v| *v == 0.0));
        }
    }
}

#[test]
fn inadmissible_curves_are_rejected() {
    let mut x = wobbly(Grid::closed(8).unwrap(), 2.0, 0.5, &[]);
    let p = x.points()[3];
    x.points_mut()[4] = p;
    let err = step_p(&x, &StepConfigP::new(1e-3), 1e-3).unwrap_err();
    assert!(matches!(err, Error::Inadmissible(_)), "{err}");
    let mut y = wobbly(Grid::closed(8).unwrap(), 0.2, 0.5, &[]);
    y.points_mut()[0].x = 0.7;
    assert!(matches!(
        step_p(&y, &StepConfigP::new(1e-3), 1e-3),
        Err(Error::Inadmissible(_))
    ));
    let x = wobbly(Grid::closed(8).unwrap(), 2.0, 0.5, &[]);
    assert!(matches!(
        step_p(&x, &StepConfigP::new(0.0), 0.0),
        Err(Error::InvalidParameter(_))
    ));
}

/// Forcing given by nodal values, so that `(pi^h f, eta)` is a prescribed load.
struct NodalForcing {
    topology: Topology,
    elements: usize,
    nodal: Vec<Point>,
}

impl NodalForcing {
    /// Forcing whose load vector equals `load`.
    fn for_load(grid: Grid, load: &[Point]) -> Self {
        let m = dense_mass(&grid);
        let lu = m.lu();
        let solve = |k: usize| {
            lu.solve(&DVector::from_iterator(
                load.len(),
                load.iter().map(|p| p[k]),
            ))
            .unwrap()
        };
        let (fx, fy) = (solve(0), solve(1));
        Self {
            topology: grid.topology(),
            elements: grid.elements(),
            nodal: (0..load.len()).map(|i| Point::new(fx[i], fy[i])).collect(),
        }
    }
}

impl ExactSolution for NodalForcing {
    fn topology(&self) -> Topology {
        self.topology
    }
    fn position(&self, _: f64, _: f64) -> Point {
        Point::zeros()
    }
    fn velocity(&self, _: f64, _: f64) -> Point {
        Point::zeros()
    }
    fn tangent(&self, _: f64, _: f64) -> Point {
        Point::zeros()
    }
    fn second_derivative(&self, _: f64, _: f64) -> Point {
        Point::zeros()
    }
    fn forcing(&self, rho: f64, _: f64, _: Formulation) -> Point {
        let i = (rho * self.elements as f64).round() as usize % self.nodal.len();
        self.nodal[i]
    }
}

#[test]
fn scheme_p_reproduces_fe_representable_motion() {
    // target: rigid translation X^{m+1} = X^m + dt v of a polygon
    let xm = wobbly(Grid::closed(30).unwrap(), 2.0, 0.6, &[0.1, -0.05]);
    let grid = *xm.grid();
    let dt = 1e-3;
    let v = Point::new(0.4, -1.3);
    let target = xm.translated(v * dt);
    let sys = assemble_step_p(&xm, &StepConfigP::new(dt), dt).unwrap();
    let load: Vec<Point> = (0..grid.dofs())
        .map(|i| {
            let ax = sys.matrix.mul_vec(&target.component(0))[i] - sys.rhs[0][i];
            let ay = sys.matrix.mul_vec(&target.component(1))[i] - sys.rhs[1][i];
            Point::new(ax, ay)
        })
        .collect();
    let forcing = NodalForcing::for_load(grid, &load);
    let xn = step_p(&xm, &StepConfigP::new(dt).with_forcing(&forcing), dt).unwrap();
    assert!(max_dist(xn.points(), target.points()) < 1e-12);
}

#[test]
fn scheme_q_constructed_root() {
    let xm = wobbly(Grid::closed(32).unwrap(), 2.0, 0.7, &[0.08]);
    let grid = *xm.grid();
    let dt = 1e-3;
    let cfg = StepConfigQ::closed(dt);
    let defect = residual_q(&xm, &xm, &cfg, dt);
    let forcing = NodalForcing::for_load(grid, &defect);
    let cfg = cfg.with_forcing(&forcing);
    let r = residual_q(&xm, &xm, &cfg, dt);
    let scale = defect.iter().map(|p| p.norm()).fold(0.0, f64::max);
    assert!(r.iter().all(|p| p.norm() <= 1e-13 * scale.max(1.0)));
    let (xn, report) = step_q(&xm, &cfg, dt).unwrap();
    assert_eq!(report.iterations, 0);
    assert_eq!(xn.points(), xm.points());
}

#[test]
fn scheme_q_linearized_defect() {
    // freeze the cubic term at X^m; the remaining system is linear with the
    // matrices (x1^m)^2 |X^m_rho|^2 / dt and (x1^m)^2, both assembled densely
    let xm = wobbly(Grid::closed(24).unwrap(), 1.8, 0.6, &[0.1]);
    let grid = *xm.grid();
    let n = grid.dofs();
    let h = grid.h();
    let dt = 1e-3;
    let mut mass = DMatrix::zeros(n, n);
    let mut stiff = DMatrix::zeros(n, n);
    let cubic = |x: &Curve| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for e in 0..grid.elements() {
            let (ia, ib) = grid.element_dofs(e);
            c[ia] += element_integral(&grid, e, N_ORACLE, |_, pa, pb| {
                let (p, d) = on_element(x, e, pb);
                p.x * d.norm_squared() * pa
            });
            c[ib] += element_integral(&grid, e, N_ORACLE, |_, _, pb| {
                let (p, d) = on_element(x, e, pb);
                p.x * d.norm_squared() * pb
            });
        }
        c
    };
    for e in 0..grid.elements() {
        let (ia, ib) = grid.element_dofs(e);
        let idx = [ia, ib];
        let dphi = [-1.0 / h, 1.0 / h];
        for i in 0..2 {
            for j in 0..2 {
                mass[(idx[i], idx[j])] += element_integral(&grid, e, N_ORACLE, |_, pa, pb| {
                    let (p, d) = on_element(&xm, e, pb);
                    let phi = [pa, pb];
                    p.x * p.x * d.norm_squared() * phi[i] * phi[j]
                }) / dt;
                stiff[(idx[i], idx[j])] += element_integral(&grid, e, N_ORACLE, |_, _, xi| {
                    let p = on_element(&xm, e, xi).0;
                    p.x * p.x * dphi[i] * dphi[j]
                });
            }
        }
    }
    let a = &mass + &stiff;
    let frozen = cubic(&xm);
    let old = [
        DVector::from_vec(xm.component(0)),
        DVector::from_vec(xm.component(1)),
    ];
    let rhs0 = &mass * &old[0] - DVector::from_vec(frozen.clone());
    let rhs1 = &mass * &old[1];
    let x0 = dense_solve(&a, rhs0.as_slice());
    let x1 = dense_solve(&a, rhs1.as_slice());
    let xlin = Curve::new(
        grid,
        x0.into_iter()
            .zip(x1)
            .map(|(p, q)| Point::new(p, q))
            .collect(),
    )
    .unwrap();
    let r = residual_q(&xm, &xlin, &StepConfigQ::closed(dt), dt);
    let expected: Vec<f64> = cubic(&xlin)
        .iter()
        .zip(&frozen)
        .map(|(a, b)| a - b)
        .collect();
    let scale = frozen.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for i in 0..n {
        assert!((r[i].x - expected[i]).abs() < 1e-11 * scale);
        assert!(r[i].y.abs() < 1e-11 * scale);
    }
}

#[test]
fn scheme_q_converged_residual_and_quadratic_rate() {
    let exact = ManufacturedTorus;
    let grid = Grid::closed(64).unwrap();
    let dt = grid.h() * grid.h();
    let cfg = StepConfigQ::closed(dt).with_forcing(&exact);
    let mut x = interpolate(grid, |rho| exact.position(rho, 0.0));
    for m in 1..=20 {
        let t = m as f64 * dt;
        let (xn, report) = step_q(&x, &cfg, t).unwrap();
        assert!(report.converged);
        assert!(report.residual_norm <= report.tolerance);
        let r = residual_q(&x, &xn, &cfg, t);
        let norm = r.iter().map(|p| p.norm_squared()).sum::<f64>().sqrt();
        assert!(norm <= report.tolerance);
        // the first correction already lands on the rounding floor
        assert!(report.iterations <= 3);
        x = xn;
    }
}

#[test]
fn scheme_q_newton_is_quadratic() {
    let mut checked = 0;
    for (amp, dt) in [(0.1, 1e-2), (0.15, 2e-2), (0.05, 5e-2)] {
        let xm = wobbly(Grid::closed(64).unwrap(), 2.0, 0.7, &[amp, -amp / 2.0]);
        let (_, report) = step_q(&xm, &StepConfigQ::closed(dt), dt).unwrap();
        let r = &report.residual_history;
        // orders from consecutive triples that stay well above the tolerance
        for w in r.windows(3) {
            if w[2] > 1e3 * report.tolerance {
                let order = (w[2] / w[1]).ln() / (w[1] / w[0]).ln();
                assert!(order >= 1.8, "order {order} from {w:?}");
                checked += 1;
            }
        }
        if let Some(order) = report.observed_order() {
            if r[r.len() - 1] > 1e3 * report.tolerance {
                assert!(order >= 1.8);
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn scheme_q_energy_decreases() {
    let grid = Grid::closed(128).unwrap();
    let dt = 1e-4;
    let mut x = interpolate(grid, |rho| {
        let (s, c) = (2.0 * PI * rho).sin_cos();
        Point::new(1.0 + 0.5 * c, 0.5 * s)
    });
    let cfg = StepConfigQ::closed(dt);
    let (mut before, mut total) = (energy_q(&x), 0.0);
    let e0 = before;
    for m in 1..=200 {
        let (xn, _) = step_q(&x, &cfg, m as f64 * dt).unwrap();
        let after = energy_q(&xn);
        let diss = dissipation_q(&x, &xn, dt);
        assert!(after + diss <= before + 1e-12 * before);
        total += diss;
        before = after;
        x = xn;
    }
    assert!(before + total <= e0 * (1.0 + 1e-12));
}

#[test]
fn open_adapted_keeps_endpoints_on_axis() {
    let grid = Grid::open(64).unwrap();
    let mut x = sphere0(grid);
    let cfg = StepConfigQ::new(1e-4, BoundaryVariant::OpenAdapted);
    for m in 1..=50 {
        x = step_q(&x, &cfg, m as f64 * 1e-4).unwrap().0;
        assert_eq!(x.points()[0].x, 0.0);
        assert_eq!(x.points()[64].x, 0.0);
    }
    let closed = wobbly(Grid::closed(16).unwrap(), 2.0, 0.5, &[]);
    assert!(matches!(
        step_q(&closed, &cfg, 1e-4),
        Err(Error::UnsupportedTopology(_))
    ));
    assert!(matches!(
        step_q(&x, &StepConfigQ::closed(1e-4), 1e-4),
        Err(Error::UnsupportedTopology(_))
    ));
}
