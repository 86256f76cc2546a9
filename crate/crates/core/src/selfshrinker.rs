//! Discrete self-similarly shrinking curves.
//!
//! A curve `y` shrinks self-similarly with extinction time `T0`,
//! `y(t) = (1 - t/T0)^{1/2} y(0)`, exactly when `y(0)` solves
//!
//! ```text
//! 1/(2 T0) (y . e1) |y_rho|^2 y + ((y . e1) y_rho)_rho - |y_rho|^2 e1 = 0.
//! ```
//!
//! Its finite element counterpart is `F_alpha(Y) = 0` with `F_alpha(Y)` the
//! `L2`-Riesz representative in the P1 space of
//!
//! ```text
//! eta -> 1/(2 alpha) ((Y.e1) Y, eta |Y_rho|^2) - ((Y.e1) Y_rho, eta_rho) - (eta.e1, |Y_rho|^2).
//! ```
//!
//! Tested against the nodal basis the functional splits as `a / (2 alpha) + b`
//! with `a` homogeneous of degree four and `b` of degree two, so the norm of
//! `F_alpha` is a quadratic in `1/alpha` and the best shrinking rate for a
//! given curve is found in closed form.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::grid::{Curve, Grid, Point};
use crate::linalg::{BandedLu, BlockTridiagMatrix, TridiagMatrix};
use crate::newton::{self, NewtonProblem, NewtonReport, NewtonSettings, Residual};
use crate::quadrature::gauss3;

/// Coefficients of the self-similarity functional tested with each nodal
/// basis function: `residual(alpha) = a / (2 alpha) + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfsimResidualSplit {
    pub a: Vec<Point>,
    pub b: Vec<Point>,
}

impl SelfsimResidualSplit {
    pub fn residual(&self, alpha: f64) -> Vec<Point> {
        let beta = 0.5 / alpha;
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a * beta + b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoodnessResult {
    /// `min_alpha |F_alpha(Z)|_0 / (1, |Z_rho|^2)`.
    pub g: f64,
    /// Minimizing shrinking rate; `None` when the infimum is only approached
    /// as `alpha -> infinity`.
    pub alpha_star: Option<f64>,
    pub split: SelfsimResidualSplit,
}

fn require_closed(curve: &Curve) -> Result<()> {
    if !curve.grid().is_closed() {
        return Err(Error::UnsupportedTopology(
            "self-similarity functionals are defined for closed curves".into(),
        ));
    }
    Ok(())
}

/// Element-by-element evaluation of `a` and `b` together with the absolute
/// size of the summed terms.
fn split_with_magnitude(grid: &Grid, y: &[Point]) -> (Vec<Point>, Vec<Point>, Vec<Point>) {
    let h = grid.h();
    let rule = gauss3();
    let n = y.len();
    let mut a = vec![Point::zeros(); n];
    let mut b = vec![Point::zeros(); n];
    let mut mag = vec![Point::zeros(); n];
    for e in 0..grid.elements() {
        let (ia, ib) = grid.element_dofs(e);
        let delta = y[ib] - y[ia];
        let w = delta.norm_squared() / (h * h);
        for (xi, wq) in rule.iter() {
            let phi = [1.0 - xi, xi];
            let z = y[ia] * phi[0] + y[ib] * phi[1];
            let c = wq * h * w * z.x;
            for (node, p) in [(ia, phi[0]), (ib, phi[1])] {
                a[node] += z * (c * p);
            }
        }
        let flux = delta * ((y[ia].x + y[ib].x) / (2.0 * h));
        let tension = Point::new(0.5 * h * w, 0.0);
        b[ia] += flux - tension;
        b[ib] += -flux - tension;
        let flux_mag = (y[ia].abs() + y[ib].abs()) * ((y[ia].x + y[ib].x).abs() / (2.0 * h));
        mag[ia] += flux_mag + tension;
        mag[ib] += flux_mag + tension;
    }
    (a, b, mag)
}

pub fn selfsim_split(z: &Curve) -> Result<SelfsimResidualSplit> {
    require_closed(z)?;
    let (a, b, _) = split_with_magnitude(z.grid(), z.points());
    Ok(SelfsimResidualSplit { a, b })
}

/// Consistent P1 mass matrix of a closed grid, `h/6 [1 4 1]`.
fn mass_matrix(grid: &Grid) -> TridiagMatrix {
    let n = grid.dofs();
    let h = grid.h();
    TridiagMatrix {
        lower: vec![h / 6.0; n],
        diag: vec![4.0 * h / 6.0; n],
        upper: vec![h / 6.0; n],
        cyclic: grid.is_closed(),
    }
}

/// Inner product `<u, v> = sum_k u_k^T M^{-1} v_k`.
struct RieszInner {
    lu: BandedLu<f64>,
}

impl RieszInner {
    fn new(grid: &Grid) -> Result<Self> {
        Ok(Self {
            lu: mass_matrix(grid).factor()?,
        })
    }

    fn represent(&self, r: &[Point]) -> [Vec<f64>; 2] {
        let x: Vec<f64> = r.iter().map(|p| p.x).collect();
        let y: Vec<f64> = r.iter().map(|p| p.y).collect();
        [self.lu.solve(&x), self.lu.solve(&y)]
    }

    fn inner(&self, u: &[Point], v: &[Point]) -> f64 {
        let [vx, vy] = self.represent(v);
        u.iter()
            .zip(vx.iter().zip(&vy))
            .map(|(p, (a, b))| p.x * a + p.y * b)
            .sum()
    }
}

/// `|F_alpha(Z)|_0`, the `L2` norm of the Riesz representative.
pub fn fnorm_selfsim(z: &Curve, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let split = selfsim_split(z)?;
    riesz_norm(z.grid(), &split.residual(alpha))
}

/// `sqrt(r^T M^{-1} r)` for a vector of tested values `r`.
pub fn riesz_norm(grid: &Grid, r: &[Point]) -> Result<f64> {
    let inner = RieszInner::new(grid)?;
    Ok(inner.inner(r, r).max(0.0).sqrt())
}

/// Scale-invariant goodness of a self-similarity fit.
pub fn goodness(z: &Curve) -> Result<GoodnessResult> {
    let split = selfsim_split(z)?;
    let grid = z.grid();
    let inner = RieszInner::new(grid)?;
    let h = grid.h();
    let length_energy: f64 = (0..grid.elements())
        .map(|e| {
            let (a, b) = z.element(e);
            (b - a).norm_squared() / h
        })
        .sum();
    let aa = inner.inner(&split.a, &split.a);
    let ab = inner.inner(&split.a, &split.b);
    let beta_star = if aa > 0.0 { -ab / aa } else { 0.0 };
    let (residual, alpha_star) = if beta_star > 0.0 {
        let r: Vec<Point> = split
            .a
            .iter()
            .zip(&split.b)
            .map(|(a, b)| a * beta_star + b)
            .collect();
        (r, Some(0.5 / beta_star))
    } else {
        (split.b.clone(), None)
    };
    let g = inner.inner(&residual, &residual).max(0.0).sqrt() / length_energy;
    Ok(GoodnessResult {
        g,
        alpha_star,
        split,
    })
}

/// Newton system `a(Y) / (2 T0) + b(Y) = 0`.
struct ShrinkerProblem {
    grid: Grid,
    beta: f64,
}

impl NewtonProblem for ShrinkerProblem {
    fn residual(&self, y: &[Point]) -> Residual {
        let (a, b, mut mag) = split_with_magnitude(&self.grid, y);
        let values = a
            .iter()
            .zip(&b)
            .zip(mag.iter_mut())
            .map(|((a, b), m)| {
                *m += a.abs() * self.beta;
                a * self.beta + b
            })
            .collect();
        Residual {
            values,
            magnitude: newton::l2(&mag),
        }
    }

    fn jacobian(&self, y: &[Point]) -> BlockTridiagMatrix {
        let grid = &self.grid;
        let h = grid.h();
        let rule = gauss3();
        let mut jac = BlockTridiagMatrix::zeros(y.len(), true);
        let sign = [-1.0, 1.0];
        for e in 0..grid.elements() {
            let (ia, ib) = grid.element_dofs(e);
            let nodes = [ia, ib];
            let delta = y[ib] - y[ia];
            let w = delta.norm_squared() / (h * h);
            let radius_sum = y[ia].x + y[ib].x;
            let mut local = [[Matrix2::<f64>::zeros(); 2]; 2];
            for (xi, wq) in rule.iter() {
                let phi = [1.0 - xi, xi];
                let z = y[ia] * phi[0] + y[ib] * phi[1];
                for i in 0..2 {
                    for j in 0..2 {
                        let m = &mut local[i][j];
                        let c = self.beta * wq * h;
                        let dw = [
                            2.0 * delta.x * sign[j] / (h * h),
                            2.0 * delta.y * sign[j] / (h * h),
                        ];
                        for k in 0..2 {
                            for l in 0..2 {
                                let mut v = dw[l] * z.x * z[k] * phi[i];
                                if l == 0 {
                                    v += w * phi[j] * z[k] * phi[i];
                                }
                                if k == l {
                                    v += w * z.x * phi[j] * phi[i];
                                }
                                m[(k, l)] += c * v;
                            }
                        }
                    }
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    let m = &mut local[i][j];
                    for k in 0..2 {
                        // derivative of (x1_a + x1_b) / (2h) s_i delta_k
                        m[(k, 0)] -= sign[i] * delta[k] / (2.0 * h);
                        m[(k, k)] -= radius_sum / (2.0 * h) * sign[i] * sign[j];
                    }
                    for l in 0..2 {
                        m[(0, l)] -= delta[l] * sign[j] / h;
                    }
                    jac.add(nodes[i], nodes[j], *m);
                }
            }
        }
        jac
    }
}

/// Residual and exact Jacobian of `a(Y) / (2 T0) + b(Y)`, exposed for
/// derivative checks.
pub fn shrinker_residual(y: &Curve, t0: f64) -> Result<(Vec<Point>, BlockTridiagMatrix)> {
    require_closed(y)?;
    let p = ShrinkerProblem {
        grid: *y.grid(),
        beta: 0.5 / t0,
    };
    Ok((p.residual(y.points()).values, p.jacobian(y.points())))
}

pub const ANGENENT_MAX_ITER: usize = 50;

/// Cap on the nodal displacement of one Newton step. From a circle the
/// first corrections are dominated by a nearly neutral translation along
/// `e1` and would otherwise carry the curve across the axis.
pub const ANGENENT_MAX_STEP: f64 = 0.5;

/// Solves the discrete self-shrinker equation with extinction time `t0` by
/// damped Newton iteration from `init`.
pub fn solve_angenent(grid: Grid, t0: f64, init: &Curve) -> Result<(Curve, NewtonReport)> {
    if !(t0 > 0.0) {
        return Err(Error::invalid(format!(
            "extinction time must be positive, got {t0}"
        )));
    }
    if !grid.is_closed() {
        return Err(Error::UnsupportedTopology(
            "self-shrinkers need a closed grid".into(),
        ));
    }
    if init.grid() != &grid {
        return Err(Error::invalid("initial curve lives on a different grid"));
    }
    init.check_admissible()?;
    let problem = ShrinkerProblem {
        grid,
        beta: 0.5 / t0,
    };
    let settings = NewtonSettings {
        rel_tol: 1e-12,
        max_iter: ANGENENT_MAX_ITER,
        max_halvings: 10,
        max_step: Some(ANGENENT_MAX_STEP),
    };
    let (points, report) = newton::solve(&problem, init.points().to_vec(), &settings)?;
    Ok((Curve::new(grid, points)?, report))
}

/// Circle of the given radius centred at `(center, 0)`.
pub fn circle(grid: Grid, radius: f64, center: f64) -> Curve {
    crate::grid::interpolate(grid, |rho| {
        let (s, c) = (2.0 * std::f64::consts::PI * rho).sin_cos();
        Point::new(center + radius * c, radius * s)
    })
}

/// Nodal injection of a closed curve onto the grid with twice as many
/// elements.
pub fn refine(curve: &Curve) -> Result<Curve> {
    let fine = Grid::new(2 * curve.grid().elements(), curve.grid().topology())?;
    Ok(crate::grid::interpolate(fine, |rho| curve.eval(rho)))
}

/// Like [`solve_angenent`] from a circle; if the iteration fails on `grid`,
/// solves on successively coarser grids (down to 64 elements) and refines the
/// coarse solution as the initial guess.
pub fn solve_angenent_with_continuation(
    grid: Grid,
    t0: f64,
    radius: f64,
    center: f64,
) -> Result<(Curve, NewtonReport)> {
    let init = circle(grid, radius, center);
    match solve_angenent(grid, t0, &init) {
        Ok(done) => Ok(done),
        Err(err) if grid.elements() >= 128 && grid.elements() % 2 == 0 => {
            let coarse = Grid::new(grid.elements() / 2, grid.topology())?;
            let (y, _) =
                solve_angenent_with_continuation(coarse, t0, radius, center).map_err(|_| err)?;
            solve_angenent(grid, t0, &refine(&y)?)
        }
        Err(err) => Err(err),
    }
}
