//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use axiflow::linalg::{BlockTridiagMatrix, TridiagMatrix};
use axiflow::quadrature::GaussRule;
use axiflow::{Curve, Grid, Point};
use nalgebra::{DMatrix, DVector};

pub const N_ORACLE: usize = 50;

pub fn dense(a: &TridiagMatrix) -> DMatrix<f64> {
    let n = a.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = a.diag[i];
        if i > 0 {
            m[(i, i - 1)] = a.lower[i];
        }
        if i + 1 < n {
            m[(i, i + 1)] = a.upper[i];
        }
    }
    if a.cyclic {
        m[(0, n - 1)] += a.lower[0];
        m[(n - 1, 0)] += a.upper[n - 1];
    }
    m
}

pub fn dense_block(a: &BlockTridiagMatrix) -> DMatrix<f64> {
    let n = a.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let mut put = |i: usize, j: usize, b: &nalgebra::Matrix2<f64>| {
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * i + r, 2 * j + c)] += b[(r, c)];
            }
        }
    };
    for i in 0..n {
        put(i, i, &a.diag[i]);
        if i > 0 {
            put(i, i - 1, &a.lower[i]);
        }
        if i + 1 < n {
            put(i, i + 1, &a.upper[i]);
        }
    }
    if a.cyclic {
        put(0, n - 1, &a.lower[0]);
        put(n - 1, 0, &a.upper[n - 1]);
    }
    m
}

pub fn dense_solve(m: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let x = m
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .expect("oracle matrix is singular");
    x.iter().copied().collect()
}

pub fn flatten(v: &[Point]) -> Vec<f64> {
    v.iter().flat_map(|p| [p.x, p.y]).collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Integral over element `e` of `f(rho, phi_a, phi_b)` with `n` Gauss points,
/// where `phi_a`, `phi_b` are the two local hat functions.
pub fn element_integral(
    grid: &Grid,
    e: usize,
    n: usize,
    mut f: impl FnMut(f64, f64, f64) -> f64,
) -> f64 {
    let rule = GaussRule::new(n);
    let h = grid.h();
    let left = e as f64 * h;
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(&xi, &w)| w * h * f(left + xi * h, 1.0 - xi, xi))
        .sum()
}

/// Value and parametric derivative of the piecewise linear curve on element `e`
/// at local coordinate `xi`.
pub fn on_element(curve: &Curve, e: usize, xi: f64) -> (Point, Point) {
    let (a, b) = curve.element(e);
    let h = curve.grid().h();
    (a * (1.0 - xi) + b * xi, (b - a) / h)
}

/// Closed curve with smoothly perturbed radius around `(center, 0)`.
pub fn wobbly(grid: Grid, center: f64, radius: f64, amp: &[f64]) -> Curve {
    axiflow::grid::interpolate(grid, |rho| {
        let th = 2.0 * std::f64::consts::PI * rho;
        let r = radius
            * (1.0
                + amp
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k as f64 + 2.0) * th + k as f64).sin())
                    .sum::<f64>());
        Point::new(center + r * th.cos(), r * th.sin())
    })
}

/// Weighted mass matrix `(x1 |X_rho|^2 phi_i, phi_j)` and stiffness matrix
/// `(x1 phi_i', phi_j')` of a curve, by brute-force quadrature.
pub fn dense_weighted_matrices(x: &Curve) -> (DMatrix<f64>, DMatrix<f64>) {
    let grid = *x.grid();
    let n = grid.dofs();
    let h = grid.h();
    let mut w = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for e in 0..grid.elements() {
        let (a, b) = grid.element_dofs(e);
        let idx = [a, b];
        let dphi = [-1.0 / h, 1.0 / h];
        for i in 0..2 {
            for j in 0..2 {
                w[(idx[i], idx[j])] += element_integral(&grid, e, N_ORACLE, |_, pa, pb| {
                    let xi = pb;
                    let (p, d) = on_element(x, e, xi);
                    let phi = [pa, pb];
                    p.x * d.norm_squared() * phi[i] * phi[j]
                });
                s[(idx[i], idx[j])] += element_integral(&grid, e, N_ORACLE, |_, _, xi| {
                    let (p, _) = on_element(x, e, xi);
                    p.x * dphi[i] * dphi[j]
                });
            }
        }
    }
    (w, s)
}

/// Standard P1 mass matrix.
pub fn dense_mass(grid: &Grid) -> DMatrix<f64> {
    let n = grid.dofs();
    let mut m = DMatrix::zeros(n, n);
    for e in 0..grid.elements() {
        let (a, b) = grid.element_dofs(e);
        for (i, j) in [(a, a), (a, b), (b, a), (b, b)] {
            let same = i == j;
            m[(i, j)] += element_integral(grid, e, N_ORACLE, |_, pa, pb| {
                if same {
                    if i == a {
                        pa * pa
                    } else {
                        pb * pb
                    }
                } else {
                    pa * pb
                }
            });
        }
    }
    m
}
