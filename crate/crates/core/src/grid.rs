//! Uniform grids, piecewise linear curves and the discrete function-space
//! operations on them (nodal interpolation, elementwise means, norms).

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector2;

use crate::error::{Error, Inadmissible, Result};
use crate::exact::ExactSolution;
use crate::quadrature::{gauss3, gauss5, GaussRule};

/// A point `(x1, x2)` of the meridian half-plane.
pub type Point = Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Periodic parameter domain; the curve generates a genus-1 surface.
    Closed,
    /// Parameter interval `[0, 1]` with both endpoints on the axis.
    Open,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Closed => f.write_str("closed"),
            Self::Open => f.write_str("open"),
        }
    }
}

/// Equipartition of `[0, 1]` into `J >= 3` elements.
///
/// A closed grid identifies node `J` with node `0` and has `J` degrees of
/// freedom; an open grid has `J + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    elements: usize,
    topology: Topology,
}

impl Grid {
    pub fn new(elements: usize, topology: Topology) -> Result<Self> {
        if elements < 3 {
            return Err(Error::invalid(format!(
                "a grid needs at least 3 elements, got {elements}"
            )));
        }
        Ok(Self { elements, topology })
    }

    pub fn closed(elements: usize) -> Result<Self> {
        Self::new(elements, Topology::Closed)
    }

    pub fn open(elements: usize) -> Result<Self> {
        Self::new(elements, Topology::Open)
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_closed(&self) -> bool {
        self.topology == Topology::Closed
    }

    pub fn h(&self) -> f64 {
        1.0 / self.elements as f64
    }

    pub fn dofs(&self) -> usize {
        match self.topology {
            Topology::Closed => self.elements,
            Topology::Open => self.elements + 1,
        }
    }

    /// Parameter value `q_j = j h` of degree of freedom `j`.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.elements as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dofs()).map(|j| self.node(j))
    }

    /// Degrees of freedom at the left and right end of element `e`
    /// (`I_e = [q_e, q_{e+1}]`), with wrap-around on closed grids.
    #[inline]
    pub fn element_dofs(&self, e: usize) -> (usize, usize) {
        match self.topology {
            Topology::Closed => (e, if e + 1 == self.elements { 0 } else { e + 1 }),
            Topology::Open => (e, e + 1),
        }
    }

    /// Boundary degrees of freedom of an open grid.
    pub fn boundary_dofs(&self) -> Option<(usize, usize)> {
        match self.topology {
            Topology::Closed => None,
            Topology::Open => Some((0, self.elements)),
        }
    }
}

/// Piecewise linear generating curve, stored by nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    grid: Grid,
    points: Vec<Point>,
}

impl Curve {
    pub fn new(grid: Grid, points: Vec<Point>) -> Result<Self> {
        if points.len() != grid.dofs() {
            return Err(Error::invalid(format!(
                "{} nodal values given for a grid with {} degrees of freedom",
                points.len(),
                grid.dofs()
            )));
        }
        Ok(Self { grid, points })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [Point] {
        &mut self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nodal values of coordinate `k` (0 for `x1`, 1 for `x2`).
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[k]).collect()
    }

    /// Endpoints of element `e`.
    #[inline]
    pub fn element(&self, e: usize) -> (Point, Point) {
        let (a, b) = self.grid.element_dofs(e);
        (self.points[a], self.points[b])
    }

    /// Value of the piecewise linear function at parameter `rho`.
    pub fn eval(&self, rho: f64) -> Point {
        let j = self.grid.elements();
        let mut s = rho * j as f64;
        if self.grid.is_closed() {
            s = s.rem_euclid(j as f64);
        } else {
            s = s.clamp(0.0, j as f64);
        }
        let e = (s.floor() as usize).min(j - 1);
        let xi = s - e as f64;
        let (a, b) = self.element(e);
        a * (1.0 - xi) + b * xi
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|p| p * factor)
    }

    pub fn translated(&self, by: Point) -> Self {
        self.map(|p| p + by)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        Self {
            grid: self.grid,
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }

    /// Same curve traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let n = self.points.len();
        let points = match self.grid.topology() {
            Topology::Open => self.points.iter().rev().copied().collect(),
            Topology::Closed => (0..n).map(|j| self.points[(n - j) % n]).collect(),
        };
        Self {
            grid: self.grid,
            points,
        }
    }

    /// Closed curves only: relabels node `j` as node `j - shift`.
    pub fn cyclic_shift(&self, shift: usize) -> Self {
        let n = self.points.len();
        Self {
            grid: self.grid,
            points: (0..n).map(|j| self.points[(j + shift) % n]).collect(),
        }
    }

    /// Checks the hypotheses under which one step of the schemes is uniquely
    /// solvable: `x1 > 0` away from the axis endpoints, endpoints of open
    /// curves on the axis, and positive element lengths.
    pub fn check_admissible(&self) -> Result<()> {
        for (node, p) in self.points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Inadmissible::NonFinite { node }.into());
            }
        }
        let boundary = self.grid.boundary_dofs();
        for (node, p) in self.points.iter().enumerate() {
            let on_boundary = matches!(boundary, Some((a, b)) if node == a || node == b);
            if on_boundary {
                if p.x != 0.0 {
                    return Err(Inadmissible::EndpointOffAxis { node, x1: p.x }.into());
                }
            } else if p.x <= 0.0 {
                return Err(Inadmissible::NonPositiveRadius { node, x1: p.x }.into());
            }
        }
        for e in 0..self.grid.elements() {
            let (a, b) = self.element(e);
            if a == b {
                return Err(Inadmissible::ZeroLengthElement { element: e }.into());
            }
        }
        Ok(())
    }
}

/// Piecewise constant data, one value per element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

/// Per-element geometric data of a piecewise linear curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementData {
    /// Chord length `|X(q_{j+1}) - X(q_j)|`.
    pub length: f64,
    /// Constant parametric derivative `X_rho`.
    pub slope: Point,
    /// `|X_rho|^2`.
    pub speed_sq: f64,
}

pub fn element_data(curve: &Curve) -> Vec<ElementData> {
    let grid = curve.grid();
    let inv_h = grid.elements() as f64;
    (0..grid.elements())
        .map(|e| {
            let (a, b) = curve.element(e);
            let slope = (b - a) * inv_h;
            let speed_sq = slope.norm_squared();
            ElementData {
                length: (b - a).norm(),
                slope,
                speed_sq,
            }
        })
        .collect()
}

/// Nodal interpolant `pi^h f`.
pub fn interpolate(grid: Grid, f: impl Fn(f64) -> Point) -> Curve {
    let points = grid.nodes().map(f).collect();
    Curve { grid, points }
}

/// Elementwise mean `P^h f`, evaluated with the 3-point Gauss rule.
pub fn project_elementwise(grid: Grid, f: impl Fn(f64) -> f64) -> ElementField {
    let h = grid.h();
    let rule = gauss3();
    let values = (0..grid.elements())
        .map(|e| {
            let left = e as f64 * h;
            rule.integrate(|xi| f(left + xi * h))
        })
        .collect();
    ElementField { grid, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1Semi,
    H1,
    Linf,
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Self::L2),
            "h1semi" | "h1-semi" => Ok(Self::H1Semi),
            "h1" => Ok(Self::H1),
            "linf" => Ok(Self::Linf),
            other => Err(Error::invalid(format!("unknown norm kind '{other}'"))),
        }
    }
}

/// Exact norm of the piecewise linear vector function with the given nodal
/// values.
pub fn norm(grid: &Grid, values: &[Point], kind: NormKind) -> f64 {
    assert_eq!(
        values.len(),
        grid.dofs(),
        "nodal vector does not match grid"
    );
    let h = grid.h();
    let l2_sq = || -> f64 {
        (0..grid.elements())
            .map(|e| {
                let (a, b) = grid.element_dofs(e);
                let (u, v) = (values[a], values[b]);
                h * (u.norm_squared() + u.dot(&v) + v.norm_squared()) / 3.0
            })
            .sum()
    };
    let semi_sq = || -> f64 {
        (0..grid.elements())
            .map(|e| {
                let (a, b) = grid.element_dofs(e);
                (values[b] - values[a]).norm_squared() / h
            })
            .sum()
    };
    match kind {
        NormKind::L2 => l2_sq().sqrt(),
        NormKind::H1Semi => semi_sq().sqrt(),
        NormKind::H1 => (l2_sq() + semi_sq()).sqrt(),
        NormKind::Linf => values.iter().map(|p| p.norm()).fold(0.0, f64::max),
    }
}

/// Scalar counterpart of [`norm`].
pub fn scalar_norm(grid: &Grid, values: &[f64], kind: NormKind) -> f64 {
    let lifted: Vec<Point> = values.iter().map(|&v| Point::new(v, 0.0)).collect();
    norm(grid, &lifted, kind)
}

/// `L2` and `H1`-seminorm of `x(., t) - X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
}

/// Distance between the discrete curve and an exact solution at time `t`,
/// integrated with a 5-point Gauss rule per element.
pub fn error_norms(curve: &Curve, exact: &dyn ExactSolution, t: f64) -> ErrorNorms {
    error_norms_with(curve, exact, t, gauss5())
}

pub fn error_norms_with(
    curve: &Curve,
    exact: &dyn ExactSolution,
    t: f64,
    rule: &GaussRule,
) -> ErrorNorms {
    let grid = curve.grid();
    let h = grid.h();
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for e in 0..grid.elements() {
        let (a, b) = curve.element(e);
        let slope = (b - a) / h;
        let left = e as f64 * h;
        for (xi, w) in rule.iter() {
            let rho = left + xi * h;
            let d = exact.position(rho, t) - (a * (1.0 - xi) + b * xi);
            let ds = exact.tangent(rho, t) - slope;
            l2 += w * h * d.norm_squared();
            semi += w * h * ds.norm_squared();
        }
    }
    ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
    }
}

/// Norms of `pi^h x(., t) - X`, i.e. the error measured only through nodal
/// values.
pub fn nodal_error_norms(curve: &Curve, exact: &dyn ExactSolution, t: f64) -> ErrorNorms {
    let grid = curve.grid();
    let diff: Vec<Point> = grid
        .nodes()
        .zip(curve.points())
        .map(|(rho, p)| exact.position(rho, t) - p)
        .collect();
    ErrorNorms {
        l2: norm(grid, &diff, NormKind::L2),
        h1_semi: norm(grid, &diff, NormKind::H1Semi),
    }
}
