//! Closed-form solutions used for convergence tests, and the forcing terms
//! that make an arbitrary smooth curve family an exact solution.

use std::f64::consts::PI;

use crate::grid::{Point, Topology};

/// Which weak form a forcing term is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// `x1 |x_rho|^2 x_t - (x1 x_rho)_rho + |x_rho|^2 e1 = f`.
    P,
    /// `x1^2 |x_rho|^2 x_t - (x1^2 x_rho)_rho + x1 |x_rho|^2 e1 = f`.
    Q,
}

/// A smooth family of parameterizations `x(rho, t)` with its derivatives.
pub trait ExactSolution: Send + Sync {
    fn topology(&self) -> Topology;

    fn position(&self, rho: f64, t: f64) -> Point;

    /// `x_t`.
    fn velocity(&self, rho: f64, t: f64) -> Point;

    /// `x_rho`.
    fn tangent(&self, rho: f64, t: f64) -> Point;

    /// `x_rho_rho`.
    fn second_derivative(&self, rho: f64, t: f64) -> Point;

    /// Right-hand side `f` for which `x` solves the given strong form.
    fn forcing(&self, rho: f64, t: f64, form: Formulation) -> Point {
        let x = self.position(rho, t);
        let xt = self.velocity(rho, t);
        let xr = self.tangent(rho, t);
        let xrr = self.second_derivative(rho, t);
        let r = x.x;
        let r_rho = xr.x;
        let speed_sq = xr.norm_squared();
        let e1 = Point::new(1.0, 0.0);
        match form {
            Formulation::P => {
                let flux_rho = xr * r_rho + xrr * r;
                xt * (r * speed_sq) - flux_rho + e1 * speed_sq
            }
            Formulation::Q => {
                let flux_rho = xr * (2.0 * r * r_rho) + xrr * (r * r);
                xt * (r * r * speed_sq) - flux_rho + e1 * (r * speed_sq)
            }
        }
    }
}

/// `x(rho, t) = (g(t) + cos 2 pi rho, sin 2 pi rho)` with `g(t) = 2 + sin pi t`:
/// a torus whose tube keeps radius one while its centre oscillates.
#[derive(Debug, Clone, Copy, Default)]
pub struct ManufacturedTorus;

impl ManufacturedTorus {
    pub const FINAL_TIME: f64 = 1.0;
}

impl ExactSolution for ManufacturedTorus {
    fn topology(&self) -> Topology {
        Topology::Closed
    }

    fn position(&self, rho: f64, t: f64) -> Point {
        let (s, c) = (2.0 * PI * rho).sin_cos();
        Point::new(2.0 + (PI * t).sin() + c, s)
    }

    fn velocity(&self, _rho: f64, t: f64) -> Point {
        Point::new(PI * (PI * t).cos(), 0.0)
    }

    fn tangent(&self, rho: f64, _t: f64) -> Point {
        let (s, c) = (2.0 * PI * rho).sin_cos();
        Point::new(-s, c) * (2.0 * PI)
    }

    fn second_derivative(&self, rho: f64, _t: f64) -> Point {
        let (s, c) = (2.0 * PI * rho).sin_cos();
        Point::new(c, s) * (-4.0 * PI * PI)
    }
}

/// The shrinking unit sphere, `x(rho, t) = (1 - 4t)^{1/2} (sin pi rho, cos pi rho)`.
/// It solves the unforced equations exactly and becomes extinct at `t = 1/4`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShrinkingSphere;

impl ShrinkingSphere {
    pub const FINAL_TIME: f64 = 0.125;

    pub fn radius(t: f64) -> f64 {
        (1.0 - 4.0 * t).sqrt()
    }
}

impl ExactSolution for ShrinkingSphere {
    fn topology(&self) -> Topology {
        Topology::Open
    }

    fn position(&self, rho: f64, t: f64) -> Point {
        let (s, c) = (PI * rho).sin_cos();
        Point::new(s, c) * Self::radius(t)
    }

    fn velocity(&self, rho: f64, t: f64) -> Point {
        let (s, c) = (PI * rho).sin_cos();
        Point::new(s, c) * (-2.0 / Self::radius(t))
    }

    fn tangent(&self, rho: f64, t: f64) -> Point {
        let (s, c) = (PI * rho).sin_cos();
        Point::new(c, -s) * (PI * Self::radius(t))
    }

    fn second_derivative(&self, rho: f64, t: f64) -> Point {
        let (s, c) = (PI * rho).sin_cos();
        Point::new(s, c) * (-PI * PI * Self::radius(t))
    }
}
