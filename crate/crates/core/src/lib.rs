//! Axisymmetric mean curvature flow of surfaces of revolution.
//!
//! The surface is represented by its generating curve in the `(x1, x2)`
//! half-plane (`x1` is the distance from the axis of rotation, `x2` the
//! position along it). The curve is discretized by continuous piecewise
//! linear finite elements on a uniform partition of the parameter interval,
//! either periodic (genus-1 surfaces) or open with both endpoints on the
//! axis (genus-0 surfaces).
//!
//! Two time discretizations are provided: the linear semi-implicit scheme
//! in [`scheme_p`], which solves two decoupled tridiagonal systems per step,
//! and the nonlinear scheme in [`scheme_q`], which is solved by Newton's
//! method and satisfies a discrete energy inequality. [`selfshrinker`]
//! computes discrete self-similarly shrinking profiles (the Angenent torus)
//! and a scale-invariant self-similarity diagnostic, and [`experiments`]
//! contains the evolution driver, convergence harness and critical-radius
//! bisection.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod newton;
pub mod observables;
pub mod quadrature;
pub mod scheme_p;
pub mod scheme_q;
pub mod selfshrinker;

pub use error::{Error, Result};
pub use grid::{Curve, ElementField, Grid, Point, Topology};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::exact::{ExactSolution, Formulation, ManufacturedTorus, ShrinkingSphere};
    pub use crate::grid::{
        interpolate, norm, Curve, ElementField, Grid, NormKind, Point, Topology,
    };
    pub use crate::observables::{classify_singularity, measure, mesh_ratio, Measures, Thresholds};
    pub use crate::scheme_p::{step_p, StepConfigP};
    pub use crate::scheme_q::{energy_q, step_q, BoundaryVariant, StepConfigQ};
    pub use crate::selfshrinker::{goodness, solve_angenent};
}
