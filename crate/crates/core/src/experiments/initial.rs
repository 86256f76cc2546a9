use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{ExactSolution, ManufacturedTorus, ShrinkingSphere};
use crate::grid::{interpolate, Curve, Grid, Point, Topology};
use crate::io::load_curve;

use InitialSpec as Spec;

/// Generating curve at time zero.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// Circle of radius `r` about `(1, 0)`; a torus with major radius one.
    Torus {
        r: f64,
    },
    ManufacturedTorus,
    /// Unit half-circle from the north to the south pole.
    Sphere,
    /// Flat disc of size `9 x 1 x 9`, a superellipse profile with exponent 8.
    Disc,
    /// Sphere-like profile stretched along the axis with a neck at the equator.
    Dumbbell,
    /// Closed curve winding twice around `(2, 0)`.
    Spiral,
    File(PathBuf),
}

impl InitialSpec {
    /// Topology of the generated curve; `None` for files, where it is read
    /// from the data.
    pub fn topology(&self) -> Option<Topology> {
        match self {
            Self::Torus { .. } | Self::ManufacturedTorus | Self::Spiral => Some(Topology::Closed),
            Self::Sphere | Self::Disc | Self::Dumbbell => Some(Topology::Open),
            Self::File(_) => None,
        }
    }
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Torus { r } => write!(f, "torus:r={r}"),
            Self::ManufacturedTorus => f.write_str("manufactured-torus"),
            Self::Sphere => f.write_str("sphere"),
            Self::Disc => f.write_str("disc"),
            Self::Dumbbell => f.write_str("dumbbell"),
            Self::Spiral => f.write_str("spiral"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for InitialSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("torus:") {
            let value = rest
                .strip_prefix("r=")
                .ok_or_else(|| Error::invalid(format!("expected torus:r=VALUE, got `{s}`")))?;
            let r: f64 = value
                .parse()
                .map_err(|_| Error::invalid(format!("cannot parse tube radius `{value}`")))?;
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid(format!(
                    "tube radius must lie in (0, 1), got {r}"
                )));
            }
            return Ok(Self::Torus { r });
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(path)));
        }
        match s {
            "manufactured-torus" => Ok(Self::ManufacturedTorus),
            "sphere" => Ok(Self::Sphere),
            "disc" => Ok(Self::Disc),
            "dumbbell" => Ok(Self::Dumbbell),
            "spiral" => Ok(Self::Spiral),
            _ => Err(Error::invalid(format!("unknown initial curve `{s}`"))),
        }
    }
}

/// Puts the endpoints of an open curve exactly on the axis.
fn pin_endpoints(mut c: Curve) -> Curve {
    let n = c.len();
    c.points_mut()[0].x = 0.0;
    c.points_mut()[n - 1].x = 0.0;
    c
}

/// Nodal interpolant of the generator on `grid`.
pub fn initial_curve(spec: &InitialSpec, grid: Grid) -> Result<Curve> {
    if let Some(topology) = spec.topology() {
        if topology != grid.topology() {
            return Err(Error::invalid(format!(
                "initial curve `{spec}` needs a {topology} grid, got {}",
                grid.topology()
            )));
        }
    }
    let curve = match spec {
        Spec::Torus { r } => interpolate(grid, |rho| {
            let (s, c) = (2.0 * PI * rho).sin_cos();
            Point::new(1.0 + r * c, r * s)
        }),
        Spec::ManufacturedTorus => interpolate(grid, |rho| ManufacturedTorus.position(rho, 0.0)),
        Spec::Sphere => pin_endpoints(interpolate(grid, |rho| ShrinkingSphere.position(rho, 0.0))),
        Spec::Disc => {
            let q = 2.0 / 8.0;
            pin_endpoints(interpolate(grid, |rho| {
                let (s, c) = (PI * rho).sin_cos();
                Point::new(4.5 * s.abs().powf(q), 0.5 * c.signum() * c.abs().powf(q))
            }))
        }
        Spec::Dumbbell => pin_endpoints(interpolate(grid, |rho| {
            let (s, c) = (PI * rho).sin_cos();
            Point::new(s * (1.0 - 0.7 * (-6.0 * c * c).exp()), 1.5 * c)
        })),
        Spec::Spiral => interpolate(grid, |rho| {
            let radius = 0.3 + 0.2 * (2.0 * PI * rho).cos();
            let (s, c) = (4.0 * PI * rho).sin_cos();
            Point::new(2.0 + radius * c, radius * s)
        }),
        Spec::File(path) => {
            let c = load_curve(path)?;
            if c.grid() != &grid {
                return Err(Error::invalid(format!(
                    "{} holds a curve with {} {} elements, expected {} {}",
                    path.display(),
                    c.grid().elements(),
                    c.grid().topology(),
                    grid.elements(),
                    grid.topology()
                )));
            }
            c
        }
    };
    curve.check_admissible()?;
    Ok(curve)
}
