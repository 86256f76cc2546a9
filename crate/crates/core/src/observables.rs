//! Geometric quantities of a generating curve and singularity detection.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{element_data, Curve, Point};
use crate::quadrature::gauss10;

/// Quantities of the surface of revolution generated by a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    /// Huisken's functional `1/2 int (Y.e1) exp(-|Y|^2/4) |Y_rho|`.
    pub f: f64,
    /// Enclosed volume `pi int (Y.e1)^2 (Y_rho^perp . e1)` with the clockwise
    /// rotation `(v1, v2)^perp = (v2, -v1)`; positive for counterclockwise
    /// closed generating curves.
    pub v: f64,
    /// Surface area `2 pi int (Y.e1) |Y_rho|`.
    pub a: f64,
    pub min_x1: f64,
    pub max_x1: f64,
    pub max_x2: f64,
}

pub fn measure(y: &Curve) -> Measures {
    let rule = gauss10();
    let (mut f, mut v, mut a) = (0.0, 0.0, 0.0);
    for e in 0..y.grid().elements() {
        let (p, q) = y.element(e);
        let len = (q - p).norm();
        let gauss = rule.integrate(|xi| {
            let z = p * (1.0 - xi) + q * xi;
            z.x * (-z.norm_squared() / 4.0).exp()
        });
        f += 0.5 * len * gauss;
        v += PI * (p.x * p.x + p.x * q.x + q.x * q.x) / 3.0 * (q.y - p.y);
        a += PI * (p.x + q.x) * len;
    }
    let pts = y.points();
    Measures {
        f,
        v,
        a,
        min_x1: pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
        max_x1: pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
        max_x2: pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Smallest and largest element chord lengths.
pub fn element_length_range(x: &Curve) -> (f64, f64) {
    element_data(x)
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| {
            (lo.min(d.length), hi.max(d.length))
        })
}

/// Ratio of the longest to the shortest element chord.
pub fn mesh_ratio(x: &Curve) -> Result<f64> {
    let (lo, hi) = element_length_range(x);
    if !(lo > 0.0) {
        return Err(Error::DegenerateMesh(lo));
    }
    Ok(hi / lo)
}

/// Largest side of the axis-aligned bounding box of the nodes; a lower bound
/// for the diameter within a factor `sqrt(2)`.
fn bounding_box(points: &[Point]) -> (f64, f64) {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let d = hi - lo;
    (d.x.max(d.y), d.norm())
}

/// Maximal distance between two nodes.
pub fn diameter(points: &[Point]) -> f64 {
    let mut best = 0.0_f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max((q - p).norm_squared());
        }
    }
    best.sqrt()
}

/// Whether the node set has diameter below `eps`, answered from the bounding
/// box whenever possible.
pub fn diameter_below(points: &[Point], eps: f64) -> bool {
    let (side, diagonal) = bounding_box(points);
    if side >= eps {
        false
    } else if diagonal < eps {
        true
    } else {
        diameter(points) < eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Distance to the axis below which a node counts as touching it.
    pub eps_axis: f64,
    /// Diameter below which a curve counts as shrunk away.
    pub eps_diam: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            eps_axis: 1e-3,
            eps_diam: 1e-2,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_axis > 0.0 && self.eps_diam > 0.0) {
            return Err(Error::invalid(format!(
                "thresholds must be positive, got eps_axis = {}, eps_diam = {}",
                self.eps_axis, self.eps_diam
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    None,
    ShrinksToCircle,
    HoleCloses,
    ShrinksToPoint,
    PinchOff,
}

impl SingularityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::ShrinksToCircle => "shrinks-to-circle",
            Self::HoleCloses => "hole-closes",
            Self::ShrinksToPoint => "shrinks-to-point",
            Self::PinchOff => "pinch-off",
        }
    }
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityVerdict {
    pub kind: SingularityKind,
    pub time: f64,
    /// Smallest nodal distance to the axis (over interior nodes for open
    /// curves).
    pub min_x1: f64,
    /// Largest side of the nodal bounding box.
    pub extent: f64,
    pub thresholds: Thresholds,
}

impl SingularityVerdict {
    pub fn is_singular(&self) -> bool {
        self.kind != SingularityKind::None
    }
}

/// Classifies the curve at time `time`.
///
/// Closed curves: the hole closes when a node comes within `eps_axis` of the
/// axis, and the curve shrinks to a circle when its diameter drops below
/// `eps_diam`. Open curves: pinch-off when an interior node comes within
/// `eps_axis` of the axis while being separated from both endpoints by nodes
/// farther away than `eps_axis` (nodes next to the poles approach the axis
/// whenever the curve is small), and shrinking to a point when the diameter
/// drops below `eps_diam`.
pub fn classify_singularity(x: &Curve, thresholds: &Thresholds, time: f64) -> SingularityVerdict {
    let pts = x.points();
    let (extent, _) = bounding_box(pts);
    let small = diameter_below(pts, thresholds.eps_diam);
    let (kind, min_x1) = if x.grid().is_closed() {
        let min_x1 = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let kind = if min_x1 < thresholds.eps_axis {
            SingularityKind::HoleCloses
        } else if small {
            SingularityKind::ShrinksToCircle
        } else {
            SingularityKind::None
        };
        (kind, min_x1)
    } else {
        let n = pts.len();
        let interior = &pts[1..n - 1];
        let min_x1 = interior.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let kind = if small {
            SingularityKind::ShrinksToPoint
        } else if pinched(pts, thresholds.eps_axis) {
            SingularityKind::PinchOff
        } else {
            SingularityKind::None
        };
        (kind, min_x1)
    };
    SingularityVerdict {
        kind,
        time,
        min_x1,
        extent,
        thresholds: *thresholds,
    }
}

fn pinched(pts: &[Point], eps: f64) -> bool {
    let n = pts.len();
    let mut left_max = vec![0.0_f64; n];
    for j in 1..n {
        left_max[j] = left_max[j - 1].max(pts[j - 1].x);
    }
    let mut right_max = 0.0_f64;
    for j in (1..n - 1).rev() {
        right_max = right_max.max(pts[j + 1].x);
        if pts[j].x < eps && left_max[j] >= eps && right_max >= eps {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{interpolate, Grid};

    fn circle(j: usize, r: f64, c: Point) -> Curve {
        interpolate(Grid::closed(j).unwrap(), |rho| {
            let (s, co) = (2.0 * PI * rho).sin_cos();
            c + Point::new(r * co, r * s)
        })
    }

    #[test]
    fn uniform_polygon_has_unit_ratio() {
        let c = circle(17, 0.3, Point::new(1.0, 0.0));
        assert!((mesh_ratio(&c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_chord_lengths() {
        let g = Grid::closed(4).unwrap();
        let c = Curve::new(
            g,
            vec![
                Point::new(1.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 2.0),
                Point::new(1.0, 2.0),
            ],
        )
        .unwrap();
        assert!((mesh_ratio(&c).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn collapsed_element_is_degenerate() {
        let g = Grid::closed(3).unwrap();
        let p = Point::new(1.0, 0.0);
        let c = Curve::new(g, vec![p, p, Point::new(1.0, 1.0)]).unwrap();
        assert!(matches!(mesh_ratio(&c), Err(Error::DegenerateMesh(_))));
    }

    #[test]
    fn tiny_circle_shrinks() {
        let c = circle(32, 0.5e-6, Point::new(0.5, 0.0));
        let th = Thresholds {
            eps_axis: 1e-3,
            eps_diam: 1e-3,
        };
        let v = classify_singularity(&c, &th, 0.3);
        assert_eq!(v.kind, SingularityKind::ShrinksToCircle);
        assert_eq!(v.time, 0.3);
    }

    #[test]
    fn node_on_axis_closes_hole() {
        let mut c = circle(32, 0.5, Point::new(0.5 + 1e-9, 0.0));
        c.points_mut()[16].x = 1e-9;
        let v = classify_singularity(&c, &Thresholds::default(), 0.0);
        assert_eq!(v.kind, SingularityKind::HoleCloses);
    }

    #[test]
    fn regular_torus_is_not_singular() {
        let c = circle(64, 0.5, Point::new(1.0, 0.0));
        assert!(!classify_singularity(&c, &Thresholds::default(), 0.0).is_singular());
    }

    #[test]
    fn open_curve_verdicts() {
        let g = Grid::open(64).unwrap();
        let neck = |depth: f64| {
            let mut c = interpolate(g, |rho| {
                let (s, co) = (PI * rho).sin_cos();
                Point::new(s * (1.0 - depth * (-40.0 * co * co).exp()), co)
            });
            let n = c.len();
            c.points_mut()[0].x = 0.0;
            c.points_mut()[n - 1].x = 0.0;
            c
        };
        let th = Thresholds::default();
        assert_eq!(
            classify_singularity(&neck(0.5), &th, 0.0).kind,
            SingularityKind::None
        );
        assert_eq!(
            classify_singularity(&neck(1.0 - 1e-6), &th, 0.0).kind,
            SingularityKind::PinchOff
        );
        let small = neck(0.0).scaled(1e-3);
        assert_eq!(
            classify_singularity(&small, &th, 0.0).kind,
            SingularityKind::ShrinksToPoint
        );
    }

    #[test]
    fn small_sphere_near_poles_is_not_a_pinch() {
        let g = Grid::open(256).unwrap();
        let mut c = interpolate(g, |rho| {
            let (s, co) = (PI * rho).sin_cos();
            Point::new(0.05 * s, 0.05 * co)
        });
        let n = c.len();
        c.points_mut()[0].x = 0.0;
        c.points_mut()[n - 1].x = 0.0;
        assert!(c.points()[1].x < 1e-3);
        assert_eq!(
            classify_singularity(&c, &Thresholds::default(), 0.0).kind,
            SingularityKind::None
        );
    }

    #[test]
    fn pruned_diameter_agrees_with_scan() {
        let c = circle(40, 0.7, Point::new(2.0, 1.0));
        let d = diameter(c.points());
        assert!((d - 1.4).abs() < 1e-12);
        assert!(diameter_below(c.points(), 1.5));
        assert!(!diameter_below(c.points(), 1.39));
        assert!(!diameter_below(c.points(), 1.0));
    }

    #[test]
    fn measures_of_unit_square_ring() {
        // square [1,2]x[0,1] traversed counterclockwise
        let g = Grid::closed(4).unwrap();
        let c = Curve::new(
            g,
            vec![
                Point::new(1.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 1.0),
                Point::new(1.0, 1.0),
            ],
        )
        .unwrap();
        let m = measure(&c);
        // solid ring between radii 1 and 2 of height 1
        assert!((m.v - 3.0 * PI).abs() < 1e-13);
        // top and bottom annuli plus two cylinders
        assert!((m.a - (2.0 * 3.0 * PI + 2.0 * PI * 2.0 + 2.0 * PI)).abs() < 1e-12);
        assert_eq!((m.min_x1, m.max_x1, m.max_x2), (1.0, 2.0, 1.0));
    }
}
