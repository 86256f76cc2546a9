//! Plain-text file formats.
//!
//! Curve snapshots are CSV files with header `rho,x1,x2`, one row per node;
//! closed curves repeat the first node at `rho = 1`. Time series are CSV files
//! with the columns of [`TIME_SERIES_HEADER`]; optional columns are left
//! empty. Surfaces of revolution are written as Wavefront OBJ triangle
//! meshes. Floating point values are written with 17 significant digits.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Curve, Grid, Point, Topology};

pub const CURVE_HEADER: &str = "rho,x1,x2";

pub const TIME_SERIES_HEADER: &str = "step,t,area,volume,huiskenF,ratio,min_x1,max_x1,\
min_elem_len,max_elem_len,energy_q,goodness_G";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_curve_csv<W: Write>(mut out: W, curve: &Curve) -> Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    let grid = curve.grid();
    for (j, p) in curve.points().iter().enumerate() {
        writeln!(out, "{},{},{}", num(grid.node(j)), num(p.x), num(p.y))?;
    }
    if grid.is_closed() {
        let p = curve.points()[0];
        writeln!(out, "{},{},{}", num(1.0), num(p.x), num(p.y))?;
    }
    Ok(())
}

pub fn save_curve(path: impl AsRef<Path>, curve: &Curve) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_curve_csv(&mut out, curve)?;
    out.flush()?;
    Ok(())
}

fn parse_row(line: &str, lineno: usize, width: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != width {
        return Err(Error::Parse(format!(
            "line {lineno}: expected {width} fields, found {}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {lineno}: cannot parse `{f}` as a number")))
        })
        .collect()
}

/// Reads a curve snapshot. The topology is inferred: a final row that repeats
/// the first node marks a closed curve.
pub fn read_curve_csv<R: BufRead>(input: R) -> Result<Curve> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse("empty curve file".into())),
    };
    if header.trim() != CURVE_HEADER {
        return Err(Error::Parse(format!(
            "expected header `{CURVE_HEADER}`, found `{}`",
            header.trim()
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_row(&line, i + 1, 3)?);
    }
    if rows.len() < 4 {
        return Err(Error::Parse(format!(
            "a curve needs at least 4 rows, found {}",
            rows.len()
        )));
    }
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let closed = first[1] == last[1] && first[2] == last[2];
    let (topology, points): (Topology, Vec<Point>) = if closed {
        let pts = rows[..rows.len() - 1]
            .iter()
            .map(|r| Point::new(r[1], r[2]))
            .collect();
        (Topology::Closed, pts)
    } else {
        (
            Topology::Open,
            rows.iter().map(|r| Point::new(r[1], r[2])).collect(),
        )
    };
    let elements = match topology {
        Topology::Closed => points.len(),
        Topology::Open => points.len() - 1,
    };
    Curve::new(Grid::new(elements, topology)?, points)
}

pub fn load_curve(path: impl AsRef<Path>) -> Result<Curve> {
    read_curve_csv(BufReader::new(File::open(path)?))
}

/// One row of the evolution time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRow {
    pub step: usize,
    pub t: f64,
    pub area: f64,
    pub volume: f64,
    pub huisken_f: f64,
    pub ratio: f64,
    pub min_x1: f64,
    pub max_x1: f64,
    pub min_elem_len: f64,
    pub max_elem_len: f64,
    pub energy_q: Option<f64>,
    pub goodness: Option<f64>,
}

impl TimeSeriesRow {
    fn to_csv(&self) -> String {
        [
            self.step.to_string(),
            num(self.t),
            num(self.area),
            num(self.volume),
            num(self.huisken_f),
            num(self.ratio),
            num(self.min_x1),
            num(self.max_x1),
            num(self.min_elem_len),
            num(self.max_elem_len),
            opt(self.energy_q),
            opt(self.goodness),
        ]
        .join(",")
    }
}

pub fn write_time_series<W: Write>(mut out: W, rows: &[TimeSeriesRow]) -> Result<()> {
    writeln!(out, "{TIME_SERIES_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    Ok(())
}

pub fn save_time_series(path: impl AsRef<Path>, rows: &[TimeSeriesRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_time_series(&mut out, rows)?;
    out.flush()?;
    Ok(())
}

pub fn read_time_series<R: BufRead>(input: R) -> Result<Vec<TimeSeriesRow>> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse("empty time series file".into())),
    };
    if header.trim() != TIME_SERIES_HEADER {
        return Err(Error::Parse(format!(
            "unexpected time series header `{}`",
            header.trim()
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 12 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected 12 fields, found {}",
                fields.len()
            )));
        }
        let f = |k: usize| -> Result<f64> {
            fields[k]
                .parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad number `{}`", fields[k])))
        };
        let o = |k: usize| -> Result<Option<f64>> {
            if fields[k].is_empty() {
                Ok(None)
            } else {
                f(k).map(Some)
            }
        };
        let step = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad step `{}`", fields[0])))?;
        rows.push(TimeSeriesRow {
            step,
            t: f(1)?,
            area: f(2)?,
            volume: f(3)?,
            huisken_f: f(4)?,
            ratio: f(5)?,
            min_x1: f(6)?,
            max_x1: f(7)?,
            min_elem_len: f(8)?,
            max_elem_len: f(9)?,
            energy_q: o(10)?,
            goodness: o(11)?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("time series has no rows".into()));
    }
    Ok(rows)
}

pub fn load_time_series(path: impl AsRef<Path>) -> Result<Vec<TimeSeriesRow>> {
    read_time_series(BufReader::new(File::open(path)?))
}

/// Triangulated surface of revolution of a generating curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Rotates the curve about the `x2` axis, sampled at `n_phi` angles.
    /// Vertices are `(x1 cos phi, x2, x1 sin phi)`; the endpoints of an open
    /// curve become single pole vertices.
    pub fn revolve(curve: &Curve, n_phi: usize) -> Result<Self> {
        if n_phi < 3 {
            return Err(Error::invalid(format!(
                "n_phi must be at least 3, got {n_phi}"
            )));
        }
        let angles: Vec<(f64, f64)> = (0..n_phi)
            .map(|k| (2.0 * PI * k as f64 / n_phi as f64).sin_cos())
            .collect();
        let ring = |p: Point| angles.iter().map(move |(s, c)| [p.x * c, p.y, p.x * s]);
        let pts = curve.points();
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let next = |k: usize| (k + 1) % n_phi;
        if curve.grid().is_closed() {
            let n = pts.len();
            for p in pts {
                vertices.extend(ring(*p));
            }
            for j in 0..n {
                let (a, b) = (j * n_phi, ((j + 1) % n) * n_phi);
                for k in 0..n_phi {
                    triangles.push([a + k, b + k, b + next(k)]);
                    triangles.push([a + k, b + next(k), a + next(k)]);
                }
            }
        } else {
            let n = pts.len();
            let last = n - 1;
            vertices.push([0.0, pts[0].y, 0.0]);
            for p in &pts[1..last] {
                vertices.extend(ring(*p));
            }
            let ring_start = |j: usize| 1 + (j - 1) * n_phi;
            for k in 0..n_phi {
                triangles.push([0, ring_start(1) + next(k), ring_start(1) + k]);
            }
            for j in 1..last - 1 {
                let (a, b) = (ring_start(j), ring_start(j + 1));
                for k in 0..n_phi {
                    triangles.push([a + k, b + k, b + next(k)]);
                    triangles.push([a + k, b + next(k), a + next(k)]);
                }
            }
            let pole = vertices.len();
            vertices.push([0.0, pts[last].y, 0.0]);
            let a = ring_start(last - 1);
            for k in 0..n_phi {
                triangles.push([a + k, pole, a + next(k)]);
            }
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    pub fn write_obj<W: Write>(&self, mut out: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", num(v[0]), num(v[1]), num(v[2]))?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }
}
