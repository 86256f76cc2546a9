use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exact::{ExactSolution, ManufacturedTorus, ShrinkingSphere};
use crate::grid::{Curve, Grid, Topology};
use crate::io::{load_curve, save_curve, save_time_series, SurfaceMesh, TimeSeriesRow};
use crate::newton::NewtonReport;
use crate::observables::{
    classify_singularity, element_length_range, measure, SingularityKind, SingularityVerdict,
    Thresholds,
};
use crate::scheme_p::{step_p, StepConfigP};
use crate::scheme_q::{dissipation_q, energy_q, step_q, BoundaryVariant, StepConfigQ};
use crate::selfshrinker::goodness;

use super::initial::{initial_curve, InitialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Linear semi-implicit scheme, closed or open curves.
    P,
    /// Nonlinear energy-decreasing scheme, closed curves.
    Q,
    /// Nonlinear scheme with `x1 = 0` imposed at the endpoints of open curves.
    QOpenAdapted,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p" => Ok(Self::P),
            "q" => Ok(Self::Q),
            "q-open" => Ok(Self::QOpenAdapted),
            other => Err(Error::invalid(format!(
                "unknown scheme `{other}` (expected p, q or q-open)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::P => "p",
            Self::Q => "q",
            Self::QOpenAdapted => "q-open",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub j: usize,
    pub dt: f64,
    /// Final time; must be an integer multiple of `dt`.
    pub t_final: f64,
    pub scheme: Scheme,
    pub initial: InitialSpec,
    /// Adds the right-hand side for which the initial family is an exact
    /// solution. Only for the manufactured torus and the sphere.
    pub forcing: bool,
    /// Snapshot every this many steps (plus the first and last state).
    pub snapshot_every: Option<usize>,
    pub thresholds: Thresholds,
    /// Records the goodness of fit to a self-shrinker in the time series.
    pub track_goodness: bool,
    /// Records observables after every step. Classification runs regardless.
    pub record_series: bool,
    /// Stops at the first detected singularity.
    pub stop_at_singularity: bool,
    /// Files are written here when set.
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(j: usize, dt: f64, t_final: f64, scheme: Scheme, initial: InitialSpec) -> Self {
        Self {
            j,
            dt,
            t_final,
            scheme,
            initial,
            forcing: false,
            snapshot_every: None,
            thresholds: Thresholds::default(),
            track_goodness: false,
            record_series: true,
            stop_at_singularity: true,
            out_dir: None,
        }
    }

    pub fn topology(&self) -> Topology {
        match self.scheme {
            Scheme::Q => Topology::Closed,
            Scheme::QOpenAdapted => Topology::Open,
            Scheme::P => self.initial.topology().unwrap_or(Topology::Closed),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.j, self.topology())
    }

    /// Number of time steps `M = T / dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid(format!(
                "final time must be positive, got {}",
                self.t_final
            )));
        }
        let m = (self.t_final / self.dt).round();
        if m < 1.0 || (m * self.dt - self.t_final).abs() > 1e-9 * self.t_final {
            return Err(Error::invalid(format!(
                "final time {} is not an integer multiple of the time step {}",
                self.t_final, self.dt
            )));
        }
        Ok(m as usize)
    }

    fn exact(&self) -> Result<Option<&'static dyn ExactSolution>> {
        if !self.forcing {
            return Ok(None);
        }
        match self.initial {
            InitialSpec::ManufacturedTorus => Ok(Some(&ManufacturedTorus)),
            InitialSpec::Sphere => Ok(Some(&ShrinkingSphere)),
            _ => Err(Error::invalid(format!(
                "forcing is only defined for the manufactured torus and the sphere, not `{}`",
                self.initial
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        self.steps()?;
        self.thresholds.validate()?;
        if self.snapshot_every == Some(0) {
            return Err(Error::invalid("snapshot cadence must be positive"));
        }
        if let (Scheme::Q | Scheme::QOpenAdapted, Some(t)) = (self.scheme, self.initial.topology())
        {
            if t != self.topology() {
                return Err(Error::invalid(format!(
                    "scheme {} cannot evolve the {t} curve `{}`",
                    self.scheme, self.initial
                )));
            }
        }
        self.exact()?;
        Ok(())
    }

    /// Advisory messages about the parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let h = 1.0 / self.j as f64;
        if self.dt > h.sqrt() {
            out.push(format!(
                "time step {} exceeds sqrt(h) = {:.3e}; the error bounds do not cover this regime",
                self.dt,
                h.sqrt()
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub curve: Curve,
}

/// Per-step check of `E(X^{m+1}) + dissipation <= E(X^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StabilityLog {
    pub steps_checked: usize,
    pub violations: usize,
    /// Largest `(E^{m+1} + D^{m+1} - E^m) / E^m` seen.
    pub worst_relative_excess: f64,
}

/// Relative slack allowed in the per-step energy inequality.
pub const STABILITY_TOL: f64 = 1e-12;

impl StabilityLog {
    fn record(&mut self, before: f64, after: f64, dissipated: f64) {
        let excess = (after + dissipated - before) / before;
        self.steps_checked += 1;
        if self.steps_checked == 1 || excess > self.worst_relative_excess {
            self.worst_relative_excess = excess;
        }
        if excess > STABILITY_TOL {
            self.violations += 1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// One row per state, starting with the initial curve.
    pub series: Vec<TimeSeriesRow>,
    pub snapshots: Vec<Snapshot>,
    pub final_curve: Curve,
    pub final_time: f64,
    pub steps: usize,
    pub verdict: SingularityVerdict,
    /// One report per step of the nonlinear scheme.
    pub newton: Vec<NewtonReport>,
    /// Energy inequality checks of unforced nonlinear runs.
    pub stability: Option<StabilityLog>,
    pub warnings: Vec<String>,
    pub wall_clock: Duration,
}

impl EvolutionResult {
    /// Writes `timeseries.csv`, `final.csv` and `snapshot_NNNNNNNN.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        save_time_series(dir.join("timeseries.csv"), &self.series)?;
        save_curve(dir.join("final.csv"), &self.final_curve)?;
        for s in &self.snapshots {
            save_curve(dir.join(format!("snapshot_{:08}.csv", s.step)), &s.curve)?;
        }
        Ok(())
    }
}

fn row(step: usize, t: f64, x: &Curve, scheme: Scheme, track_goodness: bool) -> TimeSeriesRow {
    let m = measure(x);
    let (lo, hi) = element_length_range(x);
    TimeSeriesRow {
        step,
        t,
        area: m.a,
        volume: m.v,
        huisken_f: m.f,
        ratio: hi / lo,
        min_x1: m.min_x1,
        max_x1: m.max_x1,
        min_elem_len: lo,
        max_elem_len: hi,
        energy_q: (scheme != Scheme::P).then(|| energy_q(x)),
        goodness: if track_goodness && x.grid().is_closed() {
            goodness(x).ok().map(|g| g.g)
        } else {
            None
        },
    }
}

pub fn run_evolution(cfg: &RunConfig) -> Result<EvolutionResult> {
    cfg.validate()?;
    let x0 = match &cfg.initial {
        InitialSpec::File(path) => load_curve(path)?,
        spec => initial_curve(spec, cfg.grid()?)?,
    };
    run_evolution_from(cfg, x0)
}

/// Evolves a given initial curve; `cfg.initial` only selects the forcing.
pub fn run_evolution_from(cfg: &RunConfig, x0: Curve) -> Result<EvolutionResult> {
    run_evolution_observed(cfg, x0, |_, _, _| {})
}

/// Like [`run_evolution_from`], calling `observe(step, t, curve)` on every
/// state including the initial one.
pub fn run_evolution_observed(
    cfg: &RunConfig,
    x0: Curve,
    mut observe: impl FnMut(usize, f64, &Curve),
) -> Result<EvolutionResult> {
    cfg.validate()?;
    if x0.grid().elements() != cfg.j {
        return Err(Error::invalid(format!(
            "initial curve has {} elements, configuration asks for {}",
            x0.grid().elements(),
            cfg.j
        )));
    }
    let topology = x0.grid().topology();
    let variant = match (cfg.scheme, topology) {
        (Scheme::P, _) => None,
        (Scheme::Q, Topology::Closed) => Some(BoundaryVariant::ClosedStandard),
        (Scheme::QOpenAdapted, Topology::Open) => Some(BoundaryVariant::OpenAdapted),
        (scheme, t) => {
            return Err(Error::UnsupportedTopology(format!(
                "scheme {scheme} cannot evolve a {t} curve"
            )))
        }
    };
    x0.check_admissible()?;
    let started = Instant::now();
    let exact = cfg.exact()?;
    let steps = cfg.steps()?;
    let dt = cfg.dt;

    let mut cfg_p = StepConfigP::new(dt);
    let mut cfg_q = StepConfigQ::new(dt, variant.unwrap_or(BoundaryVariant::ClosedStandard));
    if let Some(e) = exact {
        cfg_p = cfg_p.with_forcing(e);
        cfg_q = cfg_q.with_forcing(e);
    }
    let check_stability = variant == Some(BoundaryVariant::ClosedStandard) && exact.is_none();

    let mut result = EvolutionResult {
        series: Vec::new(),
        snapshots: Vec::new(),
        final_curve: x0.clone(),
        final_time: 0.0,
        steps: 0,
        verdict: classify_singularity(&x0, &cfg.thresholds, 0.0),
        newton: Vec::new(),
        stability: check_stability.then(StabilityLog::default),
        warnings: cfg.warnings(),
        wall_clock: Duration::ZERO,
    };
    if cfg.record_series {
        result
            .series
            .push(row(0, 0.0, &x0, cfg.scheme, cfg.track_goodness));
    }
    if cfg.snapshot_every.is_some() {
        result.snapshots.push(Snapshot {
            step: 0,
            t: 0.0,
            curve: x0.clone(),
        });
    }
    observe(0, 0.0, &x0);

    let mut x = x0;
    let mut energy = check_stability.then(|| energy_q(&x));
    for m in 1..=steps {
        let t = m as f64 * dt;
        let next = match variant {
            None => step_p(&x, &cfg_p, t),
            Some(_) => step_q(&x, &cfg_q, t).map(|(c, report)| {
                result.newton.push(report);
                c
            }),
        }
        .map_err(|e| Error::StepFailed {
            step: m,
            time: t,
            source: Box::new(e),
        })?;
        if let (Some(log), Some(before)) = (result.stability.as_mut(), energy) {
            let after = energy_q(&next);
            log.record(before, after, dissipation_q(&x, &next, dt));
            energy = Some(after);
        }
        x = next;
        result.steps = m;
        result.final_time = t;
        observe(m, t, &x);
        if cfg.record_series {
            result
                .series
                .push(row(m, t, &x, cfg.scheme, cfg.track_goodness));
        }
        result.verdict = classify_singularity(&x, &cfg.thresholds, t);
        let stop = cfg.stop_at_singularity && result.verdict.kind != SingularityKind::None;
        if let Some(every) = cfg.snapshot_every {
            if m % every == 0 || m == steps || stop {
                result.snapshots.push(Snapshot {
                    step: m,
                    t,
                    curve: x.clone(),
                });
            }
        }
        if stop {
            break;
        }
    }
    result.final_curve = x;
    result.wall_clock = started.elapsed();
    if let Some(dir) = &cfg.out_dir {
        result.write_to(dir)?;
    }
    Ok(result)
}

/// Writes the surface of revolution of `x` as a Wavefront OBJ file.
pub fn export_surface(x: &Curve, n_phi: usize, path: impl AsRef<Path>) -> Result<SurfaceMesh> {
    let mesh = SurfaceMesh::revolve(x, n_phi)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    mesh.write_obj(&mut out)?;
    std::io::Write::flush(&mut out)?;
    Ok(mesh)
}
