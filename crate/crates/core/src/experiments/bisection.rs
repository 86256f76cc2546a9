use std::fmt;

use crate::error::{Error, Result};
use crate::observables::{SingularityKind, SingularityVerdict, Thresholds};

use super::evolution::{run_evolution, RunConfig, Scheme};
use super::initial::InitialSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    pub j: usize,
    pub dt: f64,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub thresholds: Thresholds,
    /// Time after which an unclassified run is inconclusive.
    pub t_max: f64,
}

impl BisectionConfig {
    pub fn new(j: usize, dt: f64, bracket: (f64, f64), tol: f64) -> Self {
        Self {
            j,
            dt,
            bracket,
            tol,
            thresholds: Thresholds::default(),
            t_max: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub r: f64,
    pub verdict: SingularityVerdict,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r = {:.10}: {} at t = {:.6}",
            self.r, self.verdict.kind, self.verdict.time
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionResult {
    pub r_lo: f64,
    pub r_hi: f64,
    /// Every classified tube radius in evaluation order.
    pub candidates: Vec<Candidate>,
    /// Bracket after each iteration.
    pub log: Vec<(f64, f64)>,
}

impl BisectionResult {
    pub fn center(&self) -> f64 {
        0.5 * (self.r_lo + self.r_hi)
    }

    pub fn width(&self) -> f64 {
        self.r_hi - self.r_lo
    }
}

fn classify(cfg: &BisectionConfig, r: f64) -> Result<Candidate> {
    let mut run = RunConfig::new(
        cfg.j,
        cfg.dt,
        cfg.t_max,
        Scheme::P,
        InitialSpec::Torus { r },
    );
    run.thresholds = cfg.thresholds;
    run.record_series = false;
    let res = run_evolution(&run)?;
    match res.verdict.kind {
        SingularityKind::None => Err(Error::Inconclusive {
            r,
            time: res.final_time,
        }),
        _ => Ok(Candidate {
            r,
            verdict: res.verdict,
        }),
    }
}

/// Bisection on the tube radius `r` of the torus with major radius one,
/// separating tori that shrink to a circle from tori whose hole closes.
pub fn bisect_critical_radius(cfg: &BisectionConfig) -> Result<BisectionResult> {
    let (mut lo, mut hi) = cfg.bracket;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::invalid(format!(
            "bracket must satisfy 0 < lo < hi < 1, got [{lo}, {hi}]"
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    let (a, b) = rayon::join(|| classify(cfg, lo), || classify(cfg, hi));
    let (a, b) = (a?, b?);
    let invalid = |c: &Candidate, want: SingularityKind| Error::InvalidBracket {
        lo,
        hi,
        verdict: format!("expected {want} at r = {}, got {}", c.r, c.verdict.kind),
    };
    if a.verdict.kind != SingularityKind::ShrinksToCircle {
        return Err(invalid(&a, SingularityKind::ShrinksToCircle));
    }
    if b.verdict.kind != SingularityKind::HoleCloses {
        return Err(invalid(&b, SingularityKind::HoleCloses));
    }
    let mut result = BisectionResult {
        r_lo: lo,
        r_hi: hi,
        candidates: vec![a, b],
        log: vec![(lo, hi)],
    };
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        let c = classify(cfg, mid)?;
        match c.verdict.kind {
            SingularityKind::ShrinksToCircle => lo = mid,
            SingularityKind::HoleCloses => hi = mid,
            other => {
                return Err(Error::InvalidBracket {
                    lo,
                    hi,
                    verdict: format!("unexpected {other} at r = {mid}"),
                })
            }
        }
        result.candidates.push(c);
        result.log.push((lo, hi));
    }
    result.r_lo = lo;
    result.r_hi = hi;
    Ok(result)
}
