//! Initial data, the evolution driver, convergence studies and the
//! critical-radius bisection.

mod bisection;
mod convergence;
mod evolution;
mod initial;

pub use bisection::{bisect_critical_radius, BisectionConfig, BisectionResult, Candidate};
pub use convergence::{run_convergence, ConvergenceCase, ConvergenceRow, ConvergenceTable};
pub use evolution::{
    export_surface, run_evolution, run_evolution_from, run_evolution_observed, EvolutionResult,
    RunConfig, Scheme, Snapshot, StabilityLog,
};
pub use initial::{initial_curve, InitialSpec};
