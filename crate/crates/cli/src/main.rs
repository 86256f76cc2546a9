use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use axiflow::experiments::{
    bisect_critical_radius, export_surface, run_convergence, run_evolution, BisectionConfig,
    ConvergenceCase, InitialSpec, RunConfig, Scheme,
};
use axiflow::io::{load_curve, save_curve};
use axiflow::observables::{measure, Thresholds};
use axiflow::selfshrinker::{circle, goodness, solve_angenent};
use axiflow::{Error, Grid, Result};

#[derive(Parser)]
#[command(
    name = "axiflow",
    version,
    about = "Axisymmetric mean curvature flow of generating curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an initial curve and write the time series and snapshots.
    Evolve(EvolveArgs),
    /// Convergence study against an exact solution with dt = h^2.
    Converge(ConvergeArgs),
    /// Compute the discrete Angenent torus.
    Angenent(AngenentArgs),
    /// Bisect the critical tube radius of the unit torus.
    #[command(name = "bisect-r0")]
    BisectR0(BisectArgs),
    /// Self-similarity goodness of a curve snapshot.
    Goodness(GoodnessArgs),
    /// Write the surface of revolution of a curve snapshot as OBJ.
    #[command(name = "export-surface")]
    ExportSurface(ExportArgs),
}

#[derive(Args, Clone)]
struct ThresholdArgs {
    /// Distance to the axis that counts as touching it.
    #[arg(long = "eps-axis", default_value_t = 1e-3)]
    eps_axis: f64,
    /// Diameter below which a curve counts as vanished.
    #[arg(long = "eps-diam", default_value_t = 1e-2)]
    eps_diam: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Thresholds {
        Thresholds {
            eps_axis: self.eps_axis,
            eps_diam: self.eps_diam,
        }
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long = "J")]
    j: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long = "T")]
    t_final: f64,
    #[arg(long, default_value = "p", value_parser = parse_scheme)]
    scheme: Scheme,
    /// torus:r=R | manufactured-torus | sphere | disc | dumbbell | spiral | file:PATH
    #[arg(long, value_parser = parse_initial)]
    initial: InitialSpec,
    /// Add the right-hand side that makes the initial family an exact solution.
    #[arg(long)]
    forcing: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "snapshot-every")]
    snapshot_every: Option<usize>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[arg(long = "track-goodness")]
    track_goodness: bool,
    /// Keep going after a singularity has been detected.
    #[arg(long = "no-stop")]
    no_stop: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    ManufacturedTorus,
    Sphere,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, default_value = "p", value_parser = parse_scheme)]
    scheme: Scheme,
    #[arg(long = "case", value_enum, default_value = "manufactured-torus")]
    case: CaseArg,
    /// Comma-separated element counts.
    #[arg(long = "J", value_delimiter = ',', default_values_t = [32, 64, 128])]
    js: Vec<usize>,
    /// Directory for convergence.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AngenentArgs {
    #[arg(long = "J", default_value_t = 1024)]
    j: usize,
    #[arg(long = "T0", default_value_t = 1.0)]
    t0: f64,
    /// Initial circle as RADIUS,CENTER.
    #[arg(long = "init-circle", default_value = "0.6,2", value_parser = parse_pair)]
    init_circle: (f64, f64),
    /// Directory for angenent.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BisectArgs {
    #[arg(long = "J", default_value_t = 256)]
    j: usize,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    /// Initial bracket as LO,HI.
    #[arg(long, default_value = "0.5,0.7", value_parser = parse_pair)]
    bracket: (f64, f64),
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Horizon after which an unclassified run is inconclusive.
    #[arg(long = "T", default_value_t = 0.5)]
    t_max: f64,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Directory for bisection.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GoodnessArgs {
    /// Curve snapshot CSV.
    #[arg(long)]
    curve: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    /// Curve snapshot CSV.
    #[arg(long)]
    curve: PathBuf,
    #[arg(long = "n-phi", default_value_t = 64)]
    n_phi: usize,
    /// OBJ file to write.
    #[arg(long)]
    out: PathBuf,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_initial(s: &str) -> std::result::Result<InitialSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected A,B, got `{s}`"))?;
    let a = a
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse `{a}`"))?;
    let b = b
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse `{b}`"))?;
    Ok((a, b))
}

fn evolve(args: EvolveArgs) -> Result<()> {
    let mut cfg = RunConfig::new(args.j, args.dt, args.t_final, args.scheme, args.initial);
    cfg.forcing = args.forcing;
    cfg.snapshot_every = args.snapshot_every;
    cfg.thresholds = args.thresholds.thresholds();
    cfg.track_goodness = args.track_goodness;
    cfg.stop_at_singularity = !args.no_stop;
    cfg.out_dir = Some(args.out.clone());
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let res = run_evolution(&cfg)?;
    println!(
        "{} steps to t = {:.6} in {:.2?}; verdict: {}",
        res.steps, res.final_time, res.wall_clock, res.verdict.kind
    );
    if let Some(log) = res.stability {
        println!(
            "energy inequality: {} steps checked, {} violations",
            log.steps_checked, log.violations
        );
    }
    println!("output written to {}", args.out.display());
    Ok(())
}

fn converge(args: ConvergeArgs) -> Result<()> {
    let case = match args.case {
        CaseArg::ManufacturedTorus => ConvergenceCase::ManufacturedTorus,
        CaseArg::Sphere => ConvergenceCase::Sphere,
    };
    let table = run_convergence(args.scheme, case, &args.js)?;
    print!("{table}");
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("convergence.csv"), table.to_csv())?;
    }
    Ok(())
}

fn angenent(args: AngenentArgs) -> Result<()> {
    let grid = Grid::closed(args.j)?;
    let (radius, center) = args.init_circle;
    if !(radius > 0.0 && center > radius) {
        return Err(Error::invalid(format!(
            "initial circle must stay off the axis, got radius {radius} about {center}"
        )));
    }
    let (y, report) = solve_angenent(grid, args.t0, &circle(grid, radius, center))?;
    let m = measure(&y);
    let g = goodness(&y)?;
    println!("{report}");
    println!("F      = {:.10}", m.f);
    println!("V      = {:.8}", m.v);
    println!("A      = {:.8}", m.a);
    println!("min x1 = {:.8}", m.min_x1);
    println!("max x1 = {:.8}", m.max_x1);
    println!("max x2 = {:.8}", m.max_x2);
    println!("G      = {:.3e}", g.g);
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        save_curve(dir.join("angenent.csv"), &y)?;
    }
    Ok(())
}

fn bisect(args: BisectArgs) -> Result<()> {
    let mut cfg = BisectionConfig::new(args.j, args.dt, args.bracket, args.tol);
    cfg.thresholds = args.thresholds.thresholds();
    cfg.t_max = args.t_max;
    let res = bisect_critical_radius(&cfg)?;
    for c in &res.candidates {
        println!("{c}");
    }
    println!("critical radius in [{:.8}, {:.8}]", res.r_lo, res.r_hi);
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        let mut csv = String::from("r,verdict,t\n");
        for c in &res.candidates {
            csv += &format!("{:.16e},{},{:.16e}\n", c.r, c.verdict.kind, c.verdict.time);
        }
        std::fs::write(dir.join("bisection.csv"), csv)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(a) => evolve(a),
        Command::Converge(a) => converge(a),
        Command::Angenent(a) => angenent(a),
        Command::BisectR0(a) => bisect(a),
        Command::Goodness(a) => {
            let g = goodness(&load_curve(&a.curve)?)?;
            println!("G = {:.6e}", g.g);
            match g.alpha_star {
                Some(alpha) => println!("alpha = {alpha:.10}"),
                None => println!("alpha unbounded"),
            }
            Ok(())
        }
        Command::ExportSurface(a) => {
            let mesh = export_surface(&load_curve(&a.curve)?, a.n_phi, &a.out)?;
            println!(
                "{} vertices, {} triangles written to {}",
                mesh.vertices.len(),
                mesh.triangles.len(),
                a.out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
