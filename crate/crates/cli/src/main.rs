use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dispersia_cli::commands::{self, CorrectionArg, Point, SideArg};
use dispersia_cli::grid::Grid;
use dispersia_cli::problem::{ProblemSpec, Stats};
use dispersia_cli::{svg, Error, Result};

#[derive(Parser)]
#[command(name = "dispersia", version, about = "Finite-blocklength rate regions and dispersion tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file (JSON or TOML)
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    /// dsbs, paper-a01, paper-fig-angle or paper-mac-b01
    #[arg(long)]
    preset: Option<String>,
    /// DSBS crossover for --preset dsbs
    #[arg(long, requires = "preset")]
    zeta: Option<f64>,
}

#[derive(Args)]
struct OutArgs {
    /// CSV destination; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG plot
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace the (n, ε) region boundary as R2 over an R1 grid
    Region {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        #[arg(long, value_enum, default_value = "none")]
        correction: CorrectionArg,
        /// R1 grid as start:stop:count
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Local dispersion F(θ, ε) at a boundary point
    LocalDisp {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value = "lower-corner")]
        point: Point,
        /// Distance from the corner for the vertical and horizontal faces
        #[arg(long, default_value_t = 0.1)]
        offset: f64,
        #[arg(long, requires = "r2", allow_hyphen_values = true)]
        r1: Option<f64>,
        #[arg(long, requires = "r1", allow_hyphen_values = true)]
        r2: Option<f64>,
        /// Approach angles as start:stop:count (pi allowed, e.g. 3pi/4)
        #[arg(long, allow_hyphen_values = true)]
        theta_grid: Option<Grid>,
        #[arg(long, num_args = 1.., default_values_t = [1e-3, 1e-2, 1e-1])]
        eps: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dispersion and error-exponent blocklength estimates along R = (1+η)H
    Blocklength {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value = "0.02:0.5:25", allow_hyphen_values = true)]
        eta_grid: Grid,
        #[arg(long, num_args = 1.., default_values_t = [1e-3])]
        eps: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random-binning Monte Carlo error estimate
    Simulate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary curves of {z : P(Z ≤ z) = 1−ε} scaled by 1/√n
    SvSet {
        /// 2x2 covariance `a,b;c,d`, or sv-left / sv-right
        #[arg(long)]
        v: String,
        #[arg(long, num_args = 1.., default_values_t = [0.05])]
        eps: Vec<f64>,
        #[arg(long, num_args = 1.., default_values_t = [1])]
        n: Vec<u64>,
        #[arg(long, default_value_t = 401)]
        count: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

impl ProblemArgs {
    fn stats(&self) -> Result<Stats> {
        let spec = match (&self.spec, &self.preset) {
            (Some(p), None) => ProblemSpec::load(p)?,
            (None, Some(name)) => ProblemSpec { zeta: self.zeta, ..ProblemSpec::preset(name) },
            _ => return Err(Error::Invalid("give exactly one of --spec and --preset".into())),
        };
        spec.resolve()?.stats()
    }
}

fn maybe_svg(path: Option<&Path>, series: &[Vec<(f64, f64)>], x: &str, y: &str) -> Result<()> {
    match path {
        Some(p) => svg::save(p, &svg::polylines(series, x, y)),
        None => Ok(()),
    }
}

fn set_threads() -> Result<()> {
    let Ok(v) = std::env::var("DISPERSIA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Invalid(format!("DISPERSIA_THREADS=`{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    set_threads()?;
    match cli.cmd {
        Cmd::Region { problem, n, eps, side, correction, grid, out } => {
            let stats = problem.stats()?;
            let poly = commands::region(&stats, n, eps, side, correction, grid)?;
            if poly.small_n_warning {
                eprintln!("warning: n = {n} is small; third-order terms may dominate");
            }
            commands::region_table(&poly).save(out.out.as_deref())?;
            maybe_svg(out.svg.as_deref(), std::slice::from_ref(&poly.points), "R1", "R2")
        }
        Cmd::LocalDisp { problem, point, offset, r1, r2, theta_grid, eps, out } => {
            let stats = problem.stats()?;
            let rates = r1.zip(r2);
            let t = commands::local_disp(&stats, point, rates, offset, theta_grid, &eps)?;
            t.save(out.out.as_deref())?;
            let series: Vec<Vec<(f64, f64)>> = eps
                .iter()
                .map(|&e| {
                    t.rows
                        .iter()
                        .filter(|r| r[1] == Some(e))
                        .map(|r| (r[0].unwrap_or(f64::NAN), r[2].unwrap_or(f64::NAN)))
                        .collect()
                })
                .collect();
            maybe_svg(out.svg.as_deref(), &series, "theta", "F")
        }
        Cmd::Blocklength { problem, eta_grid, eps, out } => {
            let stats = problem.stats()?;
            let t = commands::blocklength(&stats, eta_grid, &eps)?;
            t.save(out.out.as_deref())?;
            let col = |k: usize| -> Vec<(f64, f64)> {
                t.rows.iter().filter_map(|r| Some((r[0]?, r[k]?))).collect()
            };
            maybe_svg(out.svg.as_deref(), &[col(2), col(3)], "eta", "n")
        }
        Cmd::Simulate { problem, n, r1, r2, trials, seed, out } => {
            let stats = problem.stats()?;
            commands::simulate(&stats, n, r1, r2, trials, seed)?.save(out.as_deref())
        }
        Cmd::SvSet { v, eps, n, count, out } => {
            let cov = commands::parse_cov2(&v)?;
            let t = commands::sv_set(&cov, &eps, &n, count)?;
            t.save(out.out.as_deref())?;
            let mut series = Vec::new();
            for &e in &eps {
                for &m in &n {
                    series.push(
                        t.rows
                            .iter()
                            .filter(|r| r[0] == Some(e) && r[1] == Some(m as f64))
                            .map(|r| (r[2].unwrap_or(f64::NAN), r[3].unwrap_or(f64::NAN)))
                            .collect(),
                    );
                }
            }
            maybe_svg(out.svg.as_deref(), &series, "z1", "z2")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
