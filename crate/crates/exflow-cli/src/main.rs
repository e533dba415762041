//! `exflow` command line: single evaluations, optimizer runs, parameter
//! sweeps, and the disc-grid explorer, emitting deterministic JSON or CSV.
//!
//! Exit codes: `0` success, `1` usage error, `2` domain error, `3` the
//! requested computation did not converge (results are still printed).
//! Every numeric value is printed with 15 significant digits, so repeated
//! runs with identical flags are byte-identical.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use exflow::flow::{gamma_sweep, lambda_from_region};
use exflow::forms::j_energy;
use exflow::interval::{IntervalUnion, RawIntervals};
use exflow::kernel::xi_for_budget;
use exflow::optimize::{
    alpha_value, centered_seed, exchange_local_search_from, OptimizeParams, OptimizeResult,
};
use exflow::tol::ToleranceConfig;

#[derive(Parser)]
#[command(
    name = "exflow",
    version,
    about = "Green-form energy optimization and exchange flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Tail endpoint xi_t, optimal region (xi_t, 1), and optimal energy alpha_t
    Xi {
        /// Torsion-mass budget in (0, 2/3)
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy, mass, pressure proxy, and flux of a region
    Energy {
        /// Region as JSON: {"intervals": [[a, b], ...]} or bare [[a, b], ...]
        #[arg(long)]
        intervals: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exchange-move local search for the optimal region (JSON output)
    Optimize {
        /// Torsion-mass budget in (0, 2/3)
        #[arg(long)]
        t: f64,
        /// Maximum piece count
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        /// Initial exchange mass (defaults to t/2)
        #[arg(long)]
        step: Option<f64>,
        /// Backtracking factor in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
        /// Optional seed region JSON (defaults to the centered interval of mass t)
        #[arg(long)]
        seed_intervals: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal-flux curve gamma_lambda over a lambda grid (CSV output)
    Sweep {
        /// Number of lambda samples on [-1, 1]
        #[arg(long, default_value_t = 101)]
        lambda_samples: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relaxed ascent on the disc grid: density snapshot plus symmetry report
    Disc {
        /// Torsion-mass budget, between 0 and the grid total (about pi/8)
        #[arg(long)]
        t: f64,
        /// Grid as RINGSxSECTORS, e.g. 32x64 (sectors even)
        #[arg(long, default_value = "32x64")]
        grid: String,
        #[arg(long, default_value_t = 400)]
        max_iters: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Lib(exflow::Error),
}

impl From<exflow::Error> for Failure {
    fn from(e: exflow::Error) -> Self {
        Failure::Lib(e)
    }
}

struct Outcome {
    text: String,
    out: Option<PathBuf>,
    converged: bool,
}

/// 15 significant digits, deterministic, no negative zero.
fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

fn parse_intervals(s: &str) -> Result<IntervalUnion<f64>, Failure> {
    let raw: Vec<[f64; 2]> = match serde_json::from_str::<RawIntervals<f64>>(s) {
        Ok(r) => r.intervals,
        Err(_) => serde_json::from_str::<Vec<[f64; 2]>>(s)
            .map_err(|e| Failure::Usage(format!("cannot parse intervals JSON: {e}")))?,
    };
    let tol = ToleranceConfig::default();
    Ok(IntervalUnion::normalize(&raw, &tol)?)
}

fn intervals_json(u: &IntervalUnion<f64>) -> String {
    let pieces: Vec<String> = u
        .pieces()
        .iter()
        .map(|&[a, b]| format!("[{},{}]", num(a), num(b)))
        .collect();
    format!("[{}]", pieces.join(","))
}

fn cmd_xi(t: f64, format: Format) -> Result<String, Failure> {
    let tol = ToleranceConfig::default();
    let xi = xi_for_budget(t, &tol)?;
    let alpha = alpha_value(t)?;
    let mut s = String::new();
    match format {
        Format::Json => {
            let _ = writeln!(
                s,
                "{{\"t\":{},\"xi\":{},\"region\":[{},{}],\"alpha\":{}}}",
                num(t),
                num(xi),
                num(xi),
                num(1.0),
                num(alpha)
            );
        }
        Format::Csv => {
            let _ = writeln!(s, "t,xi,region_left,region_right,alpha");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                num(t),
                num(xi),
                num(xi),
                num(1.0),
                num(alpha)
            );
        }
    }
    Ok(s)
}

fn cmd_energy(intervals: &str, format: Format) -> Result<String, Failure> {
    let region = parse_intervals(intervals)?;
    let j = j_energy(&region);
    let mass = region.psi_mass();
    let lambda = lambda_from_region(&region);
    let flux = exflow::flow::flux(&region);
    let mut s = String::new();
    match format {
        Format::Json => {
            let _ = writeln!(
                s,
                "{{\"intervals\":{},\"j\":{},\"mass\":{},\"lambda\":{},\"flux\":{}}}",
                intervals_json(&region),
                num(j),
                num(mass),
                num(lambda),
                num(flux)
            );
        }
        Format::Csv => {
            let _ = writeln!(s, "j,mass,lambda,flux");
            let _ = writeln!(s, "{},{},{},{}", num(j), num(mass), num(lambda), num(flux));
        }
    }
    Ok(s)
}

fn optimize_json(t: f64, res: &OptimizeResult<f64>) -> String {
    format!(
        "{{\"intervals\":{},\"t\":{},\"energy\":{},\"mass\":{},\"iterations\":{},\"converged\":{}}}\n",
        intervals_json(&res.config),
        num(t),
        num(res.energy),
        num(res.mass),
        res.iterations,
        res.converged
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    t: f64,
    m: usize,
    max_iters: usize,
    step: Option<f64>,
    shrink: f64,
    seed: Option<&str>,
    format: Format,
) -> Result<(String, bool), Failure> {
    if format == Format::Csv {
        return Err(Failure::Usage(
            "optimize emits the result as JSON; csv is not supported".into(),
        ));
    }
    let mut params = OptimizeParams::new(t, m);
    params.max_iters = max_iters;
    params.shrink = shrink;
    if let Some(step) = step {
        params.step = step;
    }
    let seed = match seed {
        Some(js) => parse_intervals(js)?,
        None => centered_seed(t, &params.tol)?,
    };
    let res = exchange_local_search_from(seed, &params)?;
    Ok((optimize_json(t, &res), res.converged))
}

fn cmd_sweep(samples: usize, format: Format) -> Result<String, Failure> {
    let rows = gamma_sweep::<f64>(samples)?;
    let mut s = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(s, "lambda,xi,gamma_lambda,region_left,region_right");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    num(r.lambda),
                    num(r.xi),
                    num(r.gamma_lambda),
                    num(r.region[0]),
                    num(r.region[1])
                );
            }
        }
        Format::Json => {
            let body: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{{\"lambda\":{},\"xi\":{},\"gamma_lambda\":{},\"region\":[{},{}]}}",
                        num(r.lambda),
                        num(r.xi),
                        num(r.gamma_lambda),
                        num(r.region[0]),
                        num(r.region[1])
                    )
                })
                .collect();
            let _ = writeln!(s, "{{\"rows\":[{}]}}", body.join(","));
        }
    }
    Ok(s)
}

fn parse_grid(text: &str) -> Result<(usize, usize), Failure> {
    let mut it = text.split('x');
    let bad = || Failure::Usage(format!("grid must look like 32x64, got {text}"));
    let n_r = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let n_t = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((n_r, n_t))
}

fn cmd_disc(
    t: f64,
    grid_spec: &str,
    max_iters: usize,
    format: Format,
) -> Result<(String, bool), Failure> {
    let (n_r, n_t) = parse_grid(grid_spec)?;
    let grid = exflow::disc::PolarGrid::<f64>::new(n_r, n_t)?;
    let out = exflow::disc::ascent_disc(&grid, t, max_iters)?;
    let mut s = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(s, "# energy = {}", num(out.energy));
            let _ = writeln!(s, "# deviation = {}", num(out.deviation));
            let _ = writeln!(s, "# direction_sector = {}", out.direction.sector);
            let _ = writeln!(s, "# iterations = {}", out.iterations);
            let _ = writeln!(s, "# converged = {}", out.converged);
            let _ = writeln!(s, "ring,sector,value");
            for (i, &v) in out.density.values().iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", i / n_t, i % n_t, num(v));
            }
        }
        Format::Json => {
            let density: Vec<String> = out
                .density
                .values()
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    format!(
                        "{{\"ring\":{},\"sector\":{},\"value\":{}}}",
                        i / n_t,
                        i % n_t,
                        num(v)
                    )
                })
                .collect();
            let _ = writeln!(
                s,
                "{{\"energy\":{},\"deviation\":{},\"direction_sector\":{},\"iterations\":{},\"converged\":{},\"density\":[{}]}}",
                num(out.energy),
                num(out.deviation),
                out.direction.sector,
                out.iterations,
                out.converged,
                density.join(",")
            );
        }
    }
    Ok((s, out.converged))
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let (text, out, converged) = match cli.command {
        Command::Xi { t, format, out } => (cmd_xi(t, format)?, out, true),
        Command::Energy {
            intervals,
            format,
            out,
        } => (cmd_energy(&intervals, format)?, out, true),
        Command::Optimize {
            t,
            m,
            max_iters,
            step,
            shrink,
            seed_intervals,
            format,
            out,
        } => {
            let (text, converged) = cmd_optimize(
                t,
                m,
                max_iters,
                step,
                shrink,
                seed_intervals.as_deref(),
                format,
            )?;
            (text, out, converged)
        }
        Command::Sweep {
            lambda_samples,
            format,
            out,
        } => (cmd_sweep(lambda_samples, format)?, out, true),
        Command::Disc {
            t,
            grid,
            max_iters,
            format,
            out,
        } => {
            let (text, converged) = cmd_disc(t, &grid, max_iters, format)?;
            (text, out, converged)
        }
    };
    Ok(Outcome {
        text,
        out,
        converged,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            if let Some(path) = outcome.out {
                if let Err(e) = std::fs::write(&path, outcome.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{}", outcome.text);
            }
            if outcome.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                exflow::Error::NonConvergence(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
